"""Position-representation wavefunctions and phase-winding vortex detection.

The field psi(x, y) of a two-mode state is a Hermite-function expansion;
vortices are integer phase windings of arg(psi) around grid plaquettes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Union

import numpy as np
from scipy import ndimage

from .config import GRID_HALF_WIDTH, GRID_POINTS, TOL
from .errors import GridTooCoarseError, InvalidParameterError
from .states import TwoModeState


def hermite_basis(n_max: int, x: np.ndarray) -> np.ndarray:
    """Table of normalized Hermite functions psi_0..psi_n_max at points x.

    Uses the normalized three-term recurrence
        psi_n = sqrt(2/n) x psi_{n-1} - sqrt((n-1)/n) psi_{n-2}
    which never forms the polynomial and the factorial separately, so it is
    stable to n in the hundreds.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for n in range(2, n_max + 1):
        table[n] = math.sqrt(2.0 / n) * x * table[n - 1] - math.sqrt((n - 1) / n) * table[n - 2]
    return table


def hermite_function(n: int, x: Union[float, np.ndarray]):
    """psi_n(x) = (2^n n! sqrt(pi))^{-1/2} e^{-x^2/2} H_n(x)."""
    if n < 0:
        raise InvalidParameterError(f"order must be >= 0, got {n}")
    scalar = np.isscalar(x)
    out = hermite_basis(n, np.atleast_1d(np.asarray(x, dtype=float)))[n]
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class QuadratureGrid:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n_x: int
    n_y: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise InvalidParameterError("grid bounds must satisfy min < max")
        if self.n_x < 2 or self.n_y < 2:
            raise InvalidParameterError("grid needs at least 2 samples per axis")

    @classmethod
    def square(cls, half_width: float = GRID_HALF_WIDTH, n: int = GRID_POINTS) -> "QuadratureGrid":
        return cls(-half_width, half_width, -half_width, half_width, n, n)

    @classmethod
    def from_spec(cls, spec: str) -> "QuadratureGrid":
        """Parse 'min:max:n' (both axes) or 'xmin:xmax:nx,ymin:ymax:ny'."""
        try:
            parts = spec.split(",")
            if len(parts) == 1:
                lo, hi, n = parts[0].split(":")
                return cls(float(lo), float(hi), float(lo), float(hi), int(n), int(n))
            if len(parts) == 2:
                xlo, xhi, nx = parts[0].split(":")
                ylo, yhi, ny = parts[1].split(":")
                return cls(float(xlo), float(xhi), float(ylo), float(yhi), int(nx), int(ny))
        except (ValueError, InvalidParameterError) as exc:
            raise InvalidParameterError(f"bad grid spec {spec!r}: {exc}") from exc
        raise InvalidParameterError(f"bad grid spec {spec!r}")

    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def y_axis(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.n_y)


class QuadratureField:
    """Complex field psi(x, y) on a rectangular grid; values[i, j] = psi(x_i, y_j)."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: QuadratureGrid, values: np.ndarray):
        if values.shape != (grid.n_x, grid.n_y):
            raise InvalidParameterError(
                f"values shape {values.shape} does not match grid ({grid.n_x}, {grid.n_y})"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("field contains non-finite values")
        self.grid = grid
        self.values = values

    def amplitude(self) -> np.ndarray:
        return np.abs(self.values)

    def phase(self) -> np.ndarray:
        return np.angle(self.values)

    def norm_riemann(self) -> float:
        dx = (self.grid.x_max - self.grid.x_min) / (self.grid.n_x - 1)
        dy = (self.grid.y_max - self.grid.y_min) / (self.grid.n_y - 1)
        return float(np.sum(np.abs(self.values) ** 2) * dx * dy)

    def to_csv(self, path) -> None:
        """Rows ordered y-outer, x-inner; header x,y,re,im,abs,arg."""
        xs, ys = self.grid.x_axis(), self.grid.y_axis()
        lines = ["x,y,re,im,abs,arg"]
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                v = complex(self.values[i, j])
                lines.append(
                    f"{float(x)!r},{float(y)!r},{v.real!r},{v.imag!r},"
                    f"{abs(v)!r},{float(np.angle(v))!r}"
                )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def evaluate_field(state: TwoModeState, grid: QuadratureGrid) -> QuadratureField:
    """psi(x, y) = sum A[n_a, n_b] psi_{n_a}(x) psi_{n_b}(y)."""
    dense = state.to_dense()
    tx = hermite_basis(state.cutoff, grid.x_axis())
    ty = hermite_basis(state.cutoff, grid.y_axis())
    values = np.einsum("ab,ax,by->xy", dense, tx, ty, optimize=True)
    return QuadratureField(grid, values)


@dataclass
class VortexReport:
    vortices: List[Dict]
    total_charge: int
    count: int

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "total_charge": self.total_charge,
            "vortices": self.vortices,
        }


def _wrap(dphi: np.ndarray) -> np.ndarray:
    """Branch-wrapped phase difference in (-pi, pi]."""
    return np.angle(np.exp(1j * dphi))


def count_vortices(field: QuadratureField, amplitude_floor: float = TOL.amplitude_floor) -> VortexReport:
    """Integer phase winding per plaquette, merged into vortices.

    Corners must exceed ``amplitude_floor`` in absolute terms (vortex cores
    legitimately have low amplitude, so no relative thresholding is applied;
    the floor only rejects regions where arg(psi) is numerical noise).
    """
    if not amplitude_floor > 0:
        raise InvalidParameterError("amplitude_floor must be > 0")
    phi = field.phase()
    amp = field.amplitude()
    # counter-clockwise circulation over each plaquette [i,i+1] x [j,j+1]
    s = (
        _wrap(phi[1:, :-1] - phi[:-1, :-1])
        + _wrap(phi[1:, 1:] - phi[1:, :-1])
        + _wrap(phi[:-1, 1:] - phi[1:, 1:])
        + _wrap(phi[:-1, :-1] - phi[:-1, 1:])
    )
    winding = np.rint(s / (2.0 * math.pi)).astype(int)
    valid = (
        (amp[:-1, :-1] > amplitude_floor)
        & (amp[1:, :-1] > amplitude_floor)
        & (amp[:-1, 1:] > amplitude_floor)
        & (amp[1:, 1:] > amplitude_floor)
    )
    winding = np.where(valid, winding, 0)
    if np.any(np.abs(winding) > 1):
        i, j = np.argwhere(np.abs(winding) > 1)[0]
        raise GridTooCoarseError(
            f"plaquette ({i}, {j}) has winding {winding[i, j]}: "
            "refine the grid to resolve the multi-charge cluster"
        )
    xs, ys = field.grid.x_axis(), field.grid.y_axis()
    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    vortices: List[Dict] = []
    eight = np.ones((3, 3), dtype=int)
    for charge in (1, -1):
        labels, nlab = ndimage.label(winding == charge, structure=eight)
        for lab in range(1, nlab + 1):
            ii, jj = np.nonzero(labels == lab)
            vortices.append(
                {
                    "x": float(np.mean(cx[ii])),
                    "y": float(np.mean(cy[jj])),
                    "charge": charge,
                }
            )
    vortices.sort(key=lambda v: (v["x"], v["y"], v["charge"]))
    total = sum(v["charge"] for v in vortices)
    return VortexReport(vortices=vortices, total_charge=total, count=len(vortices))
