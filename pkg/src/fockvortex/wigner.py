"""Two-mode Wigner functions, phase-space quadrature, negativity volume.

Conventions
-----------
Wigner phase-space coordinates are scaled so the single-mode number-state
function is W_n(x, p) = (2/pi) (-1)^n L_n(4 q^2) e^{-2 q^2} with
q^2 = x^2 + p^2 (vacuum peak 2/pi, vacuum variance 1/4).  The position
field psi(x, y) of the quadrature module uses the Hermite-function scale
(vacuum variance 1/2), so the two charts differ by a factor sqrt(2) in
coordinates and 2 in density; ``position_marginal`` applies that bridge
explicitly and returns the Born-rule density |psi(x, y)|^2 in field
coordinates.

The general |n><m| kernels carry the cross terms that a pure two-mode
state needs.  A diagonal double-sum closed form for this state family
keeps only squared coefficient weights; it is implemented as a
comparison view (``wigner_diagonal_form``) and its pointwise difference
from the exact Wigner function is a reported diagnostic, not an
assertion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import lgamma
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.special

from .config import BOX_WIDTH_SCALE, GH_ORDER, MAX_REFINEMENTS, TOL
from .errors import InvalidParameterError, InvariantError, NonConvergenceError
from .states import DensityMatrix, SqueezeParams, TwoModeState

_TWO_OVER_PI = 2.0 / math.pi
_SQRT2 = math.sqrt(2.0)


class PhasePoint(NamedTuple):
    x: float
    p_x: float
    y: float
    p_y: float


# ---------------------------------------------------------------------------
# Fock-basis kernels
# ---------------------------------------------------------------------------

def _laguerre_rows(n_max: int, alpha: int, u: np.ndarray) -> np.ndarray:
    """Associated Laguerre table L_0^a .. L_nmax^a at points u (recurrence)."""
    rows = np.empty((n_max + 1,) + u.shape)
    rows[0] = 1.0
    if n_max >= 1:
        rows[1] = 1.0 + alpha - u
    for n in range(1, n_max):
        rows[n + 1] = ((2 * n + 1 + alpha - u) * rows[n] - (n + alpha) * rows[n - 1]) / (n + 1)
    return rows


def _kernel_polys(dim: int, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Kernel polynomial parts K[n, m]: W_{|n><m|} = K[n, m] * e^{-2 q^2}.

    For n >= m:  K = (2/pi) (-1)^m sqrt(m!/n!) (2(x - i p))^{n-m} L_m^{n-m}(4 q^2),
    and K[m, n] is its conjugate (Hermitian symmetry).
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    u = 4.0 * (x * x + p * p)
    lg = [lgamma(k + 1) for k in range(dim)]
    out = np.empty((dim, dim) + x.shape, dtype=complex)
    z = 2.0 * (x - 1j * p)
    zpow = np.ones_like(z)
    for a in range(dim):  # a = n - m
        if a > 0:
            zpow = zpow * z
        lag = _laguerre_rows(dim - 1 - a, a, u)
        for m in range(dim - a):
            pref = _TWO_OVER_PI * (-1.0) ** m * math.exp(0.5 * (lg[m] - lg[m + a]))
            out[m + a, m] = pref * zpow * lag[m]
            if a > 0:
                out[m, m + a] = np.conj(out[m + a, m])
    return out


def wigner_fock_diagonal(n: int, q_squared: Union[float, np.ndarray]):
    """W of |n><n| as a function of q^2 = x^2 + p^2."""
    if n < 0:
        raise InvalidParameterError(f"order must be >= 0, got {n}")
    q2 = np.asarray(q_squared, dtype=float)
    lag = _laguerre_rows(n, 0, 4.0 * q2)[n]
    val = _TWO_OVER_PI * (-1.0) ** n * lag * np.exp(-2.0 * q2)
    return float(val) if np.isscalar(q_squared) else val


def wigner_fock_cross(n: int, m: int, x: float, p: float) -> complex:
    """Wigner transform of |n><m| at (x, p); reduces to the diagonal at n = m."""
    if n < 0 or m < 0:
        raise InvalidParameterError("orders must be >= 0")
    dim = max(n, m) + 1
    poly = _kernel_polys(dim, np.atleast_1d(float(x)), np.atleast_1d(float(p)))[n, m, 0]
    return complex(poly * math.exp(-2.0 * (x * x + p * p)))


# ---------------------------------------------------------------------------
# Wigner function of a state
# ---------------------------------------------------------------------------

def _pair_matrix(state_or_rho) -> Tuple[np.ndarray, int]:
    """rho regrouped as rho_p[(ket_a, bra_a), (ket_b, bra_b)], plus per-mode dim."""
    if isinstance(state_or_rho, TwoModeState):
        dense = state_or_rho.to_dense()
        m = dense.shape[0]
        rho_p = np.einsum("ab,cd->acbd", dense, dense.conj()).reshape(m * m, m * m)
        return rho_p, m
    if isinstance(state_or_rho, DensityMatrix):
        m = state_or_rho.dimension + 1
        rho_p = state_or_rho.tensor.transpose(0, 2, 1, 3).reshape(m * m, m * m)
        return rho_p, m
    raise InvalidParameterError(f"expected TwoModeState or DensityMatrix, got {type(state_or_rho)!r}")


def wigner_state(state_or_rho, point) -> Union[float, np.ndarray]:
    """W(x, p_x, y, p_y); accepts scalar coordinates or broadcastable arrays."""
    x, px, y, py = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in point))
    scalar = x.ndim == 0
    shape = x.shape
    rho_p, m = _pair_matrix(state_or_rho)
    xf, pxf, yf, pyf = (c.ravel() for c in (x, px, y, py))
    vals = np.empty(xf.size)
    chunk = max(256, (1 << 22) // (m * m))
    worst_imag = 0.0
    for s in range(0, xf.size, chunk):
        sl = slice(s, min(s + chunk, xf.size))
        ka = _kernel_polys(m, xf[sl], pxf[sl]).reshape(m * m, -1)
        kb = _kernel_polys(m, yf[sl], pyf[sl]).reshape(m * m, -1)
        w = np.einsum("uP,uv,vP->P", ka, rho_p, kb, optimize=True)
        gauss = np.exp(-2.0 * (xf[sl] ** 2 + pxf[sl] ** 2 + yf[sl] ** 2 + pyf[sl] ** 2))
        worst_imag = max(worst_imag, float(np.max(np.abs(w.imag * gauss), initial=0.0)))
        vals[sl] = w.real * gauss
    if worst_imag > TOL.imag_residue:
        raise InvariantError(f"Wigner value has imaginary residue {worst_imag:.3e}")
    return float(vals[0]) if scalar else vals.reshape(shape)


def position_marginal(state_or_rho, x: float, y: float, order: int = 32) -> float:
    """Born-rule marginal of W over (p_x, p_y), as a density in field coordinates.

    The result equals |psi(x, y)|^2 of the quadrature module: the Wigner
    chart is evaluated at (x/sqrt(2), y/sqrt(2)) and the density rescaled
    by the Jacobian 1/2 of the chart change.
    """
    rho_p, m = _pair_matrix(state_or_rho)
    u, w = scipy.special.roots_hermite(order)
    q, om = u / _SQRT2, w / _SQRT2
    xw, yw = x / _SQRT2, y / _SQRT2
    ka = _kernel_polys(m, np.full(order, xw), q).reshape(m * m, order) @ om
    kb = _kernel_polys(m, np.full(order, yw), q).reshape(m * m, order) @ om
    val = ka @ rho_p @ kb * math.exp(-2.0 * (xw * xw + yw * yw))
    if abs(val.imag) > TOL.imag_residue:
        raise InvariantError(f"marginal has imaginary residue {abs(val.imag):.3e}")
    return 0.5 * float(val.real)


# ---------------------------------------------------------------------------
# Diagonal double-sum closed form (comparison view)
# ---------------------------------------------------------------------------

def _diagonal_form_weights(params: SqueezeParams) -> dict:
    """Mixture weights per (j, m): tanh(r)^{2j} (j!)^2 / 4^j * sum |C_{k,l}|^2.

    A j-independent power-of-2 denominator or an unsigned 0..j range for
    m would both be wrong here: the per-pair binomial algebra fixes the
    denominator to 4^j, and the signed range m = l - k in -j..j preserves
    the state's mode-exchange symmetry.  Constants are irrelevant: the
    total is normalized numerically.
    """
    t = math.tanh(params.r)
    lg = [lgamma(k + 1) for k in range(2 * params.n_max + 2)]
    weights: dict = {}
    for j in range(params.n_max + 1):
        base = t ** (2 * j) * math.exp(2.0 * lg[j] - j * math.log(4.0))
        for k in range(j + 1):
            for l in range(j + 1):
                c = math.exp(
                    0.5 * (lg[j - l + k] + lg[j + l - k])
                    - lg[k] - lg[j - k] - lg[l] - lg[j - l]
                )
                m = l - k
                weights[(j, m)] = weights.get((j, m), 0.0) + base * c * c
    total = math.fsum(weights.values())
    return {jm: v / total for jm, v in weights.items()}


def wigner_diagonal_form(params: SqueezeParams, point) -> Union[float, np.ndarray]:
    """Diagonal closed form in the rotating-pair variables Q0, Q1.

    Each (j, m) term is a product of circular-mode number-state Wigner
    functions with arguments 8(Q0 +/- Q1); the argument scale (8, not 4)
    is fixed by the same chart bridge that makes the N = 0 case reproduce
    the vacuum exactly.  Intended to approach ``wigner_state`` of the
    exact beam-splitter output; the difference is a diagnostic, see
    ``diagonal_form_deviation``.
    """
    x, px, y, py = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in point))
    scalar = x.ndim == 0
    q0 = 0.25 * (x * x + y * y + px * px + py * py)
    q1 = 0.5 * (x * py - y * px)
    up = 8.0 * (q0 + q1)
    um = 8.0 * (q0 - q1)
    nmax = 2 * params.n_max
    lp = _laguerre_rows(nmax, 0, up)
    lm = _laguerre_rows(nmax, 0, um)
    out = np.zeros_like(np.asarray(q0))
    for (j, m), w in sorted(_diagonal_form_weights(params).items()):
        # (-1)^{j+m} (-1)^{j-m} = (-1)^{2j} = 1: the sign prints as +1 identically
        out = out + w * lp[j + m] * lm[j - m]
    vals = (4.0 / math.pi ** 2) * out * np.exp(-8.0 * np.asarray(q0))
    return float(vals) if scalar else vals


def diagonal_form_deviation(
    params: SqueezeParams, lattice_points: int = 17, half_width: float = 2.0
) -> dict:
    """Pointwise gap between the diagonal closed form and the exact W.

    Sampled on a lattice_points^4 cube; reported, never asserted - the
    closed form drops the interference terms a pure state carries.
    """
    from .beamsplitter import apply_beam_splitter
    from .states import make_tmss

    axis = np.linspace(-half_width, half_width, lattice_points)
    gx, gpx, gy, gpy = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    state = apply_beam_splitter(make_tmss(params))
    exact = wigner_state(state, (gx, gpx, gy, gpy))
    diagonal = wigner_diagonal_form(params, (gx, gpx, gy, gpy))
    return {
        "max_abs_diff": float(np.max(np.abs(diagonal - exact))),
        "max_abs_wigner": float(np.max(np.abs(exact))),
        "lattice_points": lattice_points,
        "half_width": half_width,
    }


# ---------------------------------------------------------------------------
# Negativity volume
# ---------------------------------------------------------------------------

_SCHEMES = ("tensor-gauss-hermite", "uniform-box")


@dataclass(frozen=True)
class WignerRule:
    scheme: str = "tensor-gauss-hermite"
    order: int = GH_ORDER
    box_half_width: Optional[float] = None

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise InvalidParameterError(f"scheme must be one of {_SCHEMES}, got {self.scheme!r}")
        if self.order < 2:
            raise InvalidParameterError(f"order must be >= 2, got {self.order}")


@dataclass(frozen=True)
class WignerGrid:
    """Per-axis nodes and weights; the Gaussian envelope e^{-2q^2} is folded
    into the weights, so integrands are evaluated as kernel polynomials."""

    nodes: np.ndarray
    weights: np.ndarray
    rule: WignerRule

    def gaussian_check(self) -> float:
        """|sum(weights) - integral of e^{-2 q^2}|; small for a sound rule."""
        return abs(float(self.weights.sum()) - math.sqrt(math.pi / 2.0))

    @property
    def node_count(self) -> int:
        return len(self.nodes) ** 4


def build_wigner_grid(rule: WignerRule, cutoff: int, order: Optional[int] = None) -> WignerGrid:
    o = order if order is not None else rule.order
    if rule.scheme == "tensor-gauss-hermite":
        # scipy's Golub-Welsch/asymptotic solver stays finite at high orders
        # where the numpy recurrence overflows (order >~ 350)
        u, w = scipy.special.roots_hermite(o)
        if not (np.isfinite(u).all() and np.isfinite(w).all()):
            raise NonConvergenceError(
                f"Gauss-Hermite rule of order {o} produced non-finite nodes/weights"
            )
        return WignerGrid(u / _SQRT2, w / _SQRT2, rule)
    h = rule.box_half_width or BOX_WIDTH_SCALE * math.sqrt(2.0 * cutoff + 2.0)
    edges = np.linspace(-h, h, o + 1)
    q = 0.5 * (edges[:-1] + edges[1:])
    return WignerGrid(q, (2.0 * h / o) * np.exp(-2.0 * q * q), rule)


@dataclass
class NegativityResult:
    volume: float
    integral_abs: float
    normalization_check: float
    resolution_history: List[Tuple[int, float]] = field(default_factory=list)
    converged: bool = True
    under_resolved: bool = False

    def to_json_dict(self) -> dict:
        return {
            "volume": self.volume,
            "integral_abs": self.integral_abs,
            "normalization_check": self.normalization_check,
            "resolution_history": [[o, v] for o, v in self.resolution_history],
            "converged": self.converged,
            "under_resolved": self.under_resolved,
        }


def _nv_pass(rho_p: np.ndarray, m: int, grid: WignerGrid) -> Tuple[float, float]:
    """One tensor-quadrature pass: (integral of |W|, integral of W).

    The 4-D lattice is the product of one (x, p) plane per mode sharing the
    same axis rule; W over the lattice is assembled as Re(Ka^T rho_p Kb) in
    row blocks, real-split so only real GEMMs run.
    """
    q, w = grid.nodes, grid.weights
    n1 = len(q)
    xs = np.repeat(q, n1)
    ps = np.tile(q, n1)
    wplane = np.outer(w, w).ravel()
    kern = _kernel_polys(m, xs, ps).reshape(m * m, n1 * n1)
    dmat = rho_p @ kern
    kr, ki = np.ascontiguousarray(kern.real), np.ascontiguousarray(kern.imag)
    dr, di = np.ascontiguousarray(dmat.real), np.ascontiguousarray(dmat.imag)
    npts = n1 * n1
    total_abs = 0.0
    total_w = 0.0
    block = max(32, (1 << 24) // npts)
    for s in range(0, npts, block):
        sl = slice(s, min(s + block, npts))
        rows = kr[:, sl].T @ dr - ki[:, sl].T @ di  # Re(Ka^T D)
        total_w += float(wplane[sl] @ (rows @ wplane))
        total_abs += float(wplane[sl] @ (np.abs(rows) @ wplane))
    return total_abs, total_w


def negativity_volume(
    state_or_rho,
    rule: Optional[WignerRule] = None,
    tol: float = TOL.nv,
    max_refinements: int = MAX_REFINEMENTS,
) -> NegativityResult:
    """NV = (integral of |W| - integral of W) / 2 with order-doubling refinement.

    Refinement stops when successive NV estimates differ by < tol; after
    ``max_refinements`` doublings the best estimate is returned flagged
    non-converged.  The computed integral of W stands in for the exact 1;
    a deviation beyond 10*tol flags the result under-resolved.
    """
    if tol <= 0:
        raise InvalidParameterError(f"tol must be > 0, got {tol}")
    rule = rule or WignerRule()
    rho_p, m = _pair_matrix(state_or_rho)
    cutoff = 2 * (m - 1)
    history: List[Tuple[int, float]] = []
    prev = None
    converged = False
    integral_abs = total_w = 0.0
    order = rule.order
    for _ in range(max_refinements + 1):
        grid = build_wigner_grid(rule, cutoff, order=order)
        integral_abs, total_w = _nv_pass(rho_p, m, grid)
        nv = 0.5 * (integral_abs - total_w)
        history.append((order, nv))
        if prev is not None and abs(nv - prev) < tol:
            converged = True
            break
        prev = nv
        order *= 2
    return NegativityResult(
        volume=history[-1][1],
        integral_abs=integral_abs,
        normalization_check=total_w,
        resolution_history=history,
        converged=converged,
        under_resolved=abs(total_w - 1.0) > 10.0 * tol,
    )


# ---------------------------------------------------------------------------
# 2-D slices
# ---------------------------------------------------------------------------

_COORD_NAMES = ("x", "px", "y", "py")


class WignerSlice:
    """W on a 2-D plane; values[i, j] indexed by (free coord 1, free coord 2)."""

    __slots__ = ("free_names", "fixed", "grid", "values")

    def __init__(self, free_names, fixed, grid, values):
        self.free_names = tuple(free_names)
        self.fixed = dict(fixed)
        self.grid = grid
        self.values = values

    def to_csv(self, path) -> None:
        c1s, c2s = self.grid.x_axis(), self.grid.y_axis()
        lines = [f"{self.free_names[0]},{self.free_names[1]},w"]
        for j, c2 in enumerate(c2s):
            for i, c1 in enumerate(c1s):
                lines.append(f"{float(c1)!r},{float(c2)!r},{float(self.values[i, j])!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def wigner_slice(state_or_rho, plane: dict, grid2d) -> WignerSlice:
    """Evaluate W on the plane that fixes exactly two of (x, px, y, py)."""
    bad = set(plane) - set(_COORD_NAMES)
    if bad:
        raise InvalidParameterError(f"unknown coordinates in plane: {sorted(bad)}")
    if len(plane) != 2:
        raise InvalidParameterError("plane must fix exactly two of x, px, y, py")
    free = [n for n in _COORD_NAMES if n not in plane]
    c1, c2 = np.meshgrid(grid2d.x_axis(), grid2d.y_axis(), indexing="ij")
    coords = {}
    for name in _COORD_NAMES:
        if name in plane:
            coords[name] = np.full_like(c1, float(plane[name]))
        else:
            coords[name] = c1 if name == free[0] else c2
    values = wigner_state(state_or_rho, (coords["x"], coords["px"], coords["y"], coords["py"]))
    return WignerSlice(free, plane, grid2d, values)
