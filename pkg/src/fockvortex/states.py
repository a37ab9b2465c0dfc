"""Two-mode Fock-space states and density matrices.

A pure two-mode state is a sparse complex amplitude map over photon-number
pairs (n_a, n_b), capped by a total-photon cutoff.  The photon-number
squeezed input family lives here, together with the outer-product density
matrix and total-photon diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Tuple

import numpy as np

from .config import TOL
from .errors import InvalidParameterError, InvalidStateError


class FockPair(NamedTuple):
    """Photon-number pair |n_a, n_b>."""

    n_a: int
    n_b: int


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing strength r >= 0 and truncation order n_max >= 0."""

    r: float
    n_max: int

    def __post_init__(self):
        if not (self.r >= 0.0) or not math.isfinite(self.r):
            raise InvalidParameterError(f"squeezing parameter must be >= 0, got {self.r}")
        if self.n_max < 0 or int(self.n_max) != self.n_max:
            raise InvalidParameterError(f"truncation order must be an integer >= 0, got {self.n_max}")


class TwoModeState:
    """Normalized pure state over Fock pairs with a total-photon cutoff.

    Amplitudes are stored sparsely; construction validates the key range
    and unit norm (within ``TOL.norm``).
    """

    __slots__ = ("amplitudes", "cutoff")

    def __init__(self, amplitudes: Dict[Tuple[int, int], complex], cutoff: int):
        if cutoff < 0:
            raise InvalidParameterError(f"cutoff must be >= 0, got {cutoff}")
        amps: Dict[FockPair, complex] = {}
        for (na, nb), value in amplitudes.items():
            if na < 0 or nb < 0:
                raise InvalidStateError(f"negative photon number in pair ({na}, {nb})")
            if na + nb > cutoff:
                raise InvalidStateError(
                    f"pair ({na}, {nb}) exceeds total-photon cutoff {cutoff}"
                )
            value = complex(value)
            if value != 0.0:
                amps[FockPair(int(na), int(nb))] = value
        self.amplitudes = amps
        self.cutoff = int(cutoff)
        n = self.norm()
        if abs(n - 1.0) > TOL.norm:
            raise InvalidStateError(f"state not normalized: |<psi|psi> - 1| = {abs(n - 1.0):.3e}")

    def norm(self) -> float:
        return math.fsum(abs(v) ** 2 for v in self.amplitudes.values())

    def amplitude(self, n_a: int, n_b: int) -> complex:
        return self.amplitudes.get(FockPair(n_a, n_b), 0.0 + 0.0j)

    def sorted_items(self) -> List[Tuple[FockPair, complex]]:
        """Amplitudes sorted by (n_a, n_b) for byte-stable output."""
        return sorted(self.amplitudes.items(), key=lambda kv: (kv[0].n_a, kv[0].n_b))

    def to_dense(self) -> np.ndarray:
        """Dense (cutoff+1, cutoff+1) amplitude matrix A[n_a, n_b]."""
        m = self.cutoff + 1
        dense = np.zeros((m, m), dtype=complex)
        for (na, nb), v in self.amplitudes.items():
            dense[na, nb] = v
        return dense

    @classmethod
    def from_dense(cls, dense: np.ndarray, cutoff: int) -> "TwoModeState":
        amps = {}
        idx = np.argwhere(dense != 0.0)
        for na, nb in idx:
            amps[(int(na), int(nb))] = complex(dense[na, nb])
        return cls(amps, cutoff)

    def to_json_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "amplitudes": [
                {"na": p.n_a, "nb": p.n_b, "re": v.real, "im": v.imag}
                for p, v in self.sorted_items()
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "TwoModeState":
        amps = {(e["na"], e["nb"]): complex(e["re"], e["im"]) for e in doc["amplitudes"]}
        return cls(amps, doc["cutoff"])

    def __repr__(self):
        return f"TwoModeState(terms={len(self.amplitudes)}, cutoff={self.cutoff})"


class DensityMatrix:
    """Hermitian operator on the two-mode Fock space.

    Stored as a 4-index tensor t[na, nb, ma, mb] = <na,nb| rho |ma,mb>,
    with per-mode dimension ``dimension + 1`` (``dimension`` is the largest
    representable per-mode photon number).
    """

    __slots__ = ("tensor", "dimension")

    def __init__(self, tensor: np.ndarray, dimension: int, validate: bool = True):
        m = dimension + 1
        tensor = np.asarray(tensor, dtype=complex)
        if tensor.shape != (m, m, m, m):
            raise InvalidStateError(
                f"tensor shape {tensor.shape} does not match per-mode dimension {m}"
            )
        self.tensor = tensor
        self.dimension = int(dimension)
        if validate:
            h = self.hermiticity_residue()
            if h > TOL.hermiticity:
                raise InvalidStateError(f"density matrix not Hermitian: residue {h:.3e}")
            tr = self.trace()
            if abs(tr - 1.0) > TOL.trace:
                raise InvalidStateError(f"density matrix trace {tr} != 1")

    def as_matrix(self) -> np.ndarray:
        """Flattened matrix in the basis index n_a * (d+1) + n_b."""
        m = self.dimension + 1
        return self.tensor.reshape(m * m, m * m)

    def entry(self, ket: Tuple[int, int], bra: Tuple[int, int]) -> complex:
        return complex(self.tensor[ket[0], ket[1], bra[0], bra[1]])

    def trace(self) -> float:
        return float(np.einsum("abab->", self.tensor).real)

    def purity(self) -> float:
        mat = self.as_matrix()
        return float(np.trace(mat @ mat).real)

    def hermiticity_residue(self) -> float:
        mat = self.as_matrix()
        return float(np.max(np.abs(mat - mat.conj().T)))


def make_tmss(params: SqueezeParams) -> TwoModeState:
    """Photon-number squeezed input: sum_{j<=N} c_j |j, j> with c_j ~ tanh(r)^j.

    The overall normalization is computed numerically (it absorbs the
    1/cosh(r) prefactor of the untruncated family), so the amplitudes are
    exactly unit-norm at any r.  Total-photon cutoff is 2 * n_max.
    """
    t = math.tanh(params.r)
    weights = np.array([t ** j for j in range(params.n_max + 1)], dtype=float)
    coeffs = weights / math.sqrt(math.fsum(w * w for w in weights))
    amps = {(j, j): complex(coeffs[j]) for j in range(params.n_max + 1) if coeffs[j] != 0.0}
    return TwoModeState(amps, cutoff=2 * params.n_max)


def state_to_density(state: TwoModeState) -> DensityMatrix:
    """rho = |psi><psi| as a dense 4-index tensor."""
    dense = state.to_dense()
    tensor = np.einsum("ab,cd->abcd", dense, dense.conj())
    return DensityMatrix(tensor, dimension=state.cutoff)


def total_photon_distribution(state: TwoModeState) -> Dict[int, float]:
    """Probability of total photon number n_a + n_b."""
    dist: Dict[int, float] = {}
    for (na, nb), v in state.amplitudes.items():
        dist[na + nb] = dist.get(na + nb, 0.0) + abs(v) ** 2
    return dict(sorted(dist.items()))


def random_state(rng: np.random.Generator, cutoff: int) -> TwoModeState:
    """Haar-ish random normalized state on all pairs with n_a + n_b <= cutoff.

    Test utility; not part of the physics pipeline.
    """
    pairs = [(na, nb) for na in range(cutoff + 1) for nb in range(cutoff + 1 - na)]
    vec = rng.normal(size=len(pairs)) + 1j * rng.normal(size=len(pairs))
    vec /= np.linalg.norm(vec)
    return TwoModeState({p: complex(v) for p, v in zip(pairs, vec)}, cutoff)
