import math

import numpy as np
import pytest

from fockvortex import (
    DensityMatrix,
    FockPair,
    InvalidParameterError,
    InvalidStateError,
    SqueezeParams,
    TwoModeState,
    make_tmss,
    random_state,
    state_to_density,
    total_photon_distribution,
)

# mpmath, 40 digits: normalized pair amplitudes for r = 0.5, N = 1
TMSS_R05_N1_C0 = 0.90775940470586296195
TMSS_R05_N1_C1 = 0.41949119557871211680
TANH_05 = 0.46211715726000975850


@pytest.mark.parametrize("r", [0.0, 0.1, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("n_max", [0, 1, 3, 6, 12])
def test_tmss_normalized(r, n_max):
    state = make_tmss(SqueezeParams(r=r, n_max=n_max))
    assert abs(state.norm() - 1.0) < 1e-14


def test_tmss_frozen_amplitudes():
    state = make_tmss(SqueezeParams(r=0.5, n_max=1))
    assert state.amplitude(0, 0).real == pytest.approx(TMSS_R05_N1_C0, abs=1e-15)
    assert state.amplitude(1, 1).real == pytest.approx(TMSS_R05_N1_C1, abs=1e-15)
    assert state.amplitude(0, 0).imag == 0.0
    assert state.amplitude(1, 0) == 0.0


def test_tmss_geometric_ratio():
    # successive pair amplitudes differ by exactly tanh(r)
    state = make_tmss(SqueezeParams(r=0.5, n_max=5))
    for j in range(5):
        ratio = state.amplitude(j + 1, j + 1) / state.amplitude(j, j)
        assert ratio.real == pytest.approx(TANH_05, abs=1e-14)
        assert ratio.imag == 0.0


def test_tmss_support_is_pair_diagonal():
    state = make_tmss(SqueezeParams(r=0.8, n_max=4))
    assert set(state.amplitudes) == {FockPair(j, j) for j in range(5)}
    assert state.cutoff == 8


def test_tmss_r_zero_is_vacuum():
    state = make_tmss(SqueezeParams(r=0.0, n_max=5))
    assert set(state.amplitudes) == {FockPair(0, 0)}
    assert state.amplitude(0, 0) == pytest.approx(1.0)


def test_tmss_truncation_consistency():
    # dropping the last term and renormalizing reproduces the lower order
    hi = make_tmss(SqueezeParams(r=0.7, n_max=6))
    lo = make_tmss(SqueezeParams(r=0.7, n_max=5))
    kept = {p: v for p, v in hi.amplitudes.items() if p.n_a <= 5}
    scale = math.sqrt(math.fsum(abs(v) ** 2 for v in kept.values()))
    for p, v in kept.items():
        assert abs(v / scale - lo.amplitudes[p]) < 1e-14


@pytest.mark.parametrize("r,n_max", [(-0.1, 3), (0.5, -1)])
def test_squeeze_params_validation(r, n_max):
    with pytest.raises(InvalidParameterError):
        SqueezeParams(r=r, n_max=n_max)


def test_state_rejects_bad_norm():
    with pytest.raises(InvalidStateError):
        TwoModeState({(0, 0): 0.5}, cutoff=1)


def test_state_rejects_out_of_range_pairs():
    with pytest.raises(InvalidStateError):
        TwoModeState({(2, 2): 1.0}, cutoff=3)
    with pytest.raises(InvalidStateError):
        TwoModeState({(-1, 0): 1.0}, cutoff=2)


def test_state_drops_exact_zeros():
    state = TwoModeState({(0, 0): 1.0, (1, 1): 0.0}, cutoff=2)
    assert FockPair(1, 1) not in state.amplitudes


def test_json_round_trip():
    state = make_tmss(SqueezeParams(r=0.9, n_max=3))
    doc = state.to_json_dict()
    assert doc["cutoff"] == 6
    pairs = [(e["na"], e["nb"]) for e in doc["amplitudes"]]
    assert pairs == sorted(pairs)
    back = TwoModeState.from_json_dict(doc)
    assert back.cutoff == state.cutoff
    for p, v in state.amplitudes.items():
        assert back.amplitudes[p] == v


def test_dense_round_trip():
    rng = np.random.default_rng(3)
    state = random_state(rng, cutoff=5)
    back = TwoModeState.from_dense(state.to_dense(), cutoff=5)
    assert set(back.amplitudes) == set(state.amplitudes)
    for p, v in state.amplitudes.items():
        assert back.amplitudes[p] == v


def test_density_matrix_pure_state_properties():
    state = make_tmss(SqueezeParams(r=0.6, n_max=3))
    rho = state_to_density(state)
    assert rho.trace() == pytest.approx(1.0, abs=1e-14)
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)
    assert rho.hermiticity_residue() < 1e-15
    c1 = state.amplitude(1, 1)
    c2 = state.amplitude(2, 2)
    assert rho.entry((1, 1), (2, 2)) == pytest.approx(c1 * np.conj(c2))


def test_density_matrix_validation():
    m = np.zeros((3, 3, 3, 3), dtype=complex)
    m[0, 0, 1, 1] = 1.0  # not Hermitian
    with pytest.raises(InvalidStateError):
        DensityMatrix(m, dimension=2)


def test_total_photon_distribution():
    state = make_tmss(SqueezeParams(r=0.5, n_max=3))
    dist = total_photon_distribution(state)
    assert set(dist) == {0, 2, 4, 6}
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-14)
    assert dist[2] == pytest.approx(abs(state.amplitude(1, 1)) ** 2, abs=1e-15)


def test_random_state_normalized():
    rng = np.random.default_rng(11)
    for _ in range(20):
        state = random_state(rng, cutoff=7)
        assert abs(state.norm() - 1.0) < 1e-13
