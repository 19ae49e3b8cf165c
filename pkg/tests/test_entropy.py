import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from duality_lab.entropy import (
    CLOSED_FORM,
    NUMERIC,
    XYObservable,
    bloch_vector,
    fidelity_max_construction,
    hmax_bound_from_pguess,
    hmax_cond,
    hmax_from_visibility,
    hmax_uncond,
    hmin_cond,
    hmin_from_distinguishability,
    hmin_uncond,
    max_pguess_xy,
    min_hmax_xy,
    pguess_binary,
    pguess_xy,
)
from duality_lab.qstate import PAULI_X, PAULI_Y, Z_BASIS, BinaryCqState, QuantumState, measure_binary

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_cq(rng, d=2):
    p = rng.uniform(0.05, 0.95)
    return BinaryCqState(p * oracles.random_density(d, rng), (1 - p) * oracles.random_density(d, rng))


def xy_conditionals_oracle(rho_ab, phis):
    """Conditional states of B after measuring A (first factor) in the XY basis at each phase."""
    dB = rho_ab.shape[0] // 2
    t = rho_ab.reshape(2, dB, 2, dB)
    phis = np.asarray(phis, dtype=float)
    outs = []
    for sign in (1, -1):
        w = np.stack([np.ones_like(phis), sign * np.exp(1j * phis)], axis=1) / np.sqrt(2)
        outs.append(np.einsum("ka,aibj,kb->kij", w.conj(), t, w))
    return outs[0], outs[1]


def test_xy_observable_pauli():
    np.testing.assert_allclose(XYObservable(0.0).pauli, PAULI_X)
    np.testing.assert_allclose(XYObservable(math.pi / 2).pauli, PAULI_Y, atol=1e-15)
    assert XYObservable(3 * math.pi).phi0 == pytest.approx(math.pi)


def test_unconditional_entropies():
    assert hmin_uncond([0.5, 0.5]) == pytest.approx(1.0)
    assert hmax_uncond([0.5, 0.5]) == pytest.approx(1.0)
    assert hmin_uncond([1.0, 0.0]) == 0.0
    assert hmax_uncond([1.0, 0.0]) == 0.0
    # frozen: -log2(0.7) and 2 log2(sqrt(.7) + sqrt(.3)), computed with math.log2
    assert hmin_uncond([0.7, 0.3]) == pytest.approx(0.514573172829758, abs=1e-12)
    assert hmax_uncond([0.7, 0.3]) == pytest.approx(0.938485394361347, abs=1e-12)


def test_entropy_conversions_at_endpoints():
    assert hmin_from_distinguishability(0.0) == pytest.approx(1.0)
    assert hmin_from_distinguishability(1.0) == pytest.approx(0.0)
    assert hmax_from_visibility(0.0) == pytest.approx(1.0)
    assert hmax_from_visibility(1.0) == pytest.approx(0.0)


def test_bell_state_side_information():
    s = QuantumState.pure(np.array([1, 0, 0, 1]) / np.sqrt(2), ("A", "B"), (2, 2))
    cq = measure_binary(s, Z_BASIS, "A")
    assert pguess_binary(cq) == pytest.approx(1.0)
    assert hmin_cond(cq).value == pytest.approx(0.0, abs=1e-12)
    assert hmax_cond(cq).value == pytest.approx(0.0, abs=1e-7)
    assert min_hmax_xy(s, "A", ["B"]).value == pytest.approx(0.0, abs=1e-7)
    assert min_hmax_xy(s, "A").value == pytest.approx(1.0, abs=1e-12)


def test_min_hmax_closed_form_frozen_value():
    # Bloch vector (0.6, 0, 0.8): min_W Hmax = log2(1 + 0.8)
    rho = 0.5 * (np.eye(2) + 0.6 * PAULI_X + 0.8 * np.diag([1, -1]))
    s = QuantumState(rho, ("A",), (2,))
    r = min_hmax_xy(s, "A")
    assert r.method == CLOSED_FORM
    assert r.value == pytest.approx(0.847996906554950, abs=1e-12)
    assert r.argmin_phi == pytest.approx(0.0, abs=1e-12)
    num = min_hmax_xy(s, "A", method=NUMERIC)
    assert num.method == NUMERIC
    assert num.value == pytest.approx(r.value, abs=1e-10)


def test_bloch_vector_roundtrip():
    v = np.array([0.1, -0.4, 0.3])
    np.testing.assert_allclose(bloch_vector(oracles.bloch_to_density(v)[0]), v, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.integers(1, 3))
def test_helstrom_matches_trace_norm_oracle(seed, d):
    rng = np.random.default_rng(seed)
    cq = random_cq(rng, d)
    assert pguess_binary(cq) == pytest.approx(0.5 + 0.5 * oracles.trace_norm(cq.sigma0 - cq.sigma1), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.integers(1, 3))
def test_hmax_cond_matches_fidelity_oracle(seed, d):
    rng = np.random.default_rng(seed)
    cq = random_cq(rng, d)
    expected = math.log2(1 + 2 * oracles.fidelity(cq.sigma0, cq.sigma1))
    assert hmax_cond(cq).value == pytest.approx(expected, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.integers(1, 3))
def test_entropy_ordering_and_bound(seed, d):
    rng = np.random.default_rng(seed)
    cq = random_cq(rng, d)
    hmin, hmax = hmin_cond(cq).value, hmax_cond(cq).value
    assert -1e-12 <= hmin <= hmax + 1e-9
    assert hmax <= 1 + 1e-12
    assert hmax <= hmax_bound_from_pguess(cq) + 1e-9


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_min_hmax_xy_with_side_matches_phase_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    rho = oracles.random_density(4, rng)
    s = QuantumState(rho, ("A", "B"), (2, 2))
    phis = np.linspace(0, 2 * math.pi, 2000, endpoint=False)
    s0, s1 = xy_conditionals_oracle(rho, phis)
    grid = np.array([math.log2(1 + 2 * oracles.fidelity_2x2(a, b)) for a, b in zip(s0, s1)])
    res = min_hmax_xy(s, "A", ["B"])
    assert res.value <= grid.min() + 1e-10
    assert res.value >= grid.min() - 1e-4
    # the reported phase really attains the value
    a, b = xy_conditionals_oracle(rho, [res.argmin_phi])
    assert math.log2(1 + 2 * oracles.fidelity_2x2(a[0], b[0])) == pytest.approx(res.value, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_max_pguess_xy_with_side_matches_phase_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    rho = oracles.random_density(4, rng)
    s = QuantumState(rho, ("A", "B"), (2, 2))
    phis = np.linspace(0, 2 * math.pi, 2000, endpoint=False)
    s0, s1 = xy_conditionals_oracle(rho, phis)
    grid = np.array([0.5 + 0.5 * oracles.trace_norm(a - b) for a, b in zip(s0, s1)])
    pg, phi = max_pguess_xy(s, "A", ["B"])
    assert grid.max() - 1e-10 <= pg <= grid.max() + 1e-4
    assert pguess_xy(s, "A", phi, ["B"]) == pytest.approx(pg, abs=1e-12)


def test_min_hmax_xy_rejects_non_qubit(rng):
    s = QuantumState(oracles.random_density(3, rng), ("A",), (3,))
    with pytest.raises(ValueError, match="qubit"):
        min_hmax_xy(s, "A", method=NUMERIC)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.integers(2, 4))
def test_fidelity_max_construction_attains_value(seed, d):
    rng = np.random.default_rng(seed)
    m = oracles.random_psd(d, rng)
    n = oracles.random_psd(d, rng, scale=0.5)
    value, rho = fidelity_max_construction(m, n)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho)[0] > -1e-10
    assert oracles.fidelity(m, rho) + oracles.fidelity(n, rho) == pytest.approx(value, abs=1e-8)
    assert value == pytest.approx(math.sqrt(np.trace(m).real + np.trace(n).real + 2 * oracles.fidelity(m, n)),
                                  abs=1e-9)


def test_fidelity_max_construction_zero_operators():
    with pytest.raises(ValueError):
        fidelity_max_construction(np.zeros((2, 2)), np.zeros((2, 2)))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=st.integers(1, 4))
def test_trace_norm_fidelity_inequality(seed, d):
    rng = np.random.default_rng(seed)
    m = oracles.random_psd(d, rng)
    n = oracles.random_psd(d, rng, scale=rng.uniform(0.01, 2))
    lhs = oracles.trace_norm(m - n) ** 2 + 4 * oracles.fidelity(m, n) ** 2
    assert lhs <= (np.trace(m).real + np.trace(n).real) ** 2 + 1e-9
