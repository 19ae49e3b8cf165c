import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from duality_lab.interferometers import (
    QbsSpec,
    Scenario,
    ScenarioError,
    VisibilityError,
    analytic_visibility,
    compress,
    double_slit,
    effective_detection,
    franson,
    franson_phase,
    fringe_visibility_from,
    fringe_visibility_sweep,
    hybrid_quantities,
    mzi,
    port_detection,
    predictive_quantities,
    qbs_scenario,
    retrodictive_quantities,
    scenario_quantities,
    state_at_t2,
    unbiased_weight,
    with_parameter,
    xy_detection,
)
from duality_lab.qstate import (
    PovmElement,
    beam_splitter,
    controlled_rotation,
    dephasing_channel,
    qbs_unitary,
    random_density,
    random_path_preserving_channel,
    random_povm_element,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def qbs_fringe_oracle(R, rho_p, rho_s, n=20_000):
    """Visibility of D0 after a QBS, by simulating polarization and path together for every phase."""
    u = qbs_unitary(R)
    d0 = np.kron(np.eye(2), np.diag([1.0, 0.0]))
    p = []
    for phi in np.linspace(0, 2 * math.pi, n, endpoint=False):
        ph = np.diag([1.0, np.exp(1j * phi)])
        rho = np.kron(rho_p, ph @ rho_s @ ph.conj().T)
        p.append(np.real(np.trace(d0 @ u @ rho @ u.conj().T)))
    p = np.array(p)
    return (p.max() - p.min()) / (p.max() + p.min())


def blocker_distinguishability(c_eff, channel):
    """Referee blocks one arm at random; guess which from the click and the environment.

    ``sigma_j = Tr_S[(C (x) 1) E(|j><j|)] / 2`` on the environment.
    """
    sig = []
    for j in range(2):
        x = np.zeros((2, 2), dtype=complex)
        x[j, j] = 1
        y = channel.apply_operator(x) if channel is not None else x
        df = y.shape[0] // 2
        t = y.reshape(2, df, 2, df)
        sig.append(0.5 * np.einsum("ba,aibj->ij", c_eff, t))
    p = np.real(np.trace(sig[0] + sig[1]))
    if sig[0].shape == (1, 1):
        return abs(np.real(sig[0][0, 0] - sig[1][0, 0])) / p
    return oracles.blocker_distinguishability(sig[0], sig[1]) if sig[0].shape == (2, 2) else None


def test_balanced_mzi_is_pure_wave():
    q = predictive_quantities(mzi())
    assert q.V == pytest.approx(1.0, abs=1e-12)
    assert q.P == pytest.approx(0.0, abs=1e-12)
    assert q.D == pytest.approx(0.0, abs=1e-12)


def test_unbalanced_mzi_predictability():
    q = predictive_quantities(mzi(R1=0.8))
    assert q.P == pytest.approx(0.6, abs=1e-12)
    assert q.V == pytest.approx(0.8, abs=1e-12)  # 2 sqrt(0.8 * 0.2)
    assert q.Hmin_Z == pytest.approx(-math.log2(0.8), abs=1e-12)


def test_which_path_detector_trades_visibility_for_distinguishability():
    q = predictive_quantities(mzi(environment=controlled_rotation(0.6)))
    assert q.V == pytest.approx(0.6, abs=1e-12)
    assert q.D == pytest.approx(0.8, abs=1e-12)
    assert q.D**2 + q.V**2 == pytest.approx(1.0, abs=1e-12)


def test_dephasing_reduces_visibility_without_distinguishability():
    q = predictive_quantities(mzi(environment=dephasing_channel("S", 0.3)))
    assert q.V == pytest.approx(0.3, abs=1e-10)
    assert q.D == pytest.approx(0.0, abs=1e-12)


def test_double_slit_partial_detector_efficiency_does_not_change_visibility():
    for q in (1.0, 0.3):
        assert predictive_quantities(double_slit(q=q, phi0=1.2)).V == pytest.approx(1.0, abs=1e-12)
    assert unbiased_weight(double_slit(q=0.3)) == pytest.approx(0.3)
    assert unbiased_weight(mzi(R2=0.3)) is None


def test_franson_coincidence_subspace():
    sc = franson()
    st2 = state_at_t2(sc)
    assert st2.norm_prob == pytest.approx(0.5)
    np.testing.assert_allclose(compress(sc, sc.detection.op), np.full((2, 2), 0.25), atol=1e-15)
    assert predictive_quantities(sc).V == pytest.approx(1.0, abs=1e-12)


def test_franson_visibility_from_four_path_sweep():
    sc = franson(environment=controlled_rotation(0.5))
    # four paths: the environment couples to the SS/LL which-path; sweep the full phase
    psi = np.ones(4) / 2
    rho = np.outer(psi, psi)
    pi = np.diag([1.0, 0, 0, 1.0])
    rho = pi @ rho @ pi
    # dephase the SS/LL coherence by the record overlap
    rho[0, 3] *= 0.5
    rho[3, 0] *= 0.5
    p = []
    for phi in np.linspace(0, 2 * math.pi, 4000, endpoint=False):
        u = franson_phase(phi)
        p.append(np.real(np.trace(sc.detection.op @ u @ rho @ u.conj().T)))
    p = np.array(p)
    assert (p.max() - p.min()) / (p.max() + p.min()) == pytest.approx(predictive_quantities(sc).V, abs=1e-6)


def test_franson_phase_on_coincidence_subspace():
    u = franson_phase(0.7)
    np.testing.assert_allclose(np.diag(u)[[0, 3]], [1, np.exp(0.7j)])


def test_scenario_validation():
    with pytest.raises(ScenarioError, match="framework"):
        Scenario("bogus", xy_detection())
    with pytest.raises(ScenarioError):
        Scenario("predictive", PovmElement(np.eye(4)))
    with pytest.raises(ScenarioError, match="rank 2"):
        Scenario("predictive", PovmElement(np.eye(4)), path_dim=4,
                 interfering_projector=PovmElement(np.diag([1.0, 0, 0, 0])))
    with pytest.raises(ScenarioError):
        Scenario("predictive", xy_detection(), bs1_reflectivity=2.0)
    with pytest.raises(ScenarioError):
        mzi(environment=controlled_rotation(0.5, env_label="Qp"))
    with pytest.raises(ScenarioError):
        QbsSpec(1.5, np.eye(2) / 2)
    with pytest.raises(ScenarioError):
        predictive_quantities(qbs_scenario(0.5, 0.3))


def test_with_parameter():
    sc = qbs_scenario(0.4, 0.0)
    assert with_parameter(sc, "R", 0.7).qbs.R == 0.7
    np.testing.assert_allclose(with_parameter(sc, "alpha", math.pi / 2).qbs.rho_p, np.diag([0, 1]), atol=1e-15)
    ds = with_parameter(double_slit(q=0.4), "phi0", 1.0)
    assert unbiased_weight(ds) == pytest.approx(0.4)
    m = with_parameter(mzi(), "kappa", 0.25)
    assert predictive_quantities(m).V == pytest.approx(0.25, abs=1e-12)
    assert with_parameter(mzi(), "R1", 0.9).bs1_reflectivity == 0.9
    with pytest.raises(ScenarioError):
        with_parameter(mzi(), "alpha", 0.1)
    with pytest.raises(ScenarioError):
        with_parameter(mzi(), "nope", 0.1)


def test_visibility_error_when_detector_never_clicks():
    with pytest.raises(VisibilityError):
        fringe_visibility_from(np.zeros((2, 2)), np.eye(2) / 2)
    with pytest.raises(VisibilityError):
        analytic_visibility(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_visibility_sweep_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    c = random_povm_element(2, rng).op
    rho = oracles.random_density(2, rng)
    v = fringe_visibility_from(c, rho)
    assert v == pytest.approx(oracles.visibility_dense(c, rho), abs=1e-6)
    assert v == pytest.approx(analytic_visibility(c, rho), abs=1e-10)


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_qbs_visibility_matches_joint_simulation(seed):
    rng = np.random.default_rng(seed)
    r = float(rng.uniform(0, 1))
    rho_p = random_density(2, rng)
    sc = qbs_scenario(r, 0.0).replace(qbs=QbsSpec(r, rho_p), bs1_reflectivity=float(rng.uniform(0, 1)))
    rho_s = sc.physical_input()
    assert fringe_visibility_sweep(sc) == pytest.approx(qbs_fringe_oracle(r, rho_p, rho_s, 4000), abs=1e-5)


@settings(max_examples=20, deadline=None)
@given(seed=seeds, dim=st.integers(1, 2))
def test_retrodictive_distinguishability_matches_blocker_game(seed, dim):
    rng = np.random.default_rng(seed)
    env = random_path_preserving_channel(rng, dim)
    c0 = random_povm_element(2, rng)
    sc = Scenario("retrodictive", c0, environment=env)
    expected = blocker_distinguishability(effective_detection(sc), env)
    assert retrodictive_quantities(sc).D_i == pytest.approx(expected, abs=1e-4 if dim == 2 else 1e-12)


def test_qbs_distinguishability_matches_blocker_game():
    for r, a in ((0.4, 0.3), (0.5, math.pi / 4), (0.8, 1.2)):
        sc = qbs_scenario(r, a)
        assert retrodictive_quantities(sc).D_i == pytest.approx(
            blocker_distinguishability(effective_detection(sc), None), abs=1e-12)


def test_retrodictive_mzi_without_environment():
    q = retrodictive_quantities(mzi(framework="retrodictive"))
    assert q.D_i == pytest.approx(0.0, abs=1e-12)
    assert q.V_i == pytest.approx(1.0, abs=1e-12)
    assert q.V == pytest.approx(1.0, abs=1e-12)


def test_hybrid_with_copy_register():
    # incoherent input: the register keeps the 0.8/0.2 bias, no fringes
    sc = Scenario("hybrid", port_detection(0.5), input_state=np.diag([0.8, 0.2]))
    q = hybrid_quantities(sc)
    assert q.D_Qprime == pytest.approx(0.6, abs=1e-12)
    assert q.V == pytest.approx(0.0, abs=1e-12)
    assert scenario_quantities(sc).D_Qprime == q.D_Qprime


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_hybrid_register_visibility_equals_fringe_visibility(seed):
    rng = np.random.default_rng(seed)
    sc = Scenario("hybrid", random_povm_element(2, rng), environment=random_path_preserving_channel(rng),
                  input_state=random_density(2, rng))
    q = hybrid_quantities(sc)
    assert q.V_i == pytest.approx(q.V, abs=1e-8)
    assert q.D_Qprime**2 + q.V**2 <= 1 + 1e-9


def test_port_detection_is_beam_splitter_row():
    c = port_detection(0.3, 1).op
    row = beam_splitter(0.3)[1]
    np.testing.assert_allclose(c, np.outer(row, row), atol=1e-15)
