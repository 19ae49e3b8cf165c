import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duality_lab.interferometers import Scenario, double_slit, franson, mzi, qbs_scenario
from duality_lab.matcore import NotPSDError
from duality_lab.qstate import (
    QuantumState,
    controlled_rotation,
    random_density,
    random_isometry_channel,
    random_povm_element,
)
from duality_lab.wpdr import (
    ENTROPIC,
    RELATIONS,
    SQUARED,
    UnsupportedRelationError,
    check,
    entropic_terms,
    equivalence_checks,
    eur_terms,
    evaluate,
    quantities_for,
    random_tripartite,
    randomized_suite,
    run_sample,
    worker_count,
)

unit = st.floats(0.0, 1.0)


def test_registry_has_all_relations():
    assert set(RELATIONS) == {
        "DV", "PV", "DiVi", "DiV_qbs", "DiP_V", "EUR_main", "EUR_maassen_uffink", "Hybrid",
        "ErasurePGammaV", "ErasurePC", "Banaszek", "Generic",
    }
    assert {r.form for r in RELATIONS.values()} == {SQUARED, ENTROPIC}


def test_slack_sign_conventions():
    r = check("DV", {"D": 0.6, "V": 0.8})
    assert r.lhs == pytest.approx(1.0) and r.slack == pytest.approx(0.0, abs=1e-15)
    assert r.verdict and r.saturated
    bad = check("DV", {"D": 0.9, "V": 0.9})
    assert bad.slack == pytest.approx(1 - 1.62) and not bad.verdict
    ent = check("EUR_main", {"Hmin_Z_E1": 0.4, "Hmax_W_E2": 0.7})
    assert ent.slack == pytest.approx(0.1)
    assert ent.entropic_slack is None and ent.forms_agree
    assert not check("EUR_main", {"Hmin_Z_E1": 0.2, "Hmax_W_E2": 0.7}).verdict


def test_tolerance_band():
    assert check("PV", {"P": 1.0, "V": 1e-5}).verdict  # slack -1e-10
    assert not check("PV", {"P": 1.0, "V": 1e-4}).verdict  # slack -1e-8


def test_missing_quantity_is_unsupported():
    with pytest.raises(UnsupportedRelationError):
        check("DV", {"D": 0.1})
    with pytest.raises(UnsupportedRelationError):
        evaluate("DiP_V", mzi())
    with pytest.raises(UnsupportedRelationError):
        evaluate("DV", qbs_scenario(0.5, 0.3))


@settings(max_examples=200, deadline=None)
@given(d=unit, v=unit)
def test_squared_and_entropic_forms_agree(d, v):
    hmin, hmax = entropic_terms(d, v)
    squared_ok = d * d + v * v <= 1 + 1e-12
    entropic_ok = hmin + hmax >= 1 - 1e-12
    near = abs(d * d + v * v - 1) < 1e-6
    assert near or squared_ok == entropic_ok
    assert check("DV", {"D": d, "V": v}).forms_agree


def test_entropic_terms_saturation_line():
    for t in np.linspace(0, math.pi / 2, 7):
        hmin, hmax = entropic_terms(math.cos(t), math.sin(t))
        assert hmin + hmax == pytest.approx(1.0, abs=1e-12)


def test_report_record_is_json_friendly():
    rec = check("DV", {"D": 0.3, "V": 0.4}, {"seed": 1}).to_record()
    assert json.loads(json.dumps(rec))["verdict"] == "pass"


@pytest.mark.parametrize("sc", [mzi(), mzi(R1=0.3, environment=controlled_rotation(0.4)), double_slit(q=0.5),
                                franson()], ids=["mzi", "mzi_detector", "double_slit", "franson"])
def test_predictive_presets_satisfy_relations(sc):
    for name in ("DV", "PV", "EUR_main", "EUR_maassen_uffink", "ErasurePC", "Banaszek", "Generic"):
        assert evaluate(name, sc).verdict, name


def test_pure_state_mzi_saturates_dv():
    r = evaluate("DV", mzi(environment=controlled_rotation(0.3)))
    assert r.saturated


def test_qbs_tightness():
    r = evaluate("DiP_V", qbs_scenario(0.5, math.pi / 4))
    assert r.slack == pytest.approx(0.0, abs=1e-9)
    assert evaluate("DiV_qbs", qbs_scenario(0.5, math.pi / 4)).slack == pytest.approx(0.5, abs=1e-9)


def test_quantities_for_adds_requested_extras():
    q = quantities_for(mzi(environment=controlled_rotation(0.5)), ["C", "D_B", "V_B", "D_g"])
    assert q["C"] == pytest.approx(1.0, abs=1e-8)
    assert q["D_B"] ** 2 + q["V_B"] ** 2 == pytest.approx(1.0, abs=1e-9)
    assert "D_g" in q and "V_g" in q
    assert "C" not in quantities_for(mzi(), ["V"])


def test_eur_terms_on_bell_pair_with_both_sides():
    # A maximally entangled with E1 only: Z is perfectly known, W is not known to E2
    psi = np.zeros(8)
    psi[0] = psi[0b110] = 1 / math.sqrt(2)
    s = QuantumState.pure(psi, ("A", "E1", "E2"), (2, 2, 2))
    t = eur_terms(s)
    assert t["Hmin_Z_E1"] == pytest.approx(0.0, abs=1e-12)
    assert t["Hmax_W_E2"] == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_random_tripartite_states_satisfy_main_relation(seed):
    s = random_tripartite(np.random.default_rng(seed))
    t = eur_terms(s)
    assert t["Hmin_Z_E1"] + t["Hmax_W_E2"] >= 1 - 1e-9
    assert t["D_g"] ** 2 + t["V_g"] ** 2 <= 1 + 1e-9


def test_corrupted_state_is_a_precondition_error_not_a_violation():
    rho = random_density(8, np.random.default_rng(3))
    w, v = np.linalg.eigh(rho)
    w[0] = -0.05
    w /= w.sum()
    bad = (v * w) @ v.conj().T
    with pytest.raises((ValueError, NotPSDError)):
        eur_terms(QuantumState(bad, ("A", "E1", "E2"), (2, 2, 2)))


def test_suite_zero_samples():
    rep = randomized_suite(0, 0)
    assert rep.violations == 0 and rep.ok
    assert all(s.n == 0 for s in rep.summaries.values())
    assert len(rep.summary_lines()) == len(RELATIONS)


def test_suite_rejects_bad_input():
    with pytest.raises(KeyError):
        randomized_suite(0, 1, ["nope"])
    with pytest.raises(ValueError):
        randomized_suite(0, -1)


def test_suite_is_deterministic_and_replayable():
    a = randomized_suite(7, 4, ["DV", "DiVi", "Banaszek"])
    b = randomized_suite(7, 4, ["DV", "DiVi", "Banaszek"])
    assert [r.slack for r in a.records] == [r.slack for r in b.records]
    r = a.records[5]
    replay = run_sample(r.fingerprint["seed"], r.fingerprint["relation"], r.fingerprint["index"])
    assert replay.slack == r.slack
    assert randomized_suite(8, 4, ["DV"]).records[0].slack != a.records[0].slack


def test_suite_independent_of_worker_count():
    serial = randomized_suite(11, 6, ["PV", "Hybrid"], workers=1)
    parallel = randomized_suite(11, 6, ["PV", "Hybrid"], workers=2)
    assert [r.slack for r in serial.records] == [r.slack for r in parallel.records]
    assert [r.fingerprint for r in serial.records] == [r.fingerprint for r in parallel.records]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("DUALITY_LAB_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("DUALITY_LAB_THREADS", "lots")
    with pytest.raises(ValueError):
        worker_count()


def test_small_suite_has_no_violations():
    rep = randomized_suite(5, 10)
    assert rep.ok, rep.summary_lines()


def test_equivalence_checks_all_pass():
    checks = equivalence_checks(seed=1, n=15)
    assert {c.name for c in checks} >= {"min_hmax_vs_visibility", "hmin_z_vs_predictability",
                                        "kappa_multiplicative", "banaszek_vb_operational"}
    for c in checks:
        assert c.ok, (c.name, c.max_deviation)


def test_retrodictive_general_isometry_scenario():
    rng = np.random.default_rng(0)
    sc = Scenario("retrodictive", random_povm_element(2, rng), environment=random_isometry_channel(rng, 2))
    assert evaluate("DiVi", sc).verdict
    with pytest.raises(UnsupportedRelationError):
        evaluate("Banaszek", sc)
