"""Registry of wave-particle duality relations and single-shot evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..interferometers import (
    PathIsometry,
    Scenario,
    ScenarioError,
    banaszek_quantities,
    erasure_coherence,
    erasure_quantities,
    scenario_quantities,
)
from ..interferometers.frameworks import PATH_LABEL, state_at_t2
from ..entropy import max_pguess_xy

TOLERANCE = 1e-9
SATURATION = 1e-6

SQUARED = "squared"
ENTROPIC = "entropic"


class UnsupportedRelationError(ValueError):
    """The scenario does not provide a quantity the relation needs."""


@dataclass(frozen=True)
class Relation:
    """A duality relation ``lhs <= 1`` (squared form) or ``lhs >= 1`` (entropic form).

    Attributes:
        name: registry key.
        form: ``"squared"`` for ``x^2 + y^2 <= 1`` or ``"entropic"`` for
            ``H_min + H_max >= 1``.
        quantities: the two :class:`DualityQuantities` fields entering the
            left-hand side, particle term first.
        summary: one-line statement.
    """

    name: str
    form: str
    quantities: tuple[str, str]
    summary: str
    bound: float = 1.0

    def lhs(self, q: Mapping[str, float]) -> float:
        a, b = (float(q[k]) for k in self.quantities)
        if self.form == SQUARED:
            return a * a + b * b
        return a + b

    def slack(self, q: Mapping[str, float]) -> float:
        """Distance to the bound, positive when the relation holds.

        Squared form: ``1 - lhs``. Entropic form: ``lhs - 1`` (the entropy sum
        is bounded from below).
        """
        lhs = self.lhs(q)
        return self.bound - lhs if self.form == SQUARED else lhs - self.bound


RELATIONS: dict[str, Relation] = {
    r.name: r
    for r in (
        Relation("DV", SQUARED, ("D", "V"), "D^2 + V^2 <= 1"),
        Relation("PV", SQUARED, ("P", "V"), "P^2 + V^2 <= 1"),
        Relation("DiVi", SQUARED, ("D_i", "V_i"), "D_i^2 + V_i^2 <= 1"),
        Relation("DiV_qbs", SQUARED, ("D_i", "V"), "D_i^2 + V^2 <= 1 (quantum beam splitter)"),
        Relation("DiP_V", SQUARED, ("D_i_P", "V"), "(D_i^P)^2 + V^2 <= 1"),
        Relation("EUR_main", ENTROPIC, ("Hmin_Z_E1", "Hmax_W_E2"), "H_min(Z|E1) + min_W H_max(W|E2) >= 1"),
        Relation("EUR_maassen_uffink", ENTROPIC, ("Hmin_Z", "Hmax_W"), "H_min(Z) + min_W H_max(W) >= 1"),
        Relation("Hybrid", SQUARED, ("D_Qprime", "V"), "D_Q'^2 + V^2 <= 1"),
        Relation("ErasurePGammaV", SQUARED, ("P_Gamma", "V_Gamma"), "P(Gamma)^2 + V(Gamma)^2 <= 1"),
        Relation("ErasurePC", SQUARED, ("P", "C"), "P^2 + C^2 <= 1"),
        Relation("Banaszek", SQUARED, ("D_B", "V_B"), "D_B^2 + V_B^2 <= 1"),
        Relation("Generic", SQUARED, ("D_g", "V_g"), "D_g^2 + V_g^2 <= 1"),
    )
}


def entropic_terms(particle: float, wave: float) -> tuple[float, float]:
    """``(1 - log(1 + D), log(1 + sqrt(1 - V^2)))``: the entropy pair behind ``(D, V)``."""
    particle = min(1.0, max(0.0, particle))
    wave = min(1.0, max(0.0, wave))
    return 1.0 - math.log2(1.0 + particle), math.log2(1.0 + math.sqrt(1.0 - wave * wave))


@dataclass
class WpdrReport:
    """Outcome of checking one relation on one set of quantities."""

    relation: str
    quantities: dict[str, float]
    lhs: float
    slack: float
    verdict: bool
    tolerance: float = TOLERANCE
    fingerprint: dict = field(default_factory=dict)
    entropic_slack: float | None = None

    @property
    def saturated(self) -> bool:
        return abs(self.slack) < SATURATION

    @property
    def forms_agree(self) -> bool:
        """Squared and entropic verdicts coincide (both inside the saturation band counts as agreement)."""
        if self.entropic_slack is None:
            return True
        if max(abs(self.slack), abs(self.entropic_slack)) < SATURATION:
            return True
        return (self.slack >= -self.tolerance) == (self.entropic_slack >= -self.tolerance)

    def to_record(self) -> dict:
        return {
            "relation": self.relation,
            "lhs": self.lhs,
            "slack": self.slack,
            "entropic_slack": self.entropic_slack,
            "verdict": "pass" if self.verdict else "FAIL",
            "tolerance": self.tolerance,
            "quantities": self.quantities,
            "fingerprint": self.fingerprint,
        }


def check(relation: Relation | str, quantities: Mapping[str, float], fingerprint: dict | None = None,
          tolerance: float = TOLERANCE) -> WpdrReport:
    """Evaluate ``relation`` on a mapping of named quantities."""
    rel = RELATIONS[relation] if isinstance(relation, str) else relation
    missing = [k for k in rel.quantities if quantities.get(k) is None]
    if missing:
        raise UnsupportedRelationError(f"relation {rel.name} needs {missing}, which this scenario does not provide")
    q = {k: float(quantities[k]) for k in rel.quantities}
    lhs = rel.lhs(q)
    slack = rel.slack(q)
    ent = None
    if rel.form == SQUARED:
        hmin, hmax = entropic_terms(*(q[k] for k in rel.quantities))
        ent = hmin + hmax - 1.0
    return WpdrReport(rel.name, q, lhs, slack, slack >= -tolerance, tolerance, dict(fingerprint or {}), ent)


# --------------------------------------------------------------------------
# scenario-level evaluation


def _single_isometry(sc: Scenario) -> PathIsometry | None:
    env = sc.environment
    if env is None:
        return PathIsometry(np.ones((2, 1), dtype=complex), (1, 1, 1))
    if len(env.kraus_ops) != 1 or not sc.path_preserving:
        return None
    v = env.kraus_ops[0]
    k = env.output_labels.index(PATH_LABEL)
    dims = env.output_dims
    t = np.moveaxis(v.reshape(dims + (2,)), k, 0).reshape(2, -1, 2)
    records = np.stack([t[j, :, j] for j in range(2)])
    if not np.allclose(np.linalg.norm(records, axis=1), 1.0, atol=1e-9):
        return None
    return PathIsometry(records, (1, 1, records.shape[1]))


def quantities_for(sc: Scenario, names) -> dict[str, float]:
    """Every quantity of ``sc`` needed to supply ``names``; absent ones are simply left out.

    The framework quantities are always computed; erasure, Banaszek and
    generic guessing measures are added only when requested and applicable.
    """
    need = set(names)
    q = scenario_quantities(sc).as_dict()
    if need & {"P_Gamma", "V_Gamma", "C"} and sc.framework == "predictive":
        try:
            c, g0 = erasure_coherence(sc)
        except ScenarioError:
            c = None
        if c is not None:
            q["C"] = c
            trivial = g0.shape[0] == 1 or np.allclose(g0, np.eye(g0.shape[0]))
            er = erasure_quantities(sc, [g0] if trivial else [g0, np.eye(2) - g0])
            q["P_Gamma"], q["V_Gamma"] = er.P_Gamma, er.V_Gamma
    if need & {"D_B", "V_B"}:
        iso = _single_isometry(sc)
        if iso is not None:
            q["D_B"], q["V_B"] = banaszek_quantities(iso)
    if need & {"D_g", "V_g"}:
        particle = next((q[k] for k in ("D", "D_i", "D_Qprime") if k in q), None)
        if sc.framework == "predictive":
            pg, _ = max_pguess_xy(state_at_t2(sc), PATH_LABEL)
            wave = 2.0 * pg - 1.0
        else:
            wave = q.get("V_i")
        if particle is not None and wave is not None:
            q["D_g"], q["V_g"] = particle, wave
    return q


def relation_quantities(sc: Scenario, relation: Relation) -> dict[str, float]:
    return quantities_for(sc, relation.quantities)


def evaluate(relation: Relation | str, scenario: Scenario, tolerance: float = TOLERANCE) -> WpdrReport:
    """Check one relation on one scenario.

    Raises:
        UnsupportedRelationError: the scenario's framework does not produce a
            quantity the relation needs.
    """
    rel = RELATIONS[relation] if isinstance(relation, str) else relation
    q = relation_quantities(scenario, rel)
    return check(rel, q, {"scenario": scenario.name, "framework": scenario.framework}, tolerance)


