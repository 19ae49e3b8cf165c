"""Randomized verification suites and two-sided identity checks."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ..entropy import bloch_vector
from ..interferometers import (
    PathIsometry,
    QbsSpec,
    Scenario,
    analytic_visibility,
    banaszek_operational_v,
    banaszek_quantities,
    double_slit,
    effective_detection,
    franson,
    fringe_visibility_sweep,
    hybrid_quantities,
    mzi,
    predictive_quantities,
    qbs_scenario,
    qbs_visibility_formula,
    retrodictive_quantities,
    state_at_t2,
)
from ..interferometers.frameworks import PATH_LABEL
from ..qstate import (
    chain_path_channels,
    coherence_factor,
    phase_shift,
    random_density,
    random_path_preserving_channel,
    random_povm_element,
    reduced_path_channel,
)
from .relations import RELATIONS, TOLERANCE, WpdrReport, check
from .samplers import SAMPLERS

THREADS_ENV = "DUALITY_LAB_THREADS"
RELATION_ORDER = tuple(RELATIONS)


def worker_count() -> int:
    """Worker processes allowed by ``DUALITY_LAB_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    return max(1, min(n, os.cpu_count() or 1))


def sample_rng(seed: int, relation: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, RELATION_ORDER.index(relation), index])


def run_sample(seed: int, relation: str, index: int, tolerance: float = TOLERANCE) -> WpdrReport:
    """Draw and check sample ``index`` of ``relation``; replayable from the three integers."""
    q, params = SAMPLERS[relation](sample_rng(seed, relation, index))
    fp = {"seed": seed, "relation": relation, "index": index, "params": params}
    return check(relation, q, fp, tolerance)


def _run_chunk(args) -> list[WpdrReport]:
    seed, relation, indices, tolerance = args
    return [run_sample(seed, relation, i, tolerance) for i in indices]


@dataclass
class RelationSummary:
    relation: str
    n: int = 0
    min_slack: float = math.inf
    violations: int = 0
    saturated: int = 0
    form_disagreements: int = 0
    worst: dict | None = None

    def add(self, r: WpdrReport) -> None:
        self.n += 1
        if r.slack < self.min_slack:
            self.min_slack = r.slack
            self.worst = r.fingerprint
        self.violations += not r.verdict
        self.saturated += r.saturated
        self.form_disagreements += not r.forms_agree


@dataclass
class SuiteReport:
    seed: int
    n_samples: int
    tolerance: float
    summaries: dict[str, RelationSummary] = field(default_factory=dict)
    records: list[WpdrReport] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.summaries.values())

    @property
    def ok(self) -> bool:
        return self.violations == 0 and all(s.form_disagreements == 0 for s in self.summaries.values())

    def summary_lines(self) -> list[str]:
        lines = []
        for name, s in self.summaries.items():
            ms = "n/a" if s.n == 0 else f"{s.min_slack:+.3e}"
            lines.append(f"{name:20s} n={s.n:5d} min_slack={ms} violations={s.violations} "
                         f"saturated={s.saturated} form_mismatch={s.form_disagreements}")
        return lines


def randomized_suite(seed: int, n_samples: int, relations: Iterable[str] | None = None,
                     tolerance: float = TOLERANCE, workers: int | None = None,
                     keep_records: bool = True) -> SuiteReport:
    """Check ``n_samples`` random instances of each relation.

    Results do not depend on ``workers``: every sample has its own generator
    and the aggregation only takes minima and counts, in sample order.
    """
    relations = list(RELATION_ORDER if relations is None else relations)
    for r in relations:
        if r not in RELATIONS:
            raise KeyError(f"unknown relation {r!r}")
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    workers = worker_count() if workers is None else max(1, workers)
    report = SuiteReport(seed, n_samples, tolerance)
    for rel in relations:
        summary = RelationSummary(rel)
        if workers == 1 or n_samples < 2 * workers:
            reports = _run_chunk((seed, rel, range(n_samples), tolerance))
        else:
            chunks = [(seed, rel, list(range(n_samples))[k::workers], tolerance) for k in range(workers)]
            with ProcessPoolExecutor(max_workers=workers) as ex:
                parts = list(ex.map(_run_chunk, chunks))
            reports = sorted((r for p in parts for r in p), key=lambda r: r.fingerprint["index"])
        for r in reports:
            summary.add(r)
        if keep_records:
            report.records.extend(reports)
        report.summaries[rel] = summary
    return report


# --------------------------------------------------------------------------
# identities


@dataclass
class IdentityCheck:
    name: str
    n: int
    max_deviation: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance


def _vis_entropy(v: float) -> float:
    return math.log2(1.0 + math.sqrt(max(0.0, 1.0 - v * v)))


def visibility_identity_deviation(sc: Scenario) -> float:
    """``|min_W H_max(W) - log(1 + sqrt(1 - V^2))|`` on the predictive state at t2."""
    q = predictive_quantities(sc)
    return abs(q.Hmax_W - _vis_entropy(q.V))


def reference_identity_deviation(sc: Scenario) -> float:
    """Same identity with ``H_max`` evaluated on the detected reference qubit."""
    q = retrodictive_quantities(sc) if sc.framework == "retrodictive" else hybrid_quantities(sc)
    return abs(q.Hmax_W - _vis_entropy(q.V))


def equivalence_checks(seed: int = 0, n: int = 50, tolerance: float = 1e-8) -> list[IdentityCheck]:
    """Run every identity-type claim as a two-sided comparison and report the worst deviation."""
    rng = np.random.default_rng(seed)
    out: list[IdentityCheck] = []

    dev = 0.0
    for _ in range(n):
        env = random_path_preserving_channel(rng)
        r1 = float(rng.uniform(0, 1))
        for sc in (mzi(R1=r1, environment=env), double_slit(q=float(rng.uniform(0.05, 1)),
                                                         phi0=float(rng.uniform(0, 6.28)),
                                                         environment=env, R1=r1)):
            dev = max(dev, visibility_identity_deviation(sc))
    out.append(IdentityCheck("min_hmax_vs_visibility", 2 * n, dev, tolerance))

    dev = 0.0
    for sc in (mzi(), double_slit(), franson(), mzi(R1=0.8), double_slit(q=0.3, phi0=1.0)):
        c = effective_detection(sc)
        rho = state_at_t2(sc).reduced(PATH_LABEL)
        dev = max(dev, abs(analytic_visibility(c, rho) - fringe_visibility_sweep(sc)))
        dev = max(dev, abs(analytic_visibility(c, rho) - min(1.0, math.hypot(*bloch_vector(rho)[:2]))))
    out.append(IdentityCheck("visibility_closed_form_vs_sweep", 5, dev, tolerance))

    dev = 0.0
    for _ in range(n):
        q = predictive_quantities(mzi(R1=float(rng.uniform(0, 1))))
        dev = max(dev, abs(q.Hmin_Z + math.log2((1.0 + q.P) / 2.0)))
    out.append(IdentityCheck("hmin_z_vs_predictability", n, dev, 1e-12))

    dev = 0.0
    for _ in range(n):
        a, b = random_path_preserving_channel(rng), random_path_preserving_channel(rng)
        dev = max(dev, abs(coherence_factor(chain_path_channels(a, b)) - coherence_factor(a) * coherence_factor(b)))
    out.append(IdentityCheck("kappa_multiplicative", n, dev, 1e-10))

    dev = 0.0
    for _ in range(n):
        qch = reduced_path_channel(random_path_preserving_channel(rng))
        rho = random_density(2, rng)
        u = phase_shift(float(rng.uniform(0, 2 * math.pi)))
        lhs = u @ qch.apply_operator(rho) @ u.conj().T
        rhs = qch.apply_operator(u @ rho @ u.conj().T)
        dev = max(dev, float(np.sum(np.abs(np.linalg.eigvalsh(lhs - rhs)))))
    out.append(IdentityCheck("phase_commutes_with_path_preserving", n, dev, 1e-9))

    dev = 0.0
    for _ in range(n):
        env = random_path_preserving_channel(rng)
        c0 = random_povm_element(2, rng)
        dev = max(dev, reference_identity_deviation(Scenario("retrodictive", c0, environment=env)))
    out.append(IdentityCheck("reference_min_hmax_vs_visibility", n, dev, tolerance))

    dev = 0.0
    for _ in range(n):
        r = float(rng.uniform(0, 1))
        env = random_path_preserving_channel(rng)
        rho_p = random_density(2, rng)
        sc = qbs_scenario(r, 0.0, env).replace(qbs=QbsSpec(r, rho_p))
        v = retrodictive_quantities(sc)
        formula = qbs_visibility_formula(r, rho_p, coherence_factor(env, PATH_LABEL))
        dev = max(dev, abs(v.V - formula), abs(v.V_i - formula))
    out.append(IdentityCheck("qbs_visibility_formula", n, dev, tolerance))

    dev = 0.0
    for _ in range(n):
        iso = PathIsometry.random(rng, (2, 2, 2))
        _, vb = banaszek_quantities(iso)
        dev = max(dev, abs(vb - banaszek_operational_v(iso)[0]))
    out.append(IdentityCheck("banaszek_vb_operational", n, dev, tolerance))
    return out
