"""Random, precondition-respecting instances for every relation.

Each sampler draws from its own generator and returns the quantities the
relation needs together with the scalar parameters it drew. Because the
generator is seeded from ``(seed, relation index, sample index)``, that
triple alone replays a sample exactly.
"""

from __future__ import annotations

import math

import numpy as np

from ..entropy import hmin_cond, max_pguess_xy, min_hmax_xy, pguess_binary
from ..interferometers import (
    PathIsometry,
    QbsSpec,
    Scenario,
    banaszek_quantities,
    bloch_projectors,
    erasure_coherence,
    erasure_quantities,
    hybrid_quantities,
    predictive_quantities,
    qbs_scenario,
    retrodictive_quantities,
    xy_detection,
)
from ..qstate import (
    Z_BASIS,
    QuantumState,
    measure_binary,
    random_density,
    random_isometry_channel,
    random_path_preserving_channel,
    random_povm_element,
)


def random_tripartite(rng: np.random.Generator, max_side: int = 3) -> QuantumState:
    """Random mixed state on ``A E1 E2`` with ``A`` a qubit and side dims in ``1..max_side``."""
    d1 = int(rng.integers(1, max_side + 1))
    d2 = int(rng.integers(1, max_side + 1))
    d = 2 * d1 * d2
    rank = int(rng.integers(1, d + 1))
    return QuantumState(random_density(d, rng, rank), ("A", "E1", "E2"), (2, d1, d2))


def eur_terms(s: QuantumState, a: str = "A", e1: str = "E1", e2: str = "E2") -> dict[str, float]:
    """``H_min(Z|E1)``, ``min_W H_max(W|E2)`` and the guessing advantages ``D_g``, ``V_g``."""
    side1 = [e1] if s.dim_of(e1) > 1 else []
    side2 = [e2] if s.dim_of(e2) > 1 else []
    cq = measure_binary(s, Z_BASIS, a, side=side1)
    pg_w, _ = max_pguess_xy(s, a, side2)
    return {
        "Hmin_Z_E1": hmin_cond(cq).value,
        "Hmax_W_E2": min_hmax_xy(s, a, side2).value,
        "D_g": 2.0 * pguess_binary(cq) - 1.0,
        "V_g": 2.0 * pg_w - 1.0,
    }


def _eur_main(rng):
    s = random_tripartite(rng)
    q = eur_terms(s)
    return q, {"dims": list(s.dims)}


def _generic(rng):
    return _eur_main(rng)


def _maassen_uffink(rng):
    rank = int(rng.integers(1, 3))
    s = QuantumState(random_density(2, rng, rank), ("A",), (2,))
    rho = s.op
    p0 = float(np.real(rho[0, 0]))
    return {"Hmin_Z": -math.log2(max(p0, 1.0 - p0)), "Hmax_W": min_hmax_xy(s, "A").value}, {"rank": rank}


def _predictive_scenario(rng, env_dim=None) -> tuple[Scenario, dict]:
    r1 = float(rng.uniform(0.0, 1.0))
    env = random_path_preserving_channel(rng, env_dim)
    phi0 = float(rng.uniform(0.0, 2 * math.pi))
    qw = float(rng.uniform(0.05, 1.0))
    sc = Scenario("predictive", xy_detection(phi0, qw), bs1_reflectivity=r1, environment=env, name="random")
    return sc, {"R1": r1, "env_dim": env.output_dims[1], "phi0": phi0, "q": qw}


def _dv(rng):
    sc, params = _predictive_scenario(rng)
    return predictive_quantities(sc).as_dict(), params


def _retro(rng):
    env_dim = int(rng.integers(1, 4))
    general = bool(rng.integers(0, 2))
    env = random_isometry_channel(rng, env_dim) if general else random_path_preserving_channel(rng, env_dim)
    c0 = random_povm_element(2, rng)
    sc = Scenario("retrodictive", c0, environment=env, name="random")
    return retrodictive_quantities(sc).as_dict(), {"env_dim": env_dim, "path_preserving": not general}


def _qbs(rng):
    r = float(rng.uniform(0.0, 1.0))
    alpha = float(rng.uniform(0.0, math.pi / 2))
    env = random_path_preserving_channel(rng)
    rank = int(rng.integers(1, 3))
    rho_p = random_density(2, rng, rank)
    sc = qbs_scenario(r, alpha, env).replace(qbs=QbsSpec(r, rho_p))
    return retrodictive_quantities(sc).as_dict(), {"R": r, "env_dim": env.output_dims[1], "rho_p_rank": rank}


def _hybrid(rng):
    rho1 = random_density(2, rng, int(rng.integers(1, 3)))
    env = random_path_preserving_channel(rng)
    c0 = random_povm_element(2, rng)
    sc = Scenario("hybrid", c0, environment=env, input_state=rho1, name="random")
    return hybrid_quantities(sc).as_dict(), {"env_dim": env.output_dims[1], "p0": float(np.real(rho1[0, 0]))}


def _erasure_gamma(rng):
    sc, params = _predictive_scenario(rng, env_dim=2)
    theta = float(rng.uniform(0.0, math.pi))
    phi = float(rng.uniform(0.0, 2 * math.pi))
    g0 = bloch_projectors(theta, phi)
    er = erasure_quantities(sc, [g0, np.eye(2) - g0], exact_sweep=False)
    params.update(theta=theta, phi=phi)
    return {"P_Gamma": er.P_Gamma, "V_Gamma": er.V_Gamma}, params


def _erasure_pc(rng):
    sc, params = _predictive_scenario(rng, env_dim=2)
    q = predictive_quantities(sc).as_dict()
    q["C"], _ = erasure_coherence(sc)
    return q, params


def _banaszek(rng):
    iso = PathIsometry.random(rng, (2, 2, 2))
    d_b, v_b = banaszek_quantities(iso)
    return {"D_B": d_b, "V_B": v_b}, {"dims": [2, 2, 2]}


SAMPLERS = {
    "DV": _dv,
    "PV": _dv,
    "DiVi": _retro,
    "DiV_qbs": _qbs,
    "DiP_V": _qbs,
    "EUR_main": _eur_main,
    "EUR_maassen_uffink": _maassen_uffink,
    "Hybrid": _hybrid,
    "ErasurePGammaV": _erasure_gamma,
    "ErasurePC": _erasure_pc,
    "Banaszek": _banaszek,
    "Generic": _generic,
}
