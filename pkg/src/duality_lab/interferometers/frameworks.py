"""Predictive, retrodictive and hybrid evaluation of a :class:`Scenario`.

Every framework reduces the scenario to the interfering qubit ``S``. The
input is projected onto the interfering subspace and expressed in its
two-dimensional basis, the environment acts on ``S`` and the detection
element is restricted to the same subspace. A quantum beam splitter is folded
into an effective detection element on ``S`` when only click probabilities
are needed, and simulated explicitly when the polarization is kept.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from ..entropy import (
    bloch_vector,
    hmin_cond,
    max_pguess_xy,
    min_hmax_xy,
    pguess_binary,
)
from ..optimize import maximize_periodic, minimize_periodic
from ..qstate import (
    PHI_PLUS,
    Z_BASIS,
    QuantumState,
    apply_channel,
    apply_unitary,
    copy_isometry,
    measure_binary,
    postselect,
    qbs_unitary,
    tensor,
)
from .scenario import PATH_LABEL, POL_LABEL, REF_LABEL, Scenario, ScenarioError

VIS_GRID = 720


class VisibilityError(ArithmeticError):
    """The detector never clicks, so the fringe visibility is undefined."""


@dataclass
class DualityQuantities:
    """Wave and particle measures of one scenario; ``None`` when not applicable.

    Squared-form measures live in ``[0, 1]``. The entropy fields are in bits:
    ``Hmin_Z_E1`` / ``Hmax_W_E2`` are the two terms of the main uncertainty
    relation for the scenario's natural choice of ``E1`` and ``E2``, and
    ``Hmin_Z`` / ``Hmax_W`` are their unconditional counterparts.
    """

    V: float | None = None
    P: float | None = None
    D: float | None = None
    D_i: float | None = None
    V_i: float | None = None
    D_i_P: float | None = None
    D_i_P_dec: float | None = None
    D_Qprime: float | None = None
    P_Gamma: float | None = None
    V_Gamma: float | None = None
    C: float | None = None
    D_B: float | None = None
    V_B: float | None = None
    D_g: float | None = None
    V_g: float | None = None
    Hmin_Z_E1: float | None = None
    Hmax_W_E2: float | None = None
    Hmin_Z: float | None = None
    Hmax_W: float | None = None

    def as_dict(self) -> dict[str, float]:
        """Only the fields that were computed."""
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


# --------------------------------------------------------------------------
# reduction to the interfering qubit


def compress(sc: Scenario, op: np.ndarray) -> np.ndarray:
    """Restrict an operator on the path space to the interfering qubit."""
    b = sc.interfering_basis()
    return b.conj().T @ np.asarray(op, dtype=complex) @ b


def interfering_input(sc: Scenario) -> QuantumState:
    """``Pi rho Pi / tr(Pi rho)`` as a qubit state on ``S``; ``norm_prob`` is ``tr(Pi rho)``."""
    rho = sc.physical_input()
    return QuantumState.from_unnormalized(compress(sc, rho), (PATH_LABEL,), (2,))


def _env(sc: Scenario, s: QuantumState) -> QuantumState:
    return s if sc.environment is None else apply_channel(sc.environment, s)


def effective_detection(sc: Scenario) -> np.ndarray:
    """Detection element on ``S`` with the quantum beam splitter (if any) folded in.

    For a QBS this is ``Tr_P[(rho_P (x) 1) U^dag (1 (x) C0) U]``; coherences of
    ``rho_P`` between ``|H>`` and ``|V>`` drop out because the polarization is
    not observed.
    """
    c = compress(sc, sc.detection.op)
    if sc.qbs is None:
        return c
    u = qbs_unitary(sc.qbs.R)
    m = u.conj().T @ np.kron(np.eye(2), c) @ u
    t = m.reshape(2, 2, 2, 2)
    # tr_P[(rho_P (x) 1) m] = sum_{ab} rho_P[b, a] m[a, :, b, :]
    return np.einsum("ba,aibj->ij", sc.qbs.rho_p, t)


def state_at_t2(sc: Scenario, rho1: QuantumState | None = None) -> QuantumState:
    """Quanton plus environment just before the phase is applied."""
    return _env(sc, rho1 if rho1 is not None else interfering_input(sc))


# --------------------------------------------------------------------------
# fringe visibility


def click_probability(c: np.ndarray, rho: np.ndarray, phis) -> np.ndarray:
    """``tr(C U_phi rho U_phi^dag)`` for 2x2 ``C`` and ``rho`` over an array of phases."""
    phis = np.asarray(phis, dtype=float)
    a = np.real(c[0, 0] * rho[0, 0] + c[1, 1] * rho[1, 1])
    return a + 2.0 * np.real(c[0, 1] * rho[1, 0] * np.exp(1j * phis))


def fringe_visibility_from(c: np.ndarray, rho: np.ndarray, n_grid: int = VIS_GRID) -> float:
    """Sweep ``phi`` (grid plus golden-section) and return ``(pmax - pmin) / (pmax + pmin)``."""
    f = lambda x: float(click_probability(c, rho, [x])[0])
    g = lambda xs: click_probability(c, rho, xs)
    _, pmax = maximize_periodic(f, g, n_grid=n_grid)
    _, pmin = minimize_periodic(f, g, n_grid=n_grid)
    if pmax + pmin < 1e-12:
        raise VisibilityError("detector click probability vanishes for every phase")
    return min(1.0, max(0.0, (pmax - pmin) / (pmax + pmin)))


def analytic_visibility(c: np.ndarray, rho: np.ndarray) -> float:
    """Closed form of the qubit sweep: ``2 |C01 rho10| / (C00 rho00 + C11 rho11)``."""
    a = float(np.real(c[0, 0] * rho[0, 0] + c[1, 1] * rho[1, 1]))
    if a < 1e-12:
        raise VisibilityError("detector click probability vanishes for every phase")
    return min(1.0, 2.0 * abs(c[0, 1] * rho[1, 0]) / a)


def fringe_visibility_sweep(sc: Scenario, rho1: QuantumState | None = None) -> float:
    """Fringe visibility of ``sc`` for its physical input (or ``rho1`` on ``S``)."""
    rho2 = state_at_t2(sc, rho1).reduced(PATH_LABEL)
    return fringe_visibility_from(effective_detection(sc), rho2)


def unbiased_weight(sc: Scenario, atol: float = 1e-10) -> float | None:
    """``q`` if the restricted detection ``Pi C0 Pi`` equals ``q |w+><w+|``, else ``None``."""
    c = compress(sc, sc.detection.op)
    w = np.linalg.eigvalsh(0.5 * (c + c.conj().T))
    if w[0] > atol or w[1] < atol:
        return None
    if abs(c[0, 0] - c[1, 1]) > atol:
        return None
    return float(w[1])


# --------------------------------------------------------------------------
# frameworks


def _guess_advantage(s: QuantumState, on: str, side) -> float:
    return 2.0 * pguess_binary(measure_binary(s, Z_BASIS, on, side=side)) - 1.0


def _hmin_z(s: QuantumState, on: str, side) -> float:
    return hmin_cond(measure_binary(s, Z_BASIS, on, side=side)).value


def predictive_quantities(sc: Scenario) -> DualityQuantities:
    """``P``, ``D`` and ``V`` for the state at time t2 and the terms of the main relation.

    ``D`` conditions on every environment output; ``E2`` is trivial.
    """
    if sc.framework != "predictive":
        raise ScenarioError("predictive_quantities needs a predictive scenario")
    s2 = state_at_t2(sc)
    rho = s2.reduced(PATH_LABEL)
    p0, p1 = float(np.real(rho[0, 0])), float(np.real(rho[1, 1]))
    side = list(sc.env_labels)
    hmax_w = min_hmax_xy(s2, PATH_LABEL).value
    return DualityQuantities(
        V=fringe_visibility_from(effective_detection(sc), rho),
        P=abs(p0 - p1),
        D=_guess_advantage(s2, PATH_LABEL, side),
        Hmin_Z_E1=_hmin_z(s2, PATH_LABEL, side),
        Hmax_W_E2=hmax_w,
        Hmin_Z=-math.log2(max(p0, p1)),
        Hmax_W=hmax_w,
    )


def _detect(sc: Scenario, s: QuantumState, rho_p: np.ndarray | None = None) -> QuantumState:
    """Close the interferometer (phase 0) and post-select on ``D0``.

    Without a quantum beam splitter this is ``Tr_S[C0 (.)]``. With one, the
    polarization is appended, the controlled beam splitter acts on ``P S``
    and ``P`` stays in the output.
    """
    c = compress(sc, sc.detection.op)
    if sc.qbs is None:
        return postselect(s, c, PATH_LABEL)
    rho_p = sc.qbs.rho_p if rho_p is None else rho_p
    s = tensor(s, QuantumState(rho_p, (POL_LABEL,), (2,)))
    s = apply_unitary(qbs_unitary(sc.qbs.R), s, (POL_LABEL, PATH_LABEL))
    return postselect(s, c, PATH_LABEL)


def retrodictive_state(sc: Scenario, rho_p: np.ndarray | None = None) -> QuantumState:
    """``rho-bar^{D0}`` on ``Qp`` plus environment (plus ``P`` for a QBS)."""
    phi = QuantumState.pure(PHI_PLUS, (REF_LABEL, PATH_LABEL), (2, 2))
    return _detect(sc, _env(sc, phi), rho_p)


def hybrid_state(sc: Scenario) -> QuantumState:
    """Copy the which-path information of the physical input to ``Qp`` and detect."""
    rho1 = interfering_input(sc)
    vc = copy_isometry(2)
    op = vc @ rho1.op @ vc.conj().T
    s = QuantumState(op, (REF_LABEL, PATH_LABEL), (2, 2), rho1.norm_prob)
    return _detect(sc, _env(sc, s))


def _reference_measures(s: QuantumState, env_labels) -> dict[str, float]:
    side = [lab for lab in env_labels if lab in s.labels]
    pg_w, _ = max_pguess_xy(s, REF_LABEL)
    return {
        "D": _guess_advantage(s, REF_LABEL, side),
        "V": 2.0 * pg_w - 1.0,
        "Hmin_Z_E1": _hmin_z(s, REF_LABEL, side),
        "Hmax_W_E2": min_hmax_xy(s, REF_LABEL).value,
    }


def _dephase(rho: np.ndarray) -> np.ndarray:
    return np.diag(np.diag(rho))


def retrodictive_quantities(sc: Scenario) -> DualityQuantities:
    """Input distinguishability/visibility of the detection event, and the fringe ``V``.

    With a quantum beam splitter also ``D_i_P`` (conditioning on the output
    polarization) and ``D_i_P_dec`` (same, with the polarization dephased in
    the ``H/V`` basis beforehand).
    """
    if sc.framework != "retrodictive":
        raise ScenarioError("retrodictive_quantities needs a retrodictive scenario")
    s = retrodictive_state(sc)
    m = _reference_measures(s, sc.env_labels)
    rho_ref = s.reduced(REF_LABEL)
    out = DualityQuantities(
        V=fringe_visibility_sweep(sc),
        D_i=m["D"],
        V_i=m["V"],
        Hmin_Z_E1=m["Hmin_Z_E1"],
        Hmax_W_E2=m["Hmax_W_E2"],
        Hmin_Z=-math.log2(max(float(np.real(rho_ref[0, 0])), float(np.real(rho_ref[1, 1])))),
        Hmax_W=m["Hmax_W_E2"],
    )
    if sc.qbs is not None:
        side = [*sc.env_labels, POL_LABEL]
        out.D_i_P = _guess_advantage(s, REF_LABEL, side)
        s_dec = retrodictive_state(sc, _dephase(sc.qbs.rho_p))
        out.D_i_P_dec = _guess_advantage(s_dec, REF_LABEL, side)
    return out


def hybrid_quantities(sc: Scenario) -> DualityQuantities:
    """``D_Q'`` from the copy register, ``V`` from the sweep with the physical input.

    ``V_i`` holds the register's XY guessing advantage, which equals ``V``
    for path-preserving environments.
    """
    if sc.framework != "hybrid":
        raise ScenarioError("hybrid_quantities needs a hybrid scenario")
    s = hybrid_state(sc)
    m = _reference_measures(s, sc.env_labels)
    rho_ref = s.reduced(REF_LABEL)
    return DualityQuantities(
        V=fringe_visibility_sweep(sc),
        D_Qprime=m["D"],
        V_i=m["V"],
        Hmin_Z_E1=m["Hmin_Z_E1"],
        Hmax_W_E2=m["Hmax_W_E2"],
        Hmin_Z=-math.log2(max(float(np.real(rho_ref[0, 0])), float(np.real(rho_ref[1, 1])))),
        Hmax_W=m["Hmax_W_E2"],
    )


def scenario_quantities(sc: Scenario) -> DualityQuantities:
    """Dispatch on ``sc.framework``."""
    return {
        "predictive": predictive_quantities,
        "retrodictive": retrodictive_quantities,
        "hybrid": hybrid_quantities,
    }[sc.framework](sc)


def xy_bloch_length(rho: np.ndarray) -> float:
    x, y, _ = bloch_vector(rho)
    return min(1.0, math.hypot(x, y))
