"""Quantum beam splitter: closed forms, full simulation and the optimal polarization observable."""

from __future__ import annotations

import math

import numpy as np

from ..qstate import KrausChannel
from .frameworks import REF_LABEL, DualityQuantities, retrodictive_quantities, retrodictive_state
from .scenario import POL_LABEL, ScenarioError, qbs_scenario


def _check(R: float, alpha: float) -> None:
    if not (0.0 <= R <= 1.0):
        raise ScenarioError(f"R = {R!r} outside [0, 1]")
    if not (-1e-12 <= alpha <= math.pi / 2 + 1e-12):
        raise ScenarioError(f"alpha = {alpha!r} rad outside [0, pi/2]")


def qbs_closed_forms(R: float, alpha: float) -> dict[str, float]:
    """``V``, ``D_i``, ``D_i_P_dec`` and ``D_i_P`` for a trivial environment.

    With ``s = sin(alpha)``::

        V         = 2 sqrt(R (1-R)) s^2
        D_i       = |1 - 2 s^2 (1-R)|
        D_i_P_dec = 1 - s^2 (1 - |2R - 1|)
        D_i_P     = sqrt(1 - 4 R (1-R) s^4)
    """
    _check(R, alpha)
    s2 = math.sin(alpha) ** 2
    return {
        "V": 2.0 * math.sqrt(R * (1.0 - R)) * s2,
        "D_i": abs(1.0 - 2.0 * s2 * (1.0 - R)),
        "D_i_P_dec": 1.0 - s2 * (1.0 - abs(2.0 * R - 1.0)),
        "D_i_P": math.sqrt(max(0.0, 1.0 - 4.0 * R * (1.0 - R) * s2 * s2)),
    }


def qbs_simulated(R: float, alpha: float, environment: KrausChannel | None = None) -> DualityQuantities:
    """Density-matrix simulation of the retrodictive QBS experiment."""
    _check(R, alpha)
    return retrodictive_quantities(qbs_scenario(R, alpha, environment))


def qbs_visibility_formula(R: float, rho_p: np.ndarray, kappa: complex) -> float:
    """``2 |kappa| sqrt(R (1-R)) <V|rho_P|V>``."""
    return 2.0 * abs(kappa) * math.sqrt(R * (1.0 - R)) * float(np.real(rho_p[1, 1]))


def polarization_conditionals(R: float, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """``sigma_P^j``: output polarization jointly with input ``|j>``, given that ``D0`` clicked."""
    s = retrodictive_state(qbs_scenario(R, alpha))
    t = s.reorder((REF_LABEL, POL_LABEL)).op.reshape(2, 2, 2, 2)
    return t[0, :, 0, :].copy(), t[1, :, 1, :].copy()


def optimal_polarization_observable(R: float, alpha: float) -> np.ndarray:
    """Polarization observable whose eigenbasis discriminates ``sigma_P^0`` from ``sigma_P^1``.

    Returns ``v+ v+^dag - v- v-^dag`` for the eigenvectors of
    ``sigma_P^0 - sigma_P^1`` (larger eigenvalue first). When the difference
    is proportional to the identity every basis is optimal and ``Z`` is
    returned.
    """
    s0, s1 = polarization_conditionals(R, alpha)
    delta = s0 - s1
    delta = 0.5 * (delta + delta.conj().T)
    w, v = np.linalg.eigh(delta)
    if abs(w[1] - w[0]) < 1e-12:
        return np.diag([1.0, -1.0]).astype(complex)
    vp, vm = v[:, 1], v[:, 0]
    return np.outer(vp, vp.conj()) - np.outer(vm, vm.conj())


def pguess_in_basis(s0: np.ndarray, s1: np.ndarray, observable: np.ndarray) -> float:
    """Guessing probability when measuring the eigenbasis of ``observable`` and guessing per outcome."""
    _, v = np.linalg.eigh(0.5 * (observable + observable.conj().T))
    total = 0.0
    for k in range(v.shape[1]):
        b = v[:, k]
        total += max(float(np.real(np.vdot(b, s0 @ b))), float(np.real(np.vdot(b, s1 @ b))))
    return total
