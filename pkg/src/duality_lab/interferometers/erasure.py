"""Visibility enhanced by measuring the environment: quantum erasure and the D_B/V_B pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..entropy import max_pguess_xy
from ..matcore import fidelity, trace_norm
from ..qstate import QuantumState, maximally_entangled
from .frameworks import (
    PATH_LABEL,
    analytic_visibility,
    effective_detection,
    fringe_visibility_from,
    state_at_t2,
)
from .scenario import Scenario, ScenarioError

N_THETA = 64
N_PHI = 128


@dataclass(frozen=True)
class ErasureResult:
    P_Gamma: float
    V_Gamma: float
    weights: tuple[float, ...]
    P_k: tuple[float, ...]
    V_k: tuple[float, ...]


def _qf_blocks(sc: Scenario) -> tuple[np.ndarray, int]:
    """``rho^{(2)}`` on ``S (x) F`` as a ``(2, dF, 2, dF)`` tensor, all environment outputs merged into F."""
    s2 = state_at_t2(sc)
    env = list(sc.env_labels)
    s2 = s2.reorder([PATH_LABEL, *env])
    df = s2.dim // 2
    return s2.op.reshape(2, df, 2, df), df


def erasure_quantities(sc: Scenario, gamma, exact_sweep: bool = True) -> ErasureResult:
    """Average predictability and visibility after measuring ``F`` with projectors ``gamma``.

    Args:
        sc: predictive scenario whose environment emits ``F``.
        gamma: orthogonal projectors on ``F`` summing to the identity.
        exact_sweep: compute each ``V_k`` with the phase sweep instead of
            its qubit closed form.
    """
    if sc.framework != "predictive":
        raise ScenarioError("erasure is defined on the predictive state at t2")
    t, df = _qf_blocks(sc)
    gamma = [np.asarray(g, dtype=complex) for g in gamma]
    if any(g.shape != (df, df) for g in gamma):
        raise ScenarioError(f"erasure projectors must act on the environment (dim {df})")
    if not np.allclose(sum(gamma), np.eye(df), atol=1e-9):
        raise ScenarioError("erasure projectors do not sum to the identity")
    for g in gamma:
        if not np.allclose(g @ g, g, atol=1e-9):
            raise ScenarioError("erasure measurement must be projective")
    c = effective_detection(sc)
    vis = fringe_visibility_from if exact_sweep else analytic_visibility
    weights, pk, vk = [], [], []
    for g in gamma:
        # Tr_F[(1 (x) Gamma_k) rho]
        m = np.einsum("ba,iajb->ij", g, t)
        gk = float(np.real(np.trace(m)))
        weights.append(gk)
        if gk < 1e-12:
            pk.append(0.0)
            vk.append(0.0)
            continue
        rho_k = m / gk
        pk.append(abs(float(np.real(rho_k[0, 0] - rho_k[1, 1]))))
        vk.append(vis(c, rho_k))
    p_gamma = float(sum(w * p for w, p in zip(weights, pk)))
    v_gamma = float(sum(w * v for w, v in zip(weights, vk)))
    return ErasureResult(p_gamma, v_gamma, tuple(weights), tuple(pk), tuple(vk))


def bloch_projectors(theta, phi) -> np.ndarray:
    """Rank-1 projectors ``|n><n|`` with ``|n> = cos(t/2)|0> + e^{i p} sin(t/2)|1>``; broadcasts."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    a = np.cos(theta / 2)
    b = np.exp(1j * phi) * np.sin(theta / 2)
    n = np.stack([a, b], axis=-1)
    return n[..., :, None] * np.conj(n[..., None, :])


def _v_gamma_batch(t: np.ndarray, c: np.ndarray, g0: np.ndarray) -> np.ndarray:
    """``V(Gamma)`` for the two-outcome measurements ``{g0, 1 - g0}``, batched over ``g0``.

    Each outcome contributes ``g_k V_k`` with the qubit closed form
    ``V_k = 2 |C01 m10| / (C00 m00 + C11 m11)`` evaluated on the unnormalized
    conditional operator ``m``.
    """
    g1 = np.eye(2)[None] - g0
    total = np.zeros(g0.shape[0])
    for g in (g0, g1):
        m = np.einsum("nba,iajb->nij", g, t)
        a = np.real(c[0, 0] * m[:, 0, 0] + c[1, 1] * m[:, 1, 1])
        weight = np.real(m[:, 0, 0] + m[:, 1, 1])
        ok = a > 1e-15
        vk = np.minimum(1.0, 2.0 * np.abs(c[0, 1] * m[:, 1, 0]) / np.where(ok, a, 1.0))
        total += np.where(ok, vk * weight, 0.0)
    return total


def erasure_coherence(sc: Scenario) -> tuple[float, np.ndarray]:
    """``C = sup_Gamma V(Gamma)`` over projective measurements of a qubit ``F``.

    The trivial one-outcome measurement (``V(Gamma) = V``) is included. Rank-1
    measurements are searched on a 64 x 128 grid of Bloch angles and the best
    point is refined with Nelder-Mead.

    Returns:
        ``(C, Gamma_0)`` where ``Gamma_0`` is the first projector of the
        maximizing measurement (identity for the trivial one).
    """
    if sc.framework != "predictive":
        raise ScenarioError("erasure is defined on the predictive state at t2")
    t, df = _qf_blocks(sc)
    c = effective_detection(sc)
    rho_s = np.einsum("iaja->ij", t)
    trivial = analytic_visibility(c, rho_s)
    if df == 1:
        return trivial, np.eye(1, dtype=complex)
    if df != 2:
        raise ScenarioError("erasure coherence is implemented for a qubit environment only")
    th = (np.arange(N_THETA) + 0.5) * (math.pi / N_THETA)
    ph = np.arange(N_PHI) * (2 * math.pi / N_PHI)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    vals = _v_gamma_batch(t, c, bloch_projectors(tt.ravel(), pp.ravel()))
    k = int(np.argmax(vals))
    x0 = np.array([tt.ravel()[k], pp.ravel()[k]])

    def neg(x):
        return -float(_v_gamma_batch(t, c, bloch_projectors(x[0], x[1])[None])[0])

    res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
    best_x, best = (res.x, -res.fun) if -res.fun >= vals[k] else (x0, float(vals[k]))
    if trivial >= best:
        return trivial, np.eye(2, dtype=complex)
    return min(1.0, float(best)), bloch_projectors(best_x[0], best_x[1])


# --------------------------------------------------------------------------
# Banaszek-type quantities for a path-preserving isometry


@dataclass(frozen=True)
class PathIsometry:
    """``V|j> = |j>_Q (x) |chi_j>_{PTF}`` given by the two records ``chi_j``.

    Attributes:
        records: array ``(2, dP*dT*dF)``; row ``j`` is ``|chi_j>`` in ``P T F`` order.
        dims: ``(dP, dT, dF)``.
    """

    records: np.ndarray
    dims: tuple[int, int, int]

    def __post_init__(self):
        r = np.asarray(self.records, dtype=complex)
        if r.shape != (2, int(np.prod(self.dims))):
            raise ScenarioError("records must have shape (2, dP*dT*dF)")
        if not np.allclose(np.linalg.norm(r, axis=1), 1.0, atol=1e-10):
            raise ScenarioError("records must be normalized")
        object.__setattr__(self, "records", r)

    @property
    def matrix(self) -> np.ndarray:
        """Isometry ``Q -> Q P T F`` of shape ``(2 * dP*dT*dF, 2)``."""
        d = self.records.shape[1]
        v = np.zeros((2 * d, 2), dtype=complex)
        for j in range(2):
            v[j * d:(j + 1) * d, j] = self.records[j]
        return v

    @classmethod
    def random(cls, rng: np.random.Generator, dims=(2, 2, 2)) -> "PathIsometry":
        d = int(np.prod(dims))
        z = rng.standard_normal((2, d)) + 1j * rng.standard_normal((2, d))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        return cls(z, tuple(dims))


def banaszek_quantities(iso: PathIsometry) -> tuple[float, float]:
    """``D_B = ||rho_F^0 - rho_F^1||_1 / 2`` and ``V_B = F(rho_F^0, rho_F^1)``."""
    dp, dt, df = iso.dims
    rf = []
    for j in range(2):
        chi = iso.records[j].reshape(dp * dt, df)
        rf.append(chi.T @ chi.conj())
    return 0.5 * trace_norm(rf[0] - rf[1]), fidelity(rf[0], rf[1])


def choi_state(iso: PathIsometry) -> QuantumState:
    """``|Lambda> = (1 (x) V)|Phi>`` on ``Qp Q P T F``."""
    dp, dt, df = iso.dims
    psi = np.kron(np.eye(2), iso.matrix) @ maximally_entangled(2)
    return QuantumState.pure(psi, ("Qp", "Q", "P", "T", "F"), (2, 2, dp, dt, df))


def banaszek_operational_v(iso: PathIsometry) -> tuple[float, float]:
    """``max_W [2 p_guess(W_Qp | Q P T) - 1]`` on the Choi state and its maximizing phase."""
    pg, phi = max_pguess_xy(choi_state(iso), "Qp", ("Q", "P", "T"))
    return 2.0 * pg - 1.0, phi
