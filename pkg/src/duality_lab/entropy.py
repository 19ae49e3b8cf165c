"""Guessing probabilities and min-/max-entropies of binary classical registers.

All logarithms are base 2. Conditional entropies take a
:class:`~duality_lab.qstate.BinaryCqState`; the XY-plane optimizations take a
labeled :class:`~duality_lab.qstate.QuantumState` and the qubit to measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matcore import (
    fidelity,
    fidelity_batch,
    psd_sqrt,
    trace_norm,
    trace_norm_hermitian_batch,
)
from .optimize import maximize_periodic, minimize_periodic
from .qstate import (
    PAULI_X,
    PAULI_Y,
    BinaryCqState,
    QuantumState,
    partial_trace,
    xy_basis,
)

CLOSED_FORM = "closed_form"
NUMERIC = "numeric"


@dataclass(frozen=True)
class XYObservable:
    """Which-phase basis ``|w+-> = (|0> +- e^{i phi0}|1>)/sqrt 2``."""

    phi0: float

    def __post_init__(self):
        object.__setattr__(self, "phi0", float(self.phi0) % (2 * math.pi))

    @property
    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        return xy_basis(self.phi0)

    @property
    def pauli(self) -> np.ndarray:
        """``sigma_W = |w+><w+| - |w-><w-|``."""
        return math.cos(self.phi0) * PAULI_X + math.sin(self.phi0) * PAULI_Y


@dataclass(frozen=True)
class EntropyResult:
    value: float
    argmin_phi: float | None = None
    method: str = CLOSED_FORM

    def __float__(self) -> float:
        return self.value


def pguess_binary(cq: BinaryCqState) -> float:
    """Optimal probability of guessing the bit from the side system (Helstrom)."""
    return 0.5 + 0.5 * trace_norm(cq.sigma0 - cq.sigma1)


def hmin_cond(cq: BinaryCqState) -> EntropyResult:
    return EntropyResult(-math.log2(pguess_binary(cq)))


def hmax_cond(cq: BinaryCqState) -> EntropyResult:
    """``H_max(X|B) = log(1 + 2 ||sqrt(sigma0) sqrt(sigma1)||_1)``."""
    return EntropyResult(math.log2(1.0 + 2.0 * fidelity(cq.sigma0, cq.sigma1)))


def hmax_bound_from_pguess(cq_or_pguess) -> float:
    """Upper bound ``log(1 + sqrt(1 - (2 p_guess - 1)^2))`` on ``H_max``."""
    pg = pguess_binary(cq_or_pguess) if isinstance(cq_or_pguess, BinaryCqState) else float(cq_or_pguess)
    d = min(1.0, max(0.0, 2.0 * pg - 1.0))
    return math.log2(1.0 + math.sqrt(max(0.0, 1.0 - d * d)))


def hmin_uncond(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    return float(-math.log2(np.max(p)))


def hmax_uncond(p: Sequence[float]) -> float:
    """``2 log sum_j sqrt(p_j)``; zero-probability outcomes contribute nothing."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    s = float(np.sum(np.sqrt(p)))
    return 2.0 * math.log2(s)


def hmin_from_distinguishability(d: float) -> float:
    """``1 - log(1 + D)``; inverse of ``D = 2 p_guess - 1``."""
    return 1.0 - math.log2(1.0 + d)


def hmax_from_visibility(v: float) -> float:
    """``log(1 + sqrt(1 - V^2))``."""
    return math.log2(1.0 + math.sqrt(max(0.0, 1.0 - v * v)))


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array([
        2.0 * np.real(rho[0, 1]),
        -2.0 * np.imag(rho[0, 1]),
        np.real(rho[0, 0] - rho[1, 1]),
    ])


# --------------------------------------------------------------------------
# XY-plane optimizations


def _xy_blocks(s: QuantumState, qubit: str, side: Sequence[str]):
    """Blocks ``A = (rho_00 + rho_11)/2`` and ``C = rho_01/2`` on the side system.

    Measuring ``|w+>`` with phase ``phi`` leaves ``A + e^{i phi} C + h.c.``
    and ``|w->`` leaves ``A - (e^{i phi} C + h.c.)``.
    """
    if s.dim_of(qubit) != 2:
        raise ValueError(f"subsystem {qubit!r} is not a qubit (dim {s.dim_of(qubit)})")
    side = [lab for lab in s.labels if lab in set(side)]
    red = partial_trace(s, [qubit, *side]).reorder([qubit, *side])
    rest = red.dim // 2
    t = red.op.reshape(2, rest, 2, rest)
    a = 0.5 * (t[0, :, 0, :] + t[1, :, 1, :])
    c = 0.5 * t[0, :, 1, :]
    return a, c


def _w_conditionals(a: np.ndarray, c: np.ndarray, phis: np.ndarray):
    e = np.exp(1j * np.asarray(phis))[:, None, None]
    off = e * c[None] + np.conj(e) * np.conj(c.T)[None]
    return a[None] + off, a[None] - off


def _hmax_w_grid(a, c, phis):
    s0, s1 = _w_conditionals(a, c, phis)
    return np.log2(1.0 + 2.0 * fidelity_batch(s0, s1))


def min_hmax_xy(s: QuantumState, qubit: str, side: Sequence[str] = (), method: str = "auto") -> EntropyResult:
    """``min over W in XY of H_max(W | side)`` for the qubit ``qubit``.

    Without side information the minimum has the closed form
    ``log(1 + sqrt(1 - r^2))`` where ``r`` is the length of the Bloch vector's
    XY projection. With side information (or ``method="numeric"``) the phase is
    optimized on a 720-point grid refined by golden-section search.
    """
    side = tuple(side)
    if not side and method in ("auto", CLOSED_FORM):
        rho = s.reduced(qubit)
        if rho.shape != (2, 2):
            raise ValueError(f"subsystem {qubit!r} is not a qubit")
        x, y, _ = bloch_vector(rho)
        r = min(1.0, math.hypot(x, y))
        phi = math.atan2(y, x) % (2 * math.pi)
        return EntropyResult(math.log2(1.0 + math.sqrt(max(0.0, 1.0 - r * r))), phi, CLOSED_FORM)
    a, c = _xy_blocks(s, qubit, side)

    def f(phi: float) -> float:
        return float(_hmax_w_grid(a, c, np.array([phi]))[0])

    phi, val = minimize_periodic(f, lambda g: _hmax_w_grid(a, c, g))
    return EntropyResult(val, phi, NUMERIC)


def max_pguess_xy(s: QuantumState, qubit: str, side: Sequence[str] = ()) -> tuple[float, float]:
    """``max over W in XY of p_guess(W | side)`` and the maximizing phase."""
    side = tuple(side)
    if not side:
        x, y, _ = bloch_vector(s.reduced(qubit))
        return 0.5 * (1.0 + min(1.0, math.hypot(x, y))), math.atan2(y, x) % (2 * math.pi)
    a, c = _xy_blocks(s, qubit, side)

    def grid(phis):
        s0, s1 = _w_conditionals(a, c, phis)
        return 0.5 + 0.5 * trace_norm_hermitian_batch(s0 - s1)

    phi, val = maximize_periodic(lambda p: float(grid(np.array([p]))[0]), grid)
    return min(1.0, val), phi


def pguess_xy(s: QuantumState, qubit: str, phi0: float, side: Sequence[str] = ()) -> float:
    """``p_guess(W | side)`` for the single XY basis with phase ``phi0``."""
    a, c = _xy_blocks(s, qubit, tuple(side))
    s0, s1 = _w_conditionals(a, c, np.array([phi0]))
    return float(0.5 + 0.5 * trace_norm_hermitian_batch(s0 - s1)[0])


# --------------------------------------------------------------------------
# fidelity maximization


def fidelity_max_construction(m, n) -> tuple[float, np.ndarray]:
    """Maximize ``F(M, rho) + F(N, rho)`` over density operators ``rho``.

    The optimum is ``sqrt(tr M + tr N + 2 F(M, N))``. The maximizer is
    ``K / tr K`` with ``K = M + N + sqrt(M) V^dag sqrt(N) + sqrt(N) V sqrt(M)``
    where ``V = U1^dag U0^dag`` comes from the SVD ``sqrt(M) sqrt(N) = U0 S U1``.

    Returns:
        ``(value, rho_star)``.
    """
    m = np.asarray(m, dtype=complex)
    n = np.asarray(n, dtype=complex)
    sm, sn = psd_sqrt(m), psd_sqrt(n)
    u0, svals, u1 = np.linalg.svd(sm @ sn)
    v = u1.conj().T @ u0.conj().T
    k = m + n + sm @ v.conj().T @ sn + sn @ v @ sm
    k = 0.5 * (k + k.conj().T)
    f_mn = float(np.sum(svals))
    value = math.sqrt(max(0.0, float(np.real(np.trace(m) + np.trace(n))) + 2.0 * f_mn))
    tr_k = float(np.real(np.trace(k)))
    if tr_k <= 0:
        raise ValueError("both operators vanish; no maximizer")
    return value, k / tr_k
