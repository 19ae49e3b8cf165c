"""Dense complex matrix kernels.

Every entropic quantity in this package reduces to a handful of operations on
small Hermitian matrices: eigendecomposition, singular values, PSD square
roots, the trace norm and the (root) fidelity ``||sqrt(M) sqrt(N)||_1``.
Operators are plain ``numpy`` arrays; dimensions are assumed small (<= 64).
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_RTOL = 1e-10


class NotHermitianError(ValueError):
    """Raised when an operator that must be Hermitian is not."""


class NotPSDError(ValueError):
    """Raised when an operator has an eigenvalue below the clamp threshold."""


def as_operator(a) -> np.ndarray:
    """Return ``a`` as a square complex array, raising on bad shapes."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def asymmetry(a: np.ndarray) -> float:
    """Frobenius norm of ``a - a^dagger``."""
    return float(np.linalg.norm(a - a.conj().T))


def is_hermitian(a, atol: float = HERMITIAN_ATOL) -> bool:
    a = as_operator(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol * max(1.0, np.max(np.abs(a), initial=0.0)))


def _psd_floor(a: np.ndarray) -> float:
    scale = max(abs(float(np.real(np.trace(a)))), float(np.max(np.abs(a), initial=0.0)))
    return -PSD_RTOL * scale


def is_psd(a) -> bool:
    a = as_operator(a)
    if not is_hermitian(a):
        return False
    return bool(np.linalg.eigvalsh(a)[0] >= _psd_floor(a))


def hermitian_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns:
        ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in descending
        order and eigenvectors as the columns of a unitary matrix, so that
        ``a == V @ diag(w) @ V^dagger``.

    Raises:
        NotHermitianError: if ``a`` is not Hermitian; the message carries the
            norm of the anti-Hermitian part.
    """
    a = as_operator(a)
    if not is_hermitian(a):
        raise NotHermitianError(f"operator is not Hermitian: ||A - A^dag||_F = {asymmetry(a):.3e}")
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(as_operator(a), compute_uv=False)


def trace_norm(a) -> float:
    """Sum of singular values of ``a``.

    Hermitian input takes the eigenvalue route, anything else goes through a
    direct SVD.
    """
    a = as_operator(a)
    if is_hermitian(a):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return float(np.sum(singular_values(a)))


def psd_sqrt(a) -> np.ndarray:
    """Principal square root of a positive semi-definite operator.

    Eigenvalues in ``[-1e-10 * tr(a), 0)`` are clamped to zero; anything more
    negative raises :class:`NotPSDError`.
    """
    a = as_operator(a)
    w, v = hermitian_eig(a)
    floor = _psd_floor(a)
    if w[-1] < floor:
        raise NotPSDError(f"operator is not PSD: min eigenvalue {w[-1]:.3e} < {floor:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(m, n) -> float:
    """Root fidelity ``F(M, N) = ||sqrt(M) sqrt(N)||_1`` of two PSD operators.

    This is the unsquared convention: ``F(rho, rho) == tr(rho)`` and for pure
    states ``F = |<psi|phi>|``. Subnormalized operands are allowed.
    """
    m = as_operator(m)
    n = as_operator(n)
    if m.shape != n.shape:
        raise ValueError(f"dimension mismatch: {m.shape} vs {n.shape}")
    return float(np.sum(singular_values(psd_sqrt(m) @ psd_sqrt(n))))


def partial_trace_dims(a: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem whose index is not in ``keep``.

    ``keep`` is an ordered sequence of subsystem indices; the result is laid
    out in that order.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(keep)
    n = len(dims)
    t = np.asarray(a).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # einsum over row/column index labels
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for i in traced:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(dk, dk)


def permute_subsystems(a: np.ndarray, dims, order) -> np.ndarray:
    """Reorder the tensor factors of an operator on ``prod(dims)``."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    order = tuple(order)
    t = np.asarray(a).reshape(dims + dims)
    t = t.transpose(order + tuple(n + i for i in order))
    d = int(np.prod(dims))
    return t.reshape(d, d)


def psd_sqrt_batch(a: np.ndarray) -> np.ndarray:
    """Square roots of a stack ``(n, d, d)`` of Hermitian PSD matrices (negatives clamped)."""
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    w, v = np.linalg.eigh(a)
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def fidelity_batch(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Root fidelities of two stacks of PSD matrices, shape ``(k,)``."""
    prod = psd_sqrt_batch(m) @ psd_sqrt_batch(n)
    return np.sum(np.linalg.svd(prod, compute_uv=False), axis=-1)


def trace_norm_hermitian_batch(a: np.ndarray) -> np.ndarray:
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    return np.sum(np.abs(np.linalg.eigvalsh(a)), axis=-1)
