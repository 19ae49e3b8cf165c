"""Reference implementations that share no code with the package.

They are deliberately slow and literal: scipy's ``sqrtm``/``svdvals`` for
fidelities and trace norms, explicit index loops for partial traces,
closed-form 2x2 formulas, brute-force grids for optimizations.
"""

import math

import numpy as np
import scipy.linalg as sla


def trace_norm(a):
    return float(np.sum(sla.svdvals(np.asarray(a, dtype=complex))))


def sqrtm_psd(a):
    a = np.asarray(a, dtype=complex)
    r = sla.sqrtm(0.5 * (a + a.conj().T))
    return np.asarray(r, dtype=complex)


def fidelity(m, n):
    return trace_norm(sqrtm_psd(m) @ sqrtm_psd(n))


def fidelity_2x2(m, n):
    """Root fidelity of two 2x2 PSD matrices, ``sqrt(tr(MN) + 2 sqrt(det M det N))``.

    ``m`` may be a stack ``(k, 2, 2)``; ``n`` is a single matrix.
    """
    m = np.asarray(m, dtype=complex)
    tr = np.real(np.einsum("...ij,ji->...", m, n))
    det = np.real(np.linalg.det(m)) * np.real(np.linalg.det(n))
    return np.sqrt(np.clip(tr + 2.0 * np.sqrt(np.clip(det, 0.0, None)), 0.0, None))


def partial_trace(rho, dims, keep):
    """Loop-based partial trace keeping the subsystems listed in ``keep`` (sorted order)."""
    dims = list(dims)
    keep = sorted(keep)
    n = len(dims)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    out = np.zeros((dk, dk), dtype=complex)
    for r in np.ndindex(*dims):
        for c in np.ndindex(*dims):
            if any(r[i] != c[i] for i in range(n) if i not in keep):
                continue
            ri = np.ravel_multi_index([r[i] for i in keep], [dims[i] for i in keep]) if keep else 0
            ci = np.ravel_multi_index([c[i] for i in keep], [dims[i] for i in keep]) if keep else 0
            out[ri, ci] += rho[np.ravel_multi_index(r, dims), np.ravel_multi_index(c, dims)]
    return out


def sphere_points(n):
    """Fibonacci lattice of ``n`` unit vectors."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    rho = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def bloch_to_density(vecs):
    vecs = np.atleast_2d(vecs)
    x, y, z = vecs[:, 0], vecs[:, 1], vecs[:, 2]
    out = np.empty((len(vecs), 2, 2), dtype=complex)
    out[:, 0, 0] = (1 + z) / 2
    out[:, 1, 1] = (1 - z) / 2
    out[:, 0, 1] = (x - 1j * y) / 2
    out[:, 1, 0] = (x + 1j * y) / 2
    return out


def bloch_ball_grid(n):
    """About ``n`` qubit density matrices spread over the Bloch ball (shells of a Fibonacci sphere)."""
    shells = np.linspace(0.0, 1.0, 10)[1:]
    per = max(1, n // len(shells))
    vecs = np.concatenate([r * sphere_points(per) for r in shells] + [np.zeros((1, 3))])
    return bloch_to_density(vecs)


def helstrom_grid(sigma0, sigma1, n=10_000):
    """Best guessing probability over projective qubit measurements on a direction grid.

    The trivial measurements (always guess 0, always guess 1) are included:
    they are optimal when one conditional dominates the other.
    """
    proj = bloch_to_density(sphere_points(n))
    a = np.real(np.einsum("kij,ji->k", proj, sigma0))
    b = np.real(np.einsum("kij,ji->k", proj, sigma1))
    tr1 = float(np.real(np.trace(sigma1)))
    tr0 = float(np.real(np.trace(sigma0)))
    # outcome k -> guess 0, complement -> guess 1, and the swapped assignment
    return float(max(np.max(a + tr1 - b), np.max(b + tr0 - a), tr0, tr1))


def click_curve(c, rho, n=20_000):
    phis = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    out = np.empty(n)
    for i, phi in enumerate(phis):
        u = np.diag([1.0, np.exp(1j * phi)])
        out[i] = np.real(np.trace(c @ u @ rho @ u.conj().T))
    return out


def visibility_dense(c, rho, n=20_000):
    p = click_curve(c, rho, n)
    return float((p.max() - p.min()) / (p.max() + p.min()))


def blocker_distinguishability(sigma0, sigma1):
    """Which-input guessing advantage by brute force over Bloch-sphere projective measurements.

    ``sigma_j`` are the (subnormalized) conditional states of the reference
    given that the detector clicked; the advantage is normalized by the click
    probability.
    """
    p = float(np.real(np.trace(sigma0 + sigma1)))
    pg = helstrom_grid(sigma0 / p, sigma1 / p, n=20_000)
    return 2.0 * pg - 1.0


def random_density(d, rng, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_psd(d, rng, scale=1.0):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * g @ g.conj().T / d
