"""Labeled multipartite states, Kraus channels, POVM elements and post-selection.

Subsystems are always addressed by string label, never by position. A
:class:`QuantumState` carries its labels, their dimensions, and the
probability of the post-selection events that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matcore import (
    NotPSDError,
    as_operator,
    is_hermitian,
    partial_trace_dims,
    permute_subsystems,
)

ZERO_PROB = 1e-12
TRACE_TOL = 1e-9


class ZeroProbabilityError(ValueError):
    """A post-selection or trace-decreasing operation left (almost) nothing."""


class LabelError(KeyError):
    """An operation referred to an unknown or duplicated subsystem label."""


def _dims_product(dims) -> int:
    return int(np.prod(dims)) if len(dims) else 1


def _check_psd(op: np.ndarray, what: str) -> None:
    if not is_hermitian(op, atol=1e-10):
        raise NotPSDError(f"{what} is not Hermitian")
    w = np.linalg.eigvalsh(0.5 * (op + op.conj().T))
    tr = float(np.real(np.trace(op)))
    if w[0] < -1e-10 * max(tr, 1.0):
        raise NotPSDError(f"{what} has negative eigenvalue {w[0]:.3e}")


@dataclass(frozen=True)
class QuantumState:
    """A normalized density operator on labeled subsystems.

    Attributes:
        op: density matrix on the tensor product of ``dims`` in label order.
        labels: subsystem names, e.g. ``("Qp", "Q", "F")``.
        dims: dimension of each labeled subsystem.
        norm_prob: probability of the post-selections that produced the state.
    """

    op: np.ndarray
    labels: tuple[str, ...]
    dims: tuple[int, ...]
    norm_prob: float = 1.0

    def __post_init__(self):
        op = as_operator(self.op)
        labels = tuple(self.labels)
        dims = tuple(int(d) for d in self.dims)
        if len(labels) != len(dims):
            raise ValueError(f"{len(labels)} labels for {len(dims)} subsystems")
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate labels in {labels}")
        if op.shape[0] != _dims_product(dims):
            raise ValueError(f"operator of dim {op.shape[0]} does not match subsystem dims {dims}")
        tr = float(np.real(np.trace(op)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"state trace is {tr!r}, expected 1")
        _check_psd(op, "state")
        if not (0.0 < self.norm_prob <= 1.0 + 1e-12):
            raise ValueError(f"norm_prob {self.norm_prob!r} outside (0, 1]")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_unnormalized(cls, op, labels, dims, norm_prob: float = 1.0) -> "QuantumState":
        """Renormalize ``op``, folding its trace into ``norm_prob``."""
        op = as_operator(op)
        tr = float(np.real(np.trace(op)))
        if tr < ZERO_PROB:
            raise ZeroProbabilityError(f"zero-probability event (trace {tr:.3e})")
        op = op / tr
        op = 0.5 * (op + op.conj().T)
        return cls(op, tuple(labels), tuple(dims), norm_prob * tr)

    @classmethod
    def pure(cls, psi, labels, dims) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(labels), tuple(dims))

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown subsystem label {label!r}; have {self.labels}") from None

    def reduced(self, *keep: str) -> np.ndarray:
        """Reduced density matrix on ``keep`` (in the given order)."""
        idx = [self.index(k) for k in keep]
        return partial_trace_dims(self.op, self.dims, idx)

    def reorder(self, labels: Sequence[str]) -> "QuantumState":
        labels = tuple(labels)
        if sorted(labels) != sorted(self.labels):
            raise LabelError(f"reorder {labels} is not a permutation of {self.labels}")
        order = [self.index(lab) for lab in labels]
        op = permute_subsystems(self.op, self.dims, order)
        return QuantumState(op, labels, tuple(self.dims[i] for i in order), self.norm_prob)


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive map given by Kraus operators.

    The channel consumes the subsystems ``input_labels`` and produces
    ``output_labels`` with dimensions ``output_dims``. Each Kraus operator has
    shape ``(prod(output_dims), prod(input_dims))``.
    """

    kraus_ops: tuple[np.ndarray, ...]
    input_labels: tuple[str, ...]
    output_labels: tuple[str, ...]
    output_dims: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators have inconsistent shapes")
        if shape[0] != _dims_product(self.output_dims):
            raise ValueError(f"Kraus output dim {shape[0]} does not match output dims {self.output_dims}")
        if len(self.output_labels) != len(self.output_dims):
            raise ValueError("output labels and dims differ in length")
        s = sum(k.conj().T @ k for k in ops)
        if np.linalg.eigvalsh(0.5 * (s + s.conj().T))[-1] > 1.0 + 1e-9:
            raise ValueError("Kraus operators are not trace non-increasing")
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "input_labels", tuple(self.input_labels))
        object.__setattr__(self, "output_labels", tuple(self.output_labels))
        object.__setattr__(self, "output_dims", tuple(int(d) for d in self.output_dims))

    @property
    def input_dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    def is_trace_preserving(self, atol: float = 1e-9) -> bool:
        s = sum(k.conj().T @ k for k in self.kraus_ops)
        return bool(np.allclose(s, np.eye(self.input_dim), atol=atol))

    def apply_operator(self, x) -> np.ndarray:
        """``sum_k K x K^dagger`` on a bare operator (need not be a state)."""
        x = np.asarray(x, dtype=complex)
        return sum(k @ x @ k.conj().T for k in self.kraus_ops)

    def compose(self, first: "KrausChannel") -> "KrausChannel":
        """The channel ``self o first``; ``first``'s outputs must be ``self``'s inputs."""
        if first.output_labels != self.input_labels:
            raise LabelError(f"cannot compose: {first.output_labels} -> {self.input_labels}")
        ops = tuple(b @ a for b in self.kraus_ops for a in first.kraus_ops)
        return KrausChannel(ops, first.input_labels, self.output_labels, self.output_dims,
                            name=f"{self.name}*{first.name}")


@dataclass(frozen=True)
class PovmElement:
    """One POVM element ``0 <= op <= 1`` acting on a labeled subsystem."""

    op: np.ndarray
    label: str = "D0"

    def __post_init__(self):
        op = as_operator(self.op)
        if not is_hermitian(op, atol=1e-10):
            raise ValueError("POVM element must be Hermitian")
        w = np.linalg.eigvalsh(0.5 * (op + op.conj().T))
        if w[0] < -1e-10 or w[-1] > 1 + 1e-10:
            raise ValueError(f"POVM element eigenvalues {w[0]:.3g}..{w[-1]:.3g} outside [0, 1]")
        object.__setattr__(self, "op", op)

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def is_projector(self, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.op @ self.op, self.op, atol=atol))


@dataclass(frozen=True)
class BinaryCqState:
    """``|0><0| (x) sigma0 + |1><1| (x) sigma1`` with subnormalized conditionals."""

    sigma0: np.ndarray
    sigma1: np.ndarray
    side_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        s0 = as_operator(self.sigma0)
        s1 = as_operator(self.sigma1)
        if s0.shape != s1.shape:
            raise ValueError("conditional operators differ in dimension")
        _check_psd(s0, "sigma0")
        _check_psd(s1, "sigma1")
        tr = float(np.real(np.trace(s0) + np.trace(s1)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"tr(sigma0) + tr(sigma1) = {tr!r}, expected 1")
        object.__setattr__(self, "sigma0", s0)
        object.__setattr__(self, "sigma1", s1)
        object.__setattr__(self, "side_labels", tuple(self.side_labels))

    @property
    def probabilities(self) -> tuple[float, float]:
        return float(np.real(np.trace(self.sigma0))), float(np.real(np.trace(self.sigma1)))


# --------------------------------------------------------------------------
# state algebra


def tensor(a, b):
    """Kronecker product; labels concatenate when both arguments are states."""
    if isinstance(a, QuantumState) and isinstance(b, QuantumState):
        return QuantumState(np.kron(a.op, b.op), a.labels + b.labels, a.dims + b.dims,
                            a.norm_prob * b.norm_prob)
    if isinstance(a, QuantumState) or isinstance(b, QuantumState):
        raise TypeError("tensor() needs two states or two operators")
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(s: QuantumState, keep) -> QuantumState:
    """Trace out every subsystem not in ``keep``; kept labels keep their order."""
    keep = set(keep)
    for k in keep:
        s.index(k)
    kept = [lab for lab in s.labels if lab in keep]
    op = s.reduced(*kept)
    return QuantumState(op, tuple(kept), tuple(s.dim_of(k) for k in kept), s.norm_prob)


def _embed(s: QuantumState, targets: Sequence[str]) -> tuple[QuantumState, int]:
    """Bring ``targets`` to the front; return the reordered state and their joint dim."""
    for t in targets:
        s.index(t)
    rest = [lab for lab in s.labels if lab not in targets]
    moved = s.reorder(list(targets) + rest)
    dt = _dims_product([s.dim_of(t) for t in targets])
    return moved, dt


def apply_unitary(u, s: QuantumState, on: Sequence[str]) -> QuantumState:
    """Apply ``u`` to the subsystems ``on`` (in that tensor order)."""
    on = tuple(on)
    moved, dt = _embed(s, on)
    u = np.asarray(u, dtype=complex)
    if u.shape != (dt, dt):
        raise ValueError(f"unitary of shape {u.shape} does not act on {on} (dim {dt})")
    full = np.kron(u, np.eye(moved.dim // dt))
    op = full @ moved.op @ full.conj().T
    return QuantumState(0.5 * (op + op.conj().T), moved.labels, moved.dims, s.norm_prob).reorder(s.labels)


def apply_channel(ch: KrausChannel, s: QuantumState) -> QuantumState:
    """Apply a (possibly trace non-increasing) channel to part of ``s``.

    The output subsystems replace the inputs, sitting where the first input
    label used to be. Trace loss is renormalized away and multiplied into
    ``norm_prob``.
    """
    moved, dt = _embed(s, ch.input_labels)
    if dt != ch.input_dim:
        raise ValueError(f"channel expects input dim {ch.input_dim}, subsystems {ch.input_labels} have {dt}")
    rest_dim = moved.dim // dt
    eye = np.eye(rest_dim)
    out = 0
    for k in ch.kraus_ops:
        kk = np.kron(k, eye)
        out = out + kk @ moved.op @ kk.conj().T
    rest_labels = list(moved.labels[len(ch.input_labels):])
    rest_dims = list(moved.dims[len(ch.input_labels):])
    for lab in ch.output_labels:
        if lab in rest_labels:
            raise LabelError(f"channel output {lab!r} collides with an existing subsystem")
    labels = list(ch.output_labels) + rest_labels
    dims = list(ch.output_dims) + rest_dims
    tr = float(np.real(np.trace(out)))
    if tr < ZERO_PROB:
        raise ZeroProbabilityError(f"channel {ch.name or ''} collapsed the trace to {tr:.3e}")
    res = QuantumState.from_unnormalized(out, labels, dims, s.norm_prob)
    # put outputs where the first input sat
    first = s.index(ch.input_labels[0])
    before = [lab for lab in s.labels[:first] if lab not in ch.input_labels]
    after = [lab for lab in rest_labels if lab not in before]
    return res.reorder(before + list(ch.output_labels) + after)


def project_interfering(s: QuantumState, projector, on: str = "S") -> QuantumState:
    """Post-select ``on`` onto the subspace of the projector ``projector``."""
    p = projector.op if isinstance(projector, PovmElement) else as_operator(projector)
    if not np.allclose(p @ p, p, atol=1e-10):
        raise ValueError("interfering projector is not idempotent")
    moved, dt = _embed(s, (on,))
    full = np.kron(p, np.eye(moved.dim // dt))
    out = full @ moved.op @ full
    res = QuantumState.from_unnormalized(out, moved.labels, moved.dims, s.norm_prob)
    return res.reorder(s.labels)


def postselect(s: QuantumState, e, on: str) -> QuantumState:
    """Condition on the POVM element ``e`` clicking on ``on`` and discard ``on``."""
    c = e.op if isinstance(e, PovmElement) else as_operator(e)
    moved, dt = _embed(s, (on,))
    if c.shape != (dt, dt):
        raise ValueError(f"POVM element of shape {c.shape} does not act on {on!r} (dim {dt})")
    rest = moved.dim // dt
    t = moved.op.reshape(dt, rest, dt, rest)
    out = np.einsum("ba,aibj->ij", c, t)
    labels = moved.labels[1:]
    dims = moved.dims[1:]
    if not labels:
        raise ValueError("cannot post-select the only subsystem of a state")
    tr = float(np.real(np.trace(out)))
    if tr < ZERO_PROB:
        raise ZeroProbabilityError(f"post-selection on {on!r} has probability {tr:.3e}")
    return QuantumState.from_unnormalized(out, labels, dims, s.norm_prob)


def measure_binary(s: QuantumState, basis, on: str, side: Sequence[str] | None = None) -> BinaryCqState:
    """Measure the qubit ``on`` in an orthonormal ``basis`` and return the cq state.

    Args:
        s: the state.
        basis: pair of 2-vectors ``(b0, b1)``.
        on: label of a 2-dimensional subsystem.
        side: labels to keep as quantum side information (default: all others).
    """
    if s.dim_of(on) != 2:
        raise ValueError(f"subsystem {on!r} has dim {s.dim_of(on)}, binary measurement needs a qubit")
    b0, b1 = (np.asarray(b, dtype=complex).ravel() for b in basis)
    g = np.array([[np.vdot(b0, b0), np.vdot(b0, b1)], [np.vdot(b1, b0), np.vdot(b1, b1)]])
    if not np.allclose(g, np.eye(2), atol=1e-10):
        raise ValueError("measurement basis is not orthonormal")
    if side is None:
        side = [lab for lab in s.labels if lab != on]
    side = [lab for lab in s.labels if lab in set(side)]
    if on in side:
        raise LabelError("measured subsystem cannot also be side information")
    if side:
        red = partial_trace(s, [on, *side]).reorder([on, *side])
        rest = red.dim // 2
        t = red.op.reshape(2, rest, 2, rest)
        sig = [np.einsum("a,aibj,b->ij", b.conj(), t, b) for b in (b0, b1)]
    else:
        rho = s.reduced(on)
        sig = [np.array([[np.real(np.vdot(b, rho @ b))]], dtype=complex) for b in (b0, b1)]
    return BinaryCqState(sig[0], sig[1], tuple(side))


# --------------------------------------------------------------------------
# constructors


KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
Z_BASIS = (KET0, KET1)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def xy_basis(phi0: float) -> tuple[np.ndarray, np.ndarray]:
    """``|w+-> = (|0> +- e^{i phi0} |1>) / sqrt 2``."""
    e = np.exp(1j * phi0)
    return (np.array([1, e]) / np.sqrt(2), np.array([1, -e]) / np.sqrt(2))


def _check_reflectivity(r: float) -> None:
    if not (0.0 <= r <= 1.0):
        raise ValueError(f"reflectivity {r!r} outside [0, 1]")


def phase_shift(phi: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def beam_splitter(r: float) -> np.ndarray:
    """Real beam splitter ``[[sqrt R, sqrt(1-R)], [sqrt(1-R), -sqrt R]]``."""
    _check_reflectivity(r)
    a, b = np.sqrt(r), np.sqrt(1.0 - r)
    return np.array([[a, b], [b, -a]], dtype=complex)


def qbs_unitary(r: float) -> np.ndarray:
    """Controlled beam splitter on ``P (x) Q``: identity for ``|H>``, ``U(R)`` for ``|V>``."""
    h = np.diag([1.0, 0.0])
    v = np.diag([0.0, 1.0])
    return np.kron(h, np.eye(2)) + np.kron(v, beam_splitter(r))


def copy_isometry(dim: int = 2) -> np.ndarray:
    """``V_c = sum_j |j>_{Q'} (x) |j><j|``, shape ``(dim*dim, dim)`` with Q' first."""
    v = np.zeros((dim * dim, dim), dtype=complex)
    for j in range(dim):
        v[j * dim + j, j] = 1.0
    return v


def polarization_state(alpha: float) -> np.ndarray:
    """``|alpha><alpha|`` with ``|alpha> = cos(alpha)|H> + sin(alpha)|V>``."""
    v = np.array([np.cos(alpha), np.sin(alpha)], dtype=complex)
    return np.outer(v, v.conj())


def identity_channel(label: str, dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim),), (label,), (label,), (dim,), name="id")


def dephasing_channel(label: str, kappa: float = 0.0) -> KrausChannel:
    """Qubit channel scaling the coherence by a real ``kappa`` in [0, 1]."""
    if not (0.0 <= kappa <= 1.0):
        raise ValueError("kappa must lie in [0, 1]")
    p = (1.0 - kappa) / 2.0
    ops = (np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * PAULI_Z)
    return KrausChannel(ops, (label,), (label,), (2,), name=f"dephase({kappa:g})")


def controlled_isometry_channel(env_states, label: str = "S", env_label: str = "F",
                                name: str = "") -> KrausChannel:
    """Path-preserving channel ``|j> -> |j> (x) |e_j>`` from S to S F.

    ``env_states[j]`` is the (normalized) environment record for path ``j``;
    there is one per path basis state.
    """
    env = [np.asarray(e, dtype=complex).ravel() for e in env_states]
    d = len(env)
    df = env[0].size
    v = np.zeros((d * df, d), dtype=complex)
    for j, e in enumerate(env):
        v[j * df:(j + 1) * df, j] = e / np.linalg.norm(e)
    return KrausChannel((v,), (label,), (label, env_label), (d, df), name=name or "controlled")


def controlled_rotation(overlap: float, label: str = "S", env_label: str = "F") -> KrausChannel:
    """Which-path detector whose two records have real overlap ``<e0|e1> = overlap``."""
    if not (-1.0 <= overlap <= 1.0):
        raise ValueError("overlap must lie in [-1, 1]")
    e0 = KET0
    e1 = np.array([overlap, np.sqrt(max(0.0, 1 - overlap**2))], dtype=complex)
    return controlled_isometry_channel([e0, e1], label, env_label, name=f"crot({overlap:g})")


def coherence_factor(ch: KrausChannel, path_label: str | None = None, i: int = 0, j: int = 1) -> complex:
    """``kappa``: the (i, j) entry of the reduced channel applied to ``|i><j|``.

    Environment outputs are traced out; only ``path_label`` (default: the
    channel's first input label) is kept.
    """
    path_label = path_label or ch.input_labels[0]
    x = np.zeros((ch.input_dim, ch.input_dim), dtype=complex)
    x[i, j] = 1.0
    y = ch.apply_operator(x)
    k = ch.output_labels.index(path_label)
    red = partial_trace_dims(y, ch.output_dims, [k])
    return complex(red[i, j])


def is_path_preserving(ch: KrausChannel, path_label: str | None = None, atol: float = 1e-10) -> bool:
    path_label = path_label or ch.input_labels[0]
    k = ch.output_labels.index(path_label)
    d = ch.input_dim
    for j in range(d):
        x = np.zeros((d, d), dtype=complex)
        x[j, j] = 1.0
        red = partial_trace_dims(ch.apply_operator(x), ch.output_dims, [k])
        if not np.allclose(red, x, atol=atol):
            return False
    return True


# --------------------------------------------------------------------------
# random objects; every generator takes an explicit numpy Generator


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from tracing out a Haar-random purification."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.real(np.trace(rho))


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random PSD operator with trace drawn uniformly from (0, 2]."""
    return random_density(dim, rng, rank) * rng.uniform(0.05, 2.0)


def random_path_preserving_channel(rng: np.random.Generator, env_dim: int | None = None,
                                   path_dim: int = 2, label: str = "S",
                                   env_label: str = "F") -> KrausChannel:
    """Controlled-unitary coupling ``sum_j |j><j| (x) U_j`` with F starting in ``|0>``."""
    if env_dim is None:
        env_dim = int(rng.integers(1, 4))
    records = [haar_unitary(env_dim, rng)[:, 0] for _ in range(path_dim)]
    return controlled_isometry_channel(records, label, env_label, name=f"random_pp(dF={env_dim})")


def reduced_path_channel(ch: KrausChannel, path_label: str | None = None) -> KrausChannel:
    """Kraus form of ``Tr_F o E``: the channel seen by the path alone."""
    path_label = path_label or ch.input_labels[0]
    k = ch.output_labels.index(path_label)
    dims = ch.output_dims
    ops = []
    for kop in ch.kraus_ops:
        t = kop.reshape(dims + (ch.input_dim,))
        t = np.moveaxis(t, k, 0).reshape(dims[k], -1, ch.input_dim)
        for m in range(t.shape[1]):
            ops.append(t[:, m, :])
    return KrausChannel(tuple(ops), ch.input_labels, (path_label,), (dims[k],), name=f"Tr_F({ch.name})")


def maximally_entangled(dim: int = 2) -> np.ndarray:
    v = np.zeros(dim * dim, dtype=complex)
    for j in range(dim):
        v[j * dim + j] = 1.0
    return v / np.sqrt(dim)


def random_isometry_channel(rng: np.random.Generator, env_dim: int | None = None,
                            label: str = "S", env_label: str = "F") -> KrausChannel:
    """Haar-random isometry from a qubit ``S`` to ``S F`` (generally not path-preserving)."""
    if env_dim is None:
        env_dim = int(rng.integers(1, 4))
    v = haar_unitary(2 * env_dim, rng)[:, :2]
    return KrausChannel((v,), (label,), (label, env_label), (2, env_dim), name=f"random_iso(dF={env_dim})")


def random_povm_element(dim: int, rng: np.random.Generator, label: str = "D0") -> PovmElement:
    """Random ``0 <= C <= 1`` whose largest eigenvalue is uniform in (0.05, 1]."""
    c = random_psd(dim, rng)
    w = np.linalg.eigvalsh(c)[-1]
    c = c * (rng.uniform(0.05, 1.0) / w)
    return PovmElement(0.5 * (c + c.conj().T), label=label)


def chain_path_channels(first: KrausChannel, second: KrausChannel, path_label: str = "S") -> KrausChannel:
    """``second`` applied to the path output of ``first``; environment outputs accumulate.

    Both channels map ``path_label`` to ``path_label`` plus environment
    systems. Environment labels of ``second`` that clash with ``first``'s get a
    ``"2"`` suffix.
    """
    if first.input_labels != (path_label,) or second.input_labels != (path_label,):
        raise LabelError("both channels must act on the path alone")
    k1 = first.output_labels.index(path_label)
    d1 = first.output_dims
    ops = []
    for a in first.kraus_ops:
        t = a.reshape(d1 + (first.input_dim,))
        t = np.moveaxis(t, k1, 0).reshape(d1[k1], -1)  # path x (env1 * in)
        for b in second.kraus_ops:
            ops.append(b @ t)  # second.out x (env1 * in)
    env1_labels = [lab for i, lab in enumerate(first.output_labels) if i != k1]
    env1_dims = [d for i, d in enumerate(d1) if i != k1]
    env1 = int(np.prod(env1_dims)) if env1_dims else 1
    out2 = list(second.output_labels)
    out2 = [lab if lab == path_label or lab not in env1_labels else lab + "2" for lab in out2]
    # reshape (out2, env1, in) -> (out2 (x) env1, in)
    full = [o.reshape(-1, env1, first.input_dim).reshape(-1, first.input_dim) for o in ops]
    labels = tuple(out2 + env1_labels)
    dims = tuple(list(second.output_dims) + env1_dims)
    return KrausChannel(tuple(full), (path_label,), labels, dims, name=f"{second.name}*{first.name}")
