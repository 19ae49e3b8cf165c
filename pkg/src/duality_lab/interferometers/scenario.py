"""Declarative description of one binary-interferometer experiment.

A :class:`Scenario` fixes everything except the internal phase ``phi``: the
framework (predictive, retrodictive or hybrid), the path space and its
interfering subspace, the first beam splitter or an explicit input state, the
environment channel acting inside the interferometer, the detection event and
an optional quantum beam splitter.

Subsystem labels used throughout: ``S`` is the quanton's interfering qubit,
``Qp`` the reference/register qubit, ``F`` (or whatever the environment
channel emits) the environment and ``P`` the polarization controlling a
quantum beam splitter.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from ..qstate import (
    KET0,
    KrausChannel,
    PovmElement,
    beam_splitter,
    controlled_rotation,
    is_path_preserving,
    polarization_state,
    xy_basis,
)

FRAMEWORKS = ("predictive", "retrodictive", "hybrid")
PATH_LABEL = "S"
REF_LABEL = "Qp"
POL_LABEL = "P"

# Franson path basis order
FRANSON_BASIS = ("SS", "SL", "LS", "LL")


class ScenarioError(ValueError):
    """The scenario description is inconsistent."""


@dataclass(frozen=True)
class QbsSpec:
    """Quantum beam splitter: ``U(R)`` on the path when the polarization is ``|V>``.

    Attributes:
        R: reflectivity of the beam splitter in the ``|V>`` branch.
        rho_p: 2x2 polarization state at the time the quanton reaches it.
    """

    R: float
    rho_p: np.ndarray

    def __post_init__(self):
        if not (0.0 <= self.R <= 1.0):
            raise ScenarioError(f"QBS reflectivity {self.R!r} outside [0, 1]")
        rho = np.asarray(self.rho_p, dtype=complex)
        if rho.shape != (2, 2):
            raise ScenarioError("polarization state must be 2x2")
        if abs(np.trace(rho) - 1) > 1e-9 or np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -1e-10:
            raise ScenarioError("polarization state is not a density matrix")
        object.__setattr__(self, "rho_p", rho)


@dataclass(frozen=True)
class Scenario:
    """One interferometer configuration.

    Attributes:
        framework: ``"predictive"``, ``"retrodictive"`` or ``"hybrid"``.
        detection: POVM element ``C0`` on the full path space.
        path_dim: dimension of the path space (2, or 4 for Franson).
        interfering_projector: rank-2 projector ``Pi`` onto the interfering
            subspace; defaults to the identity on a 2-dim path space.
        bs1_reflectivity: first beam splitter, used when ``input_state`` is
            absent; the input is then ``sqrt(R1)|0> + sqrt(1-R1)|1>``.
        environment: channel from ``S`` to ``S`` plus environment outputs,
            acting on the interfering qubit; ``None`` means no environment.
        qbs: optional quantum second beam splitter.
        input_state: explicit density matrix on the path space.
        name: free-form tag, e.g. the preset it came from.
    """

    framework: str
    detection: PovmElement
    path_dim: int = 2
    interfering_projector: PovmElement | None = None
    bs1_reflectivity: float = 0.5
    environment: KrausChannel | None = None
    qbs: QbsSpec | None = None
    input_state: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ScenarioError(f"unknown framework {self.framework!r}; expected one of {FRAMEWORKS}")
        if self.path_dim not in (2, 4):
            raise ScenarioError("path_dim must be 2 or 4")
        if self.detection.dim != self.path_dim:
            raise ScenarioError(f"detection acts on dim {self.detection.dim}, path space has {self.path_dim}")
        pi = self.interfering_projector
        if pi is None:
            if self.path_dim != 2:
                raise ScenarioError("a 4-dim path space needs an explicit interfering projector")
            pi = PovmElement(np.eye(2), label="Pi")
            object.__setattr__(self, "interfering_projector", pi)
        if pi.dim != self.path_dim or not pi.is_projector():
            raise ScenarioError("interfering projector must be a projector on the path space")
        if round(float(np.real(np.trace(pi.op)))) != 2:
            raise ScenarioError("interfering projector must have rank 2")
        if not (0.0 <= self.bs1_reflectivity <= 1.0):
            raise ScenarioError(f"R1 = {self.bs1_reflectivity!r} outside [0, 1]")
        env = self.environment
        if env is not None:
            if env.input_labels != (PATH_LABEL,) or PATH_LABEL not in env.output_labels:
                raise ScenarioError("environment must map S to S plus environment systems")
            if env.input_dim != 2 or env.output_dims[env.output_labels.index(PATH_LABEL)] != 2:
                raise ScenarioError("environment acts on the interfering qubit (dim 2)")
            if not env.is_trace_preserving():
                raise ScenarioError("environment channel must be trace preserving")
            if {REF_LABEL, POL_LABEL} & set(env.output_labels):
                raise ScenarioError("environment outputs may not reuse the labels Qp or P")
        if self.input_state is not None:
            rho = np.asarray(self.input_state, dtype=complex)
            if rho.shape != (self.path_dim, self.path_dim):
                raise ScenarioError("input state has the wrong dimension")
            if abs(np.trace(rho) - 1) > 1e-9:
                raise ScenarioError("input state must have unit trace")
            object.__setattr__(self, "input_state", rho)

    # ------------------------------------------------------------------
    @property
    def env_labels(self) -> tuple[str, ...]:
        if self.environment is None:
            return ()
        return tuple(lab for lab in self.environment.output_labels if lab != PATH_LABEL)

    @property
    def path_preserving(self) -> bool:
        return self.environment is None or is_path_preserving(self.environment, PATH_LABEL)

    def interfering_basis(self) -> np.ndarray:
        """Columns spanning the range of ``Pi``; column 0 is ``|0>``, column 1 is ``|1>``.

        For a diagonal projector these are standard basis vectors in index
        order (``|SS>``, ``|LL>`` for Franson).
        """
        p = self.interfering_projector.op
        if np.allclose(p, np.diag(np.diag(p)), atol=1e-12):
            idx = [i for i in range(self.path_dim) if abs(p[i, i] - 1) < 1e-9]
            return np.eye(self.path_dim, dtype=complex)[:, idx]
        w, v = np.linalg.eigh(0.5 * (p + p.conj().T))
        return v[:, w > 0.5][:, ::-1]

    def physical_input(self) -> np.ndarray:
        """Density matrix entering the interferometer, on the full path space."""
        if self.input_state is not None:
            return self.input_state
        if self.path_dim != 2:
            raise ScenarioError("a 4-dim path space needs an explicit input state")
        psi = beam_splitter(self.bs1_reflectivity) @ KET0
        return np.outer(psi, psi.conj())

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


# --------------------------------------------------------------------------
# detection events


def xy_detection(phi0: float = 0.0, q: float = 1.0, label: str = "D0") -> PovmElement:
    """``C0 = q |w+><w+|``, unbiased with respect to the which-path basis."""
    w = xy_basis(phi0)[0]
    return PovmElement(q * np.outer(w, w.conj()), label=label)


def port_detection(r2: float = 0.5, port: int = 0, label: str = "D0") -> PovmElement:
    """Output port ``port`` of a second beam splitter with reflectivity ``r2``."""
    b = beam_splitter(r2)
    row = b[port].conj()
    return PovmElement(np.outer(row, row.conj()), label=label)


# --------------------------------------------------------------------------
# presets


def mzi(R1: float = 0.5, environment: KrausChannel | None = None, R2: float = 0.5,
        framework: str = "predictive") -> Scenario:
    """Mach-Zehnder interferometer; ``C0`` is port 0 of a beam splitter with reflectivity ``R2``."""
    return Scenario(framework, port_detection(R2), bs1_reflectivity=R1, environment=environment, name="mzi")


def double_slit(q: float = 1.0, phi0: float = 0.0, environment: KrausChannel | None = None,
                R1: float = 0.5, framework: str = "predictive") -> Scenario:
    """Abstract double slit: two slit states and an unbiased detection ``q |w+><w+|``.

    A point detector far from the slits (flat envelope) sees the two slit
    amplitudes with equal weight, so the detection element restricted to the
    slit subspace is proportional to an XY-plane projector.
    """
    return Scenario(framework, xy_detection(phi0, q), bs1_reflectivity=R1, environment=environment,
                    name="double_slit")


def franson(environment: KrausChannel | None = None, framework: str = "predictive") -> Scenario:
    """Franson interferometer on the four paths ``SS, SL, LS, LL``.

    Both photons meet symmetric beam splitters, so the input is the uniform
    superposition of the four paths. Coincidence post-selection keeps
    ``|SS>`` and ``|LL>``. The detector pair ``(D0A, D0B)`` is the product of
    the ``|+>`` projectors of the two second beam splitters; its restriction
    to the coincidence subspace is ``|w+><w+| / 2``.
    """
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    c0 = np.kron(np.outer(plus, plus), np.outer(plus, plus))
    pi = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
    psi = np.ones(4, dtype=complex) / 2.0
    return Scenario(framework, PovmElement(c0, "D0AB"), path_dim=4,
                    interfering_projector=PovmElement(pi, "Pi"), environment=environment,
                    input_state=np.outer(psi, psi.conj()), name="franson")


def franson_phase(phi: float) -> np.ndarray:
    """Phase on the four Franson paths for the total phase ``phi = phi_A + phi_B``.

    Each long arm picks up half the phase; on the coincidence subspace this
    is ``diag(1, e^{i phi})``.
    """
    h = np.exp(0.5j * phi)
    return np.diag([1.0, h, h, np.exp(1j * phi)])


def qbs_scenario(R: float, alpha: float, environment: KrausChannel | None = None) -> Scenario:
    """Retrodictive MZI whose second beam splitter is quantum.

    ``alpha`` (radians) sets the polarization ``cos(a)|H> + sin(a)|V>``; the
    detector ``D0`` is output port 0 after the QBS.
    """
    d0 = PovmElement(np.diag([1.0, 0.0]).astype(complex), "D0")
    return Scenario("retrodictive", d0, environment=environment,
                    qbs=QbsSpec(R, polarization_state(alpha)), name="qbs")


PRESETS = {
    "mzi": mzi,
    "double_slit": double_slit,
    "franson": franson,
    "qbs": qbs_scenario,
}


# --------------------------------------------------------------------------
# sweep parameters


SWEEP_PARAMETERS = ("alpha", "R", "R1", "phi0", "kappa")


def with_parameter(sc: Scenario, name: str, value: float) -> Scenario:
    """Return ``sc`` with one sweepable parameter set (angles in radians).

    ``alpha`` and ``R`` address the quantum beam splitter, ``R1`` the first
    beam splitter, ``phi0`` rotates an unbiased detection element (its weight
    ``q`` is kept) and ``kappa`` installs a which-path detector whose two
    records overlap by ``kappa``, so the path coherence is scaled by ``kappa``.
    """
    if name == "alpha":
        if sc.qbs is None:
            raise ScenarioError("alpha needs a quantum beam splitter")
        return sc.replace(qbs=QbsSpec(sc.qbs.R, polarization_state(value)))
    if name == "R":
        if sc.qbs is None:
            raise ScenarioError("R needs a quantum beam splitter")
        return sc.replace(qbs=QbsSpec(value, sc.qbs.rho_p))
    if name == "R1":
        if sc.input_state is not None:
            raise ScenarioError("R1 has no effect when the input state is given explicitly")
        return sc.replace(bs1_reflectivity=value)
    if name == "phi0":
        if sc.path_dim != 2:
            raise ScenarioError("phi0 is only defined for a 2-dim path space")
        q = float(np.linalg.eigvalsh(sc.detection.op)[-1])
        return sc.replace(detection=xy_detection(value, q, sc.detection.label))
    if name == "kappa":
        return sc.replace(environment=controlled_rotation(value))
    raise ScenarioError(f"unknown sweep parameter {name!r}; expected one of {SWEEP_PARAMETERS}")
