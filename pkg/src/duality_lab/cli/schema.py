"""Scenario files: JSON documents validated with pydantic and mapped to :class:`Scenario`.

A file either names a preset with its parameters::

    {"preset": "qbs", "params": {"R": 0.4, "alpha": "45deg"}}

or spells out every field. Matrices are row-major nested lists whose entries
are real numbers or ``[re, im]`` pairs. Angles are in degrees: bare numbers
or strings with a ``deg`` suffix; a ``rad`` suffix is also accepted.
"""

from __future__ import annotations

import json
import math
import re
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..interferometers import (
    PRESETS,
    QbsSpec,
    Scenario,
    double_slit,
    franson,
    mzi,
    port_detection,
    qbs_scenario,
    xy_detection,
)
from ..qstate import (
    KrausChannel,
    PovmElement,
    controlled_rotation,
    dephasing_channel,
    polarization_state,
)

Number = Union[float, int]
Entry = Union[Number, tuple[Number, Number]]
Matrix = list[list[Entry]]

_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(deg|rad)?\s*$")


def parse_angle(value) -> float:
    """Angle in radians from a number of degrees or a ``"<x>deg"`` / ``"<x>rad"`` string."""
    if isinstance(value, bool):
        raise ValueError("angle must be a number or a string like '45deg'")
    if isinstance(value, (int, float)):
        return math.radians(float(value))
    if isinstance(value, str):
        m = _ANGLE.match(value)
        if not m:
            raise ValueError(f"cannot parse angle {value!r}; use e.g. '45deg' or '0.5rad'")
        x = float(m.group(1))
        return x if m.group(2) == "rad" else math.radians(x)
    raise ValueError("angle must be a number or a string like '45deg'")


def format_angle(rad: float) -> str:
    return f"{float(rad)!r}rad"


Angle = Union[Number, str]


def to_matrix(rows: Matrix) -> np.ndarray:
    out = []
    for row in rows:
        out.append([complex(e[0], e[1]) if isinstance(e, (tuple, list)) else complex(e) for e in row])
    a = np.array(out, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    return a


def from_matrix(a: np.ndarray) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class KrausEnv(_Strict):
    type: Literal["kraus"] = "kraus"
    kraus: list[Matrix] = Field(min_length=1)
    output_labels: list[str]
    output_dims: list[int]


class RotationEnv(_Strict):
    type: Literal["controlled_rotation"]
    overlap: float = Field(ge=-1.0, le=1.0)


class DephasingEnv(_Strict):
    type: Literal["dephasing"]
    kappa: float = Field(ge=0.0, le=1.0)


Environment = Union[KrausEnv, RotationEnv, DephasingEnv]


class XYDetection(_Strict):
    type: Literal["xy"]
    phi0: Angle = 0.0
    q: float = Field(default=1.0, gt=0.0, le=1.0)

    @field_validator("phi0")
    @classmethod
    def _angle(cls, v):
        parse_angle(v)
        return v


class PortDetection(_Strict):
    type: Literal["port"]
    R2: float = Field(default=0.5, ge=0.0, le=1.0)
    port: Literal[0, 1] = 0


class MatrixDetection(_Strict):
    type: Literal["matrix"] = "matrix"
    op: Matrix
    label: str = "D0"


Detection = Union[XYDetection, PortDetection, MatrixDetection]


class QbsFile(_Strict):
    R: float = Field(ge=0.0, le=1.0)
    alpha: Optional[Angle] = None
    rho_p: Optional[Matrix] = None

    @model_validator(mode="after")
    def _one_polarization(self):
        if (self.alpha is None) == (self.rho_p is None):
            raise ValueError("give exactly one of 'alpha' or 'rho_p'")
        if self.alpha is not None:
            parse_angle(self.alpha)
        return self


PresetName = Literal["mzi", "double_slit", "franson", "qbs"]


class ScenarioFile(_Strict):
    """Text form of a scenario; unknown fields are rejected."""

    preset: Optional[PresetName] = None
    params: dict[str, Any] = Field(default_factory=dict)
    framework: Optional[Literal["predictive", "retrodictive", "hybrid"]] = None
    path_dim: Optional[Literal[2, 4]] = None
    interfering_projector: Optional[Matrix] = None
    bs1_reflectivity: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    environment: Optional[Environment] = Field(default=None, discriminator="type")
    detection: Optional[Detection] = Field(default=None, discriminator="type")
    qbs: Optional[QbsFile] = None
    input_state: Optional[Matrix] = None
    name: Optional[str] = None

    @model_validator(mode="after")
    def _preset_or_explicit(self):
        if self.preset is None:
            if self.params:
                raise ValueError("'params' only makes sense together with 'preset'")
            if self.framework is None or self.detection is None:
                raise ValueError("without a preset, 'framework' and 'detection' are required")
        return self


# --------------------------------------------------------------------------
# file -> Scenario


_PRESET_PARAMS = {
    "mzi": {"R1": float, "R2": float, "framework": str},
    "double_slit": {"q": float, "phi0": "angle", "R1": float, "framework": str},
    "franson": {"framework": str},
    "qbs": {"R": float, "alpha": "angle"},
}


def _environment(env) -> KrausChannel | None:
    if env is None:
        return None
    if isinstance(env, RotationEnv):
        return controlled_rotation(env.overlap)
    if isinstance(env, DephasingEnv):
        return dephasing_channel("S", env.kappa)
    return KrausChannel(tuple(_rect(k) for k in env.kraus),
                        ("S",), tuple(env.output_labels), tuple(env.output_dims))


def _rect(rows) -> np.ndarray:
    return np.array([[complex(e[0], e[1]) if isinstance(e, (tuple, list)) else complex(e) for e in row]
                     for row in rows], dtype=complex)


def _detection(det) -> PovmElement:
    if isinstance(det, XYDetection):
        return xy_detection(parse_angle(det.phi0), det.q)
    if isinstance(det, PortDetection):
        return port_detection(det.R2, det.port)
    return PovmElement(to_matrix(det.op), det.label)


def _preset(f: ScenarioFile) -> Scenario:
    spec = _PRESET_PARAMS[f.preset]
    kwargs = {}
    for key, value in f.params.items():
        if key not in spec:
            raise ValueError(f"preset {f.preset!r} has no parameter {key!r}; expected one of {sorted(spec)}")
        kind = spec[key]
        kwargs[key] = parse_angle(value) if kind == "angle" else kind(value)
    if f.preset == "qbs":
        if "R" not in kwargs or "alpha" not in kwargs:
            raise ValueError("preset 'qbs' needs params 'R' and 'alpha'")
    builder = {"mzi": mzi, "double_slit": double_slit, "franson": franson, "qbs": qbs_scenario}[f.preset]
    return builder(**kwargs)


def build_scenario(f: ScenarioFile) -> Scenario:
    """Turn a validated file into a :class:`Scenario`; explicit fields override the preset."""
    base = _preset(f) if f.preset is not None else None
    fields: dict[str, Any] = {}
    if f.framework is not None:
        fields["framework"] = f.framework
    if f.path_dim is not None:
        fields["path_dim"] = f.path_dim
    if f.interfering_projector is not None:
        fields["interfering_projector"] = PovmElement(to_matrix(f.interfering_projector), "Pi")
    if f.bs1_reflectivity is not None:
        fields["bs1_reflectivity"] = f.bs1_reflectivity
    if f.environment is not None:
        fields["environment"] = _environment(f.environment)
    if f.detection is not None:
        fields["detection"] = _detection(f.detection)
    if f.qbs is not None:
        rho_p = polarization_state(parse_angle(f.qbs.alpha)) if f.qbs.alpha is not None else to_matrix(f.qbs.rho_p)
        fields["qbs"] = QbsSpec(f.qbs.R, rho_p)
    if f.input_state is not None:
        fields["input_state"] = to_matrix(f.input_state)
    if f.name is not None:
        fields["name"] = f.name
    if base is None:
        return Scenario(**fields)
    return base.replace(**fields)


def load_scenario_text(text: str) -> Scenario:
    """Parse and validate a JSON scenario document.

    Raises:
        json.JSONDecodeError: malformed JSON (carries line and column).
        pydantic.ValidationError: schema violations (carries field paths).
        ValueError: semantically inconsistent scenario.
    """
    return build_scenario(ScenarioFile.model_validate(json.loads(text)))


# --------------------------------------------------------------------------
# Scenario -> file


def scenario_to_file(sc: Scenario) -> dict:
    """Explicit (preset-free) document that rebuilds ``sc`` exactly."""
    doc: dict[str, Any] = {
        "framework": sc.framework,
        "path_dim": sc.path_dim,
        "interfering_projector": from_matrix(sc.interfering_projector.op),
        "bs1_reflectivity": sc.bs1_reflectivity,
        "detection": {"type": "matrix", "op": from_matrix(sc.detection.op), "label": sc.detection.label},
        "name": sc.name,
    }
    if sc.environment is not None:
        env = sc.environment
        doc["environment"] = {
            "type": "kraus",
            "kraus": [[[[float(z.real), float(z.imag)] for z in row] for row in k] for k in env.kraus_ops],
            "output_labels": list(env.output_labels),
            "output_dims": list(env.output_dims),
        }
    if sc.qbs is not None:
        doc["qbs"] = {"R": sc.qbs.R, "rho_p": from_matrix(sc.qbs.rho_p)}
    if sc.input_state is not None:
        doc["input_state"] = from_matrix(sc.input_state)
    return doc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_file(sc), indent=1)


__all__ = [
    "ScenarioFile",
    "build_scenario",
    "dump_scenario",
    "load_scenario_text",
    "parse_angle",
    "format_angle",
    "scenario_to_file",
    "PRESETS",
]
