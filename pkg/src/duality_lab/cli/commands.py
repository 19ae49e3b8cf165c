"""Implementation of the ``sweep``, ``check`` and ``plotscript`` subcommands.

Every command returns a process exit code: 0 success, 2 input error,
3 numerical or precondition failure, 4 relation violation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from ..interferometers import SWEEP_PARAMETERS, DualityQuantities, Scenario, ScenarioError, with_parameter
from ..matcore import NotHermitianError, NotPSDError
from ..qstate import ZeroProbabilityError
from ..wpdr import RELATIONS, UnsupportedRelationError, evaluate, quantities_for, randomized_suite, worker_count
from .schema import load_scenario_text

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_VIOLATION = 4

ANGLE_PARAMETERS = ("alpha", "phi0")
NUMERIC_ERRORS = (ArithmeticError, NotPSDError, NotHermitianError, ZeroProbabilityError, np.linalg.LinAlgError)


class InputError(ValueError):
    """Bad command-line input or scenario file."""


_COMMON = {"Hmin_Z_E1", "Hmax_W_E2", "Hmin_Z", "Hmax_W", "D_B", "V_B", "D_g", "V_g"}
FRAMEWORK_OUTPUTS = {
    "predictive": _COMMON | {"V", "P", "D", "C", "P_Gamma", "V_Gamma"},
    "retrodictive": _COMMON | {"V", "D_i", "V_i", "D_i_P", "D_i_P_dec"},
    "hybrid": _COMMON | {"V", "D_Qprime", "V_i"},
}


def check_outputs(sc: Scenario, outputs: Sequence[str]) -> None:
    """Reject outputs the scenario's framework never produces (before any numerics run)."""
    allowed = set(FRAMEWORK_OUTPUTS[sc.framework])
    if sc.qbs is None:
        allowed -= {"D_i_P", "D_i_P_dec"}
    for name in outputs:
        base = name[:-2] if name.endswith("^2") else name
        if base not in allowed:
            raise InputError(f"quantity {base!r} is not available for a {sc.framework} scenario"
                             + ("" if sc.qbs is not None or base not in ("D_i_P", "D_i_P_dec")
                                else " without a quantum beam splitter"))


def format_value(x: float) -> str:
    """12 digits after the decimal point; negative zero is printed as zero."""
    s = f"{float(x):.12f}"
    if s.lstrip("-").strip("0.") == "":
        s = s.lstrip("-")
    return s


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    outputs: tuple[str, ...]

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise InputError(f"unknown sweep parameter {self.parameter!r}; expected one of {SWEEP_PARAMETERS}")
        if self.steps < 2:
            raise InputError("a sweep needs at least 2 steps")
        if not self.start < self.stop:
            raise InputError("sweep range needs start < stop")
        if not self.outputs:
            raise InputError("no output quantities requested")
        for name in self.outputs:
            base = name[:-2] if name.endswith("^2") else name
            if base not in DualityQuantities.names():
                raise InputError(f"unknown output quantity {name!r}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def internal(self, value: float) -> float:
        """Parameter in internal units (radians for angles)."""
        return math.radians(value) if self.parameter in ANGLE_PARAMETERS else float(value)


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"range must look like start:stop:steps, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"range must look like start:stop:steps, got {text!r}") from None


def read_scenario(path: str | Path) -> Scenario:
    """Load a scenario file, turning every kind of input problem into :class:`InputError`."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read scenario file: {exc}") from None
    try:
        return load_scenario_text(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except ValidationError as exc:
        lines = [f"{path}: schema violation"]
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"  field {loc}: {err['msg']}")
        raise InputError("\n".join(lines)) from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _row(args) -> list[float]:
    sc, spec, value = args
    point = with_parameter(sc, spec.parameter, spec.internal(value))
    names = [n[:-2] if n.endswith("^2") else n for n in spec.outputs]
    q = quantities_for(point, names)
    row = [float(value)]
    for name, base in zip(spec.outputs, names):
        if q.get(base) is None:
            raise InputError(f"quantity {base!r} is not available for a {point.framework} scenario")
        v = float(q[base])
        row.append(v * v if name.endswith("^2") else v)
    return row


def sweep_rows(sc: Scenario, spec: SweepSpec, workers: int = 1) -> list[list[float]]:
    jobs = [(sc, spec, v) for v in spec.values]
    if workers <= 1 or len(jobs) < 2 * workers:
        return [_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_row, jobs))


def write_csv(rows: Sequence[Sequence[float]], header: Sequence[str], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(x) for x in row])


def _fail(err: TextIO | None, code: int, msg: str) -> int:
    print(f"error: {msg}", file=err or sys.stderr)
    return code


def cmd_sweep(scenario_path: str, parameter: str, range_text: str, out_path: str,
              outputs: Sequence[str] = ("V",), err: TextIO | None = None) -> int:
    """Sweep one parameter and write a CSV (parameter column first, angles in degrees)."""
    try:
        start, stop, steps = parse_range(range_text)
        spec = SweepSpec(parameter, start, stop, steps, tuple(outputs))
        sc = read_scenario(scenario_path)
        check_outputs(sc, spec.outputs)
    except InputError as exc:
        return _fail(err, EXIT_INPUT, str(exc))
    try:
        rows = sweep_rows(sc, spec, worker_count())
    except (InputError, ScenarioError) as exc:
        return _fail(err, EXIT_INPUT, str(exc))
    except NUMERIC_ERRORS as exc:
        fp = json.dumps({"scenario": scenario_path, "parameter": parameter, "range": range_text})
        return _fail(err, EXIT_NUMERIC, f"numerical failure ({type(exc).__name__}: {exc}); scenario {fp}")
    buf = io.StringIO()
    write_csv(rows, [parameter, *spec.outputs], buf)
    try:
        with open(out_path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        return _fail(err, EXIT_INPUT, f"cannot write {out_path}: {exc}")
    return EXIT_OK


def cmd_check_random(seed: int, n: int, out: TextIO | None = None, records: TextIO | None = None,
                     relations: Sequence[str] | None = None, err: TextIO | None = None) -> int:
    """Randomized suite over all relations; prints one summary line per relation."""
    if n < 0:
        return _fail(err, EXIT_INPUT, "sample count must be non-negative")
    try:
        rep = randomized_suite(seed, n, relations, keep_records=records is not None)
    except KeyError as exc:
        return _fail(err, EXIT_INPUT, str(exc))
    except NUMERIC_ERRORS as exc:
        return _fail(err, EXIT_NUMERIC, f"numerical failure ({type(exc).__name__}: {exc}); seed {seed}")
    out = out or sys.stdout
    for line in rep.summary_lines():
        print(line, file=out)
    if records is not None:
        for r in rep.records:
            records.write(json.dumps(r.to_record(), sort_keys=True) + "\n")
    verdict = "OK" if rep.ok else "VIOLATIONS FOUND"
    print(f"seed={seed} samples/relation={n} total_violations={rep.violations} -> {verdict}", file=out)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_check_scenario(path: str, out: TextIO | None = None, records: TextIO | None = None,
                       err: TextIO | None = None) -> int:
    """Evaluate every relation the scenario supports."""
    try:
        sc = read_scenario(path)
    except InputError as exc:
        return _fail(err, EXIT_INPUT, str(exc))
    out = out or sys.stdout
    violations = 0
    for name in RELATIONS:
        try:
            rep = evaluate(name, sc)
        except UnsupportedRelationError:
            print(f"{name:20s} n/a", file=out)
            continue
        except NUMERIC_ERRORS as exc:
            return _fail(err, EXIT_NUMERIC, f"numerical failure in {name} ({type(exc).__name__}: {exc}); "
                                            f"scenario {path}")
        rep.fingerprint["file"] = str(path)
        violations += not rep.verdict
        status = "pass" if rep.verdict else "FAIL"
        print(f"{name:20s} lhs={format_value(rep.lhs)} slack={format_value(rep.slack)} {status}", file=out)
        if records is not None:
            records.write(json.dumps(rep.to_record(), sort_keys=True) + "\n")
    return EXIT_OK if violations == 0 else EXIT_VIOLATION


def plot_script(csv_path: str) -> str:
    """gnuplot script drawing every quantity column against the first column."""
    try:
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {csv_path}: {exc}") from None
    if not rows or len(rows[0]) < 2:
        raise InputError(f"{csv_path}: expected a header with a parameter and at least one quantity")
    if len(rows) < 2:
        raise InputError(f"{csv_path}: no data rows")
    header = rows[0]
    quoted = csv_path.replace("'", "''")
    lines = [
        f"# gnuplot script for {Path(csv_path).name}",
        "set datafile separator ','",
        "set key outside right noenhanced",
        f"set xlabel '{header[0]}' noenhanced",
        "set ylabel 'value'",
        "set grid",
    ]
    parts = []
    for k, name in enumerate(header[1:], start=2):
        src = f"'{quoted}'" if k == 2 else "''"
        parts.append(f"{src} using 1:{k} skip 1 with lines title '{name}'")
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def cmd_plotscript(csv_path: str, out: TextIO | None = None, err: TextIO | None = None) -> int:
    try:
        (out or sys.stdout).write(plot_script(csv_path))
    except InputError as exc:
        return _fail(err, EXIT_INPUT, str(exc))
    return EXIT_OK
