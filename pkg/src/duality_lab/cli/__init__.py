"""Scenario-file ingestion, parameter sweeps and verification runs."""

from .commands import (
    EXIT_INPUT,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_VIOLATION,
    InputError,
    SweepSpec,
    cmd_check_random,
    cmd_check_scenario,
    cmd_plotscript,
    cmd_sweep,
    format_value,
    plot_script,
)
from .main import build_parser, main
from .schema import ScenarioFile, dump_scenario, load_scenario_text, parse_angle, scenario_to_file
