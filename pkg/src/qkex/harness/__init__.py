"""Experiment orchestration, reporting, the verify suite and the CLI."""

from .runner import (
    BB84_QUBITS_PER_BIT,
    AggregateReport,
    ExperimentResult,
    SessionResult,
    iter_sessions,
    report_from_transcripts,
    run_experiment,
    run_session,
    session_rng,
    summary_csv,
)
from .spec import ExperimentSpec, apply_overrides, load_spec, spec_from_parser
from .verify import Check, corrupted_cnot, format_checks, small_codes, verify_suite

__all__ = [
    "BB84_QUBITS_PER_BIT",
    "AggregateReport",
    "ExperimentResult",
    "SessionResult",
    "iter_sessions",
    "report_from_transcripts",
    "run_experiment",
    "run_session",
    "session_rng",
    "summary_csv",
    "ExperimentSpec",
    "apply_overrides",
    "load_spec",
    "spec_from_parser",
    "Check",
    "corrupted_cnot",
    "format_checks",
    "small_codes",
    "verify_suite",
]
