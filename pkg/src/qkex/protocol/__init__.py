"""Party state machines and session runners for all four protocols."""

from .config import MAX_RATE, RANK_MARGIN_BITS, ProtocolKind, SessionConfig, SessionPlan, plan_session
from .leakage import (
    LeakageEstimate,
    cross_fitted_mutual_information,
    leakage_audit,
    per_coordinate_mutual_information,
    plugin_mutual_information,
)
from .link import Link
from .naive import run_naive_baseline
from .p1 import run_protocol1
from .p2 import EXPECTED_RESIDUAL, ScaleExceeded, run_protocol2
from .p3 import Alice, Bob, DecoyLayout, allowed_test_errors, fresh_stores, run_protocol3, settle, decoy_layout
from .transcript import SUMMARY_COLUMNS, Outcome, SessionTranscript, read_outcomes

__all__ = [
    "MAX_RATE",
    "RANK_MARGIN_BITS",
    "ProtocolKind",
    "SessionConfig",
    "SessionPlan",
    "plan_session",
    "LeakageEstimate",
    "cross_fitted_mutual_information",
    "leakage_audit",
    "per_coordinate_mutual_information",
    "plugin_mutual_information",
    "Link",
    "run_naive_baseline",
    "run_protocol1",
    "EXPECTED_RESIDUAL",
    "ScaleExceeded",
    "run_protocol2",
    "Alice",
    "Bob",
    "DecoyLayout",
    "allowed_test_errors",
    "fresh_stores",
    "run_protocol3",
    "settle",
    "decoy_layout",
    "SUMMARY_COLUMNS",
    "Outcome",
    "SessionTranscript",
    "read_outcomes",
]
