"""Experiment specifications and their INI configuration files.

Schema (every key optional; defaults shown)::

    [session]
    protocol = p3          ; p1 | p2 | p3 | naive_baseline
    N = 64
    t_x = 0.05
    t_z = 0.05
    delta = 0.02
    r = 1.0
    threshold =            ; default min(t_x, t_z) + delta / 2
    tests =                ; explicit even test-qubit count, overrides r
    auth_bits = 200

    [channel]
    p_x = 0.0
    p_y = 0.0
    p_z = 0.0

    [adversary]
    strategy = identity    ; name[:key=value,...], e.g. intercept_fraction:f=0.1

    [experiment]
    sessions = 100
    seed = 0
    out_dir = out
    key_mode = fresh       ; fresh | chained
    leakage = false
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..adversary import parse_adversary
from ..pauli_frame import PauliChannelParams
from ..protocol import ProtocolKind, SessionConfig

KEY_MODES = ("fresh", "chained")


@dataclass(frozen=True)
class ExperimentSpec:
    """One batch of independent sessions.

    With ``key_mode="fresh"`` every session gets its own freshly drawn key
    pair, so sessions are independent. ``"chained"`` runs all sessions on
    one pair of stores so recycled bits and reusable slices carry over.
    """

    config: SessionConfig
    channel: PauliChannelParams = field(default_factory=PauliChannelParams)
    adversary: str = "identity"
    num_sessions: int = 100
    seed: int = 0
    out_dir: Path | None = None
    key_mode: str = "fresh"
    leakage: bool = False

    def __post_init__(self):
        if self.num_sessions < 1:
            raise ValueError("num_sessions must be at least 1")
        if self.key_mode not in KEY_MODES:
            raise ValueError(f"key_mode must be one of {KEY_MODES}")
        if self.key_mode == "chained" and self.config.protocol is not ProtocolKind.P3:
            raise ValueError("chained key mode only applies to p3")
        parse_adversary(self.adversary)
        if self.out_dir is not None:
            object.__setattr__(self, "out_dir", Path(self.out_dir))

    @property
    def protocol(self) -> ProtocolKind:
        return self.config.protocol


def _optional(section, key, cast):
    raw = section.get(key, fallback="").strip()
    return cast(raw) if raw else None


def load_spec(path: str | os.PathLike, **overrides) -> ExperimentSpec:
    """Read an INI file into a spec; keyword overrides win over file values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keep "N" upper-case
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    return spec_from_parser(parser, **overrides)


def spec_from_parser(parser: configparser.ConfigParser, **overrides) -> ExperimentSpec:
    for name in ("session", "channel", "adversary", "experiment"):
        if not parser.has_section(name):
            parser.add_section(name)
    ses, ch, adv, exp = (parser[n] for n in ("session", "channel", "adversary", "experiment"))
    config = SessionConfig(
        N=ses.getint("N", 64),
        t_x=ses.getfloat("t_x", 0.05),
        t_z=ses.getfloat("t_z", 0.05),
        delta=ses.getfloat("delta", 0.02),
        r=ses.getfloat("r", 1.0),
        protocol=ses.get("protocol", "p3"),
        threshold=_optional(ses, "threshold", float),
        tests=_optional(ses, "tests", int),
        auth_bits=ses.getint("auth_bits", 200),
    )
    spec = ExperimentSpec(
        config=config,
        channel=PauliChannelParams(ch.getfloat("p_x", 0.0), ch.getfloat("p_y", 0.0), ch.getfloat("p_z", 0.0)),
        adversary=adv.get("strategy", "identity"),
        num_sessions=exp.getint("sessions", 100),
        seed=exp.getint("seed", 0),
        out_dir=_optional(exp, "out_dir", Path),
        key_mode=exp.get("key_mode", "fresh"),
        leakage=exp.getboolean("leakage", False),
    )
    return apply_overrides(spec, **overrides)


def apply_overrides(
    spec: ExperimentSpec,
    seed: int | None = None,
    sessions: int | None = None,
    out_dir: str | os.PathLike | None = None,
    adversary: str | None = None,
    protocol: str | None = None,
) -> ExperimentSpec:
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if sessions is not None:
        changes["num_sessions"] = sessions
    if out_dir is not None:
        changes["out_dir"] = Path(out_dir)
    if adversary is not None:
        changes["adversary"] = adversary
    if protocol is not None:
        changes["config"] = replace(spec.config, protocol=ProtocolKind.parse(protocol))
    return replace(spec, **changes) if changes else spec
