import json
from pathlib import Path

import pytest

from qkex.harness import (
    AggregateReport,
    ExperimentSpec,
    apply_overrides,
    corrupted_cnot,
    format_checks,
    iter_sessions,
    load_spec,
    report_from_transcripts,
    run_experiment,
    run_session,
    verify_suite,
)
from qkex.harness.cli import main
from qkex.pauli_frame import PauliChannelParams
from qkex.protocol import SessionConfig, plan_session

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _ini(tmp_path, body):
    path = tmp_path / "exp.ini"
    path.write_text(body, encoding="utf-8")
    return path


def test_load_spec_and_overrides(tmp_path):
    path = _ini(
        tmp_path,
        "[session]\nprotocol = naive\nN = 90\ntests = 10\n"
        "[channel]\np_x = 0.01\n"
        "[adversary]\nstrategy = intercept_one_z\n"
        "[experiment]\nsessions = 7\nseed = 3 ; inline comment\n",
    )
    spec = load_spec(path)
    assert spec.config.N == 90 and spec.config.num_tests == 10
    assert spec.channel.p_x == 0.01 and spec.adversary == "intercept_one_z"
    assert (spec.num_sessions, spec.seed, spec.out_dir) == (7, 3, None)
    again = load_spec(path, seed=11, sessions=2, out_dir=tmp_path, protocol="p3")
    assert (again.seed, again.num_sessions, again.out_dir) == (11, 2, tmp_path)
    assert again.protocol.value == "p3"
    assert apply_overrides(spec) is spec


def test_shipped_config_loads():
    spec = load_spec(CONFIGS / "noisy_p3.ini")
    assert spec.config.N == 100 and spec.channel.p_z == 0.03


@pytest.mark.parametrize(
    "kwargs",
    [dict(num_sessions=0), dict(key_mode="warm"), dict(adversary="nobody")],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ExperimentSpec(SessionConfig(N=8), **kwargs)


def test_chained_needs_p3():
    with pytest.raises(ValueError):
        ExperimentSpec(SessionConfig(N=8, protocol="naive"), key_mode="chained")


def test_single_noiseless_session():
    result = run_experiment(ExperimentSpec(SessionConfig(N=8), num_sessions=1))
    assert result.report.delivered == 1 and result.report.delivered_wrong == 0


def test_qubit_count_with_reduced_tests():
    config = SessionConfig(N=100, r=0.1)
    result = run_experiment(ExperimentSpec(config, num_sessions=3))
    n = plan_session(config).block_length
    assert [row["qubits_sent"] for row in result.rows] == [n + 10] * 3
    assert result.report.ratio_vs_bb84 == pytest.approx((n + 10) / 200)
    assert "ratio to BB84 nominal" in result.report_text()


def test_outputs_reproducible_and_reconciled(tmp_path):
    channel = PauliChannelParams(0.03, 0.0, 0.03)
    texts = []
    for run in ("a", "b"):
        spec = ExperimentSpec(SessionConfig(N=32), channel, num_sessions=40, seed=5, out_dir=tmp_path / run)
        result = run_experiment(spec)
        texts.append((tmp_path / run / "summary.csv").read_bytes())
        assert report_from_transcripts(tmp_path / run).counts_match(result.report)
    assert texts[0] == texts[1]
    assert texts[0].decode().splitlines()[0].startswith("session_id,outcome")


def test_sessions_reproducible_individually():
    spec = ExperimentSpec(SessionConfig(N=16), PauliChannelParams(p_x=0.05), num_sessions=10, seed=8)
    batch = run_experiment(spec).rows
    assert run_session(spec, 6).row() == batch[6]


def test_workers_match_serial():
    spec = ExperimentSpec(SessionConfig(N=8), PauliChannelParams(p_x=0.05), num_sessions=12, seed=2)
    serial = run_experiment(spec).rows
    parallel = [r.row() for r in iter_sessions(spec, workers=2, chunk=5)]
    assert parallel == serial


def test_chained_mode_reuses_stores():
    spec = ExperimentSpec(SessionConfig(N=8), num_sessions=5, key_mode="chained")
    results = list(iter_sessions(spec))
    assert all(r.transcript.delivered for r in results)
    allocs = [next(rec for rec in r.transcript.records if rec.kind == "allocate") for r in results]
    # b' and d come back after every delivery
    assert {a.fields["b_prime"] for a in allocs} == {"s0:b_prime"}
    assert {a.fields["d"] for a in allocs} == {"s0:d"}
    assert len({a.fields["c"] for a in allocs}) == 5


def test_leakage_entries():
    spec = ExperimentSpec(SessionConfig(N=8), adversary="measure_all_z", num_sessions=200, leakage=True)
    report = run_experiment(spec).report
    assert "message" in report.leakage
    if report.delivered:
        assert report.leakage["recycled"].samples == report.delivered


def test_protocol2_refuses_adversary():
    spec = ExperimentSpec(SessionConfig(N=4, protocol="p2"), adversary="measure_all_z", num_sessions=1)
    with pytest.raises(ValueError):
        run_session(spec, 0)


def test_report_requires_rows():
    with pytest.raises(ValueError):
        AggregateReport.from_rows([])


# --- verify -------------------------------------------------------------------


def test_verify_suite_passes_and_is_deterministic():
    one, two = verify_suite(seed=0), verify_suite(seed=0)
    assert all(c.passed for c in one), format_checks([c for c in one if not c.passed])
    assert format_checks(one) == format_checks(two)


def test_corrupted_cnot_fails_phase_propagation():
    by_name = {c.name: c for c in verify_suite(cnot=corrupted_cnot)}
    assert not by_name["Z error propagation"].passed


# --- CLI ----------------------------------------------------------------------


def test_cli_run_and_report(tmp_path, capsys):
    out = tmp_path / "out"
    path = _ini(tmp_path, "[session]\nN = 8\n[experiment]\nsessions = 5\n")
    assert main(["run", str(path), "--out-dir", str(out), "--seed", "1"]) == 0
    text = capsys.readouterr().out
    assert "delivered fraction" in text
    assert sorted(p.name for p in out.iterdir()) == ["report.txt", "summary.csv", "transcripts.log"]
    first = json.loads((out / "transcripts.log").read_text().splitlines()[0])
    assert first["session"] == 0
    assert main(["report", str(out), "--out-dir", str(tmp_path / "again")]) == 0
    assert (tmp_path / "again" / "report.txt").exists()


def test_cli_defaults_without_config(capsys):
    assert main(["run", "--sessions", "2", "--protocol", "p1"]) == 0
    assert "protocol                   p1" in capsys.readouterr().out


def test_cli_verify(capsys):
    assert main(["verify"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.ini")]) == 2
    assert main(["run", "--sessions", "0"]) == 2
    assert "qkex: error" in capsys.readouterr().err
