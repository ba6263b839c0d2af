import json
import subprocess
import sys

import numpy as np
import pytest

from bfamily import cli, diagnostics, runner

CH_POSITIVE = """\
equation.b = 2.0
equation.c = 1.0
equation.p = 1
grid.n = 64
step.dt = 1e-3
step.t_end = 0.1
init.kind = momentum-first
init.offset = 1.0
init.amplitude = 0.5
init.sign = non-negative
observe.stride = 10
checks.sign = true
checks.characteristics = true
characteristics.dt = 1e-3
checks.continuation = true
"""


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_writes_artifacts(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["run", _write(tmp_path, CH_POSITIVE), "--output-dir", str(out), "--quiet"])
    assert code == 0
    lines = (out / "invariants.csv").read_text().splitlines()
    assert lines[0] == "t,H1,H2,M_total,L1_m,I_u,sup_u,sup_ux,min_m,max_m,f_min,f_max,eq606_residual"
    assert len(lines) == 1 + 11
    frames = sorted((out / "frames").iterdir())
    assert len(frames) == 11
    head = frames[-1].read_text().splitlines()
    assert head[0] == "t=0.10000000000000001 n=64" and len(head) == 65
    t, u = runner.read_frame(frames[-1])
    assert t == 0.1 and u.shape == (64,)
    summary = json.loads((out / "summary.json").read_text())
    assert list(summary) == ["status", "breaking", "drifts", "residuals", "checks", "config_echo"]
    assert summary["status"] == "pass" and not summary["breaking"]["detected"]
    assert set(summary["checks"]) == {"conservation", "identity", "sign", "characteristics", "continuation"}
    assert summary["residuals"]["flow"] < 1e-5
    assert summary["config_echo"]["equation.b"] == 2.0


def test_seventeen_digit_round_trip(tmp_path):
    out = tmp_path / "out"
    cli.main(["run", _write(tmp_path, CH_POSITIVE), "--output-dir", str(out), "--quiet"])
    rows = runner.read_csv(out / "invariants.csv")
    _, u = runner.read_frame(out / "frames" / "frame_000010.txt")
    from bfamily.config import load
    from bfamily.equation import State

    rep = diagnostics.report(State(0.1, u), load(tmp_path / "run.cfg").parameters)
    assert rows[-1]["H2"] == rep.H2


def test_bit_reproducible(tmp_path):
    cfg = _write(tmp_path, CH_POSITIVE)
    for d in ("a", "b"):
        assert cli.main(["run", cfg, "--output-dir", str(tmp_path / d), "--quiet"]) == 0
    assert (tmp_path / "a" / "invariants.csv").read_bytes() == (tmp_path / "b" / "invariants.csv").read_bytes()


def test_summary_drifts_recomputable_from_csv(tmp_path):
    out = tmp_path / "out"
    cli.main(["run", _write(tmp_path, CH_POSITIVE), "--output-dir", str(out), "--quiet"])
    rows = runner.read_csv(out / "invariants.csv")
    summary = json.loads((out / "summary.json").read_text())
    for name, value in summary["drifts"].items():
        q = np.array([r[name] for r in rows])
        assert value == float(np.max(np.abs(q - q[0])) / max(abs(q[0]), diagnostics.DRIFT_FLOOR))
    assert summary["residuals"]["identity_max"] == max(r["eq606_residual"] for r in rows)


def test_zero_data(tmp_path):
    text = "equation.b = 2\nequation.c = 1\nequation.p = 1\ngrid.n = 32\nstep.dt = 1e-3\nstep.t_end = 0.01\ninit.amplitude = 0\n"
    out = tmp_path / "out"
    assert cli.main(["run", _write(tmp_path, text), "--output-dir", str(out), "--quiet"]) == 0
    rows = runner.read_csv(out / "invariants.csv")
    assert all(v == 0.0 for r in rows for k, v in r.items() if k != "t")
    assert json.loads((out / "summary.json").read_text())["status"] == "pass"


def test_usage_errors(tmp_path, capsys):
    bad = _write(tmp_path, "equation.b = -1\nequation.c = 1\nequation.p = 1\n")
    assert cli.main(["run", bad]) == 2
    assert "b must be" in capsys.readouterr().err
    unknown = _write(tmp_path, "equation.b = 1\nequation.c = 1\nequation.p = 1\nfoo.bar = 2\n", "u.cfg")
    assert cli.main(["run", unknown]) == 2
    assert "foo.bar" in capsys.readouterr().err
    assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 2
    sign = _write(tmp_path, "equation.b = 1\nequation.c = 1\nequation.p = 1\ninit.kind = momentum-first\ninit.sign = non-negative\ninit.offset = -1\n", "s.cfg")
    assert cli.main(["run", sign, "--output-dir", str(tmp_path / "o")]) == 2
    cfl = _write(tmp_path, "equation.b = 1\nequation.c = 1\nequation.p = 1\nstep.dt = 0.05\ninit.offset = 5\n", "c.cfg")
    assert cli.main(["run", cfl, "--output-dir", str(tmp_path / "o")]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_breakdown_exit_and_partial_summary(tmp_path):
    text = (
        "equation.b = 2\nequation.c = 1\nequation.p = 1\ngrid.n = 128\nstep.dt = 2e-4\nstep.t_end = 1\n"
        "step.max_value_guard = 20\ninit.amplitude = 0.5\ninit.phase = -1.5707963267948966\nobserve.stride = 100\n"
    )
    out = tmp_path / "out"
    assert cli.main(["run", _write(tmp_path, text), "--output-dir", str(out), "--quiet"]) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "breakdown"
    assert summary["breaking"]["detected"] and summary["breaking"]["reason"] == "guard"
    assert 0.3 < summary["breaking"]["t_break"] < 0.6
    assert len(runner.read_csv(out / "invariants.csv")) >= 2


def test_check_failure_exit(tmp_path):
    text = CH_POSITIVE + "tol.drift = 1e-300\n"
    text = text.replace("init.amplitude = 0.5", "init.amplitude = 0.5\ninit.mode = 3")
    assert cli.main(["run", _write(tmp_path, text), "--output-dir", str(tmp_path / "o"), "--quiet"]) == 1


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["run", _write(tmp_path, CH_POSITIVE), "--output-dir", str(blocker / "sub"), "--quiet"]) == 4
    assert cli.main(["verify", "all", "--output-dir", str(blocker / "sub"), "--quiet"]) == 4


def test_verify_suite(tmp_path, capsys):
    assert cli.main(["verify", "characteristics", "--output-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "criterion  5 PASS" in out
    assert "suite characteristics: PASS" in (tmp_path / "verify-characteristics.txt").read_text()


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "bfamily", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout
