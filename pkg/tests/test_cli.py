import json
import subprocess
import sys

import pytest

from nonvanish.cli import main

RUN = [sys.executable, "-m", "nonvanish.cli"]


def run_cli(*args):
    return subprocess.run(
        RUN + list(args), capture_output=True, text=True, timeout=300
    )


def test_proportion_paper_preset(capsys):
    assert main(["proportion", "--preset", "paper"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["proportion"] == "23763/69665"


def test_optimize_baseline(capsys):
    assert main(["optimize", "--dp", "1", "--dq", "0", "--theta1", "1/2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["optimum"]["proportion"] == "1/3"


def test_census_csv(capsys):
    assert main(["--format", "csv", "census", "--preset", "paper", "--q", "5",
                 "--no-moments"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("q,total,nonzero")
    assert lines[1].startswith("5,1,1,")


def test_validation_error_exit_2(capsys):
    rc = main(["proportion", "--theta1", "1/4", "--theta2", "1/2"])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_missing_spec_exit_2(capsys):
    assert main(["proportion"]) == 2


def test_capacity_error_exit_3(capsys):
    rc = main(["census", "--preset", "paper", "--q", "200001"])
    assert rc == 3


def test_warning_on_boundary_goes_to_stderr(capsys):
    rc = main(["proportion", "--preset", "paper"])
    assert rc == 0
    err = capsys.readouterr().err
    assert "theta2 < theta1 < 1/2" in err


def test_unknown_command_usage_exit_2():
    r = run_cli("frobnicate")
    assert r.returncode == 2
    assert "usage" in r.stderr.lower()


def test_reports_byte_identical_for_same_config(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        rc = main([
            "--output", str(path), "--seed", "11",
            "oracles", "--which", "orthogonality", "--q", "12", "--count", "6",
        ])
        assert rc == 0
    assert a.read_bytes() == b.read_bytes()


def test_report_reparses_to_config_and_results(capsys):
    assert main(["moments", "--preset", "paper"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"command", "config", "results"}
    from nonvanish.schemas import MomentsRequest

    cfg = MomentsRequest.model_validate(report["config"])
    assert cfg.spec.preset == "paper"
    # rational strings survive exactly
    assert report["results"]["proportion"] == "23763/69665"


def test_kernels_command(capsys):
    assert main(["kernels", "--x", "1.0", "--mellin", "2,100,10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["results"]["points"][0]["value"] - 0.5) < 1e-10


def test_shifted_command(capsys):
    assert main(["shifted", "--preset", "paper", "--q", "101",
                 "--alpha", "0", "--beta", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["results"]["J1"] - 417 / 1600) < 1e-9


def test_moments_with_shift_flag(capsys):
    assert main(["moments", "--preset", "paper", "--q", "101",
                 "--shift", "1e-3,-5e-4"]) == 0
    out = json.loads(capsys.readouterr().out)
    row = out["results"]["shifted"][0]
    assert row["alpha"] == 1e-3 and row["beta"] == -5e-4


def test_empirical_command(capsys):
    assert main(["empirical", "--preset", "paper", "--theta1", "1/4",
                 "--theta2", "1/4", "--q", "101"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["record"]["total"] == 49
    assert out["results"]["cauchy_schwarz_strict"] is True


def test_scan_command_csv(capsys):
    assert main(["--format", "csv", "scan", "--max-dp", "2", "--max-dq", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1].startswith("1,0,1/3,")


def test_oracles_divisor_bound(capsys):
    assert main(["oracles", "--which", "divisor-bound", "--order", "2",
                 "--sigma", "-0.3", "--y1", "22026.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["ratio"] <= 1.0


def test_theta_override_of_preset(capsys):
    assert main(["proportion", "--preset", "paper", "--theta1", "1/4",
                 "--theta2", "1/4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["spec"]["theta1"] == "1/4"
    # headline profiles retained
    assert out["results"]["spec"]["P"] == ["0/1", "21/20", "-1/20"]


def test_csv_rejected_for_non_tabular_command(capsys):
    rc = main(["--format", "csv", "proportion", "--preset", "paper"])
    assert rc == 2


def test_global_flags_accepted_after_subcommand(capsys):
    rc = main(["census", "--preset", "paper", "--q", "5", "--no-moments",
               "--format", "csv"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("q,total,nonzero")


@pytest.mark.slow
def test_server_roundtrip(tmp_path):
    # live server exercise of the thin-client path
    import socket
    import time

    import httpx

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-c",
         "import uvicorn; from nonvanish.service import app; "
         f"uvicorn.run(app, host='127.0.0.1', port={port}, log_level='error')"],
    )
    try:
        base = f"http://127.0.0.1:{port}"
        for _ in range(100):
            try:
                if httpx.get(base + "/health", timeout=1.0).status_code == 200:
                    break
            except Exception:
                time.sleep(0.1)
        else:
            pytest.fail("server did not come up")
        r = run_cli("--server", base, "proportion", "--preset", "paper")
        assert r.returncode == 0, r.stderr
        assert json.loads(r.stdout)["results"]["proportion"] == "23763/69665"
        r = run_cli("--server", base, "proportion", "--theta1", "1/4", "--theta2", "1/2")
        assert r.returncode == 2
    finally:
        proc.terminate()
        proc.wait(timeout=10)
