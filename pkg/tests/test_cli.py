import json
import subprocess
import sys
from pathlib import Path

import pytest

from maggaps.cli import build_parser, main

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def files(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_bundled_run(tmp_path, capsys):
    code, out, _ = run(["run", "onedim_sin2.cfg", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["passed"] and all(c["passed"] for c in verdict["checks"])
    assert {c["criterion"] for c in verdict["checks"]} == {3, 4, 7, 8}
    assert verdict["seed"] == 42
    for name in ["model_spectrum.json", "gaps_vs_mu.csv", "width_vs_mu.csv", "bands_0.1.json", "ids_0.01.csv"]:
        assert (tmp_path / name).exists()
    assert "PASS" in out


def test_model_table(capsys):
    code, out, _ = run(["model", str(DATA / "small.cfg")], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0].split() == ["p", "alpha", "alpha/pi", "mult"]
    assert [l.split()[2] for l in lines[1:]] == ["1.000000", "3.000000", "5.000000"]


def test_reference(capsys):
    code, out, _ = run(["reference", "--theta", "2"], capsys)
    assert code == 0 and out.strip() == "2, 4 | continuum ≥ 4.25"


def test_harper(capsys):
    code, out, _ = run(["harper", "--p", "1", "--q", "3"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "flux_p,flux_q,band_index,lower,upper"


def test_cocycle_check(capsys):
    code, out, _ = run(["cocycle-check", "--instances", "50"], capsys)
    assert code == 0 and "max defect" in out


@pytest.mark.parametrize("cfg,message", [
    ("no_zero.cfg", "Morse-type"),
    ("mu_too_large.cfg", "too large"),
    ("unknown_key.cfg", "experiment.temperature: unknown key"),
])
def test_errors(cfg, message, tmp_path, capsys):
    code, _, err = run(["run", str(DATA / cfg), "--out-dir", str(tmp_path)], capsys)
    assert code == 1 and message in err


def test_missing_config(capsys):
    code, _, err = run(["model"], capsys)
    assert code == 1 and "needs a config" in err


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["nonsense"])
    assert exc.value.code == 2


def test_reruns_are_identical(tmp_path, capsys):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for d, jobs in ((a, "1"), (b, "1"), (c, "3")):
        assert run(["run", str(DATA / "small.cfg"), "--out-dir", str(d), "--quiet", "--jobs", jobs], capsys)[0] == 0
    assert files(a) == files(b) == files(c)


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "maggaps.cli", "gaps", str(DATA / "small.cfg")],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert r.stdout.splitlines()[:3] == ["mu,gap_count", "0.1,3", "0.05,4"]
