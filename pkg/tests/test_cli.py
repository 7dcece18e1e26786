import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from qesforms.cli import JobSpec, parse_job, run

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_JOBS = {
    "spectrum_calogero3_n2.json": ["spectrum", "--model", "calogero", "--n-bodies", "3", "--nu", "1/3", "--degree", "2"],
    "flag_check_h4.json": ["flag-check", "--model", "h4", "--degree", "24"],
    "qes_calogero3_k1.json": ["qes", "--model", "calogero", "--n-bodies", "3", "--nu", "1/3", "--k", "1"],
    "spectrum_g2_n3.csv": ["spectrum", "--model", "g2", "--nu", "1/3", "--mu", "1/5", "--degree", "3", "--format", "csv"],
}


def invoke(args, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = run([*args, "--out", str(out)])
    return code, out.read_text() if out.exists() else None


@pytest.mark.parametrize("golden, args", GOLDEN_JOBS.items())
def test_golden(golden, args, tmp_path):
    code, text = invoke(args, tmp_path)
    assert code == 0
    assert text == (GOLDEN / golden).read_text()


def test_spectrum_h3(tmp_path):
    code, text = invoke(["spectrum", "--model", "h3", "--omega", "1", "--nu", "1/3", "--degree", "6", "--format", "json"], tmp_path)
    assert code == 0
    report = json.loads(text)
    assert report["schema_version"] == 1 and report["verdict"] == "pass"
    for row in report["results"]["table"]:
        eps = Fraction(row["epsilon"])
        for p in row["quantum_numbers"]:
            assert eps == 2 * (p[0] + 3 * p[1] + 5 * p[2])
        assert row["multiplicity"] == row["predicted_multiplicity"] == len(row["quantum_numbers"])


def test_flag_check_h4(tmp_path):
    code, text = invoke(["flag-check", "--model", "h4", "--degree", "24"], tmp_path)
    assert code == 0 and json.loads(text)["results"]["preserved"]


@pytest.mark.parametrize(
    "args",
    [
        ["spectrum", "--model", "calogero", "--n-bodies", "3", "--degree", "-1"],
        ["spectrum", "--model", "nope"],
        ["spectrum", "--model", "g2", "--nu", "1/0"],
        ["spectrum", "--model", "g2", "--omega", "abc"],
        ["spectrum", "--model", "calogero"],
        ["--model", "g2"],
        ["xcheck", "--model", "h4"],
        ["qes", "--model", "z2n", "--n-bodies", "2"],
    ],
)
def test_bad_input(args, capsys):
    assert run(args) == 2


def test_verification_failure_exit(tmp_path):
    code, text = invoke(["xcheck", "--model", "h3", "--nu", "1/3"], tmp_path)
    assert code == 1
    report = json.loads(text)
    assert report["verdict"] == "fail"
    assert report["results"]["tau2_interpretation"]["satisfies_identity"] == ["homogeneous"]


def test_h3_homogeneous_passes(tmp_path):
    code, text = invoke(["xcheck", "--model", "h3", "--nu", "1/3", "--tau2-homogeneous"], tmp_path)
    assert code == 0


def test_job_file(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"subcommand": "flag-check", "model": "g2", "nu": "1/3", "degree": 4}))
    spec = parse_job(["--job", str(job), "--degree", "6"])
    assert spec.subcommand == "flag-check" and spec.nu == "1/3" and spec.degree == 6
    assert run(["--job", str(job)]) == 0


def test_job_file_unknown_field(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"subcommand": "flag-check", "model": "g2", "colour": "red"}))
    assert run(["--job", str(job)]) == 2


def test_job_echo_is_lossless(tmp_path):
    code, text = invoke(["qes", "--model", "bcn", "--n-bodies", "2", "--nu", "2/7", "--a", "3/11"], tmp_path)
    job = json.loads(text)["job"]
    spec = JobSpec(**job)
    assert Fraction(spec.nu) == Fraction(2, 7) and Fraction(spec.a) == Fraction(3, 11)


@pytest.mark.parametrize(
    "args",
    [
        ["xcheck", "--model", "calogero", "--n-bodies", "3", "--nu", "1/3", "--seed", "5"],
        ["commutant", "--model", "g2", "--nu", "1/3"],
        ["algebra", "--model", "g2", "--degree", "3"],
        ["decompose", "--model", "bcn", "--n-bodies", "2", "--nu", "1/3", "--format", "text"],
    ],
)
def test_deterministic(args, tmp_path):
    first = invoke(args, tmp_path, "a.txt")
    second = invoke(args, tmp_path, "b.txt")
    assert first == second and first[0] == 0


def test_timing_opt_in(tmp_path):
    _, plain = invoke(["flag-check", "--model", "g2"], tmp_path, "a.json")
    _, timed = invoke(["flag-check", "--model", "g2", "--timing"], tmp_path, "b.json")
    assert json.loads(plain)["timing"] is None
    assert json.loads(timed)["timing"]["seconds"] >= 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qesforms.cli", "flag-check", "--model", "bcn", "--n-bodies", "2", "--degree", "3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"


@pytest.mark.parametrize("sub", ["spectrum", "flag-check", "qes", "algebra", "decompose", "commutant", "xcheck"])
def test_every_subcommand_runs(sub, tmp_path):
    code, text = invoke([sub, "--model", "calogero", "--n-bodies", "3", "--nu", "1/3", "--zeros", "radial"], tmp_path)
    assert code == 0
    report = json.loads(text)
    assert set(report) == {"schema_version", "job", "results", "timing", "verdict"}
    assert report["verdict"] in {"pass", "fail", "info"}
