import json

import pytest

from helpers import random_short_window, random_signal, rng_for
from stftpr import serialize
from stftpr.cli import main
from stftpr.recovery import compare_up_to_phase


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write_signal(path, sig):
    path.write_text(serialize.dump_json(serialize.signal_to_json(sig)))


def test_measure_then_recover_round_trip(workdir, capsys):
    rng = rng_for("cli-golden")
    f = random_signal(rng, 8)
    g = random_short_window(rng, 8, 3)
    write_signal(workdir / "f.json", f)
    write_signal(workdir / "g.json", g)

    rc = main(["measure", "--signal", "f.json", "--window", "g.json", "--out", "X.csv"])
    assert rc == 0
    rc = main(["recover", "--measurement", "X.csv", "--window", "g.json", "--mode", "auto", "--out", "r.json"])
    assert rc == 0
    result = json.loads((workdir / "r.json").read_text())
    assert result["status"] == "UniqueUpToGlobalPhase"
    est = serialize.signal_from_json(result["estimate"])
    assert compare_up_to_phase(f, est)[1] < 1e-7


def test_recover_exit_codes_per_component(workdir):
    rng = rng_for("cli-percomp")
    g = random_short_window(rng, 8, 3)
    f = random_signal(rng, 8, support=[0, 4])
    write_signal(workdir / "f.json", f)
    write_signal(workdir / "g.json", g)
    assert main(["measure", "--signal", "f.json", "--window", "g.json", "--out", "X.csv"]) == 0
    assert main(["recover", "--measurement", "X.csv", "--window", "g.json", "--out", "r.json"]) == 2


def test_window_construct_punctured_center(workdir, capsys):
    rc = main(["window", "construct", "--kind", "punctured-center", "--d", "8"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["omega"]["mask_false"] == [[4, 4]]


def test_window_analyze_reports_class(workdir, capsys):
    rng = rng_for("cli-analyze")
    g = random_short_window(rng, 10, 3)
    write_signal(workdir / "g.json", g)
    assert main(["window", "analyze", "--window", "g.json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["short_L"] == 3
    assert doc["is_generic_short"] is True
    assert doc["difference_set"]["modulus"] == 10


def test_counterexample_periodic_self_check(workdir, capsys):
    rc = main(["counterexample", "periodic", "--d", "8", "--L", "3", "--r", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.strip().endswith("self-check: PASS")


def test_counterexample_small_d(workdir, capsys):
    assert main(["counterexample", "small-d", "--d", "3", "--k", "1", "--l", "1"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_decide_exit_codes(workdir):
    rng = rng_for("cli-decide")
    g = random_short_window(rng, 8, 3)
    write_signal(workdir / "g.json", g)
    f = random_signal(rng, 8, support=[0, 1, 2])
    write_signal(workdir / "f.json", f)
    assert main(["measure", "--signal", "f.json", "--window", "g.json", "--out", "X.csv"]) == 0
    assert main(["decide", "--measurement", "X.csv", "--window", "g.json", "--out", "d.json"]) == 0
    f2 = random_signal(rng, 8, support=[0, 4])
    write_signal(workdir / "f2.json", f2)
    assert main(["measure", "--signal", "f2.json", "--window", "g.json", "--out", "X2.csv"]) == 0
    assert main(["decide", "--measurement", "X2.csv", "--window", "g.json", "--out", "d2.json"]) == 2


def test_usage_and_data_error_exit_codes(workdir, capsys):
    assert main(["recover", "--measurement", "missing.csv", "--window", "also-missing.json"]) == 65
    assert main(["recover", "--window", "g.json"]) == 64
    assert main(["window", "construct", "--kind", "punctured-dc", "--d", "7"]) == 64
    assert main(["recover", "--measurement", "x", "--window", "y", "--tau-rel", "-1"]) == 64
    capsys.readouterr()


def test_seed_env_fallback(workdir, monkeypatch, capsys):
    monkeypatch.setenv("STFTPR_SEED", "13")
    assert main(["window", "construct", "--kind", "punctured-dc", "--d", "7", "--out", "g1.json"]) == 0
    monkeypatch.delenv("STFTPR_SEED")
    assert main(["window", "construct", "--kind", "punctured-dc", "--d", "7", "--seed", "13", "--out", "g2.json"]) == 0
    assert (workdir / "g1.json").read_bytes() == (workdir / "g2.json").read_bytes()


def test_byte_identical_reruns(workdir):
    rng = rng_for("cli-deterministic")
    f = random_signal(rng, 6)
    g = random_short_window(rng, 6, 2)
    write_signal(workdir / "f.json", f)
    write_signal(workdir / "g.json", g)
    for name in ("a", "b"):
        assert main(["measure", "--signal", "f.json", "--window", "g.json", "--out", f"X{name}.csv"]) == 0
    assert (workdir / "Xa.csv").read_bytes() == (workdir / "Xb.csv").read_bytes()
    for name in ("a", "b"):
        assert main(["recover", "--measurement", "Xa.csv", "--window", "g.json", "--out", f"r{name}.json"]) == 0
    assert (workdir / "ra.json").read_bytes() == (workdir / "rb.json").read_bytes()


def test_measure_json_format(workdir, capsys):
    rng = rng_for("cli-json")
    f = random_signal(rng, 4)
    g = random_signal(rng, 4)
    write_signal(workdir / "f.json", f)
    write_signal(workdir / "g.json", g)
    assert main(["measure", "--signal", "f.json", "--window", "g.json", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["d"] == 4 and len(doc["sq_mag"]) == 4


def test_line_difference_construct(workdir, capsys):
    assert main(["window", "construct", "--kind", "line-difference", "--n-terms", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["positions"] == [0, 2, 3, 14, 18]


def test_counterexample_delta_line_mode(workdir, capsys):
    assert main(["counterexample", "delta", "--line", "--n-terms", "6", "--drop", "2"]) == 0
    assert "PASS" in capsys.readouterr().out
