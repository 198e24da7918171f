import json

import pytest

from obsgames.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, json.loads(out), err


def test_enumerate(capsys, data_dir):
    code, rep, _ = run(capsys, "enumerate", data_dir / "table1.game")
    assert code == 0 and rep["equilibria"] == [["a1", "b1"], ["a2", "b3"], ["a3", "b3"]]
    assert rep["statistics"]["equilibria"] == 3
    code, rep, _ = run(capsys, "enumerate", data_dir / "table1.game", "--mode", "mixed")
    assert len(rep["equilibria"]) >= 4
    assert [{"a1": "2/3", "a2": "1/3"}, {"b1": "4/5", "b2": "1/5"}] in rep["equilibria"]
    code, rep, _ = run(capsys, "enumerate", data_dir / "matching_pennies.game")
    assert code == 0 and rep["equilibria"] == [] and "note" in rep


@pytest.mark.parametrize("path", ["direct", "psat", "cg"])
def test_coherence_pure(capsys, data_dir, path):
    code, rep, _ = run(capsys, "coherence", data_dir / "g2.game", data_dir / "g2_marginals.pce", "--path", path)
    assert code == 0 and rep["verdict"] == "coherent" and rep["witness"]
    code, rep, _ = run(capsys, "coherence", data_dir / "table1.game", data_dir / "table1_a2_b3.pce", "--path", path)
    assert code == 1 and rep["verdict"] == "incoherent" and rep["witness"] is None


@pytest.mark.parametrize("path", ["direct", "cg"])
def test_coherence_mixed(capsys, data_dir, path):
    code, rep, _ = run(
        capsys, "coherence", data_dir / "table1.game", data_dir / "table1_a2_b3.pce", "--mode", "mixed", "--path", path
    )
    assert code == 0 and rep["verdict"] == "coherent"
    assert sum(float(eval(w["probability"])) for w in rep["witness"]) == pytest.approx(1)


def test_no_equilibrium_exit(capsys, data_dir, tmp_path):
    pce = tmp_path / "any.pce"
    pce.write_text("P(heads) >= 0\n")
    code, rep, _ = run(capsys, "coherence", data_dir / "matching_pennies.game", pce)
    assert code == 1 and rep["verdict"] == "no-equilibrium" and rep["reason"]


def test_extension(capsys, data_dir):
    args = ("extension", data_dir / "g2.game", data_dir / "g2_a2.pce", "--target", "b2", "--eps", "2^-6")
    code, rep, err = run(capsys, *args, "--method", "binsearch")
    assert code == 0 and rep["value"] == "57/64" and rep["oracle_calls"] == 7
    assert [p["coherent"] for p in rep["probes"]] == [False, True, True, True, False, False, True]
    assert err.count("probe") == 7
    code, rep, _ = run(capsys, *args, "--method", "exact")
    assert rep["value"] == "9/10"
    code, rep, _ = run(
        capsys, "extension", data_dir / "table1.game", data_dir / "table1_a2.pce", "--target", "b3", "--direction", "min"
    )
    assert rep["value"] == "1/3"


def test_encode(capsys, data_dir, tmp_path):
    code, rep, _ = run(capsys, "encode", data_dir / "g2.game")
    assert "p cnf 9 21" in rep["dimacs"].splitlines()
    out = tmp_path / "t1.cnf"
    code, rep, _ = run(capsys, "encode", data_dir / "table1.game", "-o", out)
    assert code == 0 and "p cnf 6 14" in out.read_text().splitlines()


def test_errors(capsys, data_dir, tmp_path):
    empty = tmp_path / "empty.game"
    empty.write_text("game standard\n")
    code, rep, err = run(capsys, "encode", empty)
    assert code == 2 and rep["verdict"] == "error" and err
    bad = tmp_path / "bad.game"
    bad.write_text("game standard\nplayer a\nactions a1\nu a1 = oops\n")
    code, rep, _ = run(capsys, "enumerate", bad)
    assert code == 2 and "line 4" in rep["message"]
    code, rep, _ = run(capsys, "coherence", data_dir / "table1.game")
    assert code == 2 and rep["error"] == "usage"
    code, rep, _ = run(capsys, "coherence", data_dir / "g2.game", data_dir / "g2_marginals.pce", "--mode", "mixed")
    assert code == 2
    code, rep, _ = run(
        capsys, "extension", data_dir / "g2.game", data_dir / "g2_a2.pce", "--target", "b2", "--eps", "1/3"
    )
    assert code == 2


def test_profile_cap_env(capsys, data_dir, monkeypatch):
    monkeypatch.setenv("PCE_PROFILE_CAP", "5")
    code, rep, _ = run(capsys, "enumerate", data_dir / "g2.game")
    assert code == 2 and rep["error"] == "ResourceLimitError"
    code, rep, _ = run(capsys, "enumerate", data_dir / "g2.game", "--profile-cap", "100")
    assert code == 0


def test_bench(capsys, tmp_path):
    cfg = tmp_path / "b.cfg"
    cfg.write_text("n 2\ns 2\nk 1\nK 0 1 2\ninstances 4\nseed 3\n")
    out = tmp_path / "out.csv"
    code, rep, _ = run(capsys, "bench", cfg, "-o", out)
    assert code == 0 and len(rep["rows"]) == 3
    assert out.read_text().splitlines()[0].startswith("mode,n,s,k,K")


def test_reports_repeat(capsys, data_dir):
    args = ("coherence", data_dir / "g2.game", data_dir / "g2_marginals.pce", "--path", "cg")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    a["statistics"].pop("wall_ms"), b["statistics"].pop("wall_ms")
    assert a == b
