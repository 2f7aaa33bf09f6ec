import json

import numpy as np
import pytest

from rmom.cli import main, parse_grid
from rmom.errors import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_cross_hatch(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "cross_hatch")
    assert code == 0
    data = json.loads(out)
    assert data["report"]["overall"] == "bound-entangled-candidate"
    assert data["config"]["state"] == "cross_hatch"


def test_analyze_bell(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "bell")
    rep = json.loads(out)["report"]
    assert rep["ppt_min_eig"] < 0
    assert set(rep["verdicts"].values()) == {"entangled"}


def test_analyze_maximally_mixed(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "maximally_mixed", "--d", "3")
    rep = json.loads(out)["report"]
    assert code == 0 and set(rep["verdicts"].values()) == {"separable-consistent"}


def test_analyze_raw_file(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"dims": [2, 2], "re": (np.eye(4) / 4).ravel().tolist()}))
    assert run(capsys, "analyze", "--file", str(good))[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dims": [2, 2], "re": np.diag([1.5, 0, 0, -0.5]).ravel().tolist()}))
    code, _, err = run(capsys, "analyze", "--file", str(bad))
    assert code == 2 and "numerical" in err
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(capsys, "analyze", "--file", str(junk))[0] == 1
    assert run(capsys, "analyze", "--file", str(tmp_path / "missing.json"))[0] == 1


def test_usage_errors(capsys):
    assert run(capsys, "analyze")[0] == 1
    assert run(capsys, "nope")[0] == 1
    assert run(capsys, "analyze", "--state", "unknown")[0] == 1
    assert run(capsys, "analyze", "--state", "ghz")[0] == 1
    assert run(capsys, "region", "--d", "5")[0] == 1
    assert run(capsys, "region", "--grid", "0:2:5")[0] == 1
    assert run(capsys, "region", "--grid", "bad")[0] == 1
    assert run(capsys, "mc", "--state", "bell", "--samples", "10")[0] == 1
    assert run(capsys, "conjecture", "--max-terms", "9")[0] == 1


def test_region_csv(capsys):
    code, out, _ = run(capsys, "region", "--d", "3", "--grid", "0:1:5")
    lines = out.split("\n")
    assert lines[0].startswith("# config: ")
    assert lines[1] == "s2,s4_sep_min,s4_sep_max,s4_gen_min"
    rows = [list(map(float, l.split(","))) for l in lines[2:] if l]
    assert rows[-1][:3] == [1.0, 1.0, 1.0]
    half = [r for r in rows if r[0] == 0.5][0]
    assert abs(half[3] - 5 * 0.25 / 12) < 1e-14
    assert "\r" not in out


def test_region_ppt_column(capsys):
    code, out, _ = run(capsys, "region", "--d", "3", "--grid", "0.05:0.05:1", "--ppt", "--restarts", "1")
    assert code == 0
    assert out.split("\n")[1].endswith(",s4_ppt_min")


def test_fifteen_significant_digits(capsys):
    _, out, _ = run(capsys, "region", "--d", "3", "--grid", "0:1:7")
    for line in out.split("\n")[2:]:
        for cell in filter(None, line.split(",")):
            digits = cell.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
            assert len(digits) <= 15


def test_sector_commands(capsys):
    _, out, _ = run(capsys, "sector", "--state", "ghz")
    data = json.loads(out)
    assert np.allclose([data["A1"], data["A2"], data["A3"]], [0, 3, 4])
    assert data["bisep_violated"] and data["in_polytope"]
    _, out, _ = run(capsys, "sector", "--g", "0.5", "--w", "0.3")
    data = json.loads(out)
    assert np.allclose([data["A1"], data["A2"], data["A3"]], [0.03, 0.72, 1.33])
    assert run(capsys, "sector", "--state", "bell")[0] == 1


def test_sector_maximally_mixed(tmp_path, capsys):
    f = tmp_path / "mm.json"
    f.write_text(json.dumps({"dims": [2, 2, 2], "re": (np.eye(8) / 8).ravel().tolist()}))
    _, out, _ = run(capsys, "sector", "--file", str(f))
    data = json.loads(out)
    assert data["A1"] == data["A2"] == data["A3"] == 0
    assert not any(data[k] for k in data if k.endswith("_violated"))


def test_sector_scan(capsys):
    code, out, _ = run(capsys, "sector", "--scan-gw", "--grid", "0:1:11")
    lines = [l for l in out.split("\n") if l]
    assert lines[1].startswith("g,w,A1,A2,A3")
    assert len(lines) - 2 == 66


def test_mc_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["mc", "--state", "isotropic", "--p", "0.9", "--d", "3", "--samples", "20000", "--seed", "7"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    mc, exact = data["monte_carlo_s"], data["analytic_s"]
    assert abs(mc["s2"] - exact["s2"]) < 3 * mc["std_err_s2"] + 1e-12


def test_mc_bell_r2(capsys):
    _, out, _ = run(capsys, "mc", "--state", "bell", "--r", "2", "--samples", "100000")
    est = json.loads(out)["estimates"][0]
    assert abs(est["mean"] - 1 / 3) < 3 * est["std_err"]


def test_conjecture_small(capsys):
    code, out, _ = run(capsys, "conjecture", "--max-terms", "1", "--restarts", "3")
    data = json.loads(out)
    assert code == 0 and data["result"]["best_value"] <= 1e-6 and not data["violated"]


def test_conjecture_violation_exit_code(monkeypatch, capsys):
    from rmom import optsearch

    fake = optsearch.OptResult(0.5, (0.0,), 1, 0, 1, "max")
    monkeypatch.setattr(optsearch, "bisep_conjecture_scan", lambda *a, **k: fake)
    code, out, _ = run(capsys, "conjecture", "--max-terms", "2", "--restarts", "1")
    assert code == 3 and json.loads(out)["violated"]


def test_embedded_config_round_trip(tmp_path, capsys):
    first = tmp_path / "region.csv"
    assert main(["region", "--d", "4", "--grid", "0:1:9", "--out", str(first)]) == 0
    cfg = json.loads(first.read_text().split("\n")[0][len("# config: "):])
    argv = [cfg["command"], "--d", str(cfg["d"]), "--grid", cfg["grid"], "--format", cfg["format"]]
    second = tmp_path / "again.csv"
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_figure_writes_csv_and_png(tmp_path, capsys):
    code, out, _ = run(capsys, "figure", "--kind", "region", "--d", "3", "--grid", "0:1:21", "--out", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["region_d3.csv", "region_d3.png", "states_d3.csv"]
    states = (tmp_path / "states_d3.csv").read_text().split("\n")
    assert all(l.endswith(",true") for l in states[2:] if l)
    assert (tmp_path / "region_d3.png").read_bytes()[:4] == b"\x89PNG"
    code, _, _ = run(capsys, "figure", "--kind", "sector", "--grid", "0:1:6", "--out", str(tmp_path / "s"))
    assert code == 0 and (tmp_path / "s" / "sector_gw.png").exists()


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.5:0.5:1") == [0.5]
    with pytest.raises(UsageError):
        parse_grid("1:0:3")
