import json

import numpy as np

from conftest import DATA
from qicrates.cli import main
from qicrates.geometry import RateRegion, region_from_csv, subset_by_sampling

FAST = ["--grid-step", "0.25", "--threads", "1"]


def _report(path):
    return json.loads((path / "report.json").read_text())


def test_sato_csv_on_product_channel(tmp_path):
    assert main(["region", str(DATA / "noiseless_product.json"), "--which", "sato", "--out", str(tmp_path)] + FAST) == 0
    r = region_from_csv((tmp_path / "region_sato.csv").read_text())
    assert r.vertices.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]
    assert (tmp_path / "region_sato.csv").read_text().startswith("R1,R2\n0,0\n")


def test_strong_warning_on_non_si_channel(tmp_path, capsys):
    assert main(["region", str(DATA / "noiseless_product.json"), "--which", "strong", "--out", str(tmp_path)] + FAST) == 0
    rep = _report(tmp_path)
    assert rep["warnings"] and rep["warnings"][0]["region"] == "strong"
    assert rep["classification"]["strong"]["verdict"] == "unclassified"
    assert "warning" in capsys.readouterr().err


def test_svg_overlay_nested(tmp_path):
    args = ["region", str(DATA / "strong_gap.json"), "--which", "hk,sdrs,sato", "--format", "svg",
            "--out", str(tmp_path), "--hk-max-aux", "1"] + FAST
    assert main(args) == 0
    svg = (tmp_path / "regions.svg").read_text()
    assert svg.count("<polygon") == 3
    for name in ("hk", "sdrs", "sato"):
        assert f"<title>{name}</title>" in svg
    regs = {k: RateRegion(np.array(v["vertices"])) for k, v in _report(tmp_path)["regions"].items()}
    assert subset_by_sampling(regs["sdrs"], regs["hk"]) and subset_by_sampling(regs["hk"], regs["sato"])


def test_json_format_only_writes_report(tmp_path):
    assert main(["region", str(DATA / "swap.json"), "--which", "very-strong,mac1", "--format", "json",
                 "--out", str(tmp_path)] + FAST) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["report.json"]
    rep = _report(tmp_path)
    assert rep["regions"]["very-strong"]["vertices"] == [[0, 0], [1, 0], [1, 1], [0, 1]]
    assert rep["run"]["channel"] == "swap.json"


def test_classify(tmp_path, capsys):
    assert main(["classify", str(DATA / "swap.json"), "--out", str(tmp_path / "c.json")] + FAST) == 0
    assert "verdict: very_strong" in capsys.readouterr().out
    assert json.loads((tmp_path / "c.json").read_text())["verdict"] == "very_strong"
    assert main(["classify", str(DATA / "noiseless_product.json")] + FAST) == 0
    out = capsys.readouterr().out
    assert "verdict: unclassified" in out and "worst margin" in out


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nx1": 1, "nx2": 1, "dB1": 1, "dB2": 1, "states": [{"x1": 0, "x2": 0, "matrix": [[[0.5, 0]]]}]}')
    assert main(["classify", str(bad)]) == 2
    assert main(["classify", str(tmp_path / "missing.json")]) == 2
    assert main(["region", str(DATA / "swap.json"), "--which", "nonsense"]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["simulate", str(DATA / "pure_qubit_mac.json"), "--n", "13", "--r1", "0.1", "--r2", "0.1",
                 "--samples", "1"]) == 3
    assert main(["simulate", str(DATA / "pure_qubit_mac.json"), "--n", "2", "--r1", "-1", "--r2", "0"]) == 2
    assert main(["properties", "--trials", "3", "--inject", "povm"]) == 4
    assert main(["properties", "--trials", "0"]) == 0


def test_single_message_simulation(tmp_path):
    out = tmp_path / "s.json"
    assert main(["simulate", str(DATA / "pure_qubit_mac.json"), "--n", "2", "--r1", "0", "--r2", "0",
                 "--samples", "3", "--out", str(out)]) == 0
    sim = json.loads(out.read_text())["simulation"]
    assert sim["messages"] == [1, 1]
    assert all(s["e1"] == s["e2"] == s["e12"] == 0 for s in sim["samples"])


def test_determinism(tmp_path):
    runs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["region", str(DATA / "swap.json"), "--which", "mac1,strong,successive", "--out", str(d)] + FAST) == 0
        assert main(["simulate", str(DATA / "pure_qubit_mac.json"), "--n", "2", "--r1", "0.5", "--r2", "0.5",
                     "--samples", "4", "--seed", "9", "--out", str(d / "sim.json"), "--threads", str(k + 1)]) == 0
        runs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert runs[0] == runs[1]
