import json
import subprocess
import sys

import pytest

from storysets.cli import main

from conftest import DATA, GOLDEN

TOY = str(DATA / "toy.csv")


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("layout", ["storyline", "star"])
@pytest.mark.parametrize("glyph", ["stacked", "colored"])
def test_render_matches_golden(tmp_path, capsys, layout, glyph):
    out = tmp_path / "toy.svg"
    code, stdout, _ = run(["render", TOY, "--layout", layout, "--glyph", glyph, "--out", str(out)], capsys)
    assert code == 0
    assert out.read_bytes() == (GOLDEN / f"toy_{layout}_{glyph}.svg").read_bytes()
    record = json.loads(stdout)
    assert set(record) == {"CR", "T_Sigma", "wiggle", "runtime_ms", "iterations_used"}


def test_random_seed_reproducible(tmp_path, capsys):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.svg"
        code, stdout, _ = run(["render", TOY, "--strategy", "random", "--seed", "7", "--out", str(out)], capsys)
        assert code == 0
        outs.append((out.read_bytes(), {k: v for k, v in json.loads(stdout).items() if k != "runtime_ms"}))
    assert outs[0] == outs[1]


def test_star_single_element_rejected(tmp_path, capsys):
    src = tmp_path / "one.csv"
    src.write_text("set,a\nS,1\nT,0.5\n")
    code, _, err = run(["render", str(src), "--layout", "star", "--out", str(tmp_path / "o.svg")], capsys)
    assert code == 1
    assert "two elements" in err


def test_star_compact_rejected(tmp_path, capsys):
    code, _, err = run(["render", TOY, "--layout", "star", "--compact", "--out", str(tmp_path / "o.svg")], capsys)
    assert code == 1


def test_metrics_single_curve(tmp_path, capsys):
    src = tmp_path / "m1.csv"
    src.write_text("set,a,b,c\nS,1,0,0.5\n")
    code, stdout, _ = run(["metrics", str(src)], capsys)
    assert code == 0
    rec = json.loads(stdout)
    assert rec["CR"] == 0 and rec["T_Sigma"] == 0


def test_metrics_forced_inversion_all_strategies(tmp_path, capsys):
    src = tmp_path / "inv.csv"
    src.write_text("set,a,b\nS,0,1\nT,1,0\n")
    for strategy in ("hamming", "upper-bound", "iterative-hamming", "iterative-upper-bound", "random"):
        for solver in ("exact", "heuristic"):
            code, stdout, _ = run(["metrics", str(src), "--strategy", strategy, "--tsp", solver], capsys)
            assert code == 0
            assert json.loads(stdout)["CR"] == 1


def test_capacity_error_exit_code(capsys):
    code, _, err = run(["metrics", TOY, "--exact-cap", "4"], capsys)
    assert code == 2
    assert "--tsp heuristic" in err
    code, _, _ = run(["metrics", TOY, "--exact-cap", "4", "--tsp", "heuristic"], capsys)
    assert code == 0


def test_malformed_input(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("set,a,b\nS,0.5,zzz\n")
    code, _, err = run(["metrics", str(src)], capsys)
    assert code == 1
    assert "line 2, column 3" in err


def test_bad_flag_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["render", TOY, "--layout", "spiral", "--out", "x.svg"])
    assert exc.value.code == 1


def test_distribution_needs_json(tmp_path, capsys):
    code, _, err = run(["render", TOY, "--bin-heights", "distribution", "--out", str(tmp_path / "o.svg")], capsys)
    assert code == 1


def test_distribution_from_json(tmp_path, capsys):
    src = tmp_path / "d.json"
    src.write_text(json.dumps({
        "elements": ["a", "b", "c"], "sets": ["S", "T"], "levels": [0, 0.5, 1],
        "beta": [[0, 0.5, 1], [1, 1, 0.5]],
        "distribution": [[1, 2, 3], [3, 2, 1], [1, 1, 1]],
    }))
    out = tmp_path / "d.svg"
    code, stdout, _ = run(["render", str(src), "--bin-heights", "distribution", "--out", str(out)], capsys)
    assert code == 0 and out.exists()


def test_bin_heights_do_not_change_metrics(tmp_path, capsys):
    records = []
    for heights in ("uniform", "local"):
        for curves in ("polyline", "rounded"):
            code, stdout, _ = run(["render", TOY, "--bin-heights", heights, "--curves", curves,
                                   "--out", str(tmp_path / "o.svg")], capsys)
            rec = json.loads(stdout)
            rec.pop("runtime_ms")
            records.append(rec)
    assert all(r == records[0] for r in records)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "storysets", "metrics", TOY], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["CR"] >= 0
