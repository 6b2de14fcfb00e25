import json
import subprocess
import sys

import numpy as np
import pytest

from polydensity import corpus
from polydensity.cli import main
from polydensity.measure import DiscreteMeasure, save_measure


@pytest.fixture
def five_atoms(tmp_path):
    path = tmp_path / "m.json"
    save_measure(DiscreteMeasure([-2.0, -0.5, 1.0, 2.5, 4.0], [1.0, 0.5, 2.0, 1.0, 0.3]), path)
    return str(path)


@pytest.fixture
def sinc_zeros(tmp_path):
    path = tmp_path / "sinc.json"
    path.write_text(corpus.sinc(500).to_json())
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_density_dense(capsys, five_atoms):
    code, rep = run_json(capsys, ["density", "hamburger", "--measure", five_atoms, "--p", "2", "--max-degree", "40"])
    assert code == 0
    assert rep["result"]["verdict"] == "DENSE"
    assert rep["inputs"]["m.json"].startswith("sha256:")


def test_malformed_measure(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"atoms": [')
    assert main(["density", "hamburger", "--measure", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_missing_required_flag(capsys):
    assert main(["density", "hamburger"]) == 2


def test_out_directory(tmp_path, five_atoms):
    out = tmp_path / "out"
    assert main(["density", "riesz", "--measure", five_atoms, "--max-degree", "6", "--out", str(out)]) == 0
    rep = json.loads((out / "density_riesz.json").read_text())
    assert rep["result"]["verdict"] == "DENSE"
    lines = (out / "density_riesz.csv").read_text().splitlines()
    assert lines[0] == "n,rho_alpha,rho_alpha2"
    assert len(lines) == 8


def test_byte_identical_reruns(tmp_path, five_atoms, sinc_zeros):
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["extremal", "rho", "--measure", five_atoms, "--p", "3", "--max-degree", "4",
                     "--z", "0.5", "--z", "1+2j", "--out", str(out)]) == 0
        assert main(["divisor", "build", "--zeros", sinc_zeros, "--N", "5", "--N", "10", "--out", str(out)]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert runs[0] == runs[1]
    assert len(runs[0]) >= 4


def test_config_file_and_override(tmp_path, capsys, five_atoms):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("max_degree = 3\nstall-tol = 0.05\n")
    code, rep = run_json(capsys, ["density", "hamburger", "--measure", five_atoms, "--config", str(cfg)])
    assert code == 0
    assert rep["config"]["max_degree"] == 3 and rep["config"]["stall_tol"] == 0.05
    code, rep = run_json(capsys, ["density", "hamburger", "--measure", five_atoms, "--config", str(cfg),
                                  "--max-degree", "5"])
    assert rep["config"]["max_degree"] == 5


def test_config_unknown_key(tmp_path, five_atoms):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["density", "hamburger", "--measure", five_atoms, "--config", str(cfg)]) == 2


def test_config_bad_value(five_atoms):
    assert main(["density", "hamburger", "--measure", five_atoms, "--stall-tol", "-1"]) == 2


def test_entire_eval_and_delta(capsys, sinc_zeros):
    code, rep = run_json(capsys, ["entire", "eval", "--zeros", sinc_zeros, "--z", "0.5"])
    assert code == 0
    pt = rep["result"]["points"][0]
    assert abs(pt["value"][0] - 2 / np.pi) <= pt["bound"]
    code, rep = run_json(capsys, ["entire", "delta", "--zeros", sinc_zeros, "--order", "2", "--z", "0.3"])
    assert code == 0
    pt = rep["result"]["points"][0]
    assert abs(pt["delta"][0] - 1) <= pt["bound"]


def test_entire_pole_is_input_error(sinc_zeros):
    assert main(["entire", "delta", "--zeros", sinc_zeros, "--order", "2", "--z", "3"]) == 2


def test_classes_family(tmp_path, capsys):
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps([[-1, 1], [-2, -1, 1, 2]]))
    code, rep = run_json(capsys, ["classes", "check", "--family", str(fam)])
    assert code == 0
    assert rep["result"]["members"][0]["l2"] == 2.0
    fam.write_text(json.dumps([[0, 1]]))
    assert main(["classes", "check", "--family", str(fam)]) == 2


def test_bernstein_representation(tmp_path, capsys):
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps({"p": 2, "atoms": [{"x": 1, "mass": 1, "w": 0.5}, {"x": 2, "mass": 2, "w": 1}]}))
    code, rep = run_json(capsys, ["bernstein", "rep", "build", "--pair", str(pair)])
    assert code == 0
    atoms = rep["result"]["measure"]["atoms"]
    assert [a["mass"] for a in atoms] == [0.25, 2.0]
    wrong = tmp_path / "wrong.json"
    save_measure(DiscreteMeasure([1.0, 2.0], [0.25 + 1e-6, 2.0]), wrong)
    assert main(["bernstein", "rep", "verify", "--pair", str(pair), "--measure", str(wrong)]) == 1


def test_corpus_subset_exit_codes(capsys):
    code, rep = run_json(capsys, ["corpus", "run", "--criterion", "1"])
    assert code == 0
    assert [c["number"] for c in rep["result"]["criteria"]] == [1]


def test_module_entry_point(five_atoms):
    res = subprocess.run([sys.executable, "-m", "polydensity.cli", "density", "riesz", "--measure", five_atoms,
                          "--max-degree", "5"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["result"]["verdict"] == "DENSE"
