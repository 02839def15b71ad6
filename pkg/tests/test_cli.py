import json
import xml.etree.ElementTree as ET

import pytest

from qenm import cli
from qenm.lattice import SHIFT_TABLE, LatticeSpec, dummy_mask


def run(args):
    return cli.main(args)


def test_lattice_eight_by_eight_row_count(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": {"n_r": 3, "n_c": 3}}))
    assert run(["lattice", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "lattice.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 ** (3 + 3 + 1)


def test_lattice_tiny_renders_valid_svg(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": {"n_r": 1, "n_c": 1}}))
    assert run(["lattice", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    ET.parse(tmp_path / "o" / "lattice.svg")


def test_lattice_dummy_count_matches_rule_sweep(tmp_path):
    assert run(["lattice", "--out-dir", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "lattice.csv").read_text().splitlines()[1:]
    dummies_csv = sum(int(line.split(",")[4]) for line in rows)
    assert dummies_csv == int(dummy_mask(LatticeSpec(3, 2)).sum())


def test_validate_passes_and_reports(tmp_path, capsys):
    assert run(["validate", "--out-dir", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") >= 10
    assert "FAIL" not in out
    assert (tmp_path / "o" / "validation.txt").exists()


def test_validate_fault_injection(tmp_path, capsys):
    # corrupt one shift-table entry; the named adjacency check must fail
    original = SHIFT_TABLE[(0, 0, 1)]
    SHIFT_TABLE[(0, 0, 1)] = (0, +1)
    try:
        code = run(["validate", "--out-dir", str(tmp_path / "o")])
    finally:
        SHIFT_TABLE[(0, 0, 1)] = original
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL shift-table-vs-geometric-adjacency" in out


def test_simulate_zero_initial_conditions(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"initial": {"kind": "zero"},
                               "lattice": {"n_r": 2, "n_c": 1},
                               "times": {"start": 0.0, "stop": 2.0, "steps": 4}}))
    assert run(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "trajectory.csv").read_text().splitlines()[1:]
    assert all(float(r.split(",")[3]) == 0.0 for r in rows)
    comp = (tmp_path / "o" / "comparison.csv").read_text().splitlines()[1:]
    assert all(r.split(",")[1] == "0" for r in comp)


def test_simulate_deviation_column_small(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": {"n_r": 2, "n_c": 1},
                               "times": {"start": 0.0, "stop": 4.0, "steps": 9}}))
    assert run(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    comp = (tmp_path / "o" / "comparison.csv").read_text().splitlines()[1:]
    assert max(float(r.split(",")[1]) for r in comp) <= 1e-8


def test_heat_command(tmp_path):
    assert run(["heat", "--out-dir", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "heat_search.csv").read_text().splitlines()[1:]
    assert all(r.split(",")[3] == "3" for r in rows)       # 3 queries per probe
    assert all(r.split(",")[4] == "1" for r in rows)       # search matches argmax
    ET.parse(tmp_path / "o" / "heat_regions.svg")


def test_ripple_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": {"n_r": 2, "n_c": 1},
                               "times": {"start": 0.0, "stop": 15.0, "steps": 20}}))
    assert run(["ripple", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    ET.parse(tmp_path / "o" / "ripple_msd.svg")
    rows = (tmp_path / "o" / "ripple_msd.csv").read_text().splitlines()[1:]
    assert len(rows) == 2 * 20


def test_scaling_single_size_no_fit(tmp_path):
    assert run(["scaling", "trace", "--sizes", "3x2",
                "--out-dir", str(tmp_path / "o")]) == 0
    fit = json.loads((tmp_path / "o" / "scaling_trace_fit.json").read_text())
    assert fit == {}


def test_scaling_trace_fit(tmp_path):
    assert run(["scaling", "trace", "--sizes", "3x2,3x3,4x3,4x4",
                "--out-dir", str(tmp_path / "o")]) == 0
    fit = json.loads((tmp_path / "o" / "scaling_trace_fit.json").read_text())
    assert fit["r_squared"] >= 0.99


def test_manifest_written_everywhere(tmp_path):
    assert run(["lattice", "--out-dir", str(tmp_path / "o"), "--seed", "7"]) == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["seed"] == 7 and "lattice" in manifest


def test_byte_identical_reruns(tmp_path):
    for sub in ("a", "b"):
        assert run(["simulate", "--seed", "3", "--time-steps", "6",
                    "--out-dir", str(tmp_path / sub)]) == 0
    for name in ("trajectory.csv", "comparison.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    manifests = [json.loads((tmp_path / sub / "manifest.json").read_text())
                 for sub in ("a", "b")]
    for m in manifests:
        m.pop("out_dir")
    assert manifests[0] == manifests[1]


def test_seed_changes_outputs(tmp_path):
    for sub, seed in (("a", "1"), ("b", "2")):
        assert run(["simulate", "--seed", seed, "--time-steps", "6",
                    "--out-dir", str(tmp_path / sub)]) == 0
    assert ((tmp_path / "a" / "trajectory.csv").read_bytes()
            != (tmp_path / "b" / "trajectory.csv").read_bytes())


def test_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run(["lattice", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2


def test_perturbation_budget_enforced(tmp_path):
    cfg = tmp_path / "cfg.json"
    bits = 2 + 1 + 1
    cfg.write_text(json.dumps({
        "lattice": {"n_r": 2, "n_c": 1},
        "initial": {"kind": "perturbed", "nodes": list(range(5 * bits * bits))},
    }))
    assert run(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2


def test_physical_units_displacement_cap(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "physics": {"units": "physical"},
        "initial": {"kind": "perturbed", "nodes": [3], "displacements": [1.7]},
    }))
    assert run(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2


def test_seed_stream_roles_are_stable():
    a = cli.derive_seed(0, "velocity-x")
    b = cli.derive_seed(0, "velocity-y")
    assert a != b
    assert cli.derive_seed(0, "velocity-x") == a
