import json
import subprocess
import sys

import pytest

import c0cover as cc
from c0cover.cli import main
from c0cover.errors import NoCoordinates
from c0cover.experiment import ExperimentConfig, report_to_json, run_experiment
from c0cover.svg import emit_svg


SMALL_FINITE = {"kind": "finite_cylinder", "params": {"n_base": 2, "n_levels": 12}, "candidates": 10}


def test_experiment_finite_passes():
    rep = run_experiment(ExperimentConfig(**SMALL_FINITE))
    assert rep["summary"]["all_pass"]
    assert rep["summary"]["achieved_multiplicity"] == 2
    names = [s["name"] for s in rep["stages"]]
    assert names == [
        "pack",
        "ladder",
        "controlled_relation",
        "ball_cover",
        "minimal_canonical",
        "negative_controls",
        "lower_bound_sweep",
    ]
    assert rep["schema_version"] == 1
    assert rep["summary"]["tolerances"] == {"c0_tol": 0.05, "unif_tol": 0.05}


def test_experiment_deterministic():
    cfg = ExperimentConfig(**SMALL_FINITE)
    a = report_to_json(run_experiment(cfg))
    b = report_to_json(run_experiment(cfg))
    assert a == b


def test_experiment_countable():
    rep = run_experiment(ExperimentConfig(kind="countable_example", params={"n_y": 6}))
    assert rep["summary"]["all_pass"]
    assert rep["summary"]["achieved_multiplicity"] == 1
    stage = next(s for s in rep["stages"] if s["name"] == "countable_counterexample")
    assert stage["verdict"] == "pass"
    assert stage["data"]["lower_bound"] == "NonCylindricalPack"


def test_svg_rendering(cyl_fixture, finite_pipeline):
    doc = emit_svg(cyl_fixture, None)
    assert doc.startswith("<svg") and doc.rstrip().endswith("</svg>")
    with_cover = emit_svg(finite_pipeline["pack"], finite_pipeline["alpha"])
    assert with_cover.count("<polygon") + with_cover.count("<line") + with_cover.count("circle") > 3
    assert emit_svg(cyl_fixture, None) == emit_svg(cyl_fixture, None)  # deterministic


def test_svg_requires_coordinates(line3):
    with pytest.raises(NoCoordinates):
        emit_svg(line3, None)


def test_cli_pack_gen_and_render(tmp_path):
    pack_file = tmp_path / "pack.json"
    rc = main([
        "pack", "gen", "--kind", "finite_cylinder",
        "--params", json.dumps({"n_base": 2, "n_levels": 6}),
        "--out", str(pack_file),
    ])
    assert rc == 0
    obj = json.loads(pack_file.read_text())
    assert len(obj["points"]) == 14

    svg_file = tmp_path / "pack.svg"
    assert main(["render", "--pack", str(pack_file), "--out", str(svg_file)]) == 0
    assert svg_file.read_text().startswith("<svg")


def test_cli_cover_build(tmp_path):
    pack_file = tmp_path / "pack.json"
    main([
        "pack", "gen", "--kind", "finite_cylinder",
        "--params", json.dumps({"n_base": 2, "n_levels": 12}),
        "--out", str(pack_file),
    ])
    cover_file = tmp_path / "cover.json"
    report_file = tmp_path / "pipe.json"
    rc = main([
        "cover", "build", "--pack", str(pack_file),
        "--out", str(cover_file), "--report", str(report_file),
    ])
    assert rc == 0
    cov = json.loads(cover_file.read_text())
    assert cov["target"] == "interior"
    rep = json.loads(report_file.read_text())
    assert rep["multiplicity"] == 2 and rep["witness_ok"]


def test_cli_experiment(tmp_path):
    cfg_file = tmp_path / "exp.json"
    cfg_file.write_text(json.dumps(SMALL_FINITE | {"seed": 3}))
    out_file = tmp_path / "report.json"
    svg_file = tmp_path / "exp.svg"
    rc = main(["experiment", "--config", str(cfg_file), "--out", str(out_file), "--svg", str(svg_file)])
    assert rc == 0
    rep = json.loads(out_file.read_text())
    assert rep["summary"]["all_pass"]
    assert svg_file.exists()


def test_cli_verify_small():
    rc = main(["verify", "--seed", "1", "--identities", "60", "--transfer", "40"])
    assert rc == 0


def test_cli_module_entrypoint(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "c0cover", "pack", "gen", "--kind", "countable_example",
         "--params", json.dumps({"n_y": 4}), "--out", str(tmp_path / "p.json")],
        capture_output=True, text=True,
    )
    assert out.returncode == 0, out.stderr


def test_cli_error_exit(tmp_path):
    rc = main(["pack", "gen", "--kind", "finite_cylinder", "--params", '{"n_base": 0}',
               "--out", str(tmp_path / "x.json")])
    assert rc == 2


def test_verify_suite_small():
    summary = cc.verify_suite(seed=2, sizes={"identities": 80, "transfer": 50, "star": 40, "shrink": 40, "ext_random": 20})
    assert summary.ok
    assert len(summary.lines()) >= 10
