"""Command-line behavior: flags, outputs, and the exit-code contract."""

import json
import shutil

import numpy as np
import pytest

from eitkit import payload_path, read_eitimg
from eitkit.cli import main
from eitkit.pipeline import MANIFEST_NAME


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_generate_and_render(tmp_path, capsys):
    out = tmp_path / "set"
    code, stdout, _ = run(
        capsys,
        "generate",
        "--preset",
        "kit4",
        "--count",
        "1",
        "--seed",
        "3",
        "--out",
        str(out),
        "--mesh-tris",
        "1024",
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["counts"] == {"requested": 1, "written": 1, "failed": 0}
    assert (out / MANIFEST_NAME).exists()

    manifest = json.loads((out / MANIFEST_NAME).read_text())
    dbar = out / manifest["entries"][0]["dbar_path"]
    png = tmp_path / "img.png"
    code, stdout, _ = run(
        capsys, "render", "--input", str(dbar), "--out", str(png), "--clip-disc"
    )
    assert code == 0
    assert json.loads(stdout) == {"out": str(png)}
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    code, _, stderr = run(
        capsys, "render", "--input", str(dbar), "--out", str(png), "--cmap", "nope"
    )
    assert code == 1
    assert json.loads(stderr)["error"]["type"] == "ValueError"


def test_reconstruct_command(tmp_path, capsys, measurement_file):
    out = tmp_path / "recon.eitimg"
    png = tmp_path / "recon.png"
    code, stdout, _ = run(
        capsys,
        "reconstruct",
        "--input",
        str(measurement_file),
        "--preset",
        "kit4",
        "--out",
        str(out),
        "--png",
        str(png),
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["kind"] == "discrete"
    assert summary["sigma0_estimated"] is True
    assert 0.2 < summary["sigma0"] < 0.4
    img = read_eitimg(out)
    assert img.values.shape == (64, 64)
    assert png.read_bytes()[:4] == b"\x89PNG"


@pytest.fixture(scope="module")
def measurement_file(tmp_path_factory):
    from eitkit import KIT4, disc_mesh, simulate_electrode_voltages, trig_current_patterns

    mesh = disc_mesh(4)
    patterns = trig_current_patterns(16, arc_width=KIT4.arc_width)
    volts = KIT4.tank_radius * simulate_electrode_voltages(
        mesh, 0.3, patterns, KIT4.arc_width
    )
    path = tmp_path_factory.mktemp("cli") / "meas.json"
    path.write_text(
        json.dumps(
            {
                "L": 16,
                "currents": patterns.current_matrix.tolist(),
                "voltages": volts.tolist(),
            }
        )
    )
    return path


def test_evaluate_command(tmp_path, capsys, fake_dataset):
    out, manifest = fake_dataset(n=2)
    pred = tmp_path / "pred"
    pred.mkdir()
    for e in manifest.entries:
        shutil.copy(out / e["dbar_path"], pred / e["dbar_path"])
        shutil.copy(
            payload_path(out / e["dbar_path"]), payload_path(pred / e["dbar_path"])
        )
    report_path = tmp_path / "report.json"
    code, stdout, _ = run(
        capsys,
        "evaluate",
        "--manifest",
        str(out / MANIFEST_NAME),
        "--pred",
        str(pred),
        "--out",
        str(report_path),
    )
    assert code == 0
    assert "kit4_0001" in stdout and "mean" in stdout
    doc = json.loads(report_path.read_text())
    assert doc["aggregates"]["input"] == doc["aggregates"]["output"]

    # missing predictions: nonzero exit with the ids in the error JSON
    empty = tmp_path / "empty"
    empty.mkdir()
    code, _, stderr = run(
        capsys,
        "evaluate",
        "--manifest",
        str(out / MANIFEST_NAME),
        "--pred",
        str(empty),
        "--out",
        str(tmp_path / "r2.json"),
    )
    assert code == 1
    err = json.loads(stderr)["error"]
    assert err["type"] == "PredictionMismatchError"
    assert "kit4_0001" in err["message"]


def test_usage_errors_are_json(tmp_path, capsys):
    code, _, stderr = run(capsys, "generate", "--preset", "bogus")
    assert code == 2
    err = json.loads(stderr)["error"]
    assert err["type"] == "BadParameter"
    assert "bogus" in err["message"]

    code, _, stderr = run(
        capsys,
        "reconstruct",
        "--input",
        str(tmp_path / "missing.json"),
        "--out",
        str(tmp_path / "x.eitimg"),
    )
    assert code == 2
    assert "missing.json" in json.loads(stderr)["error"]["message"]


def test_reconstruct_bad_file_is_json_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"hello\": 1}")
    code, _, stderr = run(
        capsys,
        "reconstruct",
        "--input",
        str(bad),
        "--out",
        str(tmp_path / "x.eitimg"),
    )
    assert code == 1
    assert json.loads(stderr)["error"]["type"] == "ValueError"


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert main([]) == 0
    out = capsys.readouterr().out
    assert "generate" in out and "reconstruct" in out
