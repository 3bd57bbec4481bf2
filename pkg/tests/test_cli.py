import json
import subprocess
import sys

import pytest

from conftest import write_synthetic_images
from cbir.cli import main


@pytest.fixture(scope="module")
def cat_dir(image_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "cat"
    assert main(["index", str(image_dir), "--out", str(out), "--seed", "2"]) == 0
    return out


def test_index_reports(image_dir, tmp_path, capsys):
    assert main(["index", str(image_dir), "--out", str(tmp_path / "c"), "--bins", "4",
                 "--weights", "2,1,1,0", "--sigma", "0.5"]) == 0
    assert "indexed 24 image(s)" in capsys.readouterr().out
    manifest = json.loads((tmp_path / "c" / "manifest.json").read_text())
    assert manifest["config"]["extraction"]["color_mode"] == "rgb"
    assert manifest["config"]["index"]["weights"] == [0.5, 0.25, 0.25, 0.0]
    assert manifest["config"]["index"]["sigma"] == 0.5


def test_knn_json(cat_dir, image_dir, capsys):
    assert main(["query", str(image_dir / "img_0004.png"), "--catalog", str(cat_dir), "--knn", "3",
                 "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mode"] == "knn" and doc["params"] == {"k": 3}
    assert [e["id"] for e in doc["entries"]][0] == 4 and len(doc["entries"]) == 3
    assert doc["entries"][0]["source_path"] == "img_0004.png"


def test_range_table_and_rerank(cat_dir, image_dir, capsys):
    assert main(["query", str(image_dir / "img_0001.png"), "--catalog", str(cat_dir), "--range", "1e9",
                 "--rerank", "intersection"]) == 0
    out = capsys.readouterr().out
    assert "# 24 result(s)" in out and "intersection" in out.splitlines()[0]


def test_fail_on_empty(cat_dir, tmp_path):
    # an unindexed image has no neighbour at distance 0
    other = write_synthetic_images(tmp_path / "q", 1, seed=99)[0]
    args = ["query", str(other), "--catalog", str(cat_dir), "--range", "0"]
    assert main(args) == 0
    assert main(args + ["--fail-on-empty"]) == 3


def test_features_command(image_dir, capsys):
    assert main(["features", str(image_dir / "img_0000.png"), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["dimension"] == 306 and len(doc["color"]) == 256
    assert list(doc["wavelet"])[:3] == ["I2", "I3", "I4"]
    assert main(["features", str(image_dir / "img_0000.png"), "--bins", "2"]) == 0
    assert "dimension   58" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [],
    ["index"],
    ["query", "x.png", "--catalog", "c"],
    ["query", "x.png", "--catalog", "c", "--knn", "1", "--range", "2"],
    ["index", "d", "--out", "o", "--weights", "1,2"],
    ["index", "d", "--out", "o", "--bins", "40"],
    ["features", "x.png", "--bins", "1"],
])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_bad_k_and_range_exit_1(cat_dir, image_dir):
    img = str(image_dir / "img_0000.png")
    assert main(["query", img, "--catalog", str(cat_dir), "--knn", "0"]) == 1
    assert main(["query", img, "--catalog", str(cat_dir), "--knn", "25"]) == 1
    assert main(["query", img, "--catalog", str(cat_dir), "--range", "-1"]) == 1


def test_io_errors_exit_2(cat_dir, tmp_path):
    bad = tmp_path / "bad.png"
    bad.write_text("garbage")
    assert main(["features", str(bad)]) == 2
    assert main(["features", str(tmp_path / "missing.png")]) == 2
    assert main(["query", str(bad), "--catalog", str(cat_dir), "--knn", "1"]) == 2
    assert main(["query", str(bad), "--catalog", str(tmp_path), "--knn", "1"]) == 2
    (tmp_path / "empty").mkdir()
    assert main(["index", str(tmp_path / "empty"), "--out", str(tmp_path / "o")]) == 2
    assert main(["index", str(tmp_path / "nodir"), "--out", str(tmp_path / "o")]) == 2


def test_module_entry_point(image_dir):
    proc = subprocess.run([sys.executable, "-m", "cbir.cli", "features", str(image_dir / "img_0000.png")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "dimension   306" in proc.stdout
