import json

import numpy as np
import pytest
from PIL import Image

from numwall.core.constants import ExitCode
from numwall.core.exceptions import ConfigurationError, DiscoveryError
from numwall.core.utils import parse_range
from numwall.main import attach_range_values, build_parser, main
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource
from numwall.models.wall import load_csv

SMALL_DISCOVERY = ["--seq", "const1", "--rows=-10:20", "--cols=-20:20", "--k", "2", "--tel", "2", "--cid", "2"]

def run(*argv):
    return main(["--no-log-file", *argv])

def test_wall_outputs(tmp_path):
    csv_path, pgm_path, png_path = tmp_path / "w.csv", tmp_path / "w.pgm", tmp_path / "w.png"
    code = run("wall", "--seq", "paperfolding", "--rows", "0:8", "--cols=-10:10",
               "--csv", str(csv_path), "--pgm", str(pgm_path), "--png", str(png_path))
    assert code == ExitCode.OK

    lines = csv_path.read_text().splitlines()
    assert lines[0] == "wall p=3 mlo=0 mhi=8 nlo=-10 nhi=10"
    assert len(lines) == 10
    wall = load_csv(str(csv_path))
    expected = SequenceSource.paper_folding(Modulus(3)).segment(-10, 10)
    assert np.array_equal(wall.row(0).astype(np.int64), expected)

    assert pgm_path.read_bytes().startswith(b"P2\n21 9\n255\n")
    with Image.open(png_path) as image:
        assert image.size == (21, 9)

def test_streamed_csv_matches(tmp_path):
    built, streamed = tmp_path / "built.csv", tmp_path / "streamed.csv"
    assert run("wall", "--rows", "0:12", "--cols=-6:6", "--csv", str(built)) == ExitCode.OK
    assert run("wall", "--rows", "0:12", "--cols=-6:6", "--csv", str(streamed),
               "--stream", "--history", "8") == ExitCode.OK
    assert built.read_text() == streamed.read_text()

def test_census_report(tmp_path, capsys):
    out = tmp_path / "census.json"
    assert run("census", "--rows", "0:39", "--cols=-41:41", "--out", str(out)) == ExitCode.OK
    data = json.loads(out.read_text())
    assert data["max_deficiency"] == 4
    assert "windows" not in json.loads(capsys.readouterr().out)

def test_census_text_format(capsys):
    assert run("census", "--rows", "0:39", "--cols=-41:41", "--format", "text") == ExitCode.OK
    assert capsys.readouterr().out.strip().endswith("max deficiency 4")

def test_census_accepts_a_spaced_negative_range(capsys):
    assert run("census", "--rows", "0:39", "--cols", "-41..41") == ExitCode.OK
    data = json.loads(capsys.readouterr().out)
    assert data["region"] == {"m_lo": 0, "m_hi": 39, "n_lo": -41, "n_hi": 41}
    assert data["max_deficiency"] == 4

def test_census_without_zeros_is_empty(capsys):
    # paper-folding values are +-1, so row 0 has no zeros over F_3
    assert run("census", "--rows", "0:0", "--cols", "1:20") == ExitCode.OK
    data = json.loads(capsys.readouterr().out)
    assert data["deficiencies"] == {}
    assert data["max_deficiency"] == 1

def test_thue_morse_census_over_f2(capsys):
    assert run("census", "--seq", "thuemorse", "--mod", "2", "--rows", "0:299", "--cols", "299:598") == ExitCode.OK
    data = json.loads(capsys.readouterr().out)
    assert data["deficiencies"]
    assert data["max_deficiency"] >= 5

def test_range_parsing():
    assert parse_range("-41:41") == parse_range("-41..41") == (-41, 41)
    assert parse_range(" 0..39 ") == (0, 39)
    for text in ("4:0", "1:2:3", "a..b", "-41"):
        with pytest.raises(ConfigurationError):
            parse_range(text)
    assert attach_range_values(["census", "--rows", "0:9", "--cols", "-4:4", "--mod", "5"]) == \
        ["census", "--rows", "0:9", "--cols=-4:4", "--mod", "5"]

def test_usage_errors(tmp_path):
    assert run("wall", "--seq", "fibonacci", "--rows", "0:4", "--cols", "0:4",
               "--csv", str(tmp_path / "x.csv")) == ExitCode.USAGE
    assert run("wall", "--rows", "0:4", "--cols", "0:4") == ExitCode.USAGE
    assert run("wall", "--mod", "4", "--rows", "0:4", "--cols", "0:4",
               "--csv", str(tmp_path / "x.csv")) == ExitCode.USAGE
    assert run("wall", "--rows", "4:0", "--cols", "0:4", "--csv", str(tmp_path / "x.csv")) == ExitCode.USAGE
    assert run("census") == ExitCode.USAGE
    assert run() == ExitCode.USAGE
    assert run("--threads", "0", "cf", "--precision", "8") == ExitCode.USAGE

def test_version_exits_cleanly(capsys):
    assert main(["--version"]) == ExitCode.OK
    assert "numwall" in capsys.readouterr().out

def test_discover_writes_the_system(tmp_path, capsys):
    out_dir = tmp_path / "system"
    assert run("discover", *SMALL_DISCOVERY, "--out-dir", str(out_dir)) == ExitCode.OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["tiles"] == 3
    assert summary["canonical"]
    assert (out_dir / "codes.txt").exists()
    assert json.loads((out_dir / "summary.json").read_text())["tetrads"] == 4

def test_discovery_failure_exit_code(monkeypatch):
    def fail(wall, params):
        raise DiscoveryError("2-patterns missing", stage="closure", coordinates=[(9, 9)])
    monkeypatch.setattr("numwall.controllers.app_controller.discover", fail)
    assert run("discover", *SMALL_DISCOVERY) == ExitCode.FAILED

def test_verify_reports_failed_obligations(tmp_path):
    out = tmp_path / "certificate.json"
    assert run("verify", *SMALL_DISCOVERY, "--out", str(out)) == ExitCode.FAILED
    certificate = json.loads(out.read_text())
    assert certificate["status"] == "FAIL"
    obligations = certificate["obligations"]
    assert obligations["discovery"]["passed"]
    assert obligations["round-trip"]["passed"]
    assert obligations["frame-constraints"]["passed"]
    assert obligations["pattern-coding"]["passed"]
    assert obligations["pattern-cover"]["passed"]
    assert not obligations["coding-zero-structure"]["passed"]

def test_cf_command(capsys):
    assert run("cf", "--seq", "const1", "--shifts", "2", "--precision", "32") == ExitCode.OK
    data = json.loads(capsys.readouterr().out)
    assert data["deficiency"] == 1
    assert data["unshifted"]["precision"] == 32

def test_reproduce_f2_quadratic(tmp_path):
    out = tmp_path / "f2.json"
    assert run("reproduce", "f2-quadratic", "--out", str(out)) == ExitCode.OK
    report = json.loads(out.read_text())
    assert report["status"] == "PASS"
    assert report["identities"] == {"phi": True, "pi": True}

def test_reproduce_sample_wall(tmp_path):
    image_path = tmp_path / "sample.png"
    assert run("reproduce", "sample-wall", "--out", str(image_path)) == ExitCode.OK
    with Image.open(image_path) as image:
        assert image.size == (83, 42)

def test_parser_targets():
    parser = build_parser()
    args = parser.parse_args(["reproduce", "conjecture", "--mod", "5", "--mod", "7", "--size", "40"])
    assert args.mod == [5, 7]
    assert args.size == 40
