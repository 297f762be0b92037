import json

import numpy as np
import pytest

from birkhoff import round_circle, save_curves
from birkhoff.cli import main
from birkhoff.flows import hopf_fibers


@pytest.fixture(scope="module")
def two_fibers_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("curves") / "two_fibers.json"
    save_curves(path, hopf_fibers(2, 128))
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestLinkCommand:
    def test_two_fibers_prints_one(self, capsys, two_fibers_file):
        code, out, _ = run(capsys, "link", "--curves", str(two_fibers_file))
        assert code == 0
        assert out.strip() == "1"

    def test_matrix_output(self, capsys, tmp_path):
        path = tmp_path / "three.json"
        save_curves(path, hopf_fibers(3, 96))
        out_path = tmp_path / "lk.json"
        code, out, _ = run(capsys, "link", "--curves", str(path),
                           "--out", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["lk"][0][1] == 1
        assert doc["lk"][0][0] is None

    def test_malformed_json_exits_one(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        out_path = tmp_path / "never.json"
        code, _, err = run(capsys, "link", "--curves", str(bad),
                           "--out", str(out_path))
        assert code == 1
        assert not out_path.exists()
        assert "InputError" in err

    def test_overlapping_curves_domain_error(self, capsys, tmp_path):
        path = tmp_path / "overlap.json"
        c = round_circle(32, name="a")
        save_curves(path, [c, c.with_name("b")])
        code, _, err = run(capsys, "link", "--curves", str(path))
        assert code == 2
        assert "CurvesTooClose" in err or "InvalidCurve" in err

    def test_missing_required_flag_usage_error(self, capsys):
        code, _, err = run(capsys, "link")
        assert code == 1


class TestSlkCommand:
    def test_zeta_framing(self, capsys, two_fibers_file):
        code, out, _ = run(capsys, "slk", "--curves", str(two_fibers_file),
                           "--framing", "zeta", "--field", "hopf")
        assert code == 0
        doc = json.loads(out)
        assert doc["slk"] == [-1, -1]

    def test_normals_framing(self, capsys, tmp_path):
        path = tmp_path / "circle.json"
        circle = round_circle(48, name="c")
        normals = circle.vertices / np.linalg.norm(circle.vertices, axis=1,
                                                   keepdims=True)
        save_curves(path, [circle], normals=[normals])
        code, out, _ = run(capsys, "slk", "--curves", str(path),
                           "--framing", "normals")
        assert code == 0
        assert json.loads(out)["slk"] == [0]

    def test_zeta_without_field_is_usage_error(self, capsys, two_fibers_file):
        code, _, err = run(capsys, "slk", "--curves", str(two_fibers_file))
        assert code == 1


class TestSectionCommand:
    def test_two_fiber_annulus(self, capsys, two_fibers_file, tmp_path):
        out_path = tmp_path / "topo.json"
        code, out, _ = run(capsys, "section", "--curves", str(two_fibers_file),
                           "--mult", "1,1", "--framing", "zeta",
                           "--field", "hopf", "--out", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["chi"] == 0
        assert doc["genus"] == 0
        assert doc["slopes"] == [[-1, 1], [-1, 1]]
        assert doc["circles"] == [1, 1]
        assert doc["slk"] == [-1, -1]

    def test_multiplicity_count_mismatch(self, capsys, two_fibers_file):
        code, _, err = run(capsys, "section", "--curves", str(two_fibers_file),
                           "--mult", "1,1,1", "--field", "hopf")
        assert code == 1


class TestHelicityCommand:
    def test_hopf_estimate_and_determinism(self, capsys, tmp_path):
        out1 = tmp_path / "est1.json"
        out2 = tmp_path / "est2.json"
        args = ["helicity", "--field", "hopf", "--T", "6.283185307179586",
                "--pairs", "4", "--seed", "42"]
        code, _, _ = run(capsys, *args, "--out", str(out1))
        assert code == 0
        code, _, _ = run(capsys, *args, "--out", str(out2))
        assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        doc = json.loads(out1.read_text())
        assert doc["value"] == pytest.approx(1 / (4 * np.pi ** 2), abs=1e-12)
        assert doc["stderr"] == 0.0

    def test_seifert_field_spec(self, capsys):
        code, out, _ = run(capsys, "helicity", "--field", "seifert:2,3",
                           "--T", "6.283185307179586", "--pairs", "2")
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(
            6 / (4 * np.pi ** 2), abs=1e-9)

    def test_file_field_reserved(self, capsys):
        code, _, err = run(capsys, "helicity", "--field", "file:whatever",
                           "--T", "1.0")
        assert code == 1
        assert "not supported" in err

    def test_bad_field_spec(self, capsys):
        code, _, err = run(capsys, "helicity", "--field", "lorenz", "--T", "1")
        assert code == 1


class TestAsymptoticCommand:
    def test_depth_one_csv_and_figure(self, capsys, tmp_path):
        out_path = tmp_path / "table.csv"
        code, out, _ = run(capsys, "asymptotic", "--family", "seifert-fib",
                           "--depth", "1", "--pairs", "1",
                           "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "p,q,t_n,genus,g_over_t2,hel_ref,rel_dev"
        assert lines[1].startswith("1,2,")
        assert (tmp_path / "table.png").exists()

    def test_rerun_byte_identical(self, capsys, tmp_path):
        args = ["asymptotic", "--depth", "1", "--pairs", "1", "--seed", "7"]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert run(capsys, *args, "--out", str(out1))[0] == 0
        assert run(capsys, *args, "--out", str(out2))[0] == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


class TestVerifyHopfCommand:
    def test_small_table(self, capsys, tmp_path):
        out_path = tmp_path / "hopf.csv"
        code, out, _ = run(capsys, "verify-hopf", "--max-m", "3",
                           "--vertices", "96", "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0].startswith("m,chi,genus")
        assert all(line.endswith("True") for line in lines[1:])
        assert (tmp_path / "hopf.png").exists()

    def test_no_plot(self, capsys, tmp_path):
        out_path = tmp_path / "hopf.csv"
        code, _, _ = run(capsys, "verify-hopf", "--max-m", "2",
                         "--vertices", "64", "--no-plot",
                         "--out", str(out_path))
        assert code == 0
        assert not (tmp_path / "hopf.png").exists()


class TestConfig:
    def test_unknown_config_key_rejected(self, capsys, tmp_path,
                                         two_fibers_file):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 1, "bogus": 2}))
        code, _, err = run(capsys, "link", "--curves", str(two_fibers_file),
                           "--config", str(cfg))
        assert code == 1
        assert "bogus" in err

    def test_config_supplies_defaults_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 5, "eps_sep": 2.5}))
        # eps_sep 2.5 from the config would reject every pair; the flag
        # overrides it and the run succeeds
        code, out, _ = run(capsys, "helicity", "--field", "hopf",
                           "--T", "6.283185307179586", "--pairs", "1",
                           "--config", str(cfg), "--eps-sep", "1e-6")
        assert code == 0

    def test_config_values_used(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"eps_sep": 2.5}))
        code, _, err = run(capsys, "helicity", "--field", "hopf",
                           "--T", "6.283185307179586", "--pairs", "1",
                           "--config", str(cfg))
        assert code == 2
        assert "TooManyRejections" in err

    def test_negative_tolerance_rejected(self, capsys, two_fibers_file):
        code, _, err = run(capsys, "link", "--curves", str(two_fibers_file),
                           "--eps-sep", "-1.0")
        assert code == 1

    def test_non_numeric_config_value_rejected(self, capsys, tmp_path,
                                               two_fibers_file):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"eps_sep": "tiny"}))
        code, _, err = run(capsys, "link", "--curves", str(two_fibers_file),
                           "--config", str(cfg))
        assert code == 1
        assert "eps_sep" in err

    def test_delta_pole_override_reaches_projection(self, capsys,
                                                    two_fibers_file):
        # an impossible pole-exclusion radius must surface as a domain error
        code, _, err = run(capsys, "link", "--curves", str(two_fibers_file),
                           "--delta-pole", "3.1")
        assert code == 2
        assert "NoValidPole" in err

    def test_eps_frame_override_reaches_experiment(self, capsys):
        # below the integrator's accuracy the geometric cross-check trips
        code, _, err = run(capsys, "asymptotic", "--depth", "1",
                           "--pairs", "1", "--eps-frame", "1e-14")
        assert code == 2
        assert "FramingEquationViolated" in err
