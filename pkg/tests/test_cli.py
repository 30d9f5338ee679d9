import json
import math

import pytest

from isolab import cli, polytope


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_cube(self, capsys):
        code, out, _ = run(capsys, "eval", "--family", "cube", "--s", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["V"] == pytest.approx(8.0)
        assert doc["A"] == pytest.approx(24.0)
        assert doc["Q"] == pytest.approx(216.0)
        assert doc["r_tong"] == pytest.approx(1.0)

    def test_family_with_param(self, capsys):
        code, out, _ = run(
            capsys, "eval", "--family", "rect_similar", "--param", "k=0.5", "--s", "2"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["V"] == pytest.approx(2.0)
        assert doc["A"] == pytest.approx(6.0)

    def test_unknown_family_is_domain_error(self, capsys):
        code, out, err = run(capsys, "eval", "--family", "dodecahedron", "--s", "1")
        assert code == 2
        assert out == ""
        assert "error" in err


class TestDeterminism:
    def test_kmin_byte_identical(self, capsys):
        argv = ("kmin", "--class", "box3", "--starts", "8", "--seed", "3")
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2
        assert json.loads(out1)["kmin"] == pytest.approx(216.0, rel=1e-8)

    def test_classify_byte_identical(self, capsys):
        argv = ("classify", "--family", "hexagon_120", "--grid", "0.2:3:40")
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2


class TestExitCodes:
    def test_usage_error(self, capsys):
        code, _, _ = run(capsys, "eval", "--family", "cube")  # missing --s
        assert code == 1

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 1

    def test_domain_error(self, capsys):
        code, _, err = run(
            capsys, "inradius", "--family", "cube", "--s0", "1", "--grid", "bad"
        )
        assert code == 2
        assert "grid" in err

    def test_expect_mismatch_is_check_failure(self, capsys):
        code, out, err = run(
            capsys,
            "classify", "--family", "rect_fixed_length", "--param", "a=1",
            "--grid", "0.5:4:40", "--expect", "homogeneous",
        )
        assert code == 3
        # the data document is still emitted and valid
        doc = json.loads(out)
        assert doc["verdict"] == "not_homogeneous"
        assert "check failed" in err

    def test_expect_match_succeeds(self, capsys):
        code, out, _ = run(
            capsys,
            "classify", "--family", "hexagon_120",
            "--grid", "0.2:3:40", "--expect", "homogeneous",
        )
        assert code == 0
        assert json.loads(out)["k_constant"] == pytest.approx(32 / math.sqrt(3), rel=1e-9)


class TestFamiliesCatalog:
    def test_catalog_lists_builtins(self, capsys):
        code, out, _ = run(capsys, "families")
        assert code == 0
        ids = {entry["id"] for entry in json.loads(out)}
        assert {"cube", "hexagon_120", "box3", "ring_torus"} <= ids


class TestInradius:
    def test_csv_output(self, capsys):
        code, out, _ = run(
            capsys,
            "inradius", "--family", "cube", "--s0", "0", "--C", "0",
            "--grid", "0.5:4:16", "--format", "csv",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "s,r"
        s, r = map(float, lines[-1].split(","))
        assert r == pytest.approx(s / 2, abs=1e-8)

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "curve.json"
        code, out, _ = run(
            capsys,
            "inradius", "--family", "cube", "--s0", "0",
            "--grid", "0.5:4:16", "--output", str(path),
        )
        assert code == 0
        assert out == ""
        doc = json.loads(path.read_text())
        assert doc["family_id"] == "cube"


class TestPolyhedronCommands:
    @pytest.fixture
    def cube_file(self, tmp_path):
        path = tmp_path / "cube.json"
        path.write_text(polytope.cube_polyhedron(2.0).to_json())
        return str(path)

    def test_starlike(self, capsys, cube_file):
        code, out, _ = run(capsys, "starlike", "--file", cube_file)
        assert code == 0
        doc = json.loads(out)
        assert doc["V"] == pytest.approx(8.0)
        assert doc["mean_arithmetic"] == pytest.approx(1.0)
        assert doc["mean_harmonic"] == pytest.approx(1.0)
        assert doc["r_tong"] == pytest.approx(1.0)

    def test_support_volume(self, capsys, cube_file):
        code, out, _ = run(capsys, "support-volume", "--file", cube_file)
        assert code == 0
        assert json.loads(out)["relative_residual"] <= 1e-12

    def test_cohen_pass_and_reject(self, capsys, cube_file):
        code, out, _ = run(capsys, "cohen", "--file", cube_file, "--r", "1.0")
        assert code == 0
        assert json.loads(out)["residual"] <= 1e-12
        code, _, err = run(capsys, "cohen", "--file", cube_file, "--r", "0.9")
        assert code == 2
        assert "circumscribing" in err

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "starlike", "--file", "/nonexistent.json")
        assert code == 2


class TestSearchCommands:
    def test_solve_coordinate(self, capsys):
        code, out, _ = run(
            capsys,
            "solve-coordinate", "--class", "parallelogram3", "--k", "32",
            "--j", "2", "--s", "2",
            "--fixed", "0=sqrt(s)", "--fixed", "1=s-sqrt(s)",
        )
        assert code == 0
        root = json.loads(out)["root"]
        assert root == pytest.approx(math.asin(0.25 / (math.sqrt(2) - 1)), abs=1e-10)

    def test_trace_csv(self, capsys):
        x3 = math.asin(0.5 / (2 - math.sqrt(2)))  # not needed exactly; use s=4 start
        start = f"2,{4 - 2},{math.asin((4 / 8) / (2 - 1))}"
        code, out, _ = run(
            capsys,
            "trace", "--class", "parallelogram3", "--k", "32",
            "--start", start, "--steps", "10", "--format", "csv",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "s,x1,x2,x3,Q"
        assert len(lines) == 12
        for line in lines[1:]:
            q = float(line.split(",")[-1])
            assert q == pytest.approx(32.0, rel=1e-9)


class TestInequalityCommands:
    def test_bonnesen_holds(self, capsys):
        code, out, err = run(capsys, "bonnesen", "--d", "3", "--V", "1", "--A", "6")
        assert code == 0
        doc = json.loads(out)
        assert all(row["holds"] for row in doc["rows"])
        assert "osserman" in err

    def test_bonnesen_2d(self, capsys):
        code, out, _ = run(
            capsys, "bonnesen", "--2d", "--P", "6", "--A", "2", "--r", "0.5"
        )
        assert code == 0
        assert json.loads(out)["deficit"] == pytest.approx(36 - 8 * math.pi)

    def test_deficit(self, capsys):
        code, out, _ = run(capsys, "deficit", "--d", "2", "--V", "1", "--A", "4")
        assert code == 0
        assert json.loads(out)["deficit"] == pytest.approx(16 - 4 * math.pi)


class TestLiftAndSteiner:
    def test_lift_disk(self, capsys):
        code, out, _ = run(
            capsys, "lift", "--family", "disk", "--rho-scale", "1", "--grid", "0.5:4:6"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["dimension"] == 3
        for row in doc["samples"]:
            assert row["r_tong"] == pytest.approx(row["s"], rel=1e-10)

    def test_lift_non_homogeneous_base(self, capsys):
        code, _, err = run(
            capsys, "lift", "--family", "rect_fixed_length", "--param", "a=1"
        )
        assert code == 2
        assert "homogeneous" in err

    def test_steiner_box(self, capsys):
        code, out, _ = run(capsys, "steiner", "--box", "1,1,1", "--s", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["V"] == pytest.approx(1 + 6 + 3 * math.pi + 4 * math.pi / 3)
        assert doc["volume_coefficients"] == pytest.approx(
            [1.0, 6.0, 3 * math.pi, 4 * math.pi / 3]
        )

    def test_steiner_polygon_file(self, capsys, tmp_path):
        path = tmp_path / "square.json"
        path.write_text(json.dumps([[0, 0], [1, 0], [1, 1], [0, 1]]))
        code, out, _ = run(
            capsys, "steiner", "--polygon-file", str(path), "--s", "0"
        )
        assert code == 0
        doc = json.loads(out)
        assert (doc["V"], doc["A"]) == pytest.approx((1.0, 4.0))
