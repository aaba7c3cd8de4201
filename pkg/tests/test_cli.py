import json

import numpy as np
import pytest

from ratlin.cli import main, _parse_coeffs, format_number
from ratlin.verify import preset_cross_coupled


@pytest.fixture
def realization_file(tmp_path):
    path = tmp_path / "realz.json"
    path.write_text(json.dumps(preset_cross_coupled().to_dict()))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestLinearize:
    def test_emits_pencil(self, capsys, realization_file):
        code, out, _ = run_cli(capsys, "linearize", "--input", realization_file)
        assert code == 0
        obj = json.loads(out)
        assert obj["rhoA"] == 1 and obj["rhoD"] == 1
        assert len(obj["L0"]) == 8
        assert set(obj["blocks"]) == {"M_A", "K_A", "M_B", "M_C", "M_D",
                                      "K_D", "L_A"}

    def test_round_trip_bit_exact(self, capsys, realization_file, tmp_path):
        out_path = tmp_path / "lin.json"
        code, _, _ = run_cli(capsys, "linearize", "--input", realization_file,
                             "--output", str(out_path))
        assert code == 0
        first = out_path.read_text()
        run_cli(capsys, "linearize", "--input", realization_file,
                "--output", str(out_path))
        assert out_path.read_text() == first

    def test_grade_override(self, capsys, realization_file):
        code, out, _ = run_cli(capsys, "linearize", "--input", realization_file,
                               "--grade-a", "3")
        obj = json.loads(out)
        assert obj["rhoA"] == 2


class TestEigs:
    def test_preset_json(self, capsys):
        code, out, _ = run_cli(capsys, "eigs", "--preset", "cross-coupled",
                               "--json")
        assert code == 0
        obj = json.loads(out)
        poles = sorted(p["lambda"][0] for p in obj["poles"])
        assert np.allclose(poles, [-2, -1, 2], atol=1e-8)
        assert len(obj["zeros"]) == 6
        assert all(z["classified"] for z in obj["zeros"])

    def test_table_output(self, capsys):
        code, out, _ = run_cli(capsys, "eigs", "--preset", "cross-coupled")
        assert code == 0
        assert "poles" in out and "zeros" in out


class TestInfinity:
    def test_preset(self, capsys):
        code, out, _ = run_cli(capsys, "infinity", "--preset", "cross-coupled",
                               "--json")
        assert code == 0
        obj = json.loads(out)
        assert obj["infinityOrders"] == [-3, 0]
        assert obj["grade"] == 2


class TestNullspace:
    def test_regular_is_empty(self, capsys):
        code, out, _ = run_cli(capsys, "nullspace", "--preset", "cross-coupled",
                               "--json")
        assert code == 0
        assert json.loads(out)["indices"] == []


class TestScalar:
    def test_solve(self, capsys):
        code, out, _ = run_cli(capsys, "scalar", "--a=1", "--c=-2,0,1",
                               "--b=1", "--d=1", "--json")
        assert code == 0
        roots = sorted(r["lambda"][0] for r in json.loads(out)["roots"])
        assert np.allclose(roots, [-np.sqrt(3), np.sqrt(3)], atol=1e-10)

    def test_identity_equation_is_precondition_failure(self, capsys):
        code, _, err = run_cli(capsys, "scalar", "--a=1", "--c=0,0,1",
                               "--b=1", "--d=0.5,0,0.5")
        assert code == 1
        assert "identically" in err


class TestCheck:
    def test_preset_passes(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--preset", "cross-coupled")
        assert code == 0
        assert "overall: pass" in out

    def test_json_mode(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--preset", "cross-coupled",
                               "--json")
        assert code == 0
        assert json.loads(out)["passed"] is True


class TestErrors:
    def test_missing_file_is_io_error(self, capsys):
        code, _, err = run_cli(capsys, "eigs", "--input", "/nonexistent.json")
        assert code == 2

    def test_no_input_is_io_error(self, capsys):
        code, _, _ = run_cli(capsys, "eigs")
        assert code == 2

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["eigs", "--bogus"])
        assert exc.value.code == 2

    def test_malformed_json_is_io_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{не json")
        code, _, _ = run_cli(capsys, "eigs", "--input", str(bad))
        assert code == 2


def test_parse_coeffs_complex_forms():
    got = _parse_coeffs("1.5, 2+3i, -0.5i, -1-2i")
    assert got == [1.5 + 0j, 2 + 3j, -0.5j, -1 - 2j]
    with pytest.raises(ValueError):
        _parse_coeffs("  ,")


def test_format_number_round_trip():
    x = 0.1 + 0.2
    assert format_number(x) == x
    assert format_number(1e300) == 1e300
