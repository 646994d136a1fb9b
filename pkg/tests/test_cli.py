"""End-to-end runs of the command line interface."""

import json

import numpy as np
import pytest

from qcilab import cli, load_report


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


SPHERE = {"kind": "sphere"}


def admissible_config(geodesic, energies):
    return {
        "profile": SPHERE,
        "geodesic": geodesic,
        "energies": energies,
        "admissibility": {"grid": [64, 64]},
    }


class TestAdmissibleCommand:
    def test_equator_arc_exits_not_admissible(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "case1.json",
            admissible_config(
                {"kind": "equator-latitude", "phi_range": [0.0, 1.0471975511965976]},
                {"E1": 1.0, "E2": 0.0},
            ),
        )
        code = cli.main(["admissible", "--config", cfg])
        out = json.loads(capsys.readouterr().out)
        assert code == 3
        assert out["verdict"] == "not-admissible"
        assert out["min_derivative"] <= 1e-8

    def test_longitude_arc_exits_admissible(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "case2.json",
            admissible_config(
                {"kind": "longitude", "t_range": [0.3, 0.8]},
                {"E1": 1.0, "E2": 0.5},
            ),
        )
        code = cli.main(["admissible", "--config", cfg])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["verdict"] == "admissible"
        assert out["min_derivative"] >= 0.1

    def test_unreachable_band_exits_empty(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "empty.json",
            admissible_config(
                {"kind": "longitude", "t_range": [0.3, 0.8]},
                {"E1": 1.0, "E2": 5.0},
            ),
        )
        assert cli.main(["admissible", "--config", cfg]) == 4

    def test_custom_symbols_accepted(self, tmp_path, capsys):
        payload = admissible_config(
            {"kind": "longitude", "t_range": [0.3, 0.8]},
            {"E1": 1.0, "E2": 0.5},
        )
        payload["p1"] = "xi_t^2 + xi_phi^2 / f(t)^2"
        payload["p2"] = "xi_phi"
        payload["admissibility"] = {"grid": [32, 32]}
        cfg = write_config(tmp_path, "dsl.json", payload)
        code = cli.main(["admissible", "--config", cfg])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["verdict"] == "admissible"

    def test_syntax_error_is_a_config_error(self, tmp_path, capsys):
        payload = admissible_config(
            {"kind": "longitude", "t_range": [0.3, 0.8]},
            {"E1": 1.0, "E2": 0.5},
        )
        payload["p1"] = "sin(t"
        cfg = write_config(tmp_path, "bad.json", payload)
        assert cli.main(["admissible", "--config", cfg]) == 2
        assert "offset 6" in capsys.readouterr().err


class TestEigenCommand:
    def test_spectrum_table(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "eigen.json",
            {"profile": SPHERE, "eigen": {"k": 0, "count": 5, "N": 1024}},
        )
        code = cli.main(["eigen", "--config", cfg, "--out", str(tmp_path)])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].split() == ["l_index", "lambda", "h"]
        lams = [float(row.split()[1]) for row in lines[1:]]
        for lam, expect in zip(lams, (0.0, 2.0, 6.0, 12.0, 20.0)):
            assert lam == pytest.approx(expect, abs=1e-6)
        assert lines[1].split()[2] == "-"  # the constant mode has no scale

    def test_second_run_hits_cache_and_is_identical(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "eigen.json",
            {"profile": SPHERE, "eigen": {"k": 2, "count": 3, "N": 1024}},
        )
        assert cli.main(["eigen", "--config", cfg, "--out", str(tmp_path)]) == 0
        first = capsys.readouterr().out
        assert cli.main(["eigen", "--config", cfg, "--out", str(tmp_path)]) == 0
        assert capsys.readouterr().out == first
        assert (tmp_path / "cache").is_dir()

    def test_incompatible_grid_is_a_config_error(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "eigen.json",
            {"profile": SPHERE, "eigen": {"k": 50, "count": 1, "N": 100}},
        )
        assert cli.main(["eigen", "--config", cfg, "--out", str(tmp_path)]) == 2


class TestIntegrateCommand:
    def test_zonal_value_matches_closed_form(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "single.json",
            {
                "profile": SPHERE,
                "geodesic": {
                    "kind": "equator-latitude",
                    "phi_range": [0.0, 1.0471975511965976],
                },
                "integrate": {"l": 100, "k": 0},
            },
        )
        code = cli.main(["integrate", "--config", cfg])
        out = capsys.readouterr().out
        assert code == 0
        fields = dict(part.split("=") for part in out.split())
        from qcilab import legendre_P0

        expect = (np.pi / 3) * np.sqrt(201 / (4 * np.pi)) * legendre_P0(100)
        assert float(fields["re"]) == pytest.approx(expect, rel=1e-9)
        assert float(fields["err_est"]) <= 1e-10


class TestSweepCommand:
    def test_zonal_sweep_writes_report(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "zonal.json",
            {
                "profile": SPHERE,
                "sweep": {
                    "experiment": "zonal-equator",
                    "k_range": {"start": 100, "stop": 400, "step": 100},
                },
            },
        )
        code = cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)])
        assert code == 0
        summary = capsys.readouterr().out
        assert summary.startswith("slope=")
        report = load_report(str(tmp_path / "zonal-equator.csv"))
        assert len(report.rows) == 4
        assert abs(report.slope) <= 0.05

    def test_tesseral_sweep_named_output(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "tess.json",
            {
                "profile": SPHERE,
                "sweep": {
                    "experiment": "tesseral-caustic",
                    "k_list": [25, 50, 100],
                    "delta0": 0.3,
                },
                "output": {"basename": "tess"},
            },
        )
        code = cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)])
        assert code == 0
        report = load_report(str(tmp_path / "tess.csv"))
        assert report.experiment == "tesseral-caustic"
        assert report.delta0 == 0.3

    def test_sweeps_are_reproducible_bytes(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "zonal.json",
            {
                "profile": SPHERE,
                "sweep": {
                    "experiment": "zonal-equator",
                    "k_list": [100, 200, 300],
                },
            },
        )
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        out1.mkdir(), out2.mkdir()
        assert cli.main(["sweep", "--config", cfg, "--out", str(out1)]) == 0
        assert cli.main(["sweep", "--config", cfg, "--out", str(out2)]) == 0
        a = (out1 / "zonal-equator.csv").read_bytes()
        b = (out2 / "zonal-equator.csv").read_bytes()
        assert a == b
        assert (out1 / "zonal-equator.json").read_bytes() == (
            out2 / "zonal-equator.json"
        ).read_bytes()

    def test_single_point_sweep_exits_fit_degenerate(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "one.json",
            {
                "profile": SPHERE,
                "sweep": {"experiment": "tesseral-caustic", "k_list": [50]},
            },
        )
        assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 5

    def test_custom_experiment_has_no_runner(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "custom.json",
            {
                "profile": SPHERE,
                "sweep": {"experiment": "custom", "k_list": [10, 20, 30]},
            },
        )
        assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2


class TestPlotdataCommand:
    def test_columns_follow_the_report(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "zonal.json",
            {
                "profile": SPHERE,
                "sweep": {"experiment": "zonal-equator", "k_list": [100, 200, 300]},
            },
        )
        assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
        capsys.readouterr()
        code = cli.main(["plotdata", str(tmp_path / "zonal-equator.csv")])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        header = [ln for ln in lines if ln.startswith("#")]
        data = [ln for ln in lines if not ln.startswith("#")]
        assert any("experiment=zonal-equator" in ln for ln in header)
        assert len(data) == 3
        report = load_report(str(tmp_path / "zonal-equator.csv"))
        logh, logI = map(float, data[0].split())
        assert logh == pytest.approx(np.log(report.rows[0].h), abs=1e-12)
        assert logI == pytest.approx(np.log(report.rows[0].abs_I), abs=1e-12)

    def test_corrupt_report_exits_config_error(self, tmp_path, capsys):
        (tmp_path / "bad.csv").write_text("k,l,h,abs_I,re_I,im_I\n1,1,x,1,1,0\n")
        (tmp_path / "bad.json").write_text(
            json.dumps(
                {
                    "experiment": "custom",
                    "slope": None,
                    "intercept_logC": None,
                    "r_squared": None,
                    "delta0": None,
                    "quadrature": None,
                }
            )
        )
        assert cli.main(["plotdata", str(tmp_path / "bad.csv")]) == 2
        assert "line 2" in capsys.readouterr().err


class TestConfigValidation:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path, "unknown.json", {"profile": SPHERE, "bogus": 1}
        )
        assert cli.main(["admissible", "--config", cfg]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_missing_config_flag(self, capsys):
        assert cli.main(["admissible"]) == 2

    def test_missing_config_file(self, tmp_path, capsys):
        assert cli.main(["admissible", "--config", str(tmp_path / "no.json")]) == 2

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        assert cli.main(["admissible", "--config", str(path)]) == 2

    def test_schema_type_violation_names_the_path(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "bad.json",
            {"profile": {"kind": "sphere"}, "energies": {"E1": "one", "E2": 0.0}},
        )
        assert cli.main(["admissible", "--config", cfg]) == 2
        assert "energies" in capsys.readouterr().err
