"""Subcomandos, códigos de saída e determinismo dos CSVs"""

import numpy as np
import pandas as pd
import pytest

from sample_amplification.cli import (
    REPORT_COLUMNS,
    VERIFY_COLUMNS,
    build_family,
    error_function,
    main,
    mstar,
    nstar,
)
from sample_amplification.divergences import gaussian_scaling_tv_exact
from sample_amplification.errors import ValidationError
from sample_amplification.families import FamilyKind, FamilySpec, default_param, sample, write_dataset_csv
from sample_amplification.numerics import RngState

VALUE_KINDS = {"bound", "exact", "mc_estimate", "certificate_gap"}


def _gaussian_exact(d: int):
    return error_function("gaussian_mean_exact", build_family("GaussianMean", d))


class TestSearch:

    def test_bisection_matches_scan(self):
        error = _gaussian_exact(100)
        scan = max(m for m in range(0, 60) if gaussian_scaling_tv_exact(100, m, 100) <= 0.1)
        assert mstar(error, 100, 0.1) == scan

    def test_eps_one_hits_ceiling(self):
        assert mstar(_gaussian_exact(4), 100, 1.0, ceiling=5000) == 5000

    def test_eps_zero(self):
        assert mstar(_gaussian_exact(4), 100, 0.0, ceiling=5000) == 0

    def test_eps_checked(self):
        with pytest.raises(ValidationError):
            mstar(_gaussian_exact(4), 100, 1.5)

    def test_linear_in_n(self):
        error = _gaussian_exact(100)
        ratio = mstar(error, 4000, 0.1) / mstar(error, 2000, 0.1)
        assert 1.8 <= ratio <= 2.2

    def test_rate_law_regression(self):
        rows = []
        for d in (16, 64, 256):
            error = _gaussian_exact(d)
            for n in (100, 200, 400):
                rows.append((np.log(d), np.log(n), np.log(mstar(error, n, 0.1))))
        data = np.array(rows)
        design = np.column_stack([np.ones(len(data)), data[:, 0], data[:, 1]])
        coef, *_ = np.linalg.lstsq(design, data[:, 2], rcond=None)
        assert coef[1] == pytest.approx(-0.5, abs=0.1)
        assert coef[2] == pytest.approx(1.0, abs=0.1)

    def test_nstar_is_smallest(self):
        error = _gaussian_exact(100)
        found = nstar(error, 0.1)
        assert error(found, 1).value <= 0.1
        assert error(found - 1, 1).value > 0.1


class TestAmplifyCommand:

    def _run(self, tmp_path, name, *extra):
        out = tmp_path / name
        code = main([
            "amplify", "--family", "GaussianMean", "--dim", "3", "--n", "20", "--m", "5",
            "--method", "gaussian_mean", "--seed", "11", "--output", str(out), *extra,
        ])
        return code, out

    def test_writes_samples_and_sidecar(self, tmp_path):
        code, out = self._run(tmp_path, "amp.csv")
        assert code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["x1", "x2", "x3"]
        assert len(frame) == 25
        report = pd.read_csv(tmp_path / "amp.report.csv")
        assert list(report.columns) == REPORT_COLUMNS
        assert report.loc[0, "formula_id"] == "gaussian_mean_kl"
        assert report.loc[0, "seed"] == 11

    def test_same_seed_same_bytes(self, tmp_path):
        _, first = self._run(tmp_path, "a.csv")
        _, second = self._run(tmp_path, "b.csv")
        assert first.read_bytes() == second.read_bytes()
        assert b"\r\n" not in first.read_bytes()

    def test_zero_m_round_trip(self, tmp_path):
        family = FamilySpec(FamilyKind.GAUSSIAN_MEAN, 2)
        source = tmp_path / "in.csv"
        write_dataset_csv(sample(family, default_param(family), 12, RngState(3)), str(source))
        out = tmp_path / "out.csv"
        code = main([
            "amplify", "--family", "GaussianMean", "--dim", "2", "--m", "0", "--method", "gaussian_mean",
            "--input", str(source), "--output", str(out),
        ])
        assert code == 0
        assert len(pd.read_csv(out)) == 12
        assert pd.read_csv(tmp_path / "out.report.csv").loc[0, "value"] == pytest.approx(0.0, abs=1e-12)

    def test_lowrank_below_rank_is_impossible(self, tmp_path, capsys):
        code = main([
            "amplify", "--family", "LowRankCov", "--dim", "6", "--rank", "4", "--n", "3", "--m", "1",
            "--method", "lowrank_cov", "--output", str(tmp_path / "x.csv"),
        ])
        assert code == 2
        assert "n >= d" in capsys.readouterr().err

    def test_method_family_mismatch(self, tmp_path):
        code = main([
            "amplify", "--family", "GaussianMean", "--dim", "2", "--n", "10", "--m", "1",
            "--method", "uniform", "--output", str(tmp_path / "x.csv"),
        ])
        assert code == 1

    def test_missing_n_without_input(self, tmp_path):
        code = main([
            "amplify", "--family", "GaussianMean", "--dim", "2", "--m", "1",
            "--method", "gaussian_mean", "--output", str(tmp_path / "x.csv"),
        ])
        assert code == 1


class TestArguments:

    def test_unknown_family(self):
        assert main(["bound", "--family", "Cauchy", "--dim", "2", "--n", "10", "--m", "1", "--method", "gaussian_mean"]) == 1

    def test_missing_required_flag(self):
        assert main(["bound", "--family", "GaussianMean", "--dim", "2", "--n", "10", "--method", "gaussian_mean"]) == 1

    def test_unknown_subcommand(self):
        assert main(["plot"]) == 1


class TestMstarCommand:

    def test_eps_one_writes_ceiling(self, tmp_path):
        out = tmp_path / "m.csv"
        code = main([
            "mstar", "--family", "GaussianMean", "--dim", "4", "--n", "100", "--eps", "1",
            "--method", "gaussian_mean_exact", "--ceiling", "1000", "--output", str(out),
        ])
        assert code == 0
        row = pd.read_csv(out).iloc[0]
        assert row["value_kind"] == "exact"
        assert row["method"] == "mstar[gaussian_mean_exact]"
        assert row["value"] == 1000

    def test_no_computable_error(self, tmp_path):
        code = main([
            "mstar", "--family", "GaussianMean", "--dim", "4", "--n", "100", "--eps", "0.1",
            "--method", "copy_append", "--output", str(tmp_path / "m.csv"),
        ])
        assert code == 1

    def test_nstar_flag(self, tmp_path):
        out = tmp_path / "n.csv"
        code = main([
            "mstar", "--family", "GaussianMean", "--dim", "100", "--eps", "0.1",
            "--method", "gaussian_mean_exact", "--nstar", "--output", str(out),
        ])
        assert code == 0
        row = pd.read_csv(out).iloc[0]
        assert row["value_kind"] == "exact"
        assert row["method"] == "nstar[gaussian_mean_exact]"
        assert row["value"] == nstar(_gaussian_exact(100), 0.1)


class TestBoundCommand:

    def test_discrete_shuffle_value(self, tmp_path):
        out = tmp_path / "b.csv"
        code = main([
            "bound", "--family", "Discrete", "--dim", "50", "--n", "2000", "--m", "20",
            "--method", "shuffle_general", "--output", str(out),
        ])
        assert code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == REPORT_COLUMNS
        assert frame.loc[0, "value"] == pytest.approx(0.09899, abs=1e-5)
        assert pd.isna(frame.loc[0, "stderr"])

    def test_several_methods(self, capsys):
        code = main([
            "bound", "--family", "GaussianMean", "--dim", "16", "--n", "100", "--m", "10",
            "--method", "gaussian_mean", "--method", "gaussian_mean_exact", "--method", "shuffle_product",
            "--output", "-",
        ])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == ",".join(REPORT_COLUMNS)
        assert [line.split(",")[4] for line in lines[1:]] == ["gaussian_mean", "gaussian_mean_exact", "shuffle_product"]
        assert lines[2].split(",")[5] == "exact"


class TestVerifyCommand:

    def test_copy_append_report(self, tmp_path):
        out = tmp_path / "v.csv"
        code = main([
            "verify", "--family", "GaussianMean", "--dim", "2", "--n", "10", "--m", "2",
            "--method", "copy_append", "--reps", "100", "--calibration-reps", "200", "--output", str(out),
        ])
        assert code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == VERIFY_COLUMNS
        duplicate = frame.set_index("test").loc["duplicate"]
        assert duplicate["rejection"] == 1.0

    def test_small_budget_refused(self, tmp_path):
        code = main([
            "verify", "--family", "GaussianMean", "--dim", "2", "--n", "10", "--m", "2",
            "--method", "copy_append", "--reps", "50", "--output", str(tmp_path / "v.csv"),
        ])
        assert code == 1


class TestExperimentCommand:

    def _config(self, tmp_path, body):
        path = tmp_path / "exp.cfg"
        path.write_text(body, encoding="utf-8")
        return str(path)

    def test_empty_grid_header_only(self, tmp_path):
        out = tmp_path / "e.csv"
        code = main(["experiment", "--config", self._config(tmp_path, "family = GaussianMean\n"), "--output", str(out)])
        assert code == 0
        assert out.read_text(encoding="utf-8") == ",".join(REPORT_COLUMNS) + "\n"

    def test_grid_rows_in_order_and_reproducible(self, tmp_path):
        config = self._config(tmp_path, (
            "family = GaussianMean\n"
            "dim = 16\n"
            "n = 100\nn = 200\n"
            "m = 10\n"
            "method = gaussian_mean\nmethod = gaussian_mean_exact\n"
            "reps = 1000\n"
            "seed = 5\n"
        ))
        first, second = tmp_path / "1.csv", tmp_path / "2.csv"
        assert main(["experiment", "--config", config, "--output", str(first)]) == 0
        assert main(["experiment", "--config", config, "--output", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        frame = pd.read_csv(first)
        assert list(frame["value_kind"]) == ["bound", "mc_estimate", "bound", "mc_estimate", "exact", "exact"]
        assert list(frame["n"]) == [100, 100, 200, 200, 100, 200]
        assert frame.loc[4, "value"] == pytest.approx(gaussian_scaling_tv_exact(100, 10, 16))

    def test_failing_cell_recorded(self, tmp_path):
        config = self._config(tmp_path, "family = GaussianMeanCov\ndim = 2\nn = 1\nm = 1\nmethod = gaussian_mean_cov\n")
        out = tmp_path / "e.csv"
        assert main(["experiment", "--config", config, "--output", str(out)]) == 0
        frame = pd.read_csv(out)
        assert len(frame) == 1
        assert isinstance(frame.loc[0, "error"], str) and frame.loc[0, "error"]

    def test_mismatch_rejected_before_running(self, tmp_path):
        config = self._config(tmp_path, "family = GaussianMean\ndim = 2\nn = 10\nm = 1\nmethod = uniform\n")
        out = tmp_path / "e.csv"
        assert main(["experiment", "--config", config, "--output", str(out)]) == 1
        assert not out.exists()


class TestCertifyCommand:

    def test_covariance_gap(self, tmp_path):
        out = tmp_path / "c.csv"
        code = main([
            "certify", "--kind", "covariance", "--family", "GaussianCov", "--dim", "200", "--n", "400",
            "--m", "400", "--output", str(out),
        ])
        assert code == 0
        row = pd.read_csv(out).iloc[0]
        assert row["value_kind"] == "certificate_gap"
        assert row["value"] > 17.0
        assert pd.isna(row["error"])

    def test_product_needs_component(self, tmp_path):
        code = main([
            "certify", "--family", "GaussianMean", "--dim", "10", "--n", "10", "--output", str(tmp_path / "c.csv"),
        ])
        assert code == 1


class TestReportValueKinds:

    @pytest.mark.parametrize("argv", [
        ["mstar", "--family", "GaussianMean", "--dim", "16", "--n", "100", "--eps", "0.1", "--method", "gaussian_mean_exact"],
        ["mstar", "--family", "GaussianMean", "--dim", "16", "--eps", "0.1", "--method", "gaussian_mean", "--nstar"],
        ["bound", "--family", "GaussianMean", "--dim", "16", "--n", "100", "--m", "10",
         "--method", "gaussian_mean", "--method", "gaussian_mean_exact", "--method", "shuffle_product"],
        ["certify", "--kind", "covariance", "--family", "GaussianCov", "--dim", "20", "--n", "40", "--m", "10"],
    ])
    def test_only_documented_kinds(self, tmp_path, argv):
        out = tmp_path / "r.csv"
        assert main([*argv, "--output", str(out)]) == 0
        frame = pd.read_csv(out)
        assert len(frame) >= 1
        assert set(frame["value_kind"]) <= VALUE_KINDS

    def test_experiment_kinds(self, tmp_path):
        config = tmp_path / "exp.cfg"
        config.write_text(
            "family = GaussianMean\ndim = 4\nn = 50\nm = 5\nmethod = gaussian_mean\nmethod = gaussian_mean_exact\nreps = 500\n",
            encoding="utf-8",
        )
        out = tmp_path / "e.csv"
        assert main(["experiment", "--config", str(config), "--output", str(out)]) == 0
        assert set(pd.read_csv(out)["value_kind"]) <= VALUE_KINDS
