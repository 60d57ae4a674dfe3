"""Tests for the experiment harness and its command line front end."""

import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from parityqec.cli import (
    DEFAULT_TARGETS,
    ConfigError,
    RunConfig,
    build_config,
    calibrate_noise,
    exact_pipeline_means,
    load_default_noise,
    main,
    run_experiment,
)
from parityqec.cnotgate import NoiseModel
from parityqec.measure import read_count_records
from parityqec.qcore import load_density_matrix


def _dir_digest(root: Path) -> dict[str, str]:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestConfig:
    def test_rejects_unknown_experiment(self):
        with pytest.raises(ConfigError):
            RunConfig("fig9")

    @pytest.mark.parametrize("field,value", [("shots", 0), ("seed", -1), ("scheme", "fancy")])
    def test_rejects_bad_values(self, field, value):
        with pytest.raises(ConfigError):
            RunConfig("fig2", **{field: value})

    def test_default_noise_is_the_packaged_model(self):
        noise = RunConfig("fig2").resolved_noise()
        assert noise == load_default_noise()

    def test_explicit_noise_wins(self):
        model = NoiseModel(0.9, 0.8, 0.7)
        cfg = RunConfig("fig2", noise=model)
        assert cfg.resolved_noise() == model

    def test_to_dict_embeds_resolved_noise(self):
        d = RunConfig("fig2", noise=NoiseModel(0.5, 0.6, 0.7)).to_dict()
        assert d["noise"]["v_nonclassical"] == 0.5
        assert RunConfig("teleport").to_dict()["noise"] == "unused"

    def test_config_file_merging(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"shots": 123, "seed": 5, "noise": "ideal"}))
        parser_args = _parse(["fig2", "--config", str(cfg_file), "--seed", "9"])
        cfg = build_config("fig2", parser_args)
        assert cfg.shots == 123
        assert cfg.seed == 9  # explicit flag overrides the file
        assert cfg.resolved_noise() is None

    def test_config_file_noise_triplet(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"noise": [0.9, 0.95, 0.97]}))
        cfg = build_config("fig2", _parse(["fig2", "--config", str(cfg_file)]))
        assert cfg.resolved_noise() == NoiseModel(0.9, 0.95, 0.97)


def _parse(argv):
    from parityqec.cli import _build_parser

    return _build_parser().parse_args(argv)


class TestTable1:
    def test_ideal_truth_table(self, tmp_path):
        cfg = RunConfig("table1", use_default_noise=False, out_dir=tmp_path)
        res = run_experiment(cfg)
        for label, prob, fid in res["rows"]:
            assert prob == pytest.approx(1.0 / 9.0, abs=1e-12)
            assert fid == pytest.approx(1.0, abs=1e-12)
        assert (tmp_path / "table1.csv").exists()
        assert len(list((tmp_path / "table1_states").glob("*.json"))) == 6

    def test_noisy_encoder_departs_from_ideal(self, tmp_path):
        cfg = RunConfig("table1", out_dir=tmp_path)
        res = run_experiment(cfg)
        fids = [row[2] for row in res["rows"]]
        assert all(f < 1.0 for f in fids)
        assert all(row[1] > 1.0 / 9.0 - 1e-12 for row in res["rows"])


class TestFig2:
    def test_exact_ideal_reconstructions_are_perfect(self, tmp_path):
        cfg = RunConfig("fig2", use_default_noise=False, exact=True, out_dir=tmp_path)
        res = run_experiment(cfg)
        assert res["mean"] == pytest.approx(1.0, abs=1e-6)
        for _, _, fid, _, converged in res["rows"]:
            assert fid >= 1.0 - 1e-6
            assert converged

    def test_high_shot_sampled_ideal_run(self, tmp_path):
        cfg = RunConfig(
            "fig2", use_default_noise=False, shots=1_000_000, seed=7, out_dir=tmp_path
        )
        res = run_experiment(cfg)
        assert all(row[2] >= 0.995 for row in res["rows"])

    def test_calibrated_sampled_run_lands_near_target(self, tmp_path):
        cfg = RunConfig("fig2", seed=1, out_dir=tmp_path)
        res = run_experiment(cfg)
        assert 0.83 <= res["mean"] <= 0.93
        counts = read_count_records(tmp_path / "fig2_counts" / "0+i1.csv")
        assert len(counts) == 16
        rho = load_density_matrix(tmp_path / "fig2_states" / "0.json")
        assert rho.num_qubits == 2
        summary = (tmp_path / "fig2_summary.txt").read_text()
        assert "parityqec" in summary and "mean fidelity" in summary

    def test_overcomplete_scheme(self, tmp_path):
        cfg = RunConfig(
            "fig2", use_default_noise=False, exact=True, scheme="overcomplete", out_dir=tmp_path
        )
        res = run_experiment(cfg)
        assert res["mean"] == pytest.approx(1.0, abs=1e-6)
        assert len(read_count_records(tmp_path / "fig2_counts" / "0.csv")) == 36


class TestFig3:
    def test_exact_ideal_decodings_are_perfect(self, tmp_path):
        cfg = RunConfig("fig3", use_default_noise=False, exact=True, out_dir=tmp_path)
        res = run_experiment(cfg)
        assert len(res["rows"]) == 24
        for *_, prob, fid, _ in res["rows"]:
            assert prob == pytest.approx(0.5, abs=1e-6)
            assert fid >= 1.0 - 1e-6
        assert res["imag_mean"] == pytest.approx(0.0, abs=1e-7)

    def test_calibrated_sampled_run(self, tmp_path):
        cfg = RunConfig("fig3", seed=1, out_dir=tmp_path)
        res = run_experiment(cfg)
        assert 0.86 <= res["mean"] <= 0.99
        assert res["imag_mean"] < 0.08
        assert len(list((tmp_path / "fig3_states").glob("*.json"))) == 24

    def test_decoded_mean_beats_encoded_mean_at_the_default(self, tmp_path):
        fig2 = run_experiment(RunConfig("fig2", seed=2, out_dir=tmp_path / "a"))
        fig3 = run_experiment(RunConfig("fig3", seed=2, out_dir=tmp_path / "b"))
        assert fig3["mean"] >= fig2["mean"]


class TestFig4:
    def test_exact_ideal_grid_is_perfect(self, tmp_path):
        cfg = RunConfig("fig4", use_default_noise=False, exact=True, out_dir=tmp_path)
        res = run_experiment(cfg)
        assert len(res["rows"]) == (6 + 16) * 4
        assert all(row[6] >= 0.995 for row in res["rows"])

    def test_calibrated_sampled_run(self, tmp_path):
        cfg = RunConfig("fig4", seed=1, out_dir=tmp_path)
        res = run_experiment(cfg)
        assert 0.90 <= res["mean"] <= 0.99
        assert res["curve_means"][(1, 0)] >= res["curve_means"][(1, 1)]
        text = (tmp_path / "fig4.csv").read_text().splitlines()
        assert text[0] == "input,family,angle,qubit,outcome,outcome_prob,fidelity"
        assert len(text) == 1 + 88


class TestTeleportRunner:
    def test_table_contents(self, tmp_path):
        res = run_experiment(RunConfig("teleport", out_dir=tmp_path))
        assert len(res["rows"]) == 9
        by_key = {(n, w): (ex, est, se) for n, w, ex, est, _, se in res["rows"]}
        assert by_key[(1, 2)][0] == 0.75
        for (n, w), (exact, estimate, se) in by_key.items():
            assert abs(estimate - exact) < 4.0 * se


@pytest.fixture(scope="module")
def fitted():
    return calibrate_noise()


class TestCalibration:
    def test_residuals_within_tolerance(self, fitted):
        assert max(fitted.residuals) <= 0.05
        assert fitted.within_tolerance

    def test_achieved_means_are_ordered(self, fitted):
        m2, m3, m4 = fitted.achieved
        assert m2 <= m3 <= m4

    def test_matches_the_packaged_default(self, fitted):
        shipped = load_default_noise()
        assert fitted.noise.v_nonclassical == pytest.approx(shipped.v_nonclassical, abs=1e-6)
        assert fitted.noise.v_classical_control == pytest.approx(
            shipped.v_classical_control, abs=1e-6
        )
        assert fitted.noise.v_classical_target == pytest.approx(
            shipped.v_classical_target, abs=1e-6
        )

    def test_noiseless_fixed_point(self):
        result = calibrate_noise((1.0, 1.0, 1.0))
        assert result.noise == NoiseModel(1.0, 1.0, 1.0)
        assert result.residuals == (0.0, 0.0, 0.0)

    def test_degenerate_target_warns(self):
        result = calibrate_noise((0.5, 0.5, 0.5))
        assert any("reachable" in w for w in result.warnings)

    @pytest.mark.parametrize("targets", [(0.0, 0.9, 0.9), (0.9, 0.9, 1.1), (0.9, 0.9)])
    def test_rejects_bad_targets(self, targets):
        with pytest.raises(ValueError):
            calibrate_noise(targets)

    def test_tiny_budget_warns(self):
        result = calibrate_noise(budget=60)
        assert result.evaluations <= 60
        assert any("budget" in w for w in result.warnings)

    def test_ideal_pipeline_means_are_unity(self):
        assert exact_pipeline_means(None) == pytest.approx((1.0, 1.0, 1.0), abs=1e-12)

    def test_default_targets_constant(self):
        assert DEFAULT_TARGETS == (0.88, 0.93, 0.96)


class TestMain:
    def test_table1_exit_code_and_stdout(self, tmp_path, capsys):
        code = main(["table1", "--ideal", "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "parityqec" in out and "F=1.000000" in out

    def test_bad_noise_string_fails_cleanly(self, tmp_path, capsys):
        code = main(["fig2", "--noise", "0.9,0.8", "--out", str(tmp_path)])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_subcommand_exits(self):
        with pytest.raises(SystemExit):
            main(["fig9"])

    def test_noise_and_ideal_are_exclusive(self):
        with pytest.raises(SystemExit):
            main(["fig2", "--noise", "1,1,1", "--ideal"])

    def test_reruns_are_byte_identical(self, tmp_path, capsys):
        args = ["fig2", "--shots", "500", "--seed", "11", "--out", str(tmp_path)]
        assert main(args) == 0
        first = _dir_digest(tmp_path)
        assert main(args) == 0
        assert _dir_digest(tmp_path) == first
        capsys.readouterr()

    def test_plots_flag_emits_svg(self, tmp_path, capsys):
        code = main(
            ["fig2", "--shots", "200", "--seed", "3", "--plots", "--out", str(tmp_path)]
        )
        assert code == 0
        svg = (tmp_path / "fig2_bars.svg").read_text()
        assert svg.startswith("<svg") and "</svg>" in svg
        capsys.readouterr()

    def test_teleport_cli_row(self, tmp_path, capsys):
        assert main(["teleport", "--out", str(tmp_path)]) == 0
        table = (tmp_path / "teleport.csv").read_text().splitlines()
        assert table[0] == "n,width,exact_success,mc_estimate,trials,std_error"
        row_12 = [line for line in table if line.startswith("1,2,")][0]
        assert row_12.split(",")[2] == "0.7500000000"
        capsys.readouterr()
