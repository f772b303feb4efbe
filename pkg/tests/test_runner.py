"""Tests for suite orchestration, config parsing, reporting, and the CLI."""

import json

import numpy as np
import pytest

from epicheck import (
    ConfigError,
    GaussianMixture,
    MarkovTriple,
    SpdMatrix,
    config_from_dict,
    default_config,
    generate_instance,
    random_markov_triple,
    random_mixture,
    proportional_markov_triple,
    report_to_csv,
    run_suite,
    shared_prefix_pair,
    write_report,
)
from epicheck.checks import InequalityReport
from epicheck.cli import main
from epicheck.runner import CSV_COLUMNS, REGISTRY, RegistryEntry
from epicheck.seeding import rng_from_tokens


def small_config(**overrides):
    """Cheap suite: closed-form checks plus one tiny MC check."""
    data = {
        "seed": 0,
        "dims": [2],
        "mc_samples": 2000,
        "checks": ["matrix_bergstrom", "matrix_kyfan", "sphere_identity"],
    }
    data.update(overrides)
    return config_from_dict(data)


class TestGenerators:
    def test_mixture_weights_and_condition_are_pinned(self):
        for idx in range(20):
            gm = random_mixture(3, rng_from_tokens(0, "gen", idx))
            assert gm.weights.min() >= 0.05
            for comp in gm.components:
                eigs = np.linalg.eigvalsh(comp.cov.entries)
                assert eigs[-1] / eigs[0] <= 1e3

    def test_markov_triple_labels(self):
        triple = random_markov_triple(2, rng_from_tokens(0, "gen-triple"))
        assert isinstance(triple, MarkovTriple)
        assert 2 <= triple.n_labels <= 3

    def test_proportional_triple_shares_one_ratio(self):
        triple = proportional_markov_triple(2, rng_from_tokens(0, "gen-prop"))
        ratios = [
            gy.components[0].cov.entries[0, 0] / gx.components[0].cov.entries[0, 0]
            for gx, gy in zip(triple.x_given_z, triple.y_given_z)
        ]
        assert max(ratios) == pytest.approx(min(ratios), rel=1e-12)

    def test_shared_prefix_pair_marginals_match(self):
        x, y = shared_prefix_pair(3, rng_from_tokens(0, "gen-prefix"))
        mx = x.marginal(range(2)).components[0].cov.entries
        my = y.marginal(range(2)).components[0].cov.entries
        assert np.array_equal(mx, my)


class TestGenerateInstance:
    def test_deterministic_per_key(self):
        a1, b1 = generate_instance("mixture_pair", 2, 0, 7)
        a2, b2 = generate_instance("mixture_pair", 2, 0, 7)
        assert np.array_equal(a1.weights, a2.weights)
        assert np.array_equal(
            a1.components[0].cov.entries, a2.components[0].cov.entries
        )
        assert np.array_equal(b1.components[0].mean, b2.components[0].mean)

    def test_distinct_indices_differ(self):
        a, _ = generate_instance("mixture_pair", 2, 0, 7)
        b, _ = generate_instance("mixture_pair", 2, 1, 7)
        assert not np.array_equal(
            a.components[0].cov.entries, b.components[0].cov.entries
        )

    def test_family_coverage(self):
        assert isinstance(generate_instance("mixture_single", 2, 0, 0), GaussianMixture)
        assert isinstance(generate_instance("markov_triple", 2, 0, 0), MarkovTriple)
        a, b = generate_instance("spd_pair", 3, 0, 0)
        assert isinstance(a, SpdMatrix) and b.dim == 3
        v = generate_instance("vector", 4, 0, 0)
        assert v.shape == (4,) and np.any(v)
        dim, rng = generate_instance("equality_seed", 3, 0, 0)
        assert dim == 3 and isinstance(rng, np.random.Generator)

    def test_unknown_family(self):
        with pytest.raises(ConfigError):
            generate_instance("bogus", 2, 0, 0)


class TestConfigFromDict:
    def test_defaults_include_every_check(self):
        config = config_from_dict({})
        assert sorted(req.name for req in config.checks) == sorted(REGISTRY)
        assert config.dims == (2, 3)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            config_from_dict({"sedd": 1})

    def test_unknown_check_lists_known_names(self):
        with pytest.raises(ConfigError, match="entropic_bergstrom"):
            config_from_dict({"checks": ["not_a_check"]})

    def test_unknown_param_rejected(self):
        with pytest.raises(ConfigError, match="params"):
            config_from_dict(
                {"checks": [{"name": "de_bruijn", "params": {"step": 0.1}}]}
            )

    def test_bad_scalar_types(self):
        with pytest.raises(ConfigError):
            config_from_dict({"seed": -1})
        with pytest.raises(ConfigError):
            config_from_dict({"seed": True})
        with pytest.raises(ConfigError):
            config_from_dict({"z": 0})
        with pytest.raises(ConfigError):
            config_from_dict({"dims": []})
        with pytest.raises(ConfigError):
            config_from_dict({"mc_samples": 1})

    def test_tolerances_block(self):
        config = config_from_dict({"tolerances": {"abs_tol": 1e-8}})
        assert config.abs_tol == 1e-8
        with pytest.raises(ConfigError, match="tolerances"):
            config_from_dict({"tolerances": {"abstol": 1e-8}})
        with pytest.raises(ConfigError):
            config_from_dict({"tolerances": {"eq_tol": -1.0}})

    def test_output_block(self):
        config = config_from_dict({"output": {"path": "r.csv", "format": "csv"}})
        assert config.output_path == "r.csv"
        assert config.output_format == "csv"
        with pytest.raises(ConfigError):
            config_from_dict({"output": {"format": "xml"}})
        with pytest.raises(ConfigError):
            config_from_dict({"output": {"path": ""}})

    def test_min_dim_lifts_small_requests(self):
        config = config_from_dict(
            {"dims": [1], "checks": [{"name": "entropic_bergstrom"}]}
        )
        assert config.checks[0].dims == (2,)

    def test_per_check_overrides(self):
        config = config_from_dict(
            {
                "checks": [
                    {
                        "name": "conditional_form",
                        "dims": [2],
                        "instances": 3,
                        "mc_samples": 5000,
                        "params": {"lambdas": [0.0, 0.5]},
                    }
                ]
            }
        )
        req = config.checks[0]
        assert req.instances == 3
        assert req.mc_samples == 5000
        assert req.params["lambdas"] == [0.0, 0.5]

    def test_string_entries_are_shorthand(self):
        config = config_from_dict({"checks": ["epi"]})
        assert config.checks[0].name == "epi"
        assert config.checks[0].params == {}

    def test_non_mapping_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict([1, 2])
        with pytest.raises(ConfigError):
            config_from_dict({"checks": [3]})


class TestRunSuite:
    def test_report_shape_and_exit_code(self):
        report, code = run_suite(small_config())
        assert code == 0
        assert report["version"] == 1
        assert report["seed"] == 0
        assert len(report["records"]) == 3
        for counts in report["summary"].values():
            assert set(counts) == {"holds", "equality", "violated", "inconclusive"}
        assert not any(c["violated"] for c in report["summary"].values())

    def test_record_order_and_instance_ids(self):
        config = config_from_dict(
            {
                "dims": [2, 3],
                "mc_samples": 2000,
                "checks": [{"name": "matrix_bergstrom", "instances": 2}],
            }
        )
        report, _ = run_suite(config)
        ids = [r["instance_id"] for r in report["records"]]
        assert ids == ["spd_pair-d2-0", "spd_pair-d2-1", "spd_pair-d3-0", "spd_pair-d3-1"]

    def test_lambda_grid_produces_one_record_each(self):
        config = config_from_dict(
            {
                "dims": [2],
                "mc_samples": 2000,
                "checks": [
                    {"name": "conditional_form", "params": {"lambdas": [0.0, 0.5, 1.0]}}
                ],
            }
        )
        report, _ = run_suite(config)
        assert [r["lambda"] for r in report["records"]] == [0.0, 0.5, 1.0]

    def test_reruns_identical_modulo_wall_ms(self):
        config = small_config(checks=["sphere_identity", "epi"])
        first, _ = run_suite(config)
        second, _ = run_suite(small_config(checks=["sphere_identity", "epi"]))

        def strip(report):
            return [
                {k: v for k, v in r.items() if k != "wall_ms"}
                for r in report["records"]
            ]

        assert strip(first) == strip(second)
        assert first["summary"] == second["summary"]

    def test_violation_drives_exit_code(self, monkeypatch):
        def run(inst, params, cfg, iid):
            return [
                InequalityReport(
                    "always_violated", iid, 2, None, 0.0, 1.0, -1.0, 0.0,
                    "violated", cfg.seed, 0.0,
                )
            ]

        monkeypatch.setitem(
            REGISTRY, "always_violated",
            RegistryEntry("vector", 1, frozenset(), {}, run),
        )
        config = config_from_dict({"dims": [2], "checks": ["always_violated"]})
        report, code = run_suite(config)
        assert code == 1
        assert report["summary"]["always_violated"]["violated"] == 1


class TestReportWriting:
    def test_csv_header_and_empty_lambda(self):
        report, _ = run_suite(small_config())
        text = report_to_csv(report)
        lines = text.strip().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(report["records"])
        # sphere_identity has no lambda: its field renders empty
        sphere = [l for l in lines[1:] if l.startswith("sphere_identity")]
        assert sphere and sphere[0].split(",")[3] == ""

    def test_json_round_trip(self, tmp_path):
        report, _ = run_suite(small_config())
        path = tmp_path / "report.json"
        write_report(report, str(path), "json")
        assert json.loads(path.read_text()) == report

    def test_csv_file(self, tmp_path):
        report, _ = run_suite(small_config())
        path = tmp_path / "report.csv"
        write_report(report, str(path), "csv")
        assert path.read_text().startswith("check_name,instance_id")

    def test_unknown_format(self, tmp_path):
        report, _ = run_suite(small_config())
        with pytest.raises(ConfigError):
            write_report(report, str(tmp_path / "r.xml"), "xml")


class TestCli:
    def write_config(self, tmp_path, data):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data))
        return str(path)

    def test_run_with_config_and_out(self, tmp_path, capsys):
        config = self.write_config(
            tmp_path,
            {"dims": [2], "mc_samples": 2000,
             "checks": ["matrix_bergstrom", "sphere_identity"]},
        )
        out = tmp_path / "report.json"
        code = main(["run", "--config", config, "--seed", "1", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["seed"] == 1
        captured = capsys.readouterr()
        assert "wrote json report" in captured.out
        assert "matrix_bergstrom" in captured.out

    def test_run_csv_to_stdout(self, tmp_path, capsys):
        config = self.write_config(
            tmp_path, {"dims": [2], "checks": ["matrix_bergstrom"]}
        )
        code = main(["run", "--config", config, "--format", "csv"])
        assert code == 0
        assert capsys.readouterr().out.startswith("check_name,instance_id")

    def test_run_rejects_bad_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["run", "--config", str(path)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_run_rejects_missing_file(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_run_rejects_unknown_check(self, tmp_path, capsys):
        config = self.write_config(tmp_path, {"checks": ["bogus"]})
        assert main(["run", "--config", config]) == 2
        assert "known checks" in capsys.readouterr().err

    def test_check_subcommand(self, capsys):
        code = main(["check", "matrix_bergstrom", "--dim", "2", "--seed", "0"])
        assert code == 0
        out = capsys.readouterr().out
        assert "matrix_bergstrom" in out
        assert "verdict=" in out

    def test_check_unknown_name(self, capsys):
        assert main(["check", "bogus"]) == 2
        assert "known checks" in capsys.readouterr().err

    def test_check_writes_report(self, tmp_path, capsys):
        out = tmp_path / "one.json"
        code = main(
            ["check", "matrix_kyfan", "--dim", "3", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["records"][0]["check_name"] == "matrix_kyfan"

    def test_scan_lambda(self, tmp_path, capsys):
        out = tmp_path / "scan.json"
        code = main(
            ["scan-lambda", "--dim", "2", "--grid", "5", "--samples", "2000",
             "--out", str(out)]
        )
        assert code == 0
        scan = json.loads(out.read_text())
        assert set(scan) >= {"lambdas", "values", "second_diffs", "flagged"}
        assert len(scan["values"]) == 5

    def test_scan_lambda_validation(self, capsys):
        assert main(["scan-lambda", "--grid", "3"]) == 2
        assert main(["scan-lambda", "--dim", "1"]) == 2
