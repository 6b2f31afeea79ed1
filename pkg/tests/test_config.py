"""Configuration loading, merging, and validation."""

import logging

import pytest

from newsrec.config import (
    defaults_tree,
    load_config,
    merge_overrides,
    resolve_config,
    validate_config,
)
from newsrec.errors import (
    ConfigKeyError,
    ConfigNotFoundError,
    ConfigSyntaxError,
    ConfigTypeError,
    ConfigValidationError,
)


class TestLoadConfig:
    def test_reads_default_yaml(self, config_fixture_root):
        tree = load_config("nrms_like", config_fixture_root)
        assert tree["epochs"] == 3
        assert tree["batch_size"] == 32
        # unknown keys flow into model_extras
        assert tree["model_extras"]["custom_knob"] == 7
        assert "custom_knob" not in tree

    def test_missing_model_names_expected_path(self, config_fixture_root):
        with pytest.raises(ConfigNotFoundError, match="ghost_model"):
            load_config("ghost_model", config_fixture_root)

    def test_dataset_overlay_applied(self, config_fixture_root):
        tree = load_config("nrms_like", config_fixture_root, dataset_name="tiny")
        assert tree["epochs"] == 2  # overlay wins
        assert tree["learning_rate"] == 0.01  # default survives
        assert tree["model_extras"]["note"] == "tiny overlay"

    def test_missing_overlay_is_fine(self, config_fixture_root):
        tree = load_config("nrms_like", config_fixture_root, dataset_name="no-such-dataset")
        assert tree["epochs"] == 3

    def test_duplicate_key_last_wins_with_warning(self, config_fixture_root, caplog):
        with caplog.at_level(logging.WARNING, logger="newsrec.config"):
            tree = load_config("dup", config_fixture_root)
        assert tree["epochs"] == 9
        assert any("duplicate key" in rec.message for rec in caplog.records)

    def test_syntax_error_reports_line(self, config_fixture_root):
        with pytest.raises(ConfigSyntaxError, match=r"default\.yaml:\d+"):
            load_config("broken", config_fixture_root)


class TestMergeOverrides:
    def test_simple_override(self):
        assert merge_overrides({"epochs": 5}, ["epochs=2"])["epochs"] == 2

    def test_uncoercible_value(self):
        with pytest.raises(ConfigTypeError, match="epochs"):
            merge_overrides({"epochs": 5}, ["epochs=two"])

    def test_last_override_wins(self):
        tree = merge_overrides({"a": 1}, ["a=1", "a=2"])
        assert tree["a"] == 2

    def test_dotted_path(self):
        base = {"tracking": {"sink": "file", "options": {}}}
        tree = merge_overrides(base, ["tracking.sink=null"])
        assert tree["tracking"]["sink"] == "null"

    def test_unknown_path_rejected(self):
        with pytest.raises(ConfigKeyError, match="tracking.nope"):
            merge_overrides({"tracking": {"sink": "file"}}, ["tracking.nope=1"])

    def test_model_extras_creation_allowed(self):
        tree = merge_overrides({"model_extras": {}}, ["model_extras.gnn_hops=2"])
        assert tree["model_extras"]["gnn_hops"] == 2

    def test_bare_unknown_key_lands_in_extras(self):
        tree = merge_overrides({"epochs": 1}, ["my_flag=hello"])
        assert tree["model_extras"]["my_flag"] == "hello"

    def test_float_and_bool_coercion(self):
        base = {"learning_rate": 0.1, "model_extras": {"flag": True}}
        tree = merge_overrides(base, ["learning_rate=1e-2", "model_extras.flag=false"])
        assert tree["learning_rate"] == pytest.approx(0.01)
        assert tree["model_extras"]["flag"] is False

    def test_associativity(self):
        base = {"epochs": 5, "batch_size": 8, "model_extras": {}}
        a, b, c = "epochs=2", "batch_size=4", "epochs=9"
        once = merge_overrides(base, [a, b, c])
        twice = merge_overrides(merge_overrides(base, [a, b]), [c])
        assert once == twice


class TestValidateConfig:
    def minimal(self):
        return {"model_name": "nrms_like", "dataset_name": "demo"}

    def test_minimal_tree_gets_documented_defaults(self):
        config = validate_config(self.minimal())
        assert config.seed == 42
        assert config.epochs == 5
        assert config.batch_size == 64
        assert config.learning_rate == pytest.approx(1e-3)
        assert config.embedding_dim == 128
        assert config.attention_heads == 8
        assert config.history_len == 50
        assert config.title_len == 30
        assert config.negatives == 4
        assert config.dropout == 0.0
        assert config.device_plan.kind == "single"
        assert config.tracking.sink == "file"
        assert config.corpus_dir == "data/corpora/demo"

    def test_divisibility_error(self):
        tree = {**self.minimal(), "embedding_dim": 300, "attention_heads": 7}
        with pytest.raises(ConfigValidationError, match="not divisible"):
            validate_config(tree)

    def test_bound_error(self):
        with pytest.raises(ConfigValidationError, match="batch_size"):
            validate_config({**self.minimal(), "batch_size": 0})

    def test_aggregate_reporting(self):
        tree = {
            "model_name": "",
            "dataset_name": "demo",
            "batch_size": 0,
            "epochs": 0,
            "learning_rate": -1,
            "dropout": 2,
        }
        with pytest.raises(ConfigValidationError) as err:
            validate_config(tree)
        joined = "\n".join(err.value.violations)
        for key in ("model_name", "batch_size", "epochs", "learning_rate", "dropout"):
            assert key in joined
        assert len(err.value.violations) >= 5

    def test_indivisible_parallel_batch(self):
        tree = {
            **self.minimal(),
            "batch_size": 10,
            "device_plan": {"kind": "simulated_data_parallel", "n_workers": 3},
        }
        with pytest.raises(ConfigValidationError, match="not divisible"):
            validate_config(tree)

    def test_device_plan_shorthand(self):
        config = validate_config({**self.minimal(), "device_plan": "single"})
        assert config.device_plan.kind == "single"

    def test_idempotent(self):
        config = validate_config({**self.minimal(), "epochs": 2, "negatives": 3})
        again = validate_config(config.to_tree())
        assert again == config
        assert again.fingerprint() == config.fingerprint()

    def test_fingerprint_sensitivity(self):
        base = validate_config(self.minimal())
        changed = validate_config({**self.minimal(), "seed": 43})
        assert base.fingerprint() != changed.fingerprint()

    def test_frozen(self):
        config = validate_config(self.minimal())
        with pytest.raises(AttributeError):
            config.epochs = 99


class TestResolveConfig:
    def test_documented_precedence(self, config_fixture_root):
        # default.yaml < dataset overlay < forced args < --set overrides
        config = resolve_config(
            "nrms_like",
            config_fixture_root,
            dataset_name="tiny",
            overrides=["batch_size=8"],
            corpus_dir="/tmp/corpus",
        )
        assert config.epochs == 2  # overlay beat default.yaml
        assert config.batch_size == 8  # --set beat overlay
        assert config.corpus_dir == "/tmp/corpus"  # forced arg
        assert config.learning_rate == pytest.approx(0.01)  # default.yaml survives
        assert config.model_extras["custom_knob"] == 7

    def test_override_beats_forced(self, config_fixture_root):
        config = resolve_config(
            "nrms_like",
            config_fixture_root,
            dataset_name="tiny",
            overrides=["corpus_dir=/override/wins"],
            corpus_dir="/forced",
        )
        assert config.corpus_dir == "/override/wins"

    def test_seed_override(self, config_fixture_root):
        config = resolve_config(
            "nrms_like", config_fixture_root, dataset_name="tiny", overrides=["seed=7"]
        )
        assert config.seed == 7
