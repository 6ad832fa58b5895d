import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from bladeopt.config import (
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    check_key,
    config_from_dict,
    load_config,
    save_config,
)


def test_defaults():
    cfg = config_from_dict({"version": 1})
    assert cfg.n_hh == 9 and cfg.search_dimension == 36 and cfg.optimizer.dimension == 36
    assert cfg.optimizer.cma.lam == 12 and cfg.optimizer.cma.mu == 4 and cfg.optimizer.cma.sigma0 == 0.05
    p = cfg.optimizer.pso
    assert (p.particles, p.omega, p.phi1, p.phi2) == (12, 0.8, 1.7, 1.4)
    assert cfg.fitness.averaging_window == 1000 and cfg.fitness.gamma == 1.4


@pytest.mark.parametrize("n_hh, dim", [(3, 18), (7, 30), (12, 45)])
def test_dimension_derived_from_n_hh(n_hh, dim):
    assert config_from_dict({"version": 1, "n_hh": n_hh}).optimizer.dimension == dim


def test_dimension_mismatch_rejected():
    with pytest.raises(ConfigError, match="dimension"):
        config_from_dict({"version": 1, "n_hh": 9, "optimizer": {"dimension": 30}})


@pytest.mark.parametrize(
    "doc",
    [
        {"version": 2},
        {},
        {"version": 1, "colour": "red"},
        {"version": 1, "optimizer": {"cma": {"lamda": 12}}},
        {"version": 1, "optimizer": {"kind": "de"}},
        {"version": 1, "evaluator": {"kind": "cfd"}},
        {"version": 1, "evaluator": {"kind": "external"}},
        {"version": 1, "budget": {"max_generations": None}},
        {"version": 1, "budget": {"max_evaluations": 5}},
        {"version": 1, "max_parallel": 0},
        {"version": 1, "baseline": {"kind": "file"}},
        {"version": 1, "fitness": {"gamma": 0.9}},
        {"version": 1, "evaluator": {"surrogate": {"base_peak": 0.99}}},
        {"version": 1, "optimizer": []},
    ],
)
def test_invalid_documents(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


def test_overrides():
    doc = apply_overrides({"version": 1}, ["optimizer.seed=7", "n_hh=12", "optimizer.kind=pso", "name=x"])
    cfg = config_from_dict(doc)
    assert cfg.optimizer.seed == 7 and cfg.optimizer.kind == "pso" and cfg.optimizer.dimension == 45
    assert cfg.name == "x"


def test_n_hh_override_updates_explicit_dimension():
    doc = apply_overrides({"version": 1, "optimizer": {"dimension": 36}}, ["n_hh=7"])
    assert config_from_dict(doc).optimizer.dimension == 30


@pytest.mark.parametrize("item", ["optimizer.sead=3", "nope=1", "optimizer=3", "optimizer.cma", "budget.max_generations.x=1"])
def test_bad_override_keys(item):
    with pytest.raises(ConfigError):
        apply_overrides({"version": 1}, [item])


@given(st.sampled_from(["optimizer.seed", "optimizer.cma.lam", "budget.max_generations", "evaluator.surrogate.seed",
                        "search.amplitude_fraction", "fitness.averaging_window", "max_parallel"]))
def test_schema_keys_accepted(key):
    check_key(key)


def test_save_load_round_trip(tmp_path):
    cfg = config_from_dict({"version": 1, "n_hh": 5, "evaluator": {"surrogate": {"heights": [0.1], "centers": [[0.5] * 24]}}})
    path = save_config(cfg, tmp_path / "c.yaml")
    back = load_config(path)
    assert back == cfg
    assert back.evaluator.surrogate.centers == ((0.5,) * 24,)


def test_load_with_overrides(tmp_path):
    (tmp_path / "c.yaml").write_text("version: 1\nn_hh: 3\n")
    assert load_config(tmp_path / "c.yaml", ["optimizer.seed=5"]).optimizer.seed == 5
    (tmp_path / "bad.yaml").write_text("version: [1\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.yaml")
    (tmp_path / "list.yaml").write_text("- 1\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "list.yaml")


def test_generations_from_budget():
    cfg = config_from_dict({"version": 1, "budget": {"max_evaluations": 1441}})
    assert cfg.generations() == 120
    cfg = config_from_dict({"version": 1, "budget": {"max_evaluations": 1441}, "optimizer": {"cma": {"lam": 24}}})
    assert cfg.generations() == 60
    cfg = config_from_dict({"version": 1, "budget": {"max_evaluations": 1441, "max_generations": 7}})
    assert cfg.generations() == 7


def test_to_dict_is_plain_yaml():
    text = yaml.safe_dump(ExperimentConfig().to_dict())
    assert "!!python" not in text
