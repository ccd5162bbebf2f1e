import pytest

from tau2 import ModelConfig
from tau2.suites import Check, LEVELS, config_digest, run_level, thread_count


def test_check_relations():
    assert Check("a", "x", 1e-13, 1e-12).passed
    assert not Check("a", "x", float("nan"), 1e-12).passed
    assert Check("a", "x", 0.5, 1e-4, relation=">").passed
    assert not Check("a", "x", 1e-5, 1e-4, relation=">").passed
    assert Check("a", "x", 1e-13, 1e-12).scaled(1e-3).tolerance == pytest.approx(1e-15)
    assert Check("a", "x", 0.5, 1e-4, relation=">").scaled(1e-3).tolerance == 1e-4


def test_digest_stable(cfg1):
    assert config_digest(cfg1) == config_digest(ModelConfig.random(1, 3, 1))
    assert config_digest(cfg1) != config_digest(ModelConfig.random(2, 3, 1))


def test_unknown_level(cfg1):
    with pytest.raises(ValueError):
        run_level(cfg1, "everything")


def test_levels_cover_all_suites():
    assert set(LEVELS["all"]) == {s for k, v in LEVELS.items() if k != "all" for s in v}


def test_thread_count(monkeypatch):
    monkeypatch.setenv("TAU2_THREADS", "x")
    assert thread_count() == 1
    monkeypatch.setenv("TAU2_THREADS", "4")
    assert thread_count() == 4


def test_parallel_equals_serial(cfg1):
    a = run_level(cfg1, "transfer", threads=1).to_json(timing=False)
    b = run_level(cfg1, "transfer", threads=3).to_json(timing=False)
    assert a == b
