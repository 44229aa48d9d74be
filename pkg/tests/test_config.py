import logging

import pytest

from core import config
from core.config import Settings, get_environment_info


def test_defaults():
    s = Settings(_env_file=None)
    assert s.THREADS >= 1
    assert s.DEFAULT_SCENARIO.endswith("reference.json")


def test_env_prefix(monkeypatch):
    monkeypatch.setenv("VSAFE_THREADS", "3")
    monkeypatch.setenv("VSAFE_LOG_LEVEL", "debug")
    s = Settings(_env_file=None)
    assert s.THREADS == 3
    assert s.log_level == logging.DEBUG


@pytest.mark.parametrize("name,value", [("VSAFE_THREADS", "0"), ("VSAFE_LOG_LEVEL", "VERBOSE")])
def test_invalid_settings_rejected(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError):
        Settings(_env_file=None)


def test_reload_picks_up_environment(monkeypatch):
    original = config.settings
    monkeypatch.setenv("VSAFE_OUTPUT_DIR", "otra_salida")
    try:
        assert config.reload_settings().OUTPUT_DIR == "otra_salida"
    finally:
        config.settings = original


def test_environment_info_keys():
    info = get_environment_info()
    assert {"app", "threads", "output_dir", "log_level"} <= set(info)


def test_get_settings_follows_reload(monkeypatch):
    original = config.settings
    monkeypatch.setenv("VSAFE_THREADS", "4")
    try:
        reloaded = config.reload_settings()
        assert config.get_settings() is reloaded
        assert config.get_settings().THREADS == 4
    finally:
        config.settings = original
    assert config.get_settings() is original
