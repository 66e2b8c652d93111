#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""配置管理的测试"""

import json

from src.config_manager import FUEL_ENV, ConfigManager


def make_manager(tmp_path, content=None):
    path = tmp_path / 'config.json'
    if content is not None:
        path.write_text(json.dumps(content), encoding='utf-8')
    return ConfigManager(str(path)), path


class TestLoadAndSave:

    def test_defaults_when_missing(self, tmp_path):
        manager, path = make_manager(tmp_path)
        assert manager.get_config() == manager.default_config
        assert not path.exists()

    def test_partial_file_filled_with_defaults(self, tmp_path):
        manager, _ = make_manager(tmp_path, {'fuel': 42, 'budget': {'fuel': 7}})
        config = manager.get_config()
        assert config['fuel'] == 42
        assert config['budget'] == {'max_samples': 50, 'fuel': 7, 'max_term_size': 8}
        assert config['search_depth'] == 6

    def test_broken_file_falls_back(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text('{not json', encoding='utf-8')
        manager = ConfigManager(str(path))
        assert manager.get_config() == manager.default_config

    def test_update_merges_budget_and_saves(self, tmp_path):
        manager, path = make_manager(tmp_path)
        assert manager.update_config({'seed': 9, 'budget': {'max_samples': 3}})
        saved = json.loads(path.read_text(encoding='utf-8'))
        assert saved['seed'] == 9
        assert saved['budget']['max_samples'] == 3
        assert saved['budget']['fuel'] == 500
        assert ConfigManager(str(path)).get_config()['seed'] == 9

    def test_reset(self, tmp_path):
        manager, _ = make_manager(tmp_path, {'fuel': 5})
        assert manager.reset_config()
        assert manager.get_config()['fuel'] == 10000

    def test_save_to_missing_directory(self, tmp_path):
        manager = ConfigManager(str(tmp_path / 'missing' / 'config.json'))
        assert not manager.save_config()


class TestFuel:

    def test_configured_fuel(self, tmp_path, monkeypatch):
        monkeypatch.delenv(FUEL_ENV, raising=False)
        manager, _ = make_manager(tmp_path, {'fuel': 123})
        assert manager.get_fuel() == 123

    def test_environment_overrides(self, tmp_path, monkeypatch):
        monkeypatch.setenv(FUEL_ENV, '77')
        manager, _ = make_manager(tmp_path, {'fuel': 123})
        assert manager.get_fuel() == 77

    def test_invalid_environment_ignored(self, tmp_path, monkeypatch):
        manager, _ = make_manager(tmp_path, {'fuel': 123})
        for value in ('abc', '0', '-3'):
            monkeypatch.setenv(FUEL_ENV, value)
            assert manager.get_fuel() == 123


class TestValidate:

    def test_defaults_valid(self, tmp_path):
        manager, _ = make_manager(tmp_path)
        assert manager.validate_config() == (True, "")

    def test_non_positive_fuel(self, tmp_path):
        manager, _ = make_manager(tmp_path, {'fuel': 0})
        valid, msg = manager.validate_config()
        assert not valid
        assert 'fuel' in msg

    def test_bad_budget(self, tmp_path):
        manager, _ = make_manager(tmp_path, {'budget': {'max_term_size': 'big'}})
        valid, msg = manager.validate_config()
        assert not valid
        assert 'budget.max_term_size' in msg

    def test_boolean_is_not_a_count(self, tmp_path):
        manager, _ = make_manager(tmp_path, {'search_depth': True})
        assert not manager.validate_config()[0]

    def test_log_level(self, tmp_path):
        manager, _ = make_manager(tmp_path, {'log_level': 'LOUD'})
        valid, msg = manager.validate_config()
        assert not valid
        assert 'DEBUG' in msg
