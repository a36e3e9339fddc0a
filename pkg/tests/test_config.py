"""
配置与异常层级测试
"""

import logging

import pytest

from parity_interferometry.config import Config, set_log_level
from parity_interferometry.errors import (
    DivergentUncertaintyError,
    NumericalDomainError,
    ParityInterferometryError,
    TruncationError,
)


def test_defaults(monkeypatch):
    for name in ('PARITY_TAIL_TOLERANCE', 'PARITY_MAX_CUTOFF', 'PARITY_SWEEP_WORKERS',
                 'PARITY_BLOCK_CACHE_CUTOFF'):
        monkeypatch.delenv(name, raising=False)
    cfg = Config()
    assert cfg.tail_tolerance == 1e-12
    assert cfg.max_cutoff == 4000
    assert cfg.block_cache_cutoff == 128
    assert cfg.sweep_workers == 1


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv('PARITY_TAIL_TOLERANCE', '1e-9')
    monkeypatch.setenv('PARITY_SWEEP_WORKERS', '0')
    monkeypatch.setenv('PARITY_OUTPUT_DIR', str(tmp_path / 'out'))
    cfg = Config()
    assert cfg.tail_tolerance == 1e-9
    assert cfg.sweep_workers == 1
    path = cfg.get_output_path('x.csv')
    assert path.parent.is_dir()


def test_invalid_values(monkeypatch):
    monkeypatch.setenv('PARITY_MAX_CUTOFF', 'many')
    with pytest.raises(ValueError, match='PARITY_MAX_CUTOFF'):
        Config()
    monkeypatch.setenv('PARITY_MAX_CUTOFF', '100')
    monkeypatch.setenv('PARITY_TAIL_TOLERANCE', '2.0')
    with pytest.raises(ValueError, match='PARITY_TAIL_TOLERANCE'):
        Config()


def test_env_file(monkeypatch, tmp_path):
    monkeypatch.delenv('PARITY_BLOCK_CACHE_CUTOFF', raising=False)
    env_file = tmp_path / 'custom.env'
    env_file.write_text('PARITY_BLOCK_CACHE_CUTOFF=16\n', encoding='utf-8')
    cfg = Config(str(env_file))
    monkeypatch.delenv('PARITY_BLOCK_CACHE_CUTOFF', raising=False)
    assert cfg.block_cache_cutoff == 16


def test_set_log_level(config):
    previous = logging.getLogger().level
    try:
        set_log_level('debug')
        assert config.log_level == 'DEBUG'
        assert logging.getLogger().level == logging.DEBUG
    finally:
        logging.getLogger().setLevel(previous)


def test_error_hierarchy():
    assert issubclass(DivergentUncertaintyError, NumericalDomainError)
    assert issubclass(TruncationError, ValueError)
    assert issubclass(NumericalDomainError, ParityInterferometryError)
