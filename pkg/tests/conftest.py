"""
测试公共设置：把 src/ 加入 sys.path，并提供共享夹具
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / 'src'))

from parity_interferometry.config import get_config  # noqa: E402


def count_sign_changes(values) -> int:
    """相邻取值严格异号的次数"""
    signs = np.sign(np.asarray(values, dtype=float))
    signs = signs[signs != 0]
    return int(np.sum(signs[1:] != signs[:-1]))


@pytest.fixture
def config():
    return get_config()


@pytest.fixture
def small_block_cache(monkeypatch, config):
    """强制分束器块走流式路径"""
    monkeypatch.setattr(config, 'block_cache_cutoff', 2)
    return config
