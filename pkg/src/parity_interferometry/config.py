"""
配置管理模块

负责管理数值截断容差、光束分束器块缓存、扫描并行度、输出目录和日志设置。
"""

import os
import logging
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv


LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Config:
    """配置管理类"""

    def __init__(self, env_file: Optional[str] = None):
        """
        初始化配置

        Args:
            env_file: 环境配置文件路径，默认为 .env
        """
        self.project_root = Path(__file__).parent.parent.parent

        # 加载环境变量
        if env_file:
            load_dotenv(env_file)
        else:
            # 尝试从多个位置加载 .env 文件
            env_paths = [
                self.project_root / '.env',
                self.project_root / '.env.local',
                Path(os.path.expanduser('~/.parity_interferometry.env'))
            ]
            for env_path in env_paths:
                if env_path.exists():
                    load_dotenv(env_path)
                    break

        self._load_config()
        self._setup_logging()
        self._validate_config()

    @staticmethod
    def _read_float(name: str, default: str) -> float:
        raw = os.getenv(name, default)
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"环境变量 {name} 不是有效的数值: {raw!r}")

    @staticmethod
    def _read_int(name: str, default: str) -> int:
        raw = os.getenv(name, default)
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"环境变量 {name} 不是有效的整数: {raw!r}")

    def _load_config(self):
        """加载所有配置项"""
        # 截断配置
        self.tail_tolerance = self._read_float('PARITY_TAIL_TOLERANCE', '1e-12')
        self.max_cutoff = self._read_int('PARITY_MAX_CUTOFF', '4000')
        self.block_cache_cutoff = self._read_int('PARITY_BLOCK_CACHE_CUTOFF', '128')

        # 扫描配置
        self.sweep_workers = self._read_int('PARITY_SWEEP_WORKERS', '1')

        # 目录配置（输出目录在首次写入时创建）
        self.output_dir = Path(os.getenv('PARITY_OUTPUT_DIR', str(self.project_root / 'data')))

        # 日志配置
        self.log_level = os.getenv('LOG_LEVEL', 'INFO').upper()
        self.log_file = os.getenv('PARITY_LOG_FILE', '')

    def _setup_logging(self):
        """设置日志配置（只写 stderr，stdout 留给结果文件）"""
        handlers = [logging.StreamHandler()]
        if self.log_file:
            handlers.append(logging.FileHandler(self.log_file))

        logging.basicConfig(
            level=getattr(logging, self.log_level, logging.INFO),
            format=LOG_FORMAT,
            handlers=handlers
        )

        self.logger = logging.getLogger(__name__)

    def _validate_config(self):
        """验证配置的有效性"""
        if not 0.0 < self.tail_tolerance < 1.0:
            raise ValueError(f"PARITY_TAIL_TOLERANCE 必须在 (0, 1) 内: {self.tail_tolerance}")
        if self.max_cutoff < 1:
            raise ValueError(f"PARITY_MAX_CUTOFF 必须为正: {self.max_cutoff}")
        if self.sweep_workers < 1:
            self.logger.warning("PARITY_SWEEP_WORKERS 小于 1，已改为 1")
            self.sweep_workers = 1
        if self.block_cache_cutoff < 0:
            self.block_cache_cutoff = 0

    def get_output_path(self, filename: str) -> Path:
        """
        获取输出文件路径

        Args:
            filename: 文件名

        Returns:
            Path: 完整的文件路径
        """
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / filename

    def __repr__(self) -> str:
        """配置信息的字符串表示"""
        return f"""Parity Interferometry 配置:
- 截断尾部容差: {self.tail_tolerance:g}
- 最大截断: {self.max_cutoff}
- 分束器块缓存上限: {self.block_cache_cutoff}
- 扫描线程数: {self.sweep_workers}
- 输出目录: {self.output_dir}
- 日志级别: {self.log_level}
"""


# 全局配置实例
config = Config()


def get_config() -> Config:
    """
    获取全局配置实例

    Returns:
        Config: 配置实例
    """
    return config


def set_log_level(level: str):
    """
    设置日志级别

    Args:
        level: 日志级别名称，如 DEBUG、INFO、WARNING
    """
    level = level.upper()
    config.log_level = level
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))
    config.logger.debug(f"日志级别已更新为 {level}")


if __name__ == "__main__":
    print(config)
