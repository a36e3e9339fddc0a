"""
结果导出模块

把扫描结果表写为 CSV 或 JSON。CSV 使用固定列顺序、17 位有效数字和 LF 换行，
相同输入产生逐字节相同的文件；JSON 为 {"meta": ..., "rows": [...]} 对象。
"""

import io
import json
import math
import sys
import logging
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from .config import Config, get_config
from .errors import ParityInterferometryError


FLOAT_FORMAT = '%.17g'
SUPPORTED_FORMATS = ('csv', 'json')


class ExportError(ParityInterferometryError):
    """结果导出异常"""
    pass


def _to_builtin(value: Any) -> Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def frame_to_rows(frame: pd.DataFrame) -> list:
    """表格转为 JSON 兼容的行列表，NaN 与无穷写为 null"""
    return [
        {column: _to_builtin(value) for column, value in zip(frame.columns, row)}
        for row in frame.itertuples(index=False, name=None)
    ]


def build_meta(**fields: Any) -> Dict[str, Any]:
    """构造 JSON meta 字段，自动附带工具版本"""
    from . import __version__

    meta = {key: _to_builtin(value) for key, value in fields.items()}
    meta['tool_version'] = __version__
    return meta


class ResultWriter:
    """结果写出器"""

    def __init__(self, config: Optional[Config] = None):
        """
        初始化写出器

        Args:
            config: 配置实例，默认使用全局配置
        """
        self.config = config or get_config()
        self.logger = logging.getLogger(__name__)

    @staticmethod
    def _check_format(fmt: str) -> str:
        fmt = fmt.lower()
        if fmt not in SUPPORTED_FORMATS:
            raise ValueError(f"不支持的输出格式: {fmt}")
        return fmt

    def to_csv_text(self, frame: pd.DataFrame) -> str:
        """渲染为 CSV 文本"""
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT,
                            lineterminator='\n', na_rep='')

    def to_json_text(self, frame: pd.DataFrame, meta: Optional[Dict[str, Any]] = None) -> str:
        """渲染为 JSON 文本"""
        payload = {'meta': meta or {}, 'rows': frame_to_rows(frame)}
        return json.dumps(payload, ensure_ascii=False, indent=2, allow_nan=False) + '\n'

    def render(self, frame: pd.DataFrame, fmt: str = 'csv',
               meta: Optional[Dict[str, Any]] = None) -> str:
        """
        按格式渲染结果

        Args:
            frame: 结果表
            fmt: 'csv' 或 'json'
            meta: JSON 元数据（CSV 忽略）

        Returns:
            str: 渲染后的文本
        """
        if self._check_format(fmt) == 'csv':
            return self.to_csv_text(frame)
        return self.to_json_text(frame, meta)

    def write(self, frame: pd.DataFrame, destination: Union[str, Path, None] = None,
              fmt: str = 'csv', meta: Optional[Dict[str, Any]] = None,
              stream: Optional[TextIO] = None) -> Optional[Path]:
        """
        写出结果到文件或标准输出

        Args:
            frame: 结果表
            destination: 输出路径，None 或 '-' 表示标准输出
            fmt: 'csv' 或 'json'
            meta: JSON 元数据
            stream: destination 为空时的输出流，默认 sys.stdout

        Returns:
            Optional[Path]: 写入的文件路径，写到标准输出时为 None

        Raises:
            ExportError: 写文件失败
        """
        text = self.render(frame, fmt, meta)
        if destination is None or str(destination) == '-':
            (stream or sys.stdout).write(text)
            return None

        path = Path(destination)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
        except OSError as e:
            self.logger.error(f"保存结果失败: {str(e)}")
            raise ExportError(f"保存结果失败: {str(e)}")

        self.logger.info(f"结果已保存到: {path} ({len(frame)} 行)")
        return path

    def save(self, frame: pd.DataFrame, filename: str, fmt: str = 'csv',
             meta: Optional[Dict[str, Any]] = None) -> Path:
        """保存到配置的输出目录"""
        return self.write(frame, self.config.get_output_path(filename), fmt, meta)

    def load(self, path: Union[str, Path], fmt: Optional[str] = None
             ) -> Tuple[Dict[str, Any], pd.DataFrame]:
        """
        读取之前写出的结果

        Args:
            path: 文件路径
            fmt: 格式，默认按扩展名判断

        Returns:
            Tuple[Dict, pd.DataFrame]: (meta, 结果表)；CSV 的 meta 为空

        Raises:
            ExportError: 文件不存在或无法解析
        """
        path = Path(path)
        fmt = self._check_format(fmt or path.suffix.lstrip('.') or 'csv')
        if not path.exists():
            raise ExportError(f"文件不存在: {path}")

        try:
            text = path.read_text(encoding='utf-8')
            if fmt == 'csv':
                return {}, pd.read_csv(io.StringIO(text), keep_default_na=False,
                                       na_values=[''])
            payload = json.loads(text)
            return payload.get('meta', {}), pd.DataFrame(payload['rows'])
        except (OSError, ValueError, KeyError) as e:
            self.logger.error(f"读取结果失败: {str(e)}")
            raise ExportError(f"读取结果失败: {str(e)}")
