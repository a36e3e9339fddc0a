"""
参数扫描模块

批量计算宇称-相位曲线、相位不确定度-总光子数曲线（附 SQL/HL 参考列）、
信噪比曲线以及联合光子数分布。扫描点相互独立，可多线程计算，输出始终按横坐标排序。
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from . import analytic
from .config import Config, get_config
from .errors import DivergentUncertaintyError, InfiniteSnrError, NumericalDomainError
from .fock_core import BeamSplitterKind, JointDistribution, apply_beam_splitter, from_diagonal, joint_distribution
from .states import (
    DiagonalCoeffs,
    StateFamily,
    pcs_coeffs,
    solve_param_for_mean,
    tmsvs_coeffs,
    twin_fock_coeffs,
)


# 作图默认网格
DEFAULT_PHI_POINTS = 2001
DEFAULT_TOTAL_MEANS = tuple(float(m) for m in range(2, 61, 2))

# 解析与暴力联合分布的交叉检验容差
JOINT_CROSS_CHECK_TOL = 1e-10

# 总平均光子数不超过该值时默认做联合分布交叉检验
JOINT_AUTO_CHECK_MAX_MEAN = 20.0

PARITY_COLUMNS = ['phi', 'parity', 'cutoff', 'tail_bound']
UNCERTAINTY_COLUMNS = ['total_mean', 'delta_phi', 'sql', 'hl', 'flag',
                       'delta_pi', 'parity', 'cutoff', 'tail_bound']
SNR_COLUMNS = ['total_mean', 'snr', 'log10_snr', 'sql', 'hl', 'flag',
               'parity', 'cutoff', 'tail_bound']

FLAG_DIVERGENT = 'divergent'
FLAG_INFINITE_SNR = 'infinite_snr'
FLAG_NONPOSITIVE_SNR = 'nonpositive_snr'


class InputFamily(Enum):
    """扫描可用的输入态族"""
    TWIN_FOCK = "twin-fock"
    TMSVS = "tmsvs"
    PCS = "pcs"
    NOON = "noon"
    ECS = "ecs"

    @property
    def is_diagonal(self) -> bool:
        return self in (InputFamily.TWIN_FOCK, InputFamily.TMSVS, InputFamily.PCS)


@dataclass(frozen=True)
class ScanRecord:
    """
    扫描结果的一行

    Attributes:
        family: 态族名
        parameters: 态族参数（n、total_mean、xi、zeta、noon_phase 等）
        x: 横坐标（φ 或总平均光子数）
        columns: 命名数值列，无定义的值为 None
        truncation_cutoff: 系数截断
        tail_bound: 截断尾部上界
        flag: 发散等特殊点标记，正常点为空串
    """
    family: str
    parameters: Dict[str, float]
    x: float
    columns: Dict[str, Optional[float]]
    truncation_cutoff: int
    tail_bound: float
    flag: str = ''


def as_family(family) -> InputFamily:
    if isinstance(family, InputFamily):
        return family
    try:
        return InputFamily(str(family))
    except ValueError:
        raise ValueError(f"未知的态族: {family!r}")


def twin_fock_n_for_total(total_mean: float) -> int:
    """总光子数 2N 对应的每模光子数 N，要求 2N 为偶整数"""
    if total_mean < 0 or total_mean != math.floor(total_mean) or int(total_mean) % 2:
        raise ValueError(f"孪生 Fock 态的总光子数必须是非负偶整数: {total_mean}")
    return int(total_mean) // 2


def resolve_coeffs(family, params: Dict[str, Any]) -> DiagonalCoeffs:
    """
    由扫描参数构造对角系数

    Args:
        family: twin-fock / tmsvs / pcs
        params: 参数字典，支持 n（孪生 Fock 每模光子数）、total_mean、
            xi、zeta、cutoff、tolerance

    Returns:
        DiagonalCoeffs: 对应系数

    Raises:
        ValueError: 参数缺失或与态族不符
    """
    family = as_family(family)
    cutoff = params.get('cutoff')
    tolerance = params.get('tolerance')

    if family is InputFamily.TWIN_FOCK:
        if params.get('n') is not None:
            n = params['n']
        elif params.get('total_mean') is not None:
            n = twin_fock_n_for_total(params['total_mean'])
        else:
            raise ValueError("孪生 Fock 态需要参数 n 或 total_mean")
        return twin_fock_coeffs(n, cutoff)

    if family is InputFamily.TMSVS:
        xi = params.get('xi')
        if xi is None:
            xi = solve_param_for_mean(StateFamily.TMSVS, _require_total(params))
        return tmsvs_coeffs(xi, cutoff, tolerance)

    if family is InputFamily.PCS:
        zeta = params.get('zeta')
        if zeta is None:
            zeta = solve_param_for_mean(StateFamily.PCS, _require_total(params))
        return pcs_coeffs(zeta, cutoff, tolerance)

    raise ValueError(f"态族 {family.value} 不是孪生 Fock 叠加态")


def _require_total(params: Dict[str, Any]) -> float:
    total = params.get('total_mean')
    if total is None:
        raise ValueError("需要参数 total_mean")
    return float(total)


def _check_grid(grid: Sequence[float], name: str) -> np.ndarray:
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise ValueError(f"{name} 不能为空")
    if not np.all(np.isfinite(grid)):
        raise ValueError(f"{name} 含非有限值")
    if np.any(np.diff(grid) < 0):
        raise ValueError(f"{name} 必须升序排列")
    return grid


def _clean_params(params: Dict[str, Any]) -> Dict[str, float]:
    return {key: value for key, value in params.items() if value is not None}


class ScanRunner:
    """扫描执行器"""

    def __init__(self, config: Optional[Config] = None):
        """
        初始化扫描执行器

        Args:
            config: 配置实例，默认使用全局配置
        """
        self.config = config or get_config()
        self.workers = self.config.sweep_workers
        self.logger = logging.getLogger(__name__)

    def _map(self, fn: Callable[[float], ScanRecord], items: Iterable[float]) -> List[ScanRecord]:
        items = list(items)
        if self.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                return list(executor.map(fn, items))
        return [fn(item) for item in items]

    def scan_parity(self, family, params: Dict[str, Any],
                    phi_grid: Sequence[float]) -> List[ScanRecord]:
        """
        宇称-相位扫描

        Args:
            family: twin-fock / tmsvs / pcs / noon / ecs
            params: 态族参数（见 resolve_coeffs；noon 需要 n 与 noon_phase，
                ecs 需要 total_mean 即 N̄）
            phi_grid: 升序相位网格

        Returns:
            List[ScanRecord]: 每个 φ 一条记录
        """
        family = as_family(family)
        phis = _check_grid(phi_grid, 'phi_grid')
        params = _clean_params(params)
        self.logger.info(f"开始宇称扫描: {family.value} {params}，{phis.size} 个相位点")

        if family.is_diagonal:
            coeffs = resolve_coeffs(family, params)
            cutoff, tail = coeffs.cutoff, coeffs.tail_mass_bound

            def evaluate(phi: float) -> float:
                return analytic.parity_superposition(coeffs, phi).value
        elif family is InputFamily.NOON:
            if params.get('n') is None:
                raise ValueError("N00N 态需要参数 n")
            n, noon_phase = int(params['n']), float(params.get('noon_phase', 0.0))
            if n < 1:
                raise ValueError(f"N00N 光子数必须为正整数: {n}")
            cutoff, tail = n, 0.0

            def evaluate(phi: float) -> float:
                return analytic.parity_noon(n, noon_phase, phi)
        else:
            n_bar = _require_total(params)
            if n_bar < 0:
                raise ValueError(f"平均光子数必须非负: {n_bar}")
            cutoff, tail = 0, 0.0

            def evaluate(phi: float) -> float:
                return analytic.parity_ecs(n_bar, phi)

        def record(phi: float) -> ScanRecord:
            return ScanRecord(family=family.value, parameters=params, x=float(phi),
                              columns={'parity': evaluate(phi)},
                              truncation_cutoff=cutoff, tail_bound=tail)

        records = self._map(record, phis)
        self.logger.info(f"宇称扫描完成: {len(records)} 条记录")
        return records

    def _coeffs_for_total(self, family: InputFamily, total: float,
                          params: Dict[str, Any]) -> DiagonalCoeffs:
        if not family.is_diagonal:
            raise ValueError(f"态族 {family.value} 不支持按总光子数扫描")
        merged = dict(params)
        merged['total_mean'] = total
        merged.pop('n', None)
        merged.pop('xi', None)
        merged.pop('zeta', None)
        return resolve_coeffs(family, merged)

    def scan_uncertainty(self, family, total_mean_grid: Sequence[float], phi: float,
                         params: Optional[Dict[str, Any]] = None) -> List[ScanRecord]:
        """
        相位不确定度-总平均光子数扫描

        驻点处的发散记为 flag='divergent'，不中断扫描。

        Args:
            family: twin-fock / tmsvs / pcs
            total_mean_grid: 升序总平均光子数网格，全部 > 0
            phi: 工作相位
            params: 额外参数（cutoff、tolerance）

        Returns:
            List[ScanRecord]: 含 delta_phi、delta_pi、parity、sql、hl 列
        """
        family = as_family(family)
        means = _check_grid(total_mean_grid, 'total_mean_grid')
        if np.any(means <= 0):
            raise ValueError("总平均光子数必须全部为正")
        params = _clean_params(params or {})
        self.logger.info(f"开始相位不确定度扫描: {family.value} φ={phi:g}，{means.size} 个点")

        def record(total: float) -> ScanRecord:
            coeffs = self._coeffs_for_total(family, total, params)
            columns = {'sql': analytic.sql(total), 'hl': analytic.hl(total),
                       'parity': analytic.parity_superposition(coeffs, phi).value}
            flag = ''
            try:
                result = analytic.phase_uncertainty(coeffs, phi)
                columns.update(delta_phi=result.delta_phi, delta_pi=result.delta_pi)
            except DivergentUncertaintyError as e:
                self.logger.debug(f"总光子数 {total:g}: {e}")
                columns.update(delta_phi=None, delta_pi=None)
                flag = FLAG_DIVERGENT
            return ScanRecord(family=family.value, parameters={**params, 'phi': phi},
                              x=float(total), columns=columns,
                              truncation_cutoff=coeffs.cutoff,
                              tail_bound=coeffs.tail_mass_bound, flag=flag)

        records = self._map(record, means)
        self.logger.info(f"相位不确定度扫描完成: {len(records)} 条记录")
        return records

    def scan_snr(self, family, total_mean_grid: Sequence[float], phi: float,
                 params: Optional[Dict[str, Any]] = None) -> List[ScanRecord]:
        """
        信噪比-总平均光子数扫描

        Args:
            family: twin-fock / tmsvs / pcs
            total_mean_grid: 升序总平均光子数网格
            phi: 工作相位，不能为 0
            params: 额外参数（cutoff、tolerance）

        Returns:
            List[ScanRecord]: 含 snr、log10_snr、parity、sql、hl 列

        Raises:
            InfiniteSnrError: φ = 0
        """
        if phi == 0.0:
            raise InfiniteSnrError("φ = 0 处纯态输入的 ΔΠ = 0，信噪比发散")
        family = as_family(family)
        means = _check_grid(total_mean_grid, 'total_mean_grid')
        if np.any(means <= 0):
            raise ValueError("总平均光子数必须全部为正")
        params = _clean_params(params or {})
        self.logger.info(f"开始信噪比扫描: {family.value} φ={phi:g}，{means.size} 个点")

        def record(total: float) -> ScanRecord:
            coeffs = self._coeffs_for_total(family, total, params)
            columns = {'sql': analytic.sql(total), 'hl': analytic.hl(total),
                       'parity': analytic.parity_superposition(coeffs, phi).value}
            flag = ''
            try:
                value = analytic.snr(coeffs, phi)
                columns['snr'] = value
                if value > 0:
                    columns['log10_snr'] = math.log10(value)
                else:
                    columns['log10_snr'] = None
                    flag = FLAG_NONPOSITIVE_SNR
            except InfiniteSnrError as e:
                self.logger.debug(f"总光子数 {total:g}: {e}")
                columns.update(snr=None, log10_snr=None)
                flag = FLAG_INFINITE_SNR
            return ScanRecord(family=family.value, parameters={**params, 'phi': phi},
                              x=float(total), columns=columns,
                              truncation_cutoff=coeffs.cutoff,
                              tail_bound=coeffs.tail_mass_bound, flag=flag)

        records = self._map(record, means)
        self.logger.info(f"信噪比扫描完成: {len(records)} 条记录")
        return records

    def export_joint(self, family, params: Dict[str, Any], stage: str = 'after',
                     cross_check: Optional[bool] = None) -> JointDistribution:
        """
        联合光子数分布

        Args:
            family: twin-fock / tmsvs / pcs
            params: 态族参数
            stage: 'before' 或 'after'（第一个分束器前/后）
            cross_check: 是否与暴力传播结果逐点比对；None 时总平均光子数
                不超过 JOINT_AUTO_CHECK_MAX_MEAN 即比对

        Returns:
            JointDistribution: 联合分布

        Raises:
            NumericalDomainError: 交叉检验失败
        """
        if stage not in ('before', 'after'):
            raise ValueError(f"stage 必须为 'before' 或 'after': {stage!r}")
        coeffs = resolve_coeffs(family, _clean_params(params))
        if stage == 'before':
            result = analytic.joint_before_bs(coeffs)
            brute = lambda: joint_distribution(from_diagonal(coeffs))
        else:
            result = analytic.joint_after_bs(coeffs)
            brute = lambda: joint_distribution(
                apply_beam_splitter(from_diagonal(coeffs), BeamSplitterKind.FIRST))

        if cross_check is None:
            cross_check = coeffs.mean_total <= JOINT_AUTO_CHECK_MAX_MEAN * (1.0 + 1e-9)
        if cross_check:
            error = float(np.max(np.abs(result.values - brute().values)))
            if error > JOINT_CROSS_CHECK_TOL:
                raise NumericalDomainError(f"联合分布交叉检验失败: 最大偏差 {error:.3e}")
            self.logger.info(f"联合分布交叉检验通过: 最大偏差 {error:.3e}")

        self.logger.info(f"联合分布 ({stage}): 截断 {result.cutoff}，总概率 {result.total():.15f}")
        return result


def records_to_frame(records: Sequence[ScanRecord], x_name: str,
                     columns: Sequence[str]) -> pd.DataFrame:
    """
    扫描记录转为固定列顺序的表格

    Args:
        records: 扫描记录
        x_name: 横坐标列名（phi 或 total_mean）
        columns: 输出列顺序

    Returns:
        pd.DataFrame: 未定义的值为 NaN，flag 为字符串
    """
    rows = []
    for rec in records:
        row = {x_name: rec.x, 'cutoff': rec.truncation_cutoff,
               'tail_bound': rec.tail_bound, 'flag': rec.flag}
        row.update({key: (np.nan if value is None else value) for key, value in rec.columns.items()})
        rows.append(row)
    frame = pd.DataFrame(rows, columns=list(columns))
    for name in columns:
        if name == 'cutoff':
            frame[name] = frame[name].astype('int64')
        elif name != 'flag':
            frame[name] = frame[name].astype(float)
    return frame


def _default_runner() -> ScanRunner:
    return ScanRunner()


def scan_parity(family, params: Dict[str, Any], phi_grid: Sequence[float]) -> List[ScanRecord]:
    """见 ScanRunner.scan_parity"""
    return _default_runner().scan_parity(family, params, phi_grid)


def scan_uncertainty(family, total_mean_grid: Sequence[float], phi: float,
                     params: Optional[Dict[str, Any]] = None) -> List[ScanRecord]:
    """见 ScanRunner.scan_uncertainty"""
    return _default_runner().scan_uncertainty(family, total_mean_grid, phi, params)


def scan_snr(family, total_mean_grid: Sequence[float], phi: float,
             params: Optional[Dict[str, Any]] = None) -> List[ScanRecord]:
    """见 ScanRunner.scan_snr"""
    return _default_runner().scan_snr(family, total_mean_grid, phi, params)


def export_joint(family, params: Dict[str, Any], stage: str = 'after',
                 cross_check: Optional[bool] = None) -> JointDistribution:
    """见 ScanRunner.export_joint"""
    return _default_runner().export_joint(family, params, stage, cross_check)


def default_phi_grid(phi_min: float = 0.0, phi_max: float = math.pi / 2.0,
                     points: int = DEFAULT_PHI_POINTS) -> np.ndarray:
    """作图默认相位网格"""
    if points < 1:
        raise ValueError(f"points 必须为正: {points}")
    if phi_max < phi_min:
        raise ValueError(f"phi_max 必须不小于 phi_min: {phi_min} > {phi_max}")
    return np.linspace(phi_min, phi_max, points)
