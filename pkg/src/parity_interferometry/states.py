"""
输入态构造模块

提供各类输入态：孪生 Fock 态、双模压缩真空态（TMSVS）、对相干态（PCS）、
单模压缩真空态以及 N00N 态，并给出平均光子数映射及其反函数，供扫描按总平均光子数取参数。
"""

import cmath
import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .config import get_config
from .errors import TruncationError
from .fock_core import TwoModeState, apply_pair_lowering, from_diagonal
from .special_fn import bessel_i_ratio, ln_bessel_i, ln_factorial


logger = logging.getLogger(__name__)

# 归一化检查的舍入余量
NORM_SLACK = 1e-12

# PCS 自动截断要求末项概率低于该值
PCS_LAST_TERM_LIMIT = 1e-16

# 反解参数的相对容差
SOLVE_REL_TOL = 1e-10


class StateFamily(Enum):
    """输入态族"""
    TWIN_FOCK = "twin-fock"
    TMSVS = "tmsvs"
    PCS = "pcs"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SqueezeParam:
    """双模压缩参数 ξ，|ξ| < 1"""
    xi: complex

    def __post_init__(self):
        xi = complex(self.xi)
        if not cmath.isfinite(xi) or abs(xi) >= 1.0:
            raise ValueError(f"压缩参数必须满足 |xi| < 1: xi={self.xi}")
        object.__setattr__(self, 'xi', xi)


@dataclass(frozen=True)
class PairCoherentParam:
    """对相干参数 ζ（有限复数）"""
    zeta: complex

    def __post_init__(self):
        zeta = complex(self.zeta)
        if not cmath.isfinite(zeta):
            raise ValueError(f"对相干参数必须有限: zeta={self.zeta}")
        object.__setattr__(self, 'zeta', zeta)


XiLike = Union[complex, float, SqueezeParam]
ZetaLike = Union[complex, float, PairCoherentParam]


def _as_xi(xi: XiLike) -> complex:
    return xi.xi if isinstance(xi, SqueezeParam) else SqueezeParam(xi).xi


def _as_zeta(zeta: ZetaLike) -> complex:
    return zeta.zeta if isinstance(zeta, PairCoherentParam) else PairCoherentParam(zeta).zeta


@dataclass(frozen=True)
class DiagonalCoeffs:
    """
    孪生 Fock 叠加态 Σ C_N |N⟩|N⟩ 的系数

    Attributes:
        c: 复系数 C_0..C_cutoff（只读）
        family: 态族
        parameter: 态族参数（N、ξ 或 ζ），自定义系数为 None
        tail_mass_bound: 截断丢弃概率的上界
    """
    c: np.ndarray
    family: StateFamily = StateFamily.CUSTOM
    parameter: Optional[complex] = None
    tail_mass_bound: float = 0.0

    def __post_init__(self):
        c = np.array(self.c, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("系数列表不能为空")
        if not 0.0 <= self.tail_mass_bound <= 1.0:
            raise ValueError(f"tail_mass_bound 必须在 [0, 1] 内: {self.tail_mass_bound}")

        captured = float(np.sum(np.abs(c) ** 2))
        if captured > 1.0 + NORM_SLACK or captured < 1.0 - self.tail_mass_bound - NORM_SLACK:
            raise ValueError(
                f"系数平方和 {captured:.15g} 超出 [1 - {self.tail_mass_bound:g}, 1] 范围"
            )

        if self.family is StateFamily.TWIN_FOCK:
            nonzero = np.flatnonzero(c)
            if nonzero.size != 1 or c[nonzero[0]] != 1.0:
                raise ValueError("孪生 Fock 系数必须恰有一个取值为 1 的非零元")

        c.setflags(write=False)
        object.__setattr__(self, 'c', c)

    @property
    def cutoff(self) -> int:
        return self.c.size - 1

    @property
    def probabilities(self) -> np.ndarray:
        """|C_N|²"""
        return np.abs(self.c) ** 2

    @property
    def captured_probability(self) -> float:
        return float(np.sum(self.probabilities))

    @property
    def mean_total(self) -> float:
        """直接求和的总平均光子数 2 Σ N |C_N|²"""
        n = np.arange(self.c.size, dtype=float)
        return float(2.0 * np.sum(n * self.probabilities))


@dataclass(frozen=True)
class SingleModeState:
    """截断单模态"""
    amplitudes: np.ndarray
    tail_mass_bound: float = 0.0

    @property
    def cutoff(self) -> int:
        return len(self.amplitudes) - 1


def twin_fock_coeffs(n: int, cutoff: Optional[int] = None) -> DiagonalCoeffs:
    """
    孪生 Fock 态 |N⟩|N⟩ 的系数

    Args:
        n: 每模光子数 N
        cutoff: 系数截断，默认等于 N

    Returns:
        DiagonalCoeffs: 在 N 处为 1 的 δ 序列

    Raises:
        ValueError: N 为负或 N > cutoff
    """
    if int(n) != n or n < 0:
        raise ValueError(f"孪生 Fock 光子数必须为非负整数: {n}")
    n = int(n)
    cutoff = n if cutoff is None else int(cutoff)
    if n > cutoff:
        raise ValueError(f"孪生 Fock 光子数 {n} 超过截断 {cutoff}")
    c = np.zeros(cutoff + 1, dtype=complex)
    c[n] = 1.0
    return DiagonalCoeffs(c, family=StateFamily.TWIN_FOCK, parameter=n)


def tmsvs_tail_bound(xi: XiLike, cutoff: int) -> float:
    """TMSVS 在截断 cutoff 之外的精确概率 |ξ|^{2(cutoff+1)}"""
    q = abs(_as_xi(xi)) ** 2
    return q ** (cutoff + 1)


def tmsvs_auto_cutoff(xi: XiLike, tolerance: Optional[float] = None) -> int:
    """
    满足几何尾部 |ξ|^{2(c+1)} ≤ tolerance 的最小截断

    Raises:
        TruncationError: 所需截断超过配置上限
    """
    config = get_config()
    tolerance = config.tail_tolerance if tolerance is None else tolerance
    q = abs(_as_xi(xi)) ** 2
    if q == 0.0:
        return 0
    cutoff = max(0, math.ceil(math.log(tolerance) / math.log(q)) - 1)
    # 浮点取整可能差一
    while q ** (cutoff + 1) > tolerance:
        cutoff += 1
    if cutoff > config.max_cutoff:
        raise TruncationError(
            f"|xi|={math.sqrt(q):.6g} 需要截断 {cutoff}，超过上限 {config.max_cutoff}"
        )
    return cutoff


def tmsvs_coeffs(xi: XiLike, cutoff: Optional[int] = None,
                 tolerance: Optional[float] = None) -> DiagonalCoeffs:
    """
    双模压缩真空态系数 C_N = (1−|ξ|²)^{1/2} ξ^N

    Args:
        xi: 压缩参数，|ξ| < 1
        cutoff: 系数截断，缺省时按 tolerance 自动选取
        tolerance: 自动截断的尾部容差，默认取配置值

    Returns:
        DiagonalCoeffs: 截断系数，tail_mass_bound 为精确几何尾部

    Raises:
        ValueError: |ξ| ≥ 1
    """
    xi = _as_xi(xi)
    if cutoff is None:
        cutoff = tmsvs_auto_cutoff(xi, tolerance)
    elif cutoff < 0:
        raise ValueError(f"截断必须非负: {cutoff}")

    q = abs(xi) ** 2
    n = np.arange(cutoff + 1)
    c = math.sqrt(1.0 - q) * np.power(complex(xi), n)
    tail = tmsvs_tail_bound(xi, cutoff)
    logger.debug(f"TMSVS xi={xi:.6g} 截断 {cutoff} 尾部 {tail:.3e}")
    return DiagonalCoeffs(c, family=StateFamily.TMSVS, parameter=xi, tail_mass_bound=tail)


def _pcs_ln_probabilities(modulus: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    return (2.0 * n * math.log(modulus)
            - 2.0 * np.asarray(ln_factorial(n))
            - ln_bessel_i(0, 2.0 * modulus))


def pcs_tail_bound(zeta: ZetaLike, cutoff: int) -> float:
    """
    PCS 截断尾部的比值检验上界

    相邻概率比 |ζ|²/(N+1)² 单调递减，故尾部 ≤ p_c·ρ/(1−ρ′)，
    其中 ρ = |ζ|²/(c+1)²，ρ′ = |ζ|²/(c+2)²；ρ′ ≥ 1 时返回 inf。
    """
    modulus = abs(_as_zeta(zeta))
    if modulus == 0.0:
        return 0.0
    return _ratio_tail(modulus, cutoff, _pcs_ln_probabilities(modulus, cutoff)[-1])


def _ratio_tail(modulus: float, cutoff: int, ln_last: float) -> float:
    rho_next = modulus ** 2 / (cutoff + 2) ** 2
    if rho_next >= 1.0:
        return math.inf
    rho = modulus ** 2 / (cutoff + 1) ** 2
    return math.exp(ln_last) * rho / (1.0 - rho_next)


def pcs_auto_cutoff(zeta: ZetaLike, tolerance: Optional[float] = None) -> int:
    """
    PCS 自动截断：末项概率 < 1e-16 且比值检验尾部 < tolerance 的最小截断

    Raises:
        TruncationError: 所需截断超过配置上限
    """
    config = get_config()
    tolerance = config.tail_tolerance if tolerance is None else tolerance
    modulus = abs(_as_zeta(zeta))
    if modulus == 0.0:
        return 0

    n_max = int(modulus + 20.0 * math.sqrt(modulus + 1.0) + 40)
    while True:
        if n_max > config.max_cutoff:
            n_max = config.max_cutoff
        ln_p = _pcs_ln_probabilities(modulus, n_max)
        start = int(math.floor(modulus))
        for cutoff in range(start, n_max + 1):
            if ln_p[cutoff] >= math.log(PCS_LAST_TERM_LIMIT):
                continue
            if _ratio_tail(modulus, cutoff, ln_p[cutoff]) < tolerance:
                return cutoff
        if n_max >= config.max_cutoff:
            raise TruncationError(
                f"|zeta|={modulus:.6g} 在上限 {config.max_cutoff} 内无法满足尾部容差 {tolerance:g}"
            )
        n_max *= 2


def pcs_coeffs(zeta: ZetaLike, cutoff: Optional[int] = None,
               tolerance: Optional[float] = None) -> DiagonalCoeffs:
    """
    对相干态系数 C_N = N₀ ζ^N / N!，N₀ = 1/√I₀(2|ζ|)

    系数在对数域计算：ln|C_N| = N ln|ζ| − ln N! − ½ ln I₀(2|ζ|)。

    Args:
        zeta: 对相干参数
        cutoff: 系数截断，缺省时自动选取
        tolerance: 尾部容差，默认取配置值

    Returns:
        DiagonalCoeffs: 截断系数

    Raises:
        TruncationError: 给定截断不满足尾部容差
    """
    zeta = _as_zeta(zeta)
    tolerance = get_config().tail_tolerance if tolerance is None else tolerance
    modulus = abs(zeta)

    if cutoff is None:
        cutoff = pcs_auto_cutoff(zeta, tolerance)
    elif cutoff < 0:
        raise ValueError(f"截断必须非负: {cutoff}")

    if modulus == 0.0:
        c = np.zeros(cutoff + 1, dtype=complex)
        c[0] = 1.0
        return DiagonalCoeffs(c, family=StateFamily.PCS, parameter=zeta)

    tail = pcs_tail_bound(zeta, cutoff)
    if not tail < tolerance:
        raise TruncationError(
            f"截断 {cutoff} 对 |zeta|={modulus:.6g} 不足：尾部上界 {tail:.3e} ≥ 容差 {tolerance:g}"
        )

    n = np.arange(cutoff + 1)
    magnitudes = np.exp(0.5 * _pcs_ln_probabilities(modulus, cutoff))
    c = magnitudes * np.exp(1j * cmath.phase(zeta) * n)
    logger.debug(f"PCS zeta={zeta:.6g} 截断 {cutoff} 尾部 {tail:.3e}")
    return DiagonalCoeffs(c, family=StateFamily.PCS, parameter=zeta, tail_mass_bound=tail)


def pcs_eigen_residual(zeta: ZetaLike, cutoff: Optional[int] = None) -> float:
    """
    本征方程残差 ‖âb̂|ζ⟩ − ζ|ζ⟩‖

    截断处 âb̂ 丢失 C_{cutoff} 项，残差约为 |ζ||C_cutoff|，需足够大的截断。
    """
    zeta = _as_zeta(zeta)
    state = from_diagonal(pcs_coeffs(zeta, cutoff))
    lowered = apply_pair_lowering(state)
    return float(np.linalg.norm(lowered - zeta * state.amplitudes))


def smsv_state(xi: XiLike, sign: int, cutoff: int) -> SingleModeState:
    """
    单模压缩真空态 Σ_m (1−|ξ|²)^{1/4} (±1)^m √((2m)!)/(2^m m!) ξ^m |2m⟩

    Args:
        xi: 压缩参数，|ξ| < 1
        sign: +1 或 -1
        cutoff: 光子数截断

    Returns:
        SingleModeState: 只有偶数光子数分量
    """
    xi = _as_xi(xi)
    if sign not in (1, -1):
        raise ValueError(f"sign 必须为 +1 或 -1: {sign}")
    if cutoff < 0:
        raise ValueError(f"截断必须非负: {cutoff}")

    amps = np.zeros(cutoff + 1, dtype=complex)
    m = np.arange(cutoff // 2 + 1)
    q = abs(xi) ** 2
    if q == 0.0:
        amps[0] = 1.0
        return SingleModeState(amps)

    ln_mag = (0.25 * math.log(1.0 - q)
              + 0.5 * np.asarray(ln_factorial(2 * m))
              - m * math.log(2.0)
              - np.asarray(ln_factorial(m))
              + m * math.log(abs(xi)))
    phase = np.power(sign * cmath.exp(1j * cmath.phase(xi)), m)
    amps[2 * m] = np.exp(ln_mag) * phase

    # C(2m,m)/4^m ≤ 1，尾部被几何级数控制
    tail = math.sqrt(1.0 - q) * q ** (m[-1] + 1) / (1.0 - q)
    return SingleModeState(amps, tail_mass_bound=min(1.0, tail))


def noon_state(n: int, noon_phase: float = 0.0, cutoff: Optional[int] = None) -> TwoModeState:
    """
    N00N 态 (|N,0⟩ + e^{iΦ}|0,N⟩)/√2

    Args:
        n: 光子数 N ≥ 1
        noon_phase: 相对相位 Φ
        cutoff: 每模截断，默认 N

    Returns:
        TwoModeState: N00N 态
    """
    if int(n) != n or n < 1:
        raise ValueError(f"N00N 态光子数必须为正整数: {n}")
    n = int(n)
    cutoff = n if cutoff is None else int(cutoff)
    if n > cutoff:
        raise ValueError(f"N00N 光子数 {n} 超过截断 {cutoff}")
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[n, 0] = 1.0 / math.sqrt(2.0)
    amps[0, n] = cmath.exp(1j * noon_phase) / math.sqrt(2.0)
    return TwoModeState(amps)


def tmsvs_mean_total(xi: XiLike) -> float:
    """TMSVS 总平均光子数 2|ξ|²/(1−|ξ|²)"""
    q = abs(_as_xi(xi)) ** 2
    return 2.0 * q / (1.0 - q)


def pcs_mean_total(zeta: ZetaLike) -> float:
    """PCS 总平均光子数 2|ζ| I₁(2|ζ|)/I₀(2|ζ|)"""
    modulus = abs(_as_zeta(zeta))
    return 2.0 * modulus * bessel_i_ratio(2.0 * modulus)


def solve_param_for_mean(family: StateFamily, target_total_mean: float) -> float:
    """
    由目标总平均光子数反解态参数（取正实数）

    TMSVS 用闭式 ξ² = N̄/(1+N̄)；PCS 在单调的均值映射上二分。

    Args:
        family: StateFamily.TMSVS 或 StateFamily.PCS
        target_total_mean: 目标总平均光子数 2N̄

    Returns:
        float: |ξ| 或 |ζ|

    Raises:
        ValueError: 目标非有限或为负，或态族不支持
    """
    target = float(target_total_mean)
    if not math.isfinite(target):
        raise ValueError(f"目标平均光子数必须有限: {target_total_mean}")
    if target < 0.0:
        raise ValueError(f"目标平均光子数必须非负: {target_total_mean}")

    if family is StateFamily.TMSVS:
        n_bar = target / 2.0
        return math.sqrt(n_bar / (1.0 + n_bar))

    if family is not StateFamily.PCS:
        raise ValueError(f"不支持按平均光子数反解的态族: {family}")

    if target == 0.0:
        return 0.0

    tolerance = SOLVE_REL_TOL * (1.0 + target)
    low, high = 0.0, max(1.0, target / 2.0 + 1.0)
    while pcs_mean_total(high) < target:
        low, high = high, 2.0 * high

    mid = 0.5 * (low + high)
    for _ in range(200):
        mid = 0.5 * (low + high)
        achieved = pcs_mean_total(mid)
        if abs(achieved - target) <= tolerance:
            break
        if achieved < target:
            low = mid
        else:
            high = mid
        if high - low <= 1e-15 * high:
            break

    logger.debug(f"PCS 目标均值 {target:g} 对应 |zeta|={mid:.12g}")
    return mid
