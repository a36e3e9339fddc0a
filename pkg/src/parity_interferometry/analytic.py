"""
解析公式模块

对所有输入态给出宇称期望的闭式结果：反正弦系数与联合分布、孪生 Fock 态及其叠加态的宇称、
N00N 态与纠缠相干态的宇称、误差传递的相位不确定度、信噪比以及标准量子极限/海森堡极限。
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DivergentUncertaintyError, InfiniteSnrError
from .fock_core import JointDistribution
from .special_fn import LegendreGapSeries, legendre_series_gap, ln_binomial
from .states import DiagonalCoeffs, SqueezeParam


logger = logging.getLogger(__name__)

# 导数绝对值低于该值视为驻点
STATIONARY_DERIVATIVE = 1e-300

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ParityResult:
    """宇称期望及其对相位的导数"""
    value: float
    derivative_wrt_phi: float
    error_bound: float = 0.0
    # 1 − ⟨Π⟩ 与 1 + ⟨Π⟩，直接由端点距离求得，不经减法
    one_minus: float = math.nan
    one_plus: float = math.nan

    @property
    def delta_pi(self) -> float:
        """宇称标准差 ΔΠ = √((1 − ⟨Π⟩)(1 + ⟨Π⟩))"""
        if math.isnan(self.one_minus) or math.isnan(self.one_plus):
            return _delta_pi(self.value)
        return math.sqrt(max(0.0, self.one_minus) * max(0.0, self.one_plus))


@dataclass(frozen=True)
class PhaseUncertainty:
    """误差传递公式 Δφ = ΔΠ/|∂⟨Π⟩/∂φ|"""
    delta_phi: float
    delta_pi: float
    derivative: float


def _check_k(n: int, k: int):
    if int(n) != n or n < 0:
        raise ValueError(f"N 必须为非负整数: {n}")
    if int(k) != k or not 0 <= k <= n:
        raise ValueError(f"要求 0 ≤ k ≤ N: N={n}, k={k}")


def arcsine_coeff(n: int, k: int) -> float:
    """
    反正弦态系数 A_k^N = 2^{-N}(−1)^{N−k}[C(2k,k)C(2N−2k,N−k)]^{1/2}

    Args:
        n: 孪生 Fock 光子数 N
        k: 0 ≤ k ≤ N

    Returns:
        float: A_k^N
    """
    _check_k(n, k)
    ln_mag = 0.5 * (ln_binomial(2 * k, k) + ln_binomial(2 * n - 2 * k, n - k)) - n * _LN2
    sign = -1.0 if (n - k) % 2 else 1.0
    return sign * math.exp(ln_mag)


def _ln_arcsine_joint(n: int) -> np.ndarray:
    k = np.arange(n + 1)
    return (np.asarray(ln_binomial(2 * k, k))
            + np.asarray(ln_binomial(2 * n - 2 * k, n - k))
            - 2 * n * _LN2)


def arcsine_coeffs(n: int) -> np.ndarray:
    """全部 A_k^N，k = 0..N"""
    _check_k(n, 0)
    k = np.arange(n + 1)
    signs = np.where((n - k) % 2 == 0, 1.0, -1.0)
    return signs * np.exp(0.5 * _ln_arcsine_joint(n))


def arcsine_joint(n: int, k: int) -> float:
    """
    离散反正弦律 P(2k, 2N−2k) = 2^{-2N} C(2k,k) C(2N−2k,N−k)

    Args:
        n: 孪生 Fock 光子数 N
        k: 0 ≤ k ≤ N

    Returns:
        float: 联合概率
    """
    _check_k(n, k)
    ln_p = ln_binomial(2 * k, k) + ln_binomial(2 * n - 2 * k, n - k) - 2 * n * _LN2
    return math.exp(ln_p)


def arcsine_distribution(n: int) -> np.ndarray:
    """全部 P(2k, 2N−2k)，k = 0..N"""
    _check_k(n, 0)
    return np.exp(_ln_arcsine_joint(n))


def parity_twin_fock(n: int, phi: float) -> ParityResult:
    """
    孪生 Fock 输入的宇称 ⟨Π_b⟩ = P_N(cos 2φ)

    Args:
        n: 每模光子数 N
        phi: 相移

    Returns:
        ParityResult: 取值与导数 −2 sin(2φ) P′_N(cos 2φ)
    """
    if int(n) != n or n < 0:
        raise ValueError(f"N 必须为非负整数: {n}")
    series = legendre_at_phase(int(n), phi)
    return ParityResult(value=float(series.values[-1]),
                        derivative_wrt_phi=-2.0 * math.sin(2.0 * phi) * float(series.derivatives[-1]),
                        one_minus=float(series.one_minus[-1]),
                        one_plus=float(series.one_plus[-1]))


def _clamp_unit(x: float) -> float:
    return min(1.0, max(-1.0, x))


def legendre_at_phase(n_max: int, phi: float) -> LegendreGapSeries:
    """
    在 x = cos 2φ 处计算 P_0..P_{n_max}

    到较近端点的距离取 2 sin²φ 或 2 cos²φ，φ 很小（或接近 π/2）时 1 ∓ P_m 不损失精度。

    Args:
        n_max: 最高阶数
        phi: 相移

    Returns:
        LegendreGapSeries: 取值、导数、1 − P_m、1 + P_m
    """
    sin_sq = math.sin(phi) ** 2
    cos_sq = math.cos(phi) ** 2
    if sin_sq <= cos_sq:
        return legendre_series_gap(n_max, min(1.0, 2.0 * sin_sq), endpoint=1)
    return legendre_series_gap(n_max, min(1.0, 2.0 * cos_sq), endpoint=-1)


def parity_superposition(coeffs: DiagonalCoeffs, phi: float) -> ParityResult:
    """
    孪生 Fock 叠加态的宇称 Σ|C_N|² P_N(cos 2φ)

    结果按捕获概率 Σ|C_N|² 归一，与 fock_core.parity_b 一致；
    与未归一求和之差不超过 tail_mass_bound，记为 error_bound 的一部分。

    Args:
        coeffs: 对角系数
        phi: 相移

    Returns:
        ParityResult: 宇称、导数与截断误差上界
    """
    probs = coeffs.probabilities
    captured = float(np.sum(probs))
    series = legendre_at_phase(coeffs.cutoff, phi)
    value = float(np.sum(probs * series.values)) / captured
    derivative = -2.0 * math.sin(2.0 * phi) * float(np.sum(probs * series.derivatives)) / captured
    return ParityResult(value=value, derivative_wrt_phi=derivative,
                        error_bound=2.0 * coeffs.tail_mass_bound,
                        one_minus=float(np.sum(probs * series.one_minus)) / captured,
                        one_plus=float(np.sum(probs * series.one_plus)) / captured)


def parity_noon(n: int, noon_phase: float, phi: float) -> float:
    """
    N00N 态宇称

    偶数 N: (−1)^{N/2} cos(Nφ + Φ)；奇数 N: (−1)^{(N+1)/2} sin(Nφ + Φ)

    Args:
        n: 光子数 N ≥ 1
        noon_phase: 态内相对相位 Φ
        phi: 相移

    Returns:
        float: 宇称期望
    """
    if int(n) != n or n < 1:
        raise ValueError(f"N00N 光子数必须为正整数: {n}")
    n = int(n)
    angle = n * phi + noon_phase
    if n % 2 == 0:
        return (-1.0) ** (n // 2) * math.cos(angle)
    return (-1.0) ** ((n + 1) // 2) * math.sin(angle)


def parity_ecs(n_bar: float, phi: float) -> float:
    """
    纠缠相干态宇称 e^{−N̄(1−cos φ)}/(1+e^{−N̄}) · cos(N̄ sin φ)

    Args:
        n_bar: 平均光子数 N̄ = |α|² ≥ 0
        phi: 相移

    Returns:
        float: 宇称期望
    """
    if not n_bar >= 0.0:
        raise ValueError(f"平均光子数必须非负: {n_bar}")
    return (math.exp(-n_bar * (1.0 - math.cos(phi))) / (1.0 + math.exp(-n_bar))
            * math.cos(n_bar * math.sin(phi)))


def parity_tmsvs_closed_form(xi, phi: float) -> float:
    """
    TMSVS 宇称的生成函数闭式 (1−|ξ|²)/√(1 − 2|ξ|² cos 2φ + |ξ|⁴)

    不做截断，可用于检验 parity_superposition。
    """
    param = xi if isinstance(xi, SqueezeParam) else SqueezeParam(xi)
    q = abs(param.xi) ** 2
    return (1.0 - q) / math.sqrt(1.0 - 2.0 * q * math.cos(2.0 * phi) + q * q)


def _delta_pi(value: float) -> float:
    value = _clamp_unit(value)
    return math.sqrt(max(0.0, (1.0 - value) * (1.0 + value)))


def phase_uncertainty(coeffs: DiagonalCoeffs, phi: float) -> PhaseUncertainty:
    """
    误差传递的相位不确定度

    Args:
        coeffs: 对角系数
        phi: 相移，不能为 0

    Returns:
        PhaseUncertainty: Δφ、ΔΠ 与解析导数

    Raises:
        DivergentUncertaintyError: φ = 0 或导数为零（驻点）
    """
    if phi == 0.0:
        raise DivergentUncertaintyError("φ = 0 处 ΔΠ 与导数同时为零，相位不确定度无定义")
    result = parity_superposition(coeffs, phi)
    if abs(result.derivative_wrt_phi) < STATIONARY_DERIVATIVE:
        raise DivergentUncertaintyError(f"φ = {phi:g} 为宇称驻点，相位不确定度发散")
    delta_pi = result.delta_pi
    return PhaseUncertainty(delta_phi=delta_pi / abs(result.derivative_wrt_phi),
                            delta_pi=delta_pi,
                            derivative=result.derivative_wrt_phi)


def phase_uncertainty_small_angle(coeffs: DiagonalCoeffs) -> float:
    """
    φ → 0 极限 Δφ = 1/√(2⟨N(N+1)⟩)

    孪生 Fock 态给出 1/√(2N(N+1))。
    """
    probs = coeffs.probabilities
    n = np.arange(probs.size, dtype=float)
    moment = float(np.sum(probs * n * (n + 1.0)) / np.sum(probs))
    if moment == 0.0:
        raise DivergentUncertaintyError("真空输入的小角度相位不确定度发散")
    return 1.0 / math.sqrt(2.0 * moment)


def snr(coeffs: DiagonalCoeffs, phi: float) -> float:
    """
    信噪比 ⟨Π_b⟩/ΔΠ_b

    Raises:
        InfiniteSnrError: ΔΠ = 0
    """
    result = parity_superposition(coeffs, phi)
    value = result.value
    delta_pi = result.delta_pi
    if delta_pi == 0.0:
        raise InfiniteSnrError(f"φ = {phi:g} 处 ΔΠ = 0，信噪比发散")
    return value / delta_pi


def joint_before_bs(coeffs: DiagonalCoeffs) -> JointDistribution:
    """
    第一个分束器之前的联合分布 P(N, N) = |C_N|²

    网格截断与 fock_core.from_diagonal 一致（系数截断的两倍）。
    """
    size = 2 * coeffs.cutoff + 1
    values = np.zeros((size, size))
    idx = np.arange(coeffs.cutoff + 1)
    values[idx, idx] = coeffs.probabilities
    return JointDistribution(values, tail_mass_bound=coeffs.tail_mass_bound)


def joint_after_bs(coeffs: DiagonalCoeffs) -> JointDistribution:
    """
    第一个分束器之后的联合分布

    只有偶偶格点非零：P(2k, 2m) = |C_{k+m}|² (A_k^{k+m})²

    Args:
        coeffs: 对角系数

    Returns:
        JointDistribution: 截断为 2 × 系数截断的联合分布
    """
    size = 2 * coeffs.cutoff + 1
    values = np.zeros((size, size))
    probs = coeffs.probabilities
    for n in np.flatnonzero(probs):
        k = np.arange(n + 1)
        values[2 * k, 2 * (n - k)] = probs[n] * arcsine_distribution(int(n))
    return JointDistribution(values, tail_mass_bound=coeffs.tail_mass_bound)


def _check_total(total_n: float):
    if not total_n > 0:
        raise ValueError(f"总光子数必须为正: {total_n}")


def sql(total_n: float) -> float:
    """标准量子极限 1/√(总光子数)"""
    _check_total(total_n)
    return 1.0 / math.sqrt(total_n)


def hl(total_n: float) -> float:
    """海森堡极限 1/(总光子数)"""
    _check_total(total_n)
    return 1.0 / total_n
