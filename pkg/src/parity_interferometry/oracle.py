"""
暴力验证模块

把任意输入态完整地送过 Mach-Zehnder 干涉仪（分束器 → 相移 → 分束器 → b 模宇称），
与解析路径逐点比对；并提供数值微分的相位不确定度、TMSVS 解纠缠检验和完整的验证表。
"""

import math
import logging
from dataclasses import dataclass, asdict
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import eval_legendre, iv

from . import analytic
from .errors import DivergentUncertaintyError, ParityInterferometryError
from .fock_core import (
    BeamSplitterKind,
    TwoModeState,
    apply_beam_splitter,
    apply_phase,
    beam_splitter_block,
    fidelity,
    from_diagonal,
    joint_distribution,
    product_state,
)
from .special_fn import bessel_i, bessel_i_ratio, legendre
from .states import (
    DiagonalCoeffs,
    noon_state,
    pcs_coeffs,
    pcs_eigen_residual,
    smsv_state,
    solve_param_for_mean,
    StateFamily,
    tmsvs_auto_cutoff,
    tmsvs_coeffs,
    twin_fock_coeffs,
)


logger = logging.getLogger(__name__)

# 宇称期望虚部残差上限，超过时告警
IMAG_RESIDUE_WARN = 1e-12

# 数值导数噪声下限
NUMERIC_DERIVATIVE_FLOOR = 1e-10

MAX_STEP = 1e-3

# 验证表中 TMSVS 的系数截断上限
VERIFY_COEFF_CUTOFF = 60

# 验证表中叠加态的总平均光子数
VERIFY_TOTAL_MEANS = (2.0, 10.0, 30.0)


@dataclass(frozen=True)
class VerificationResult:
    """验证表中的一行"""
    check: str
    max_error: float
    threshold: float
    passed: bool


def mzi_output_state(state: TwoModeState, phi: float,
                     first: BeamSplitterKind = BeamSplitterKind.FIRST,
                     second: BeamSplitterKind = BeamSplitterKind.SECOND) -> TwoModeState:
    """干涉仪输出态 BS₂ · 相移(φ) · BS₁ · 输入"""
    after_first = apply_beam_splitter(state, first)
    return apply_beam_splitter(apply_phase(after_first, phi), second)


def _parity_expectation(state: TwoModeState) -> complex:
    amps = state.amplitudes
    signs = np.where(np.arange(state.cutoff + 1) % 2 == 0, 1.0, -1.0)
    return complex(np.vdot(amps, amps * signs[None, :]) / np.vdot(amps, amps))


def mzi_parity_expectation(state: TwoModeState, phi: float,
                           second: BeamSplitterKind = BeamSplitterKind.SECOND) -> complex:
    """未取实部的宇称期望 ⟨ψ_out|Π_b|ψ_out⟩/⟨ψ_out|ψ_out⟩"""
    return _parity_expectation(mzi_output_state(state, phi, second=second))


def mzi_parity_numeric(state: TwoModeState, phi: float,
                       second: BeamSplitterKind = BeamSplitterKind.SECOND) -> float:
    """
    暴力计算干涉仪输出的 b 模宇称

    Args:
        state: 输入双模态
        phi: 相移
        second: 第二个分束器约定，默认带 π/2 相移的 SECOND；
            传 FIRST 时作为负对照

    Returns:
        float: ⟨Π_b⟩
    """
    expectation = mzi_parity_expectation(state, phi, second)
    if abs(expectation.imag) > IMAG_RESIDUE_WARN:
        logger.warning(f"宇称期望虚部残差 {expectation.imag:.3e} 超过 {IMAG_RESIDUE_WARN:g}")
    return expectation.real


def noon_parity_numeric(n: int, noon_phase: float, phi: float) -> float:
    """N00N 态直接送入相移与第二个分束器后的 b 模宇称"""
    state = noon_state(n, noon_phase)
    output = apply_beam_splitter(apply_phase(state, phi), BeamSplitterKind.SECOND)
    return _parity_expectation(output).real


def default_step(phi: float) -> float:
    """中心差分步长 max(1e-5, φ/10)，不超过 1e-3"""
    return min(MAX_STEP, max(1e-5, abs(phi) / 10.0))


def phase_uncertainty_numeric(state: TwoModeState, phi: float,
                              h: Optional[float] = None) -> float:
    """
    数值微分的相位不确定度 ΔΠ/|中心差分|

    Args:
        state: 输入双模态
        phi: 相移
        h: 差分步长，0 < h ≤ 1e-3，默认 default_step(phi)

    Returns:
        float: Δφ

    Raises:
        DivergentUncertaintyError: 数值导数低于噪声下限
    """
    h = default_step(phi) if h is None else h
    if not 0.0 < h <= MAX_STEP:
        raise ValueError(f"差分步长必须满足 0 < h ≤ {MAX_STEP:g}: h={h}")

    value = mzi_parity_numeric(state, phi)
    derivative = (mzi_parity_numeric(state, phi + h) - mzi_parity_numeric(state, phi - h)) / (2.0 * h)
    if abs(derivative) < NUMERIC_DERIVATIVE_FLOOR:
        raise DivergentUncertaintyError(
            f"φ = {phi:g} 处数值导数 {derivative:.3e} 低于噪声下限，相位不确定度发散"
        )
    value = min(1.0, max(-1.0, value))
    return math.sqrt(max(0.0, (1.0 - value) * (1.0 + value))) / abs(derivative)


def disentanglement_check(xi: complex, cutoff: Optional[int] = None) -> float:
    """
    TMSVS 经第一个分束器后与 |ξ⟩_a|−ξ⟩_b 直积态的保真度

    Args:
        xi: 压缩参数
        cutoff: 系数截断，默认自动选取

    Returns:
        float: 保真度（截断尾部使其略小于 1）
    """
    coeffs = tmsvs_coeffs(xi, cutoff)
    after = apply_beam_splitter(from_diagonal(coeffs), BeamSplitterKind.FIRST)
    mode_a = smsv_state(xi, 1, after.cutoff)
    mode_b = smsv_state(xi, -1, after.cutoff)
    product = product_state(mode_a.amplitudes, mode_b.amplitudes,
                            tail_mass_bound=mode_a.tail_mass_bound + mode_b.tail_mass_bound)
    result = fidelity(after, product)
    logger.debug(f"解纠缠检验 xi={xi} 截断 {coeffs.cutoff} 保真度 {result:.15f}")
    return result


def _max_abs(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


def _check_twin_fock_parity(max_n: int, tolerance: float) -> VerificationResult:
    phis = np.linspace(0.0, math.pi / 2.0, 101)
    errors = []
    for n in range(max_n + 1):
        state = from_diagonal(twin_fock_coeffs(n))
        for phi in phis:
            reference = analytic.parity_twin_fock(n, phi).value
            errors.append(abs(mzi_parity_numeric(state, phi) - reference))
    max_error = _max_abs(errors)
    return VerificationResult('twin_fock_parity', max_error, tolerance, max_error <= tolerance)


def _verification_coeffs() -> List[DiagonalCoeffs]:
    coeffs = []
    for total in VERIFY_TOTAL_MEANS:
        xi = solve_param_for_mean(StateFamily.TMSVS, total)
        coeffs.append(tmsvs_coeffs(xi, min(VERIFY_COEFF_CUTOFF, tmsvs_auto_cutoff(xi))))
        coeffs.append(pcs_coeffs(solve_param_for_mean(StateFamily.PCS, total)))
    return coeffs


def _check_superposition_parity(tolerance: float) -> VerificationResult:
    # 两条路径都按捕获概率归一，截断尾部不进入误差
    errors = []
    for coeffs in _verification_coeffs():
        state = from_diagonal(coeffs)
        for phi in (1e-4, 0.05, 0.3):
            expectation = mzi_parity_expectation(state, phi)
            errors.append(abs(analytic.parity_superposition(coeffs, phi).value - expectation.real))
            errors.append(abs(expectation.imag))
    max_error = _max_abs(errors)
    return VerificationResult('superposition_parity', max_error, tolerance, max_error <= tolerance)


def _central_difference(fn: Callable[[float], float], phi: float, h: float) -> float:
    return (fn(phi + h) - fn(phi - h)) / (2.0 * h)


def _check_derivative_consistency(max_n: int) -> VerificationResult:
    threshold = 1e-4
    h = 1e-6
    errors = []
    families = [twin_fock_coeffs(n) for n in range(1, max_n + 1)] + _verification_coeffs()
    for coeffs in families:
        for phi in (0.05, 0.1, 0.3):
            derivative = analytic.parity_superposition(coeffs, phi).derivative_wrt_phi
            if abs(derivative) <= 1e-3:
                continue
            numeric = _central_difference(
                lambda p: analytic.parity_superposition(coeffs, p).value, phi, h)
            errors.append(abs(numeric - derivative) / abs(derivative))

    # 两条路径的相位不确定度在 φ = 1e-4 处一致
    coeffs = twin_fock_coeffs(5)
    reference = analytic.phase_uncertainty(coeffs, 1e-4).delta_phi
    numeric = phase_uncertainty_numeric(from_diagonal(coeffs), 1e-4, h=1e-5)
    errors.append(abs(numeric - reference) / reference)

    max_error = _max_abs(errors)
    return VerificationResult('derivative_consistency', max_error, threshold, max_error <= threshold)


def _check_disentanglement() -> VerificationResult:
    threshold = 1e-6
    max_error = _max_abs(1.0 - disentanglement_check(xi) for xi in (0.3, 0.5, 0.8))
    return VerificationResult('disentanglement_fidelity', max_error, threshold, max_error <= threshold)


def _check_joint_distribution() -> VerificationResult:
    threshold = 1e-10
    families = [twin_fock_coeffs(10)]
    for total in (4.0, 20.0):
        xi = solve_param_for_mean(StateFamily.TMSVS, total)
        families.append(tmsvs_coeffs(xi, min(VERIFY_COEFF_CUTOFF, tmsvs_auto_cutoff(xi))))
        families.append(pcs_coeffs(solve_param_for_mean(StateFamily.PCS, total)))
    errors = []
    for coeffs in families:
        expected = analytic.joint_after_bs(coeffs).values
        actual = joint_distribution(apply_beam_splitter(from_diagonal(coeffs), BeamSplitterKind.FIRST)).values
        errors.append(float(np.max(np.abs(expected - actual))))
    max_error = _max_abs(errors)
    return VerificationResult('joint_distribution', max_error, threshold, max_error <= threshold)


def _check_pcs_eigen_residual() -> VerificationResult:
    threshold = 1e-10
    zetas = (1.0, 3.0 * np.exp(0.4j), 6.0)
    max_error = _max_abs(pcs_eigen_residual(zeta, 80) for zeta in zetas)
    return VerificationResult('pcs_eigen_residual', max_error, threshold, max_error <= threshold)


def _check_unitarity() -> VerificationResult:
    threshold = 1e-12
    errors = []
    for kind in BeamSplitterKind:
        for total in (*range(41), 120):
            block = beam_splitter_block(kind, total)
            errors.append(float(np.max(np.abs(block.conj().T @ block - np.eye(total + 1)))))
    max_error = _max_abs(errors)
    return VerificationResult('beam_splitter_unitarity', max_error, threshold, max_error <= threshold)


def _random_state(cutoff: int, seed: int = 7) -> TwoModeState:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(cutoff + 1, cutoff + 1)) + 1j * rng.normal(size=(cutoff + 1, cutoff + 1))
    amps[np.add.outer(np.arange(cutoff + 1), np.arange(cutoff + 1)) > cutoff] = 0.0
    return TwoModeState(amps / np.linalg.norm(amps))


def _block_probabilities(state: TwoModeState) -> np.ndarray:
    probs = np.abs(state.amplitudes) ** 2
    totals = np.add.outer(np.arange(state.cutoff + 1), np.arange(state.cutoff + 1))
    return np.bincount(totals.ravel(), weights=probs.ravel(), minlength=2 * state.cutoff + 1)


def _check_norm_and_blocks() -> List[VerificationResult]:
    threshold = 1e-12
    state = _random_state(20)
    norm_errors, block_errors = [], []
    for kind in BeamSplitterKind:
        out = apply_phase(apply_beam_splitter(state, kind), 0.37)
        norm_errors.append(abs(math.sqrt(out.norm_squared) - math.sqrt(state.norm_squared)))
        block_errors.append(float(np.max(np.abs(_block_probabilities(out) - _block_probabilities(state)))))
    norm_error, block_error = _max_abs(norm_errors), _max_abs(block_errors)
    return [
        VerificationResult('norm_preservation', norm_error, threshold, norm_error <= threshold),
        VerificationResult('block_conservation', block_error, threshold, block_error <= threshold),
    ]


def _check_legendre() -> VerificationResult:
    threshold = 1e-11
    errors = []
    for x in np.linspace(-1.0, 1.0, 41):
        for n in range(0, 51):
            ev = legendre(n, x)
            errors.append(abs(ev.value - float(eval_legendre(n, x))))
            errors.append(max(0.0, abs(ev.value) - 1.0))
    max_error = _max_abs(errors)
    return VerificationResult('legendre_oracle', max_error, threshold, max_error <= threshold)


def _check_bessel() -> VerificationResult:
    threshold = 1e-12
    errors = []
    xs = [0.0, 0.5, 1.0, 4.0, 10.0, 29.0, 31.0, 60.0, 120.0, 200.0]
    for x in xs:
        for order in (0, 1):
            expected = float(iv(order, x))
            if expected == 0.0:
                errors.append(abs(bessel_i(order, x)))
            else:
                errors.append(abs(bessel_i(order, x) / expected - 1.0))
    ratios = [bessel_i_ratio(x) for x in xs]
    if any(later <= earlier for earlier, later in zip(ratios, ratios[1:])):
        errors.append(math.inf)
    max_error = _max_abs(errors)
    return VerificationResult('bessel_series', max_error, threshold, max_error <= threshold)


def _check_negative_control() -> VerificationResult:
    # 用无相移分束器作为第二个分束器时奇数 N 的匹配必须被破坏
    threshold = 1e-3
    state = from_diagonal(twin_fock_coeffs(1))
    mismatch = abs(mzi_parity_numeric(state, 0.2, second=BeamSplitterKind.FIRST)
                   - analytic.parity_twin_fock(1, 0.2).value)
    return VerificationResult('second_splitter_negative_control', mismatch, threshold, mismatch > threshold)


def _run_check(names: Sequence[str], threshold: float,
               check: Callable[[], object]) -> List[VerificationResult]:
    # 单项检验抛出的数值错误记为未通过，不中断整张表
    try:
        outcome = check()
    except (ParityInterferometryError, ValueError) as e:
        logger.error(f"检验 {'/'.join(names)} 异常: {e}")
        return [VerificationResult(name, math.inf, threshold, False) for name in names]
    return list(outcome) if isinstance(outcome, list) else [outcome]


def run_verification(max_n: int = 12, tolerance: float = 1e-8) -> List[VerificationResult]:
    """
    运行完整验证表

    Args:
        max_n: 孪生 Fock 检验的最大光子数
        tolerance: 解析与暴力宇称比对的容差

    Returns:
        List[VerificationResult]: 每项检验一行
    """
    if max_n < 0:
        raise ValueError(f"max_n 必须非负: {max_n}")
    if not tolerance > 0.0:
        raise ValueError(f"tolerance 必须为正: {tolerance}")

    checks = [
        (('twin_fock_parity',), tolerance, lambda: _check_twin_fock_parity(max_n, tolerance)),
        (('superposition_parity',), tolerance, lambda: _check_superposition_parity(tolerance)),
        (('derivative_consistency',), 1e-4, lambda: _check_derivative_consistency(max_n)),
        (('disentanglement_fidelity',), 1e-6, _check_disentanglement),
        (('joint_distribution',), 1e-10, _check_joint_distribution),
        (('pcs_eigen_residual',), 1e-10, _check_pcs_eigen_residual),
        (('beam_splitter_unitarity',), 1e-12, _check_unitarity),
        (('norm_preservation', 'block_conservation'), 1e-12, _check_norm_and_blocks),
        (('legendre_oracle',), 1e-11, _check_legendre),
        (('bessel_series',), 1e-12, _check_bessel),
        (('second_splitter_negative_control',), 1e-3, _check_negative_control),
    ]
    results = []
    for names, threshold, check in checks:
        results.extend(_run_check(names, threshold, check))

    for result in results:
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"{result.check}: max_error={result.max_error:.3e} "
                          f"threshold={result.threshold:g} passed={result.passed}")
    return results


def verification_frame(results: List[VerificationResult]) -> pd.DataFrame:
    """验证结果转为表格，列为 check, max_error, threshold, passed"""
    return pd.DataFrame([asdict(result) for result in results],
                        columns=['check', 'max_error', 'threshold', 'passed'])
