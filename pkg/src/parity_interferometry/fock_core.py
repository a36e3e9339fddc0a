"""
双模截断 Fock 空间模块

提供双模态的振幅网格表示，以及干涉仪的精确幺正构件：两种 50:50 分束器约定、
相移器、宇称与光子统计观测量。

分束器按总光子数 N 分块作用（块内维数 N+1），因此总光子数守恒由构造保证。
每块是三对角厄米生成元的矩阵指数，由三对角本征分解求得，块内列正交性不随 N 退化。
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, NamedTuple, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import eigh_tridiagonal, logm

from .config import get_config
from .errors import CutoffMismatchError, TruncationError, UndefinedMandelQError

if TYPE_CHECKING:
    from .states import DiagonalCoeffs


logger = logging.getLogger(__name__)

# 小于该值的振幅直接置零，避免大截断扫描中的非规格化数
FLUSH_THRESHOLD = 1e-300

# 构造态时允许的归一化舍入误差
NORM_SLACK = 1e-12

# 联合分布允许的负舍入误差，超过即视为错误
NEGATIVE_PROB_SLACK = 1e-14

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class BeamSplitterKind(Enum):
    """
    50:50 分束器约定

    FIRST:  â′ = (â + b̂)/√2,  b̂′ = (b̂ − â)/√2，反射波无 π/2 相移
    SECOND: â″ = (â′ + i b̂′)/√2,  b̂″ = (i â′ + b̂′)/√2，反射波带 π/2 相移
    """
    FIRST = "first"
    SECOND = "second"

    @property
    def mode_matrix(self) -> np.ndarray:
        """Heisenberg 绘景下输出湮灭算符 = M · 输入湮灭算符"""
        if self is BeamSplitterKind.FIRST:
            return _SQRT_HALF * np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex)
        return _SQRT_HALF * np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=complex)


@dataclass(frozen=True)
class TwoModeState:
    """
    截断双模纯态 ψ(n_a, n_b)，0 ≤ n_a, n_b ≤ cutoff

    Attributes:
        amplitudes: (cutoff+1) × (cutoff+1) 复振幅网格（只读）
        tail_mass_bound: 截断丢弃概率的上界
    """
    amplitudes: np.ndarray
    tail_mass_bound: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != amps.shape[1] or amps.shape[0] == 0:
            raise ValueError(f"振幅网格必须是非空方阵，实际形状: {amps.shape}")
        if not 0.0 <= self.tail_mass_bound <= 1.0:
            raise ValueError(f"tail_mass_bound 必须在 [0, 1] 内: {self.tail_mass_bound}")

        amps[np.abs(amps) < FLUSH_THRESHOLD] = 0.0
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if norm_sq > 1.0 + NORM_SLACK or norm_sq < 1.0 - self.tail_mass_bound - NORM_SLACK:
            raise ValueError(
                f"态的范数平方 {norm_sq:.15g} 超出 [1 - {self.tail_mass_bound:g}, 1] 范围"
            )

        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def cutoff(self) -> int:
        """每个模式的最大光子数（含）"""
        return self.amplitudes.shape[0] - 1

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class JointDistribution:
    """
    联合光子数分布 P(n₁, n₂)

    Attributes:
        values: 非负实矩阵
        tail_mass_bound: 来源态的截断尾部上界
    """
    values: np.ndarray
    tail_mass_bound: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"联合分布必须是方阵，实际形状: {values.shape}")
        if np.any(values < -NEGATIVE_PROB_SLACK):
            raise ValueError(f"联合分布含负概率: {values.min():.3e}")
        values[values < 0.0] = 0.0
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def cutoff(self) -> int:
        return self.values.shape[0] - 1

    def total(self) -> float:
        return float(self.values.sum())

    def marginal(self, mode: str) -> np.ndarray:
        """
        单模边缘分布

        Args:
            mode: 'a'（n₁）或 'b'（n₂）

        Returns:
            np.ndarray: 边缘概率
        """
        axis = _mode_axis(mode)
        return self.values.sum(axis=1 - axis)

    def to_frame(self) -> pd.DataFrame:
        """
        转换为长表格式，列为 n1, n2, p（按 n1、n2 升序）

        Returns:
            pd.DataFrame: 联合分布表
        """
        n1, n2 = np.indices(self.values.shape)
        return pd.DataFrame({
            'n1': n1.ravel(),
            'n2': n2.ravel(),
            'p': self.values.ravel(),
        })


class ModeStats(NamedTuple):
    """单模光子数统计"""
    mean: float
    variance: float
    mandel_q: float


def _mode_axis(mode: str) -> int:
    if mode not in ('a', 'b'):
        raise ValueError(f"模式必须为 'a' 或 'b': {mode!r}")
    return 0 if mode == 'a' else 1


def fock_state(n_a: int, n_b: int, cutoff: int) -> TwoModeState:
    """
    构造 Fock 态 |n_a⟩|n_b⟩

    Args:
        n_a: a 模光子数
        n_b: b 模光子数
        cutoff: 每模截断

    Returns:
        TwoModeState: Fock 态
    """
    if min(n_a, n_b) < 0 or max(n_a, n_b) > cutoff:
        raise ValueError(f"光子数 ({n_a}, {n_b}) 超出截断 {cutoff}")
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[n_a, n_b] = 1.0
    return TwoModeState(amps)


def from_diagonal(coeffs: "DiagonalCoeffs") -> TwoModeState:
    """
    由孪生 Fock 叠加系数构造双模态 Σ C_N |N⟩|N⟩

    每模截断取系数截断的两倍，使所有被占据的总光子数块在分束后仍然完整。

    Args:
        coeffs: 对角系数

    Returns:
        TwoModeState: ψ(n, n) = C_n，非对角元为零
    """
    c = np.asarray(coeffs.c, dtype=complex)
    if c.size == 0:
        raise ValueError("系数列表不能为空")
    coeff_cutoff = c.size - 1
    amps = np.zeros((2 * coeff_cutoff + 1, 2 * coeff_cutoff + 1), dtype=complex)
    idx = np.arange(coeff_cutoff + 1)
    amps[idx, idx] = c
    return TwoModeState(amps, tail_mass_bound=float(coeffs.tail_mass_bound))


def product_state(amps_a: np.ndarray, amps_b: np.ndarray,
                  tail_mass_bound: float = 0.0) -> TwoModeState:
    """
    构造直积态 |ψ_a⟩ ⊗ |ψ_b⟩

    Args:
        amps_a: a 模振幅
        amps_b: b 模振幅（长度须与 a 相同）
        tail_mass_bound: 两模截断尾部上界之和

    Returns:
        TwoModeState: 直积态
    """
    amps_a = np.asarray(amps_a, dtype=complex)
    amps_b = np.asarray(amps_b, dtype=complex)
    if amps_a.shape != amps_b.shape or amps_a.ndim != 1:
        raise CutoffMismatchError(f"单模振幅长度不一致: {amps_a.shape} vs {amps_b.shape}")
    return TwoModeState(np.outer(amps_a, amps_b), tail_mass_bound=min(1.0, tail_mass_bound))


@lru_cache(maxsize=None)
def _generator(kind: BeamSplitterKind) -> Tuple[float, float, float, float]:
    # 单光子幺正 M = exp(iK)；返回 K_aa, K_bb, |K_ab|, arg K_ab
    k = -1j * logm(kind.mode_matrix)
    k = 0.5 * (k + k.conj().T)
    return (float(k[0, 0].real), float(k[1, 1].real),
            float(abs(k[0, 1])), float(np.angle(k[0, 1])))


def _block_factors(kind: BeamSplitterKind, total: int) -> Tuple[np.ndarray, np.ndarray]:
    # 块 N = exp(iK_N) = V diag(e^{iλ}) V†
    # K_N 在 n_a 基下为三对角厄米阵，相位规范变换后化为实对称阵再对角化
    if total == 0:
        return np.ones((1, 1), dtype=complex), np.ones(1, dtype=complex)
    k_aa, k_bb, hop, chi = _generator(kind)
    n_a = np.arange(total + 1, dtype=float)
    diag = k_aa * n_a + k_bb * (total - n_a)
    off = hop * np.sqrt(n_a[1:] * (total - n_a[:-1]))
    eigvals, vecs = eigh_tridiagonal(diag, off)
    gauge = np.exp(1j * chi * n_a)
    return gauge[:, None] * vecs, np.exp(1j * eigvals)


def _block(kind: BeamSplitterKind, total: int) -> np.ndarray:
    vecs, phases = _block_factors(kind, total)
    return (vecs * phases[None, :]) @ vecs.conj().T


@lru_cache(maxsize=8)
def _cached_blocks(kind: BeamSplitterKind, cutoff: int) -> Tuple[np.ndarray, ...]:
    blocks = tuple(_block(kind, total) for total in range(cutoff + 1))
    for block in blocks:
        block.setflags(write=False)
    logger.debug(f"已缓存 {kind.value} 分束器块，截断 {cutoff}")
    return blocks


def beam_splitter_blocks(kind: BeamSplitterKind, cutoff: int) -> Tuple[np.ndarray, ...]:
    """
    总光子数 N = 0..cutoff 的全部分束器幺正块

    截断不超过配置的缓存上限时，块只构建一次并共享（只读）；否则每次重新构建。

    Args:
        kind: 分束器约定
        cutoff: 最大总光子数

    Returns:
        Tuple[np.ndarray, ...]: (N+1)×(N+1) 块，行列索引为 a 模光子数
    """
    if cutoff <= get_config().block_cache_cutoff:
        return _cached_blocks(kind, cutoff)
    return tuple(_block(kind, total) for total in range(cutoff + 1))


def beam_splitter_block(kind: BeamSplitterKind, total: int) -> np.ndarray:
    """
    取总光子数为 total 的单个分束器块

    Args:
        kind: 分束器约定
        total: 总光子数

    Returns:
        np.ndarray: (total+1)×(total+1) 幺正矩阵
    """
    if total < 0:
        raise ValueError(f"总光子数必须非负: {total}")
    return _block(kind, total)


def apply_beam_splitter(state: TwoModeState, kind: BeamSplitterKind) -> TwoModeState:
    """
    作用 50:50 分束器

    Args:
        state: 输入态
        kind: 分束器约定

    Returns:
        TwoModeState: 输出态，范数与各总光子数块的概率不变

    Raises:
        TruncationError: 振幅落在不完整的块（n_a + n_b > cutoff）
    """
    amps = state.amplitudes
    cutoff = state.cutoff
    totals = np.add.outer(np.arange(cutoff + 1), np.arange(cutoff + 1))
    if np.any(amps[totals > cutoff] != 0):
        raise TruncationError(
            f"振幅位于总光子数超过截断 {cutoff} 的不完整块，分束器无法保持幺正"
        )

    # 超过缓存上限时按本征分解逐块作用，不构造整块矩阵
    cached = beam_splitter_blocks(kind, cutoff) if cutoff <= get_config().block_cache_cutoff else None
    out = np.zeros_like(amps)
    for total in range(cutoff + 1):
        idx = np.arange(total + 1)
        vec = amps[idx, total - idx]
        if not np.any(vec):
            continue
        if cached is not None:
            out[idx, total - idx] = cached[total] @ vec
        else:
            vecs, phases = _block_factors(kind, total)
            out[idx, total - idx] = vecs @ (phases * (vecs.conj().T @ vec))

    return TwoModeState(out, tail_mass_bound=state.tail_mass_bound)


def apply_phase(state: TwoModeState, phi: float) -> TwoModeState:
    """
    b 模相移 ψ(n_a, n_b) ← e^{iφ n_b} ψ(n_a, n_b)

    Args:
        state: 输入态
        phi: 相移（弧度）

    Returns:
        TwoModeState: 相移后的态
    """
    phases = np.exp(1j * phi * np.arange(state.cutoff + 1))
    return TwoModeState(state.amplitudes * phases[None, :],
                        tail_mass_bound=state.tail_mass_bound)


def parity_b(state: TwoModeState) -> float:
    """
    b 模宇称期望 Σ (−1)^{n_b} |ψ|²，按捕获概率归一

    Args:
        state: 双模态

    Returns:
        float: [-1, 1] 内的宇称期望
    """
    probs = np.abs(state.amplitudes) ** 2
    signs = np.where(np.arange(state.cutoff + 1) % 2 == 0, 1.0, -1.0)
    return float(np.sum(probs * signs[None, :]) / np.sum(probs))


def joint_distribution(state: TwoModeState) -> JointDistribution:
    """联合光子数分布 P(n₁, n₂) = |ψ(n₁, n₂)|²"""
    return JointDistribution(np.abs(state.amplitudes) ** 2,
                             tail_mass_bound=state.tail_mass_bound)


def mode_stats(state: TwoModeState, mode: str) -> ModeStats:
    """
    单模边缘光子数的均值、方差与 Mandel Q = 方差/均值 − 1

    Args:
        state: 双模态
        mode: 'a' 或 'b'

    Returns:
        ModeStats: (mean, variance, mandel_q)

    Raises:
        UndefinedMandelQError: 边缘分布为真空（均值为 0）
    """
    marginal = joint_distribution(state).marginal(mode)
    marginal = marginal / marginal.sum()
    n = np.arange(marginal.size, dtype=float)
    mean = float(np.sum(n * marginal))
    if mean == 0.0:
        raise UndefinedMandelQError(f"{mode} 模平均光子数为 0，Mandel Q 无定义")
    variance = float(np.sum((n - mean) ** 2 * marginal))
    return ModeStats(mean=mean, variance=variance, mandel_q=variance / mean - 1.0)


def fidelity(s1: TwoModeState, s2: TwoModeState) -> float:
    """
    保真度 |⟨s1|s2⟩|²

    Raises:
        CutoffMismatchError: 截断不一致
    """
    if s1.cutoff != s2.cutoff:
        raise CutoffMismatchError(f"截断不一致: {s1.cutoff} vs {s2.cutoff}")
    overlap = np.vdot(s1.amplitudes, s2.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


def apply_pair_lowering(state: TwoModeState) -> np.ndarray:
    """
    作用对湮灭算符 âb̂，返回（未归一的）振幅网格

    (âb̂ψ)(n_a, n_b) = √((n_a+1)(n_b+1)) ψ(n_a+1, n_b+1)
    """
    amps = state.amplitudes
    cutoff = state.cutoff
    out = np.zeros_like(amps)
    if cutoff == 0:
        return out
    n = np.arange(1, cutoff + 1, dtype=float)
    out[:-1, :-1] = np.sqrt(np.outer(n, n)) * amps[1:, 1:]
    return out


def number_difference_norm(state: TwoModeState) -> float:
    """‖(n̂_a − n̂_b)ψ‖，孪生 Fock 叠加态严格为 0"""
    n = np.arange(state.cutoff + 1, dtype=float)
    diff = np.subtract.outer(n, n)
    return float(np.linalg.norm(diff * state.amplitudes))
