"""
特殊函数模块

提供所有公式所需的数值稳定特殊函数：对数阶乘、对数二项式系数、
Legendre 多项式及其导数、零阶与一阶修正 Bessel 函数。

阶乘与二项式全部在对数域计算，尽量晚地取指数。
"""

import math
import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp


logger = logging.getLogger(__name__)

ArrayLike = Union[int, float, np.ndarray]

# Bessel 级数终止阈值：项 < 阈值 × 部分和
SERIES_REL_TOL = 1e-17

# x 超过该值时改用对数域累加
BESSEL_LOG_DOMAIN_X = 30.0


@dataclass(frozen=True)
class LegendreEval:
    """Legendre 多项式在一点的取值"""
    n: int
    x: float
    value: float
    derivative: float


def _as_nonnegative_int_array(name: str, n: ArrayLike) -> np.ndarray:
    arr = np.asarray(n)
    if arr.dtype.kind not in 'iu':
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError(f"{name} 必须为整数: {n}")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ValueError(f"{name} 必须非负: {n}")
    return arr


def _scalar_or_array(result: np.ndarray):
    if np.ndim(result) == 0:
        return float(result)
    return result


def ln_factorial(n: ArrayLike):
    """
    计算 ln(n!)

    Args:
        n: 非负整数（或整数数组）

    Returns:
        float 或 np.ndarray: ln(n!)，n ≤ 1 时精确为 0.0
    """
    arr = _as_nonnegative_int_array('n', n)
    result = np.where(arr < 2, 0.0, gammaln(arr + 1.0))
    return _scalar_or_array(result)


def ln_binomial(n: ArrayLike, k: ArrayLike):
    """
    计算 ln C(n, k)

    Args:
        n: 非负整数
        k: 非负整数，要求 k ≤ n

    Returns:
        float 或 np.ndarray: ln C(n, k)

    Raises:
        ValueError: k > n
    """
    n_arr = _as_nonnegative_int_array('n', n)
    k_arr = _as_nonnegative_int_array('k', k)
    if np.any(k_arr > n_arr):
        raise ValueError(f"二项式系数要求 k ≤ n: n={n}, k={k}")
    result = (np.asarray(ln_factorial(n_arr))
              - np.asarray(ln_factorial(k_arr))
              - np.asarray(ln_factorial(n_arr - k_arr)))
    return _scalar_or_array(result)


def _check_legendre_args(n: int, x: float):
    if int(n) != n or n < 0:
        raise ValueError(f"Legendre 阶数必须为非负整数: {n}")
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"Legendre 自变量必须在 [-1, 1] 内: {x}")


def legendre_series(n_max: int, x: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    用向上三项递推计算 P_0..P_{n_max} 及其导数

    (m+1)P_{m+1} = (2m+1)xP_m − mP_{m−1}；导数由
    (1−x²)P′_n = n(P_{n−1} − xP_n) 得到，x = ±1 处取解析极限。

    Args:
        n_max: 最高阶数
        x: 自变量，[-1, 1]

    Returns:
        Tuple[np.ndarray, np.ndarray]: (取值数组, 导数数组)，长度 n_max + 1
    """
    _check_legendre_args(n_max, x)
    n_max = int(n_max)
    x = float(x)

    values = np.empty(n_max + 1)
    values[0] = 1.0
    if n_max >= 1:
        values[1] = x
    for m in range(1, n_max):
        values[m + 1] = ((2 * m + 1) * x * values[m] - m * values[m - 1]) / (m + 1)

    orders = np.arange(n_max + 1, dtype=float)
    if x == 1.0:
        derivatives = orders * (orders + 1.0) / 2.0
    elif x == -1.0:
        signs = np.where(np.arange(n_max + 1) % 2 == 0, -1.0, 1.0)
        derivatives = signs * orders * (orders + 1.0) / 2.0
    else:
        derivatives = np.zeros(n_max + 1)
        one_minus_x2 = (1.0 - x) * (1.0 + x)
        derivatives[1:] = orders[1:] * (values[:-1] - x * values[1:]) / one_minus_x2

    return values, derivatives


def legendre(n: int, x: float) -> LegendreEval:
    """
    计算 Legendre 多项式 P_n(x) 及其导数

    Args:
        n: 阶数
        x: 自变量，[-1, 1]

    Returns:
        LegendreEval: 取值与导数
    """
    values, derivatives = legendre_series(n, x)
    return LegendreEval(n=int(n), x=float(x),
                        value=float(values[-1]), derivative=float(derivatives[-1]))


class LegendreGapSeries(NamedTuple):
    """端点附近的 Legendre 序列，附带 1 − P_m 与 1 + P_m"""
    values: np.ndarray
    derivatives: np.ndarray
    one_minus: np.ndarray
    one_plus: np.ndarray


def legendre_series_gap(n_max: int, gap: float, endpoint: int = 1) -> LegendreGapSeries:
    """
    以到端点的距离为自变量计算 P_0..P_{n_max}，x = endpoint · (1 − gap)

    对 R_m = (1 − P_m(1−gap))/gap 做三项递推
    (m+1)R_{m+1} = (2m+1)(1 + xR_m) − mR_{m−1}，R_0 = 0，R_1 = 1，
    因此 1 − P_m 与导数在 gap → 0 时保持相对精度；endpoint = −1 时用
    P_m(−x) = (−1)^m P_m(x) 反射。

    Args:
        n_max: 最高阶数
        gap: 到端点的距离，[0, 1]
        endpoint: 1 或 −1

    Returns:
        LegendreGapSeries: 取值、导数、1 − P_m、1 + P_m
    """
    if int(n_max) != n_max or n_max < 0:
        raise ValueError(f"Legendre 阶数必须为非负整数: {n_max}")
    if not 0.0 <= gap <= 1.0:
        raise ValueError(f"端点距离必须在 [0, 1] 内: {gap}")
    if endpoint not in (1, -1):
        raise ValueError(f"端点必须为 1 或 -1: {endpoint}")
    n_max = int(n_max)
    gap = float(gap)
    x = 1.0 - gap

    ratios = np.zeros(n_max + 1)
    if n_max >= 1:
        ratios[1] = 1.0
    for m in range(1, n_max):
        ratios[m + 1] = ((2 * m + 1) * (1.0 + x * ratios[m]) - m * ratios[m - 1]) / (m + 1)

    near = gap * ratios
    orders = np.arange(n_max + 1, dtype=float)
    derivatives = np.zeros(n_max + 1)
    derivatives[1:] = orders[1:] * ((1.0 - near[1:]) + ratios[1:] - ratios[:-1]) / (2.0 - gap)

    if endpoint == 1:
        return LegendreGapSeries(1.0 - near, derivatives, near, 2.0 - near)
    odd = np.arange(n_max + 1) % 2 == 1
    signs = np.where(odd, -1.0, 1.0)
    return LegendreGapSeries(values=signs * (1.0 - near),
                             derivatives=-signs * derivatives,
                             one_minus=np.where(odd, 2.0 - near, near),
                             one_plus=np.where(odd, near, 2.0 - near))


def _check_bessel_args(order: int, x: float):
    if order not in (0, 1):
        raise ValueError(f"仅支持 0 阶和 1 阶修正 Bessel 函数: order={order}")
    if not x >= 0.0:
        raise ValueError(f"修正 Bessel 函数自变量必须非负: x={x}")


def _bessel_series_direct(order: int, x: float) -> float:
    half = x / 2.0
    quarter_sq = half * half
    term = half if order == 1 else 1.0
    total = term
    k = 0
    while True:
        k += 1
        term *= quarter_sq / (k * (k + order))
        total += term
        if term < SERIES_REL_TOL * total:
            return total


def _ln_bessel_series(order: int, x: float) -> float:
    # 项在 k ≈ x/2 附近取峰值，逐段扩展直到末项满足终止条件
    half = x / 2.0
    ln_half = math.log(half)
    n_terms = int(half + 40.0 * math.sqrt(half) + 50)
    while True:
        k = np.arange(n_terms)
        ln_terms = (2 * k + order) * ln_half - gammaln(k + 1.0) - gammaln(k + order + 1.0)
        ln_total = logsumexp(ln_terms)
        if ln_terms[-1] < math.log(SERIES_REL_TOL) + ln_total:
            return float(ln_total)
        n_terms *= 2


def ln_bessel_i(order: int, x: float) -> float:
    """
    计算 ln I_ν(x)，ν ∈ {0, 1}

    Args:
        order: 阶数 0 或 1
        x: 自变量，x > 0（order=1 时 x=0 返回 -inf）

    Returns:
        float: ln I_ν(x)
    """
    _check_bessel_args(order, x)
    if x == 0.0:
        return 0.0 if order == 0 else -math.inf
    if x <= BESSEL_LOG_DOMAIN_X:
        return math.log(_bessel_series_direct(order, x))
    return _ln_bessel_series(order, x)


def bessel_i(order: int, x: float) -> float:
    """
    幂级数计算修正 Bessel 函数 I_0(x) 或 I_1(x)

    Σ_k (x/2)^{2k+ν} / (k!(k+ν)!)，x > 30 时在对数域累加。

    Args:
        order: 阶数 0 或 1
        x: 自变量，x ≥ 0

    Returns:
        float: I_ν(x)

    Raises:
        ValueError: x < 0 或阶数不是 0/1
    """
    _check_bessel_args(order, x)
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if x <= BESSEL_LOG_DOMAIN_X:
        return _bessel_series_direct(order, x)
    return float(np.exp(_ln_bessel_series(order, x)))


def bessel_i_ratio(x: float) -> float:
    """
    计算 I_1(x)/I_0(x)，大 x 时在对数域相减避免溢出

    Args:
        x: 自变量，x ≥ 0

    Returns:
        float: I_1(x)/I_0(x)，取值 [0, 1)
    """
    if x == 0.0:
        _check_bessel_args(0, x)
        return 0.0
    return math.exp(ln_bessel_i(1, x) - ln_bessel_i(0, x))
