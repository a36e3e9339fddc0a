"""
宇称测量干涉仪数值工具

计算孪生 Fock 态、双模压缩真空态和对相干态输入时 Mach-Zehnder 干涉仪的
宇称信号、相位灵敏度、信噪比和联合光子数分布，并用截断 Fock 空间的暴力传播交叉验证。
"""

__version__ = "1.0.0"
__author__ = "Parity Interferometry Team"

from .config import Config, get_config
from .errors import (
    CutoffMismatchError,
    DivergentUncertaintyError,
    InfiniteSnrError,
    NumericalDomainError,
    ParityInterferometryError,
    TruncationError,
    UndefinedMandelQError,
)
from .states import (
    DiagonalCoeffs,
    StateFamily,
    pcs_coeffs,
    solve_param_for_mean,
    tmsvs_coeffs,
    twin_fock_coeffs,
)
from .analytic import parity_superposition, phase_uncertainty, snr
from .sweeps import ScanRunner

__all__ = [
    "Config",
    "get_config",
    "ParityInterferometryError",
    "NumericalDomainError",
    "DivergentUncertaintyError",
    "InfiniteSnrError",
    "UndefinedMandelQError",
    "TruncationError",
    "CutoffMismatchError",
    "DiagonalCoeffs",
    "StateFamily",
    "twin_fock_coeffs",
    "tmsvs_coeffs",
    "pcs_coeffs",
    "solve_param_for_mean",
    "parity_superposition",
    "phase_uncertainty",
    "snr",
    "ScanRunner",
]
