"""
异常定义

数值定义域错误统一继承 NumericalDomainError，命令行据此返回退出码 1。
"""


class ParityInterferometryError(Exception):
    """本项目所有异常的基类"""
    pass


class NumericalDomainError(ParityInterferometryError, ValueError):
    """数值定义域错误：结果在该点无定义或发散"""
    pass


class DivergentUncertaintyError(NumericalDomainError):
    """相位不确定度发散（宇称对相位的导数为零）"""
    pass


class InfiniteSnrError(NumericalDomainError):
    """信噪比发散（ΔΠ = 0）"""
    pass


class UndefinedMandelQError(NumericalDomainError):
    """平均光子数为零，Mandel Q 无定义"""
    pass


class TruncationError(NumericalDomainError):
    """Fock 空间截断不足"""
    pass


class CutoffMismatchError(NumericalDomainError):
    """两个态的截断不一致"""
    pass
