"""
作图数据打包模块

一次性生成所有曲线与联合分布背后的数据文件（CSV），供外部作图工具使用。
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

from .config import get_config
from .export import ResultWriter
from .fock_core import JointDistribution
from .sweeps import (
    DEFAULT_PHI_POINTS,
    DEFAULT_TOTAL_MEANS,
    PARITY_COLUMNS,
    SNR_COLUMNS,
    UNCERTAINTY_COLUMNS,
    ScanRunner,
    default_phi_grid,
    records_to_frame,
)


logger = logging.getLogger(__name__)

PARITY_TOTALS = (4, 30)
UNCERTAINTY_PHIS = (1e-4, 0.05)
SNR_PHI = 1e-4
JOINT_MEAN_PER_MODE = 10
SCAN_FAMILIES = ('twin-fock', 'tmsvs', 'pcs')


def _phi_tag(phi: float) -> str:
    return f"{phi:g}".replace('-', 'm')


def reproduce_all(output_dir: Union[str, Path, None] = None,
                  phi_points: int = DEFAULT_PHI_POINTS,
                  total_means: Sequence[float] = DEFAULT_TOTAL_MEANS,
                  runner: Optional[ScanRunner] = None) -> Dict[str, Path]:
    """
    生成全部作图数据

    - 宇称-相位曲线：三类输入，总光子数 4 与 30
    - 相位不确定度曲线：φ = 1e-4 与 0.05
    - 信噪比曲线：φ = 1e-4
    - 联合分布：每模平均光子数 10，第一个分束器前后

    Args:
        output_dir: 输出目录，默认取配置的 PARITY_OUTPUT_DIR
        phi_points: 相位网格点数
        total_means: 不确定度与信噪比扫描的总平均光子数网格
        runner: 扫描执行器

    Returns:
        Dict[str, Path]: 数据集名称到文件路径
    """
    output_dir = Path(output_dir) if output_dir is not None else get_config().output_dir
    runner = runner or ScanRunner()
    writer = ResultWriter(runner.config)
    written: Dict[str, Path] = {}

    def save(name: str, frame) -> None:
        written[name] = writer.write(frame, output_dir / f"{name}.csv")

    phis = default_phi_grid(points=phi_points)
    for family in SCAN_FAMILIES:
        for total in PARITY_TOTALS:
            records = runner.scan_parity(family, {'total_mean': total}, phis)
            save(f"parity_{family}_total{total}", records_to_frame(records, 'phi', PARITY_COLUMNS))

    for family in SCAN_FAMILIES:
        for phi in UNCERTAINTY_PHIS:
            records = runner.scan_uncertainty(family, total_means, phi)
            save(f"uncertainty_{family}_phi{_phi_tag(phi)}",
                 records_to_frame(records, 'total_mean', UNCERTAINTY_COLUMNS))

    for family in SCAN_FAMILIES:
        records = runner.scan_snr(family, total_means, SNR_PHI)
        save(f"snr_{family}_phi{_phi_tag(SNR_PHI)}", records_to_frame(records, 'total_mean', SNR_COLUMNS))

    for family in SCAN_FAMILIES:
        params = {'total_mean': 2 * JOINT_MEAN_PER_MODE}
        for stage in ('before', 'after'):
            joint: JointDistribution = runner.export_joint(family, params, stage)
            save(f"joint_{family}_{stage}_mean{JOINT_MEAN_PER_MODE}", joint.to_frame())

    logger.info(f"作图数据已生成: {len(written)} 个文件，目录 {output_dir}")
    return written
