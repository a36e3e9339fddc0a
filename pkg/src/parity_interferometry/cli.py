"""
命令行入口

子命令：parity、uncertainty、snr、joint、verify、figures。
结果写到 --out 指定的文件或标准输出，日志只写标准错误。

退出码：0 成功，1 数值定义域错误，2 参数错误。
"""

import os
import sys
import math
import argparse
import logging
from typing import Dict, List, Optional, Sequence

from . import __version__
from .config import get_config, set_log_level
from .errors import ParityInterferometryError
from .export import ResultWriter, build_meta
from .oracle import run_verification, verification_frame
from .sweeps import (
    DEFAULT_PHI_POINTS,
    DEFAULT_TOTAL_MEANS,
    PARITY_COLUMNS,
    SNR_COLUMNS,
    UNCERTAINTY_COLUMNS,
    InputFamily,
    ScanRecord,
    ScanRunner,
    default_phi_grid,
    records_to_frame,
)
from .figures import reproduce_all


EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2

DIAGONAL_FAMILIES = [f.value for f in InputFamily if f.is_diagonal]
ALL_FAMILIES = [f.value for f in InputFamily]


class UsageError(Exception):
    """参数校验失败，消息需包含出错的参数名"""
    pass


def _parse_means(text: str) -> List[float]:
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"无法解析的平均光子数列表: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("平均光子数列表不能为空")
    return values


def _add_output_args(parser: argparse.ArgumentParser):
    parser.add_argument('--out', default=None,
                        help='输出文件路径 (默认: 标准输出)')
    parser.add_argument('--format', choices=['csv', 'json'], default='csv',
                        help='输出格式 (默认: csv)')


def _add_state_args(parser: argparse.ArgumentParser, families: Sequence[str]):
    parser.add_argument('--family', required=True, choices=list(families),
                        help='输入态族')
    parser.add_argument('--total-mean', type=float, default=None,
                        help='总平均光子数 2N̄（ecs 为 N̄ = |α|²）')
    parser.add_argument('--n', type=int, default=None,
                        help='孪生 Fock 每模光子数 N 或 N00N 光子数')
    parser.add_argument('--cutoff', type=int, default=None,
                        help='系数截断 (默认: 按尾部容差自动选取)')
    parser.add_argument('--tolerance', type=float, default=None,
                        help='截断尾部容差 (默认: PARITY_TAIL_TOLERANCE)')


def _add_grid_args(parser: argparse.ArgumentParser):
    parser.add_argument('--phi', type=float, required=True,
                        help='工作相位（弧度）')
    parser.add_argument('--means', type=_parse_means, default=list(DEFAULT_TOTAL_MEANS),
                        help='逗号分隔的总平均光子数网格 (默认: 2,4,...,60)')


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        prog='parity-interferometry',
        description="宇称测量 Mach-Zehnder 干涉仪数值工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例用法:
  python main.py parity --family twin-fock --n 15 --phi-max 1.5708
  python main.py parity --family pcs --total-mean 30 --format json
  python main.py uncertainty --family tmsvs --phi 1e-4 --means 2,4,6
  python main.py snr --family pcs --phi 1e-4 --out snr_pcs.csv
  python main.py joint --family pcs --total-mean 20 --stage after
  python main.py verify --max-n 12 --tolerance 1e-8
  python main.py figures --output-dir data
        """
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='显示详细日志')

    subparsers = parser.add_subparsers(dest='command', required=True)

    parity = subparsers.add_parser('parity', help='宇称-相位扫描')
    _add_state_args(parity, ALL_FAMILIES)
    parity.add_argument('--noon-phase', type=float, default=0.0,
                        help='N00N 态相对相位 Φ (默认: 0)')
    parity.add_argument('--phi-min', type=float, default=0.0, help='相位下限 (默认: 0)')
    parity.add_argument('--phi-max', type=float, default=math.pi / 2.0, help='相位上限 (默认: π/2)')
    parity.add_argument('--points', type=int, default=DEFAULT_PHI_POINTS,
                        help=f'相位点数 (默认: {DEFAULT_PHI_POINTS})')
    _add_output_args(parity)

    uncertainty = subparsers.add_parser('uncertainty', help='相位不确定度-总光子数扫描')
    uncertainty.add_argument('--family', required=True, choices=DIAGONAL_FAMILIES, help='输入态族')
    uncertainty.add_argument('--cutoff', type=int, default=None, help='系数截断')
    uncertainty.add_argument('--tolerance', type=float, default=None, help='截断尾部容差')
    _add_grid_args(uncertainty)
    _add_output_args(uncertainty)

    snr = subparsers.add_parser('snr', help='信噪比-总光子数扫描')
    snr.add_argument('--family', required=True, choices=DIAGONAL_FAMILIES, help='输入态族')
    snr.add_argument('--cutoff', type=int, default=None, help='系数截断')
    snr.add_argument('--tolerance', type=float, default=None, help='截断尾部容差')
    _add_grid_args(snr)
    _add_output_args(snr)

    joint = subparsers.add_parser('joint', help='联合光子数分布')
    _add_state_args(joint, DIAGONAL_FAMILIES)
    joint.add_argument('--stage', choices=['before', 'after'], default='after',
                       help='第一个分束器之前或之后 (默认: after)')
    check = joint.add_mutually_exclusive_group()
    check.add_argument('--cross-check', dest='cross_check', action='store_const', const=True, default=None,
                       help='强制与暴力传播结果逐点比对 (默认: 总平均光子数 ≤ 20 时比对)')
    check.add_argument('--no-cross-check', dest='cross_check', action='store_const', const=False,
                       help='跳过交叉检验')
    _add_output_args(joint)

    verify = subparsers.add_parser('verify', help='运行解析/暴力一致性验证表')
    verify.add_argument('--max-n', type=int, default=12, help='孪生 Fock 检验的最大 N (默认: 12)')
    verify.add_argument('--tolerance', type=float, default=1e-8, help='宇称比对容差 (默认: 1e-8)')
    _add_output_args(verify)

    figures = subparsers.add_parser('figures', help='生成全部作图数据')
    figures.add_argument('--output-dir', default=None,
                         help='输出目录 (默认: PARITY_OUTPUT_DIR)')
    figures.add_argument('--points', type=int, default=DEFAULT_PHI_POINTS,
                         help=f'相位点数 (默认: {DEFAULT_PHI_POINTS})')

    return parser


def _is_even_integer(value: float) -> bool:
    return value == int(value) and int(value) % 2 == 0


def _state_params(args: argparse.Namespace) -> Dict[str, float]:
    family = InputFamily(args.family)
    if args.cutoff is not None and args.cutoff < 0:
        raise UsageError(f"argument --cutoff: 必须非负: {args.cutoff}")
    if args.tolerance is not None and not 0.0 < args.tolerance < 1.0:
        raise UsageError(f"argument --tolerance: 必须在 (0, 1) 内: {args.tolerance}")

    if family in (InputFamily.TWIN_FOCK, InputFamily.NOON):
        if args.n is None and args.total_mean is None:
            raise UsageError(f"argument --n: {family.value} 需要 --n 或 --total-mean")
        if args.n is not None and args.n < (1 if family is InputFamily.NOON else 0):
            raise UsageError(f"argument --n: 取值无效: {args.n}")
    elif args.total_mean is None:
        raise UsageError(f"argument --total-mean: {family.value} 需要 --total-mean")
    if args.total_mean is not None and not (math.isfinite(args.total_mean) and args.total_mean >= 0):
        raise UsageError(f"argument --total-mean: 必须为非负有限数: {args.total_mean}")
    if args.n is None and args.total_mean is not None:
        if family is InputFamily.TWIN_FOCK and not _is_even_integer(args.total_mean):
            raise UsageError(f"argument --total-mean: 孪生 Fock 态的总光子数必须为偶整数: {args.total_mean:g}")
        if family is InputFamily.NOON and (args.total_mean < 1 or args.total_mean != int(args.total_mean)):
            raise UsageError(f"argument --total-mean: N00N 光子数必须为正整数: {args.total_mean:g}")

    params = {'n': args.n, 'total_mean': args.total_mean,
              'cutoff': args.cutoff, 'tolerance': args.tolerance}
    if family is InputFamily.NOON:
        params['noon_phase'] = args.noon_phase
        if params['n'] is None:
            params['n'] = int(args.total_mean)
    return {key: value for key, value in params.items() if value is not None}


def _scan_meta(records: List[ScanRecord], family: str, params: Dict) -> Dict:
    cutoff = max((r.truncation_cutoff for r in records), default=0)
    tail = max((r.tail_bound for r in records), default=0.0)
    return build_meta(family=family, params=params, cutoff=cutoff, tail_bound=tail)


def cmd_parity(args: argparse.Namespace, writer: ResultWriter) -> int:
    """宇称-相位扫描"""
    if args.points < 1:
        raise UsageError(f"argument --points: 必须为正: {args.points}")
    if args.phi_max < args.phi_min:
        raise UsageError("argument --phi-max: 必须不小于 --phi-min")
    params = _state_params(args)
    phis = default_phi_grid(args.phi_min, args.phi_max, args.points)
    records = ScanRunner().scan_parity(args.family, params, phis)
    frame = records_to_frame(records, 'phi', PARITY_COLUMNS)
    writer.write(frame, args.out, args.format, _scan_meta(records, args.family, params))
    return EXIT_OK


def _grid_params(args: argparse.Namespace) -> Dict[str, float]:
    if any(m <= 0 or not math.isfinite(m) for m in args.means):
        raise UsageError("argument --means: 总平均光子数必须全部为正")
    if sorted(args.means) != list(args.means):
        raise UsageError("argument --means: 必须升序排列")
    if InputFamily(args.family) is InputFamily.TWIN_FOCK and not all(_is_even_integer(m) for m in args.means):
        raise UsageError("argument --means: 孪生 Fock 态的总光子数必须为偶整数")
    if args.cutoff is not None and args.cutoff < 0:
        raise UsageError(f"argument --cutoff: 必须非负: {args.cutoff}")
    params = {'cutoff': args.cutoff, 'tolerance': args.tolerance}
    return {key: value for key, value in params.items() if value is not None}


def cmd_uncertainty(args: argparse.Namespace, writer: ResultWriter) -> int:
    """相位不确定度扫描"""
    params = _grid_params(args)
    records = ScanRunner().scan_uncertainty(args.family, args.means, args.phi, params)
    frame = records_to_frame(records, 'total_mean', UNCERTAINTY_COLUMNS)
    writer.write(frame, args.out, args.format,
                 _scan_meta(records, args.family, {**params, 'phi': args.phi}))
    return EXIT_OK


def cmd_snr(args: argparse.Namespace, writer: ResultWriter) -> int:
    """信噪比扫描"""
    params = _grid_params(args)
    records = ScanRunner().scan_snr(args.family, args.means, args.phi, params)
    frame = records_to_frame(records, 'total_mean', SNR_COLUMNS)
    writer.write(frame, args.out, args.format,
                 _scan_meta(records, args.family, {**params, 'phi': args.phi}))
    return EXIT_OK


def cmd_joint(args: argparse.Namespace, writer: ResultWriter) -> int:
    """联合光子数分布"""
    params = _state_params(args)
    joint = ScanRunner().export_joint(args.family, params, args.stage, args.cross_check)
    meta = build_meta(family=args.family, params={**params, 'stage': args.stage},
                      cutoff=joint.cutoff, tail_bound=joint.tail_mass_bound)
    writer.write(joint.to_frame(), args.out, args.format, meta)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, writer: ResultWriter) -> int:
    """验证表；任一检验失败返回 1"""
    if args.max_n < 0:
        raise UsageError(f"argument --max-n: 必须非负: {args.max_n}")
    if not args.tolerance > 0:
        raise UsageError(f"argument --tolerance: 必须为正: {args.tolerance}")
    results = run_verification(args.max_n, args.tolerance)
    meta = build_meta(max_n=args.max_n, tolerance=args.tolerance)
    writer.write(verification_frame(results), args.out, args.format, meta)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def cmd_figures(args: argparse.Namespace, writer: ResultWriter) -> int:
    """生成全部作图数据"""
    if args.points < 1:
        raise UsageError(f"argument --points: 必须为正: {args.points}")
    written = reproduce_all(args.output_dir, phi_points=args.points)
    logging.getLogger(__name__).info(f"共写出 {len(written)} 个文件")
    return EXIT_OK


COMMANDS = {
    'parity': cmd_parity,
    'uncertainty': cmd_uncertainty,
    'snr': cmd_snr,
    'joint': cmd_joint,
    'verify': cmd_verify,
    'figures': cmd_figures,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    主函数

    Args:
        argv: 命令行参数，默认取 sys.argv[1:]

    Returns:
        int: 退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK

    get_config()
    if args.verbose:
        set_log_level('DEBUG')
    elif 'LOG_LEVEL' not in os.environ:
        set_log_level('WARNING')

    logger = logging.getLogger(__name__)
    writer = ResultWriter()
    try:
        return COMMANDS[args.command](args, writer)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ParityInterferometryError) as e:
        logger.debug("数值错误", exc_info=True)
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
