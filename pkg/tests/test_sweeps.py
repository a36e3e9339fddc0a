"""
sweeps 模块测试
"""

import math

import numpy as np
import pandas as pd
import pytest

from conftest import count_sign_changes
from parity_interferometry import analytic, sweeps
from parity_interferometry.errors import InfiniteSnrError, NumericalDomainError
from parity_interferometry.sweeps import (
    FLAG_DIVERGENT,
    FLAG_NONPOSITIVE_SNR,
    PARITY_COLUMNS,
    SNR_COLUMNS,
    UNCERTAINTY_COLUMNS,
    InputFamily,
    ScanRunner,
    default_phi_grid,
    export_joint,
    records_to_frame,
    resolve_coeffs,
    scan_parity,
    scan_snr,
    scan_uncertainty,
    twin_fock_n_for_total,
)


PHI_GRID = default_phi_grid(points=501)


def parity_values(family, params, grid=PHI_GRID):
    return [rec.columns['parity'] for rec in scan_parity(family, params, grid)]


def test_default_phi_grid():
    grid = default_phi_grid()
    assert grid.size == 2001
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        default_phi_grid(points=0)
    with pytest.raises(ValueError):
        default_phi_grid(1.0, 0.5)


def test_family_names():
    assert InputFamily('twin-fock') is InputFamily.TWIN_FOCK
    assert InputFamily.PCS.is_diagonal
    assert not InputFamily.NOON.is_diagonal
    with pytest.raises(ValueError):
        scan_parity('coherent', {'total_mean': 4}, [0.0])


def test_twin_fock_n_for_total():
    assert twin_fock_n_for_total(30) == 15
    assert twin_fock_n_for_total(0.0) == 0
    for bad in (3, 4.5, -2):
        with pytest.raises(ValueError):
            twin_fock_n_for_total(bad)


def test_resolve_coeffs():
    assert resolve_coeffs('twin-fock', {'n': 3}).mean_total == 6.0
    assert resolve_coeffs('tmsvs', {'total_mean': 4.0}).mean_total == pytest.approx(4.0, rel=1e-8)
    assert resolve_coeffs('pcs', {'zeta': 2.0, 'cutoff': 40}).cutoff == 40
    with pytest.raises(ValueError):
        resolve_coeffs('tmsvs', {})
    with pytest.raises(ValueError):
        resolve_coeffs('noon', {'n': 2})


def test_parity_scan_starts_at_one():
    for family in ('twin-fock', 'tmsvs', 'pcs'):
        values = parity_values(family, {'total_mean': 4})
        assert values[0] == pytest.approx(1.0, abs=1e-12)


def test_twin_fock_oscillates_faster_with_more_photons():
    few = count_sign_changes(parity_values('twin-fock', {'total_mean': 4}))
    many = count_sign_changes(parity_values('twin-fock', {'total_mean': 30}))
    assert many > few


def test_tmsvs_parity_never_changes_sign():
    values = parity_values('tmsvs', {'total_mean': 30})
    assert count_sign_changes(values) == 0
    assert min(values) > 0


def test_parity_records():
    records = scan_parity('pcs', {'total_mean': 4, 'cutoff': None}, [0.0, 0.1])
    assert [rec.x for rec in records] == [0.0, 0.1]
    assert records[0].family == 'pcs'
    assert 'cutoff' not in records[0].parameters
    assert records[0].tail_bound < 1e-12
    assert records[0].flag == ''


def test_noon_and_ecs_scans():
    noon = scan_parity('noon', {'n': 3, 'noon_phase': 0.0}, [0.0, 0.2])
    assert noon[1].columns['parity'] == pytest.approx(analytic.parity_noon(3, 0.0, 0.2))
    assert noon[0].truncation_cutoff == 3

    ecs = scan_parity('ecs', {'total_mean': 10.0}, [0.0, 0.2])
    assert ecs[1].columns['parity'] == pytest.approx(analytic.parity_ecs(10.0, 0.2))

    with pytest.raises(ValueError):
        scan_parity('noon', {}, [0.0])
    with pytest.raises(ValueError):
        scan_parity('noon', {'n': 0}, [0.0])
    with pytest.raises(ValueError):
        scan_parity('ecs', {'total_mean': -1.0}, [0.0])


@pytest.mark.parametrize('grid', [[], [0.2, 0.1], [0.0, math.nan]])
def test_parity_scan_rejects_bad_grids(grid):
    with pytest.raises(ValueError):
        scan_parity('twin-fock', {'n': 2}, grid)


def test_twin_fock_uncertainty_between_limits():
    records = scan_uncertainty('twin-fock', [2, 4, 10, 30, 60], 1e-4)
    frame = records_to_frame(records, 'total_mean', UNCERTAINTY_COLUMNS)
    ratio = frame['delta_phi'] / frame['hl']
    assert np.all(ratio >= 1 - 1e-9)
    assert np.all(ratio <= 1.5)
    assert np.all(frame['delta_phi'] <= frame['sql'] * (1 + 1e-9))


def test_tmsvs_uncertainty_below_heisenberg_limit():
    records = scan_uncertainty('tmsvs', [2, 4, 10, 30], 1e-4)
    for rec in records:
        assert rec.columns['delta_phi'] < rec.columns['hl']
        expected = 1 / math.sqrt(rec.x * (rec.x + 2))
        assert rec.columns['delta_phi'] == pytest.approx(expected, rel=1e-4)


def test_uncertainty_divergent_at_zero_phase():
    records = scan_uncertainty('pcs', [2, 4], 0.0)
    assert all(rec.flag == FLAG_DIVERGENT for rec in records)
    frame = records_to_frame(records, 'total_mean', UNCERTAINTY_COLUMNS)
    assert frame['delta_phi'].isna().all()
    assert list(frame['flag']) == [FLAG_DIVERGENT, FLAG_DIVERGENT]
    assert frame['parity'].tolist() == pytest.approx([1.0, 1.0], abs=1e-12)


def test_uncertainty_rejects_bad_means():
    with pytest.raises(ValueError):
        scan_uncertainty('twin-fock', [3], 1e-4)
    with pytest.raises(ValueError):
        scan_uncertainty('pcs', [0.0, 2.0], 1e-4)
    with pytest.raises(ValueError):
        scan_uncertainty('noon', [2.0], 1e-4)


def test_snr_scan():
    with pytest.raises(InfiniteSnrError):
        scan_snr('twin-fock', [2, 4], 0.0)

    for rec in scan_snr('pcs', [2, 6, 10], 1e-4):
        parity = rec.columns['parity']
        # 由记录的 parity 重算时，1 − parity² 的舍入误差按其大小放大
        rel = 1e-12 + 1e-15 / (1 - parity ** 2)
        assert rec.columns['snr'] == pytest.approx(parity / math.sqrt(1 - parity ** 2), rel=rel)
        assert rec.columns['log10_snr'] == pytest.approx(math.log10(rec.columns['snr']))


def test_snr_nonpositive_flag():
    (record,) = scan_snr('twin-fock', [2], 1.0)
    assert record.flag == FLAG_NONPOSITIVE_SNR
    assert record.columns['snr'] < 0
    assert record.columns['log10_snr'] is None


def test_snr_ordering_at_small_phase():
    tf = scan_snr('twin-fock', [20], 1e-4)[0].columns['snr']
    pcs = scan_snr('pcs', [20], 1e-4)[0].columns['snr']
    tmsvs = scan_snr('tmsvs', [20], 1e-4)[0].columns['snr']
    assert tf > tmsvs
    assert pcs > tmsvs


def test_records_to_frame_types():
    records = scan_snr('twin-fock', [2, 4], 1.0)
    frame = records_to_frame(records, 'total_mean', SNR_COLUMNS)
    assert list(frame.columns) == SNR_COLUMNS
    assert frame['cutoff'].dtype == np.int64
    assert frame['snr'].dtype == float
    assert frame['flag'].tolist()[0] == FLAG_NONPOSITIVE_SNR
    assert math.isnan(frame['log10_snr'].iloc[0])


def test_scans_are_deterministic():
    first = records_to_frame(scan_parity('pcs', {'total_mean': 10}, PHI_GRID), 'phi', PARITY_COLUMNS)
    second = records_to_frame(scan_parity('pcs', {'total_mean': 10}, PHI_GRID), 'phi', PARITY_COLUMNS)
    pd.testing.assert_frame_equal(first, second)


def test_threaded_scan_keeps_order(monkeypatch, config):
    serial = ScanRunner(config).scan_uncertainty('pcs', [2, 4, 6, 8, 10], 0.05)
    monkeypatch.setattr(config, 'sweep_workers', 4)
    runner = ScanRunner(config)
    assert runner.workers == 4
    threaded = runner.scan_uncertainty('pcs', [2, 4, 6, 8, 10], 0.05)
    assert [rec.x for rec in threaded] == [2.0, 4.0, 6.0, 8.0, 10.0]
    assert [rec.columns for rec in threaded] == [rec.columns for rec in serial]


def test_export_joint_twin_fock_is_arcsine():
    joint = export_joint('twin-fock', {'n': 10}, stage='after')
    expected = analytic.arcsine_distribution(10)
    for k in range(11):
        assert joint.values[2 * k, 2 * (10 - k)] == pytest.approx(expected[k], abs=1e-13)
    assert joint.total() == pytest.approx(1.0, abs=1e-12)


def test_export_joint_before_splitter():
    tmsvs = export_joint('tmsvs', {'total_mean': 20}, stage='before')
    assert np.unravel_index(np.argmax(tmsvs.values), tmsvs.values.shape) == (0, 0)

    pcs = export_joint('pcs', {'total_mean': 20}, stage='before')
    peak = np.unravel_index(np.argmax(pcs.values), pcs.values.shape)
    assert peak[0] == peak[1]
    assert abs(peak[0] - 10) <= 1


def test_export_joint_cross_check():
    joint = export_joint('pcs', {'total_mean': 4}, stage='after', cross_check=True)
    assert joint.total() == pytest.approx(1.0, abs=1e-10)
    frame = joint.to_frame()
    assert len(frame) == (joint.cutoff + 1) ** 2


def test_export_joint_cross_checks_by_default(monkeypatch):
    # 阈值为负时任何比对都会失败，借此确认比对是否执行
    monkeypatch.setattr(sweeps, 'JOINT_CROSS_CHECK_TOL', -1.0)
    with pytest.raises(NumericalDomainError):
        export_joint('pcs', {'total_mean': 4}, stage='after')
    with pytest.raises(NumericalDomainError):
        export_joint('twin-fock', {'total_mean': 20}, stage='before')
    export_joint('pcs', {'total_mean': 4}, stage='after', cross_check=False)
    export_joint('pcs', {'total_mean': 30}, stage='after')


def test_export_joint_tmsvs_auto_cutoff_cross_check():
    joint = export_joint('tmsvs', {'total_mean': 20}, stage='after')
    assert joint.cutoff > 128
    assert joint.total() == pytest.approx(1.0, abs=joint.tail_mass_bound + 1e-10)


def test_export_joint_rejects_bad_stage():
    with pytest.raises(ValueError):
        export_joint('twin-fock', {'n': 2}, stage='middle')
