"""
analytic 模块测试
"""

import math

import numpy as np
import pytest

from conftest import count_sign_changes
from parity_interferometry import analytic
from parity_interferometry.errors import DivergentUncertaintyError, InfiniteSnrError
from parity_interferometry.states import (
    StateFamily,
    pcs_coeffs,
    solve_param_for_mean,
    tmsvs_coeffs,
    twin_fock_coeffs,
)


PHI_GRID = np.linspace(0.0, math.pi / 2, 2001)


def test_arcsine_coeff_n1():
    assert analytic.arcsine_coeff(1, 0) == pytest.approx(-1 / math.sqrt(2), rel=1e-14)
    assert analytic.arcsine_coeff(1, 1) == pytest.approx(1 / math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize('n', [0, 1, 10, 50, 200])
def test_arcsine_normalisation(n):
    assert np.sum(analytic.arcsine_coeffs(n) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(analytic.arcsine_distribution(n)) == pytest.approx(1.0, abs=1e-12)


def test_arcsine_coeff_squares_match_joint():
    assert analytic.arcsine_coeff(10, 5) ** 2 == pytest.approx(analytic.arcsine_joint(10, 5), rel=1e-13)
    for n in range(0, 101, 7):
        diff = analytic.arcsine_coeffs(n) ** 2 - analytic.arcsine_distribution(n)
        assert np.max(np.abs(diff)) < 1e-12


def test_arcsine_joint_values():
    assert analytic.arcsine_joint(1, 0) == pytest.approx(0.5, rel=1e-14)
    assert analytic.arcsine_joint(1, 1) == pytest.approx(0.5, rel=1e-14)
    dist = analytic.arcsine_distribution(10)
    assert dist[0] == dist.max()
    assert dist[-1] == pytest.approx(dist.max(), rel=1e-14)


def test_arcsine_rejects_k_above_n():
    with pytest.raises(ValueError):
        analytic.arcsine_coeff(3, 4)
    with pytest.raises(ValueError):
        analytic.arcsine_joint(3, -1)


def test_parity_twin_fock_closed_values():
    for n in (0, 1, 7, 30):
        assert analytic.parity_twin_fock(n, 0.0).value == 1.0
    assert analytic.parity_twin_fock(1, math.pi / 2).value == pytest.approx(-1.0, abs=1e-15)
    assert analytic.parity_twin_fock(2, math.pi / 4).value == pytest.approx(-0.5, abs=1e-15)


def test_parity_superposition_reduces_to_twin_fock():
    for phi in (0.0, 0.1, 0.3, 1.2):
        single = analytic.parity_twin_fock(7, phi)
        summed = analytic.parity_superposition(twin_fock_coeffs(7), phi)
        assert summed.value == single.value
        assert summed.derivative_wrt_phi == single.derivative_wrt_phi
        assert summed.error_bound == 0.0


def test_tmsvs_parity_matches_closed_form():
    coeffs = tmsvs_coeffs(0.8)
    for phi in (0.0, 1e-4, 0.05, 0.3, 1.0):
        value = analytic.parity_superposition(coeffs, phi).value
        assert value == pytest.approx(analytic.parity_tmsvs_closed_form(0.8, phi), abs=1e-10)


def test_tmsvs_parity_has_single_central_peak():
    xi = solve_param_for_mean(StateFamily.TMSVS, 30.0)
    coeffs = tmsvs_coeffs(xi)
    values = np.array([analytic.parity_superposition(coeffs, phi).value for phi in PHI_GRID[::20]])
    assert values[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(values > 0)
    assert np.all(np.diff(values) <= 1e-15)


def test_pcs_parity_oscillates():
    zeta = solve_param_for_mean(StateFamily.PCS, 30.0)
    coeffs = pcs_coeffs(zeta)
    values = [analytic.parity_superposition(coeffs, phi).value for phi in PHI_GRID[::4]]
    assert count_sign_changes(values) >= 2


def test_parity_values_bounded():
    coeffs = pcs_coeffs(3.0)
    for phi in PHI_GRID[::50]:
        assert abs(analytic.parity_superposition(coeffs, phi).value) <= 1.0 + 1e-12


def test_derivative_matches_finite_difference():
    h = 1e-6
    for coeffs in (twin_fock_coeffs(9), tmsvs_coeffs(0.6), pcs_coeffs(2.5)):
        for phi in (0.05, 0.1, 0.3):
            derivative = analytic.parity_superposition(coeffs, phi).derivative_wrt_phi
            if abs(derivative) <= 1e-3:
                continue
            numeric = (analytic.parity_superposition(coeffs, phi + h).value
                       - analytic.parity_superposition(coeffs, phi - h).value) / (2 * h)
            assert numeric == pytest.approx(derivative, rel=1e-4)


def test_parity_noon():
    assert analytic.parity_noon(2, 0.0, 0.0) == pytest.approx(-1.0)
    assert analytic.parity_noon(1, 0.0, math.pi / 2) == pytest.approx(-1.0)
    for phi in (0.1, 0.4):
        assert analytic.parity_noon(3, 0.2, phi) == pytest.approx(
            analytic.parity_noon(3, 0.2, phi + 2 * math.pi / 3), abs=1e-12)
    with pytest.raises(ValueError):
        analytic.parity_noon(0, 0.0, 0.1)


def test_parity_ecs():
    assert analytic.parity_ecs(3.0, 0.0) == pytest.approx(1 / (1 + math.exp(-3.0)))
    assert analytic.parity_ecs(0.0, 0.7) == pytest.approx(0.5)
    for phi in np.linspace(0.0, 0.02, 11):
        assert abs(analytic.parity_ecs(20.0, phi) - math.cos(20.0 * phi)) <= 0.01
    with pytest.raises(ValueError):
        analytic.parity_ecs(-1.0, 0.1)


def test_twin_fock_phase_uncertainty_small_angle():
    result = analytic.phase_uncertainty(twin_fock_coeffs(5), 1e-4)
    assert result.delta_phi == pytest.approx(1 / math.sqrt(60), rel=1e-6)
    assert result.delta_phi == pytest.approx(result.delta_pi / abs(result.derivative), rel=1e-15)
    assert analytic.phase_uncertainty_small_angle(twin_fock_coeffs(5)) == pytest.approx(1 / math.sqrt(60))


def test_twin_fock_between_hl_and_sql():
    for n in range(1, 51):
        delta_phi = analytic.phase_uncertainty(twin_fock_coeffs(n), 1e-4).delta_phi
        assert analytic.hl(2 * n) * (1 - 1e-9) <= delta_phi <= analytic.sql(2 * n)


@pytest.mark.parametrize('phi', [1e-6, 1e-8])
def test_phase_uncertainty_at_tiny_phase(phi):
    result = analytic.phase_uncertainty(twin_fock_coeffs(5), phi)
    assert result.delta_phi == pytest.approx(1 / math.sqrt(60), rel=1e-9)
    mirrored = analytic.phase_uncertainty(twin_fock_coeffs(5), math.pi / 2 - phi)
    assert mirrored.delta_phi == pytest.approx(1 / math.sqrt(60), rel=1e-6)

    for family in (StateFamily.TMSVS, StateFamily.PCS):
        param = solve_param_for_mean(family, 4.0)
        coeffs = tmsvs_coeffs(param) if family is StateFamily.TMSVS else pcs_coeffs(param)
        delta_phi = analytic.phase_uncertainty(coeffs, phi).delta_phi
        assert delta_phi == pytest.approx(analytic.phase_uncertainty_small_angle(coeffs), rel=1e-6)


def test_parity_complements_are_consistent():
    coeffs = pcs_coeffs(solve_param_for_mean(StateFamily.PCS, 10.0))
    for phi in (0.05, 0.3, 1.0, 1.5):
        result = analytic.parity_superposition(coeffs, phi)
        assert result.one_minus == pytest.approx(1.0 - result.value, abs=1e-13)
        assert result.one_plus == pytest.approx(1.0 + result.value, abs=1e-13)
    tiny = analytic.parity_twin_fock(5, 1e-9)
    assert tiny.one_minus == pytest.approx(30 * math.sin(1e-9) ** 2, rel=1e-6)


def test_snr_at_tiny_phase():
    phi = 1e-8
    assert analytic.snr(twin_fock_coeffs(5), phi) == pytest.approx(1 / (phi * math.sqrt(60)), rel=1e-6)


def test_tmsvs_dips_below_heisenberg_limit():
    xi = solve_param_for_mean(StateFamily.TMSVS, 2.0)
    delta_phi = analytic.phase_uncertainty(tmsvs_coeffs(xi), 1e-4).delta_phi
    assert delta_phi < analytic.hl(2.0)


def test_phase_uncertainty_divergences():
    with pytest.raises(DivergentUncertaintyError):
        analytic.phase_uncertainty(twin_fock_coeffs(3), 0.0)
    with pytest.raises(DivergentUncertaintyError):
        analytic.phase_uncertainty(twin_fock_coeffs(0), 0.3)


def test_snr():
    coeffs = twin_fock_coeffs(4)
    value = analytic.parity_superposition(coeffs, 0.2).value
    assert analytic.snr(coeffs, 0.2) == pytest.approx(value / math.sqrt(1 - value ** 2), rel=1e-12)
    assert abs(analytic.snr(twin_fock_coeffs(1), math.pi / 4)) < 1e-12
    with pytest.raises(InfiniteSnrError):
        analytic.snr(coeffs, 0.0)


def test_joint_after_bs_twin_fock():
    joint = analytic.joint_after_bs(twin_fock_coeffs(1))
    assert joint.values[0, 2] == pytest.approx(0.5)
    assert joint.values[2, 0] == pytest.approx(0.5)
    assert joint.total() == pytest.approx(1.0, abs=1e-14)

    joint = analytic.joint_after_bs(twin_fock_coeffs(6))
    n1, n2 = np.nonzero(joint.values)
    assert np.all(n1 % 2 == 0) and np.all(n2 % 2 == 0)
    assert np.all(n1 + n2 == 12)


def test_joint_after_bs_tmsvs_peaks_at_vacuum():
    coeffs = tmsvs_coeffs(solve_param_for_mean(StateFamily.TMSVS, 20.0))
    joint = analytic.joint_after_bs(coeffs)
    assert np.unravel_index(np.argmax(joint.values), joint.values.shape) == (0, 0)
    assert joint.total() == pytest.approx(1.0, abs=coeffs.tail_mass_bound + 1e-12)


def test_joint_before_bs_is_diagonal():
    coeffs = pcs_coeffs(2.0)
    joint = analytic.joint_before_bs(coeffs)
    assert joint.cutoff == 2 * coeffs.cutoff
    assert np.count_nonzero(joint.values - np.diag(np.diag(joint.values))) == 0


def test_reference_limits():
    assert analytic.sql(4) == 0.5
    assert analytic.hl(4) == 0.25
    assert analytic.sql(100) == pytest.approx(0.1)
    assert analytic.hl(100) == 0.01
    for total in (1, 2, 10, 60):
        assert analytic.hl(total) <= analytic.sql(total)
    with pytest.raises(ValueError):
        analytic.sql(0)
    with pytest.raises(ValueError):
        analytic.hl(-2)
