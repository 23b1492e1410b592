"""
Conditional Twin-Beam Tests
Tests the on/off detection closed forms against conditional densities
"""

import itertools

import numpy as np
import pytest

from trimode.conditional import (
    SWEEP_COLUMNS,
    conditional_covariance,
    conditional_density,
    density_metrics,
    no_click_probability,
    no_click_probability_state,
    optimal_xi,
    photon_correlation,
    reference_phase,
    twb_fidelity,
    twb_fidelity_state,
    twb_report,
    twb_sweep,
)
from trimode.dynamics import config_from_reduced, mode_populations
from trimode.errors import ConfigError, DomainError
from trimode.fock import build_seeded_state, build_vacuum_state, choose_cutoff
from trimode.gaussian import partial_transpose_min_eigenvalues

ORACLE_RATIOS = (0.2, 0.4, 0.6, 0.8)
ORACLE_OMEGA_T = (0.2, 0.4, 0.6, 0.8)
ORACLE_ETAS = (0.0, 0.4, 0.8, 1.0)


def _state(ratio, omega_t, target=1e-10):
    cfg = config_from_reduced(ratio, omega_t)
    pops = mode_populations(cfg)
    return pops, build_vacuum_state(cfg, cutoff=choose_cutoff(pops.n1, target=target))


def test_pinned_values():
    assert no_click_probability(2.0, 0.3) == pytest.approx(0.625)
    assert photon_correlation(1.0, 1.0, 0.0) == pytest.approx(2.0 / 3.0)
    fid, xi = twb_fidelity(0.5, 1.0, 0.5)
    assert fid == pytest.approx(0.75)
    assert xi == pytest.approx(optimal_xi(0.5, 1.0))


def test_ideal_detector_gives_pure_twin_beam():
    for n2, n3 in [(0.2, 0.3), (1.0, 2.0), (3.0, 0.1)]:
        assert photon_correlation(n2, n3, 1.0) == 0.0
        fid, _ = twb_fidelity(n2, n3, 1.0)
        assert fid == pytest.approx(1.0, abs=1e-15)


def test_fidelity_maximum_over_xi():
    n2, n3, eta = 0.7, 0.4, 0.6
    best, xi_star = twb_fidelity(n2, n3, eta)
    for xi in np.linspace(-0.9, 0.9, 37):
        fid, _ = twb_fidelity(n2, n3, eta, xi=xi)
        assert fid <= best + 1e-12
    at_star, _ = twb_fidelity(n2, n3, eta, xi=xi_star)
    assert at_star == pytest.approx(best, rel=1e-12)
    # xi = 0 is the vacuum overlap
    vacuum, _ = twb_fidelity(n2, n3, eta, xi=0.0)
    assert vacuum == pytest.approx((1.0 + eta * n3) / (1.0 + n2 + n3))


def test_undefined_correlation_raises():
    with pytest.raises(DomainError):
        photon_correlation(0.0, 0.0, 0.5)
    with pytest.raises(DomainError):
        photon_correlation(0.0, 1.0, 1.0)


def test_invalid_arguments():
    with pytest.raises(ConfigError):
        no_click_probability(1.0, 1.5)
    with pytest.raises(DomainError):
        twb_fidelity(-1.0, 0.5, 0.5)
    with pytest.raises(ConfigError):
        twb_fidelity(0.5, 0.5, 0.5, xi=1.0)
    with pytest.raises(DomainError):
        twb_report(0.5, 0.5, 0.5, detected_mode=1)


def test_detecting_mode_two_swaps_roles():
    n2, n3, eta = 0.4, 1.3, 0.7
    assert photon_correlation(n2, n3, eta, detected_mode=2) == pytest.approx(
        photon_correlation(n3, n2, eta)
    )
    report = twb_report(n2, n3, eta, detected_mode=2)
    assert report.p0 == pytest.approx(no_click_probability(n2, eta))
    assert report.detected_mode == 2


def test_sweep_rows():
    rows = twb_sweep([0.5, 1.0], [0.25, 0.5, 1.0], [0.5, 1.0])
    assert len(rows) == 12
    assert set(rows[0]) == set(SWEEP_COLUMNS)
    assert rows[0]["p0"] == pytest.approx(no_click_probability(0.25, 0.5))


def test_closed_forms_match_conditional_densities():
    """4 x 4 x 4 grid of (ratio, Omega t, eta) against the truncated state"""
    for ratio, omega_t in itertools.product(ORACLE_RATIOS, ORACLE_OMEGA_T):
        pops, state = _state(ratio, omega_t)
        phase = reference_phase(state)
        tol = max(1e-6, 10.0 * state.moment_error_bound)
        for eta in ORACLE_ETAS:
            report = twb_report(pops.n2, pops.n3, eta)
            assert no_click_probability_state(state, eta) == pytest.approx(report.p0, abs=tol)
            rho = conditional_density(state, eta)
            assert density_metrics(rho)["zeta12"] == pytest.approx(report.zeta12, abs=tol)
            assert twb_fidelity_state(rho, report.xi_star, phase) == pytest.approx(report.fid, abs=tol)


def test_mode_two_detection_on_state():
    pops, state = _state(0.6, 1.0)
    eta = 0.5
    rho = conditional_density(state, eta, detected_mode=2)
    expected = photon_correlation(pops.n2, pops.n3, eta, detected_mode=2)
    assert density_metrics(rho)["zeta12"] == pytest.approx(expected, abs=1e-6)
    assert no_click_probability_state(state, eta, 2) == pytest.approx(
        no_click_probability(pops.n2, eta), abs=1e-6
    )
    fid, xi_star = twb_fidelity(pops.n2, pops.n3, eta, detected_mode=2)
    phase = reference_phase(state, 2)
    assert twb_fidelity_state(rho, xi_star, phase) == pytest.approx(fid, abs=1e-6)


def test_ideal_detection_leaves_a_pure_state():
    _, state = _state(0.5, 1.2)
    rho = conditional_density(state, 1.0)
    eigenvalues = np.linalg.eigvalsh(rho)
    assert eigenvalues[-1] == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.abs(eigenvalues[:-1]) < 1e-8)


def test_detecting_mode_one_leaves_separable_modes():
    _, state = _state(0.5, 1.0)
    rho = conditional_density(state, 1.0, detected_mode=1)
    cov = conditional_covariance(rho)
    assert min(partial_transpose_min_eigenvalues(cov, 2)) > -1e-9
    with pytest.raises(DomainError):
        reference_phase(state, 1)
    # mode 3 detection on the same state is entangled
    twin = conditional_covariance(conditional_density(state, 1.0, detected_mode=3))
    assert min(partial_transpose_min_eigenvalues(twin, 2)) < -1e-3


def test_seeded_state_is_rejected():
    cfg = config_from_reduced(0.5, 0.8)
    state = build_seeded_state(cfg, 0.5, cutoff=15)
    with pytest.raises(DomainError):
        conditional_density(state, 0.5)


def test_fidelity_lies_between_efficiency_and_one():
    for n2, n3 in itertools.product((0.1, 0.5, 2.0), (0.2, 1.0, 3.0)):
        for eta in (0.1, 0.5, 0.9):
            fid, _ = twb_fidelity(n2, n3, eta)
            assert eta < fid < 1.0
