"""
Telecloning Tests
Tests the closed-form fidelities, the frontier and the Monte-Carlo protocol
"""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gammaln

from tests.helpers import random_bounded_configs
from trimode.dynamics import (
    CouplingConfig,
    config_from_reduced,
    mode_populations,
    optimal_symmetric_ratio,
    reduced_parameters,
    symmetric_point,
)
from trimode.errors import ConfigError, DomainError
from trimode.fock import build_seeded_state, build_vacuum_state, mean_fields
from trimode.telecloning import (
    TeleclonePlan,
    analytic_report,
    asymmetric_frontier,
    clone_fidelities,
    conditional_amplitudes,
    corrected_clone_amplitudes,
    mc_teleclone,
    outcome_density,
    outcome_sampler,
    seeded_correction,
    symmetric_fidelity,
)


@pytest.fixture
def optimal_config():
    return symmetric_point(optimal_symmetric_ratio()).config()


@pytest.mark.parametrize(
    "n2, n3, f2, f3",
    [
        (0.5, 0.5, 2.0 / 3.0, 2.0 / 3.0),
        (1.0, 0.25, 0.8, 0.5),
        (0.0, 0.0, 0.5, 0.5),
    ],
)
def test_pinned_fidelities(n2, n3, f2, f3):
    assert clone_fidelities(n2, n3) == pytest.approx((f2, f3), abs=1e-12)


@pytest.mark.parametrize(
    "n, above_classical",
    [(0.1, True), (3.9, True), (5.0, False)],
)
def test_classical_window(n, above_classical):
    """Symmetric clones beat 1/2 only for 0 < N < 4"""
    assert (symmetric_fidelity(n) > 0.5) is above_classical


def test_classical_window_edges():
    assert symmetric_fidelity(0.0) == pytest.approx(0.5, abs=1e-15)
    assert symmetric_fidelity(4.0) == pytest.approx(0.5, abs=1e-12)
    assert symmetric_fidelity(0.5) == pytest.approx(2.0 / 3.0, abs=1e-12)
    with pytest.raises(DomainError):
        symmetric_fidelity(-0.1)


def test_symmetric_fidelity_is_the_diagonal():
    for n in np.linspace(0.0, 6.0, 25):
        f2, f3 = clone_fidelities(n, n)
        assert f2 == pytest.approx(symmetric_fidelity(n), rel=1e-12)
        assert f3 == pytest.approx(f2, rel=1e-12)


def test_frontier_identity():
    """F2 + F3 = 1 + (3/4) F2 F3 along the frontier"""
    for f3 in np.linspace(0.5, 2.0 / 3.0, 20):
        n2, n3, f2 = asymmetric_frontier(f3)
        assert f2 + f3 == pytest.approx(1.0 + 0.75 * f2 * f3, abs=1e-12)
        assert clone_fidelities(n2, n3) == pytest.approx((f2, f3), abs=1e-12)


def test_frontier_pinned_point():
    n2, n3, f2 = asymmetric_frontier(0.6)
    assert n2 == pytest.approx(2.0 / 3.0)
    assert n3 == pytest.approx(3.0 / 8.0)
    assert f2 == pytest.approx(8.0 / 11.0, abs=1e-12)


def test_frontier_range():
    asymmetric_frontier(0.5)
    asymmetric_frontier(2.0 / 3.0)
    with pytest.raises(DomainError):
        asymmetric_frontier(0.7)
    with pytest.raises(DomainError):
        asymmetric_frontier(0.45)


def test_no_population_pair_beats_the_frontier():
    """(1/F2 - 1)(1/F3 - 1) >= 1/4 for every (N2, N3)"""
    rng = np.random.default_rng(17)
    for n2, n3 in rng.uniform(0.0, 3.0, size=(2000, 2)):
        f2, f3 = clone_fidelities(n2, n3)
        assert (1.0 / f2 - 1.0) * (1.0 / f3 - 1.0) >= 0.25 - 1e-12


def test_outcome_density_integrates_to_one():
    z, n1 = 1.0 - 0.5j, 0.8
    width = 10.0 * math.sqrt(1.0 + n1)
    centre = -np.conj(z)
    total, _ = integrate.dblquad(
        lambda y, x: outcome_density(complex(x, y), z, n1),
        centre.real - width, centre.real + width,
        centre.imag - width, centre.imag + width,
        epsabs=1e-10,
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_outcome_sampler_moments():
    z, n1 = 2.0 + 1.0j, 1.5
    samples = outcome_sampler(z, n1, rng_seed=4, size=100_000)
    bound = 4.0 * math.sqrt((1.0 + n1) / 100_000)
    assert abs(samples.mean() - (-np.conj(z))) < bound
    spread = np.mean(np.abs(samples + np.conj(z)) ** 2)
    assert spread == pytest.approx(1.0 + n1, rel=0.02)
    repeat = outcome_sampler(z, n1, rng_seed=4, size=100_000)
    np.testing.assert_array_equal(samples, repeat)


def test_corrected_amplitudes_unseeded():
    """c_j = z kappa_j + conj(beta)(kappa_j - 1)"""
    plan = TeleclonePlan.from_populations(0.5, 0.5)
    z, beta = 1.0 + 2.0j, -0.3 + 0.7j
    c2, c3 = corrected_clone_amplitudes(z, beta, plan)
    expected = z * plan.kappa2 + np.conj(beta) * (plan.kappa2 - 1.0)
    assert c2 == pytest.approx(expected, abs=1e-15)
    assert c3 == pytest.approx(expected, abs=1e-15)
    delta2, _ = conditional_amplitudes(z, beta, plan)
    assert delta2 == pytest.approx((z + np.conj(beta)) * plan.kappa2)
    u2, u3 = seeded_correction(beta, plan)
    assert u2 == pytest.approx(np.conj(beta))


def test_seeded_outcome_equivalence():
    """100 random (z, beta, alpha): a seeded outcome beta yields the clones of the unseeded beta - d1"""
    rng = np.random.default_rng(12)
    for cfg in random_bounded_configs(rng, 100, max_n1=3.0):
        alpha, z, beta = rng.normal(scale=1.5, size=3) + 1j * rng.normal(scale=1.5, size=3)
        seeded = TeleclonePlan.from_config(cfg, alpha)
        plain = TeleclonePlan.from_config(cfg)
        d1 = seeded.displacements[0]
        seeded_c = corrected_clone_amplitudes(z, beta + d1, seeded)
        plain_c = corrected_clone_amplitudes(z, beta, plain)
        assert complex(seeded_c[0]) == pytest.approx(complex(plain_c[0]), abs=1e-12)
        assert complex(seeded_c[1]) == pytest.approx(complex(plain_c[1]), abs=1e-12)


def _coherent_bra(gamma: complex, dim: int) -> np.ndarray:
    """<gamma|n> for n < dim"""
    n = np.arange(dim)
    ket = np.exp(-0.5 * abs(gamma) ** 2 - 0.5 * gammaln(n + 1)) * gamma ** n
    return np.conj(ket)


def _project_mode_one(state, gamma: complex) -> np.ndarray:
    """Unnormalised two-mode vector <gamma|_1 psi over (n2, n3)"""
    return np.tensordot(_coherent_bra(gamma, state.dim), state.normalized(), axes=(0, 0))


@pytest.fixture
def real_gain_config():
    """Coupling phases chosen so that g1/f1 and h1/f1 are real and positive"""
    return CouplingConfig(gamma1=0.5j, gamma2=1.0j, t=0.9)


def test_gains_are_the_pair_amplitudes_of_the_state(real_gain_config):
    plan = TeleclonePlan.from_config(real_gain_config)
    vacuum = build_vacuum_state(real_gain_config, cutoff=20)
    origin = vacuum.amplitude(0, 0, 0)
    assert vacuum.amplitude(1, 1, 0) / origin == pytest.approx(plan.kappa2, abs=1e-12)
    assert vacuum.amplitude(1, 0, 1) / origin == pytest.approx(plan.kappa3, abs=1e-12)


def test_seeded_state_fixes_outcome_shift_and_clone_amplitudes(real_gain_config):
    """
    The seeded Fock state alone determines the outcome law and the mode 2/3
    coherent amplitudes after each outcome; both match the protocol formulas.
    """
    rng = np.random.default_rng(31)
    for _ in range(5):
        alpha = complex(*rng.uniform(-0.6, 0.6, size=2))
        plan = TeleclonePlan.from_config(real_gain_config, alpha)
        state = build_seeded_state(real_gain_config, alpha, cutoff=30)
        np.testing.assert_allclose(mean_fields(state), plan.displacements, atol=1e-9)

        for _ in range(4):
            z = complex(*rng.uniform(-1.0, 1.0, size=2))
            beta = complex(*rng.uniform(-1.0, 1.0, size=2))
            # the joint measurement projects mode 1 onto |beta + conj(z)>
            phi = _project_mode_one(state, beta + np.conj(z))
            weight = float(np.sum(np.abs(phi) ** 2))
            expected_density = outcome_density(beta - plan.displacements[0], z, plan.n1)
            assert weight / math.pi == pytest.approx(expected_density, rel=1e-8)

            phi = phi / math.sqrt(weight)
            n2, n3 = np.indices(phi.shape)
            mean2 = np.sum(np.conj(phi[:-1, :]) * phi[1:, :] * np.sqrt(n2[1:, :]))
            mean3 = np.sum(np.conj(phi[:, :-1]) * phi[:, 1:] * np.sqrt(n3[:, 1:]))
            zeta2, zeta3 = conditional_amplitudes(z, beta, plan)
            assert complex(mean2) == pytest.approx(complex(zeta2), abs=1e-8)
            assert complex(mean3) == pytest.approx(complex(zeta3), abs=1e-8)
            # coherent: <n2> = |<a2>|^2
            assert np.sum(np.abs(phi) ** 2 * n2) == pytest.approx(abs(mean2) ** 2, abs=1e-8)


def test_plan_validation():
    with pytest.raises(DomainError):
        TeleclonePlan(kappa2=0.5, kappa3=0.5, n1=-1.0, n2=0.0, n3=0.0)
    with pytest.raises(ConfigError):
        TeleclonePlan(kappa2=0.1, kappa3=0.1, n1=0.1, n2=0.05, n3=0.05, seed_alpha=1.0)


def test_monte_carlo_matches_closed_form(optimal_config):
    """10^5 samples land within 4 standard errors, with standard error below 0.0025"""
    report = mc_teleclone(1.5 - 0.5j, optimal_config, samples=100_000, rng_seed=1)
    exact = clone_fidelities(*mode_populations(optimal_config).as_tuple()[1:])
    stderr2, stderr3 = report.mc_stderr
    assert stderr2 < 0.0025 and stderr3 < 0.0025
    assert abs(report.f2 - exact[0]) < 4.0 * stderr2
    assert abs(report.f3 - exact[1]) < 4.0 * stderr3
    assert exact[0] == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_monte_carlo_asymmetric():
    cfg = config_from_reduced(0.3, 2.0)
    pops = mode_populations(cfg)
    report = mc_teleclone(0.0, cfg, samples=100_000, rng_seed=9)
    exact = clone_fidelities(pops.n2, pops.n3)
    assert abs(report.f2 - exact[0]) < 4.0 * report.mc_stderr[0]
    assert abs(report.f3 - exact[1]) < 4.0 * report.mc_stderr[1]


def test_fidelity_does_not_depend_on_input(optimal_config):
    """Same seed, different z: identical per-sample overlaps"""
    a = mc_teleclone(0j, optimal_config, samples=20_000, rng_seed=5)
    b = mc_teleclone(5.0 + 3.0j, optimal_config, samples=20_000, rng_seed=5)
    assert a.f2 == pytest.approx(b.f2, abs=1e-9)
    assert a.f3 == pytest.approx(b.f3, abs=1e-9)


def test_seeded_monte_carlo_reproduces_unseeded(optimal_config):
    plain = mc_teleclone(1.0j, optimal_config, samples=100_000, rng_seed=2)
    seeded = mc_teleclone(1.0j, optimal_config, alpha=1.0 + 0.5j, samples=100_000, rng_seed=2)
    assert seeded.f2 == pytest.approx(plain.f2, abs=1e-9)
    assert seeded.f3 == pytest.approx(plain.f3, abs=1e-9)
    assert seeded.config["alpha"] == [1.0, 0.5]


def test_monte_carlo_is_deterministic_across_workers(optimal_config):
    serial = mc_teleclone(0.5, optimal_config, samples=60_000, rng_seed=3, chunk_size=10_000)
    threaded = mc_teleclone(0.5, optimal_config, samples=60_000, rng_seed=3, chunk_size=10_000,
                            workers=4)
    assert serial.f2 == threaded.f2
    assert serial.f3 == threaded.f3
    assert serial.to_dict() == threaded.to_dict()


def test_monte_carlo_rejects_small_runs(optimal_config):
    with pytest.raises(ConfigError):
        mc_teleclone(0j, optimal_config, samples=999)
    with pytest.raises(ConfigError):
        mc_teleclone(0j, optimal_config, workers=0)


def test_analytic_report(optimal_config):
    pops = mode_populations(optimal_config)
    report = analytic_report(pops.n2, pops.n3, z=2.0, config=reduced_parameters(optimal_config))
    payload = report.to_dict()
    assert payload["f2"] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert payload["stderr2"] is None
    assert payload["config"]["regime"] == "trigonometric"
