"""
State Backend Tests
Tests that the analytic and truncated Fock backends describe the same state
"""

import pytest

from backends.analytic_backend import AnalyticBackend
from backends.base_backend import StateBackend, compare_backends
from backends.fock_backend import FockBackend
from trimode.dynamics import config_from_reduced
from trimode.errors import ContractViolation


@pytest.fixture
def cfg():
    return config_from_reduced(0.6, 0.9)


def test_backends_agree_on_vacuum_state(cfg):
    analytic = AnalyticBackend(cfg)
    fock = FockBackend(cfg, cutoff=40)
    result = compare_backends(analytic, fock)
    assert result["agree"], result
    assert result["backends"] == ["Analytic Gaussian", "Truncated Fock"]
    assert analytic.check_contract()
    assert fock.check_contract()


def test_backends_agree_on_seeded_state(cfg):
    alpha = 0.4 + 0.3j
    result = compare_backends(AnalyticBackend(cfg, alpha), FockBackend(cfg, alpha, cutoff=35))
    assert result["agree"], result
    assert result["deviations"]["mean_fields"] < 1e-8


def test_default_cutoff_follows_tail_policy(cfg):
    fock = FockBackend(cfg)
    assert fock.tail_bound() <= 1e-6
    assert fock.state.cutoff > 0


def test_fock_backend_rejects_short_cutoff():
    with pytest.raises(ContractViolation):
        FockBackend(config_from_reduced(0.9, 2.5), cutoff=2)


def test_close_drops_and_rebuilds_state(cfg):
    fock = FockBackend(cfg, cutoff=20)
    before = fock.populations()
    fock.close()
    assert fock.state is None
    assert fock.populations() == before
    assert fock.state is not None


def test_backend_interface_is_abstract(cfg):
    with pytest.raises(TypeError):
        StateBackend(cfg)
    assert AnalyticBackend(cfg).tail_bound() == 0.0
