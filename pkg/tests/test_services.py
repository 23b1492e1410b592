"""
Service Layer Tests
Tests the success and failure reports of each service
"""

import json

import pytest

from config import RunConfig, parse_config
from services.base_service import to_jsonable
from services.classical_service import ClassicalService
from services.conditional_service import ConditionalService
from services.dynamics_service import DynamicsService
from services.teleclone_service import TelecloneService


@pytest.fixture
def coupled():
    return parse_config("ratio=0.5 omega_t=1.0")


def test_to_jsonable_handles_numpy_and_complex():
    import numpy as np

    payload = to_jsonable({"a": np.float64(1.5), "b": 1 + 2j, "c": np.arange(3), "d": np.bool_(True)})
    assert payload == {"a": 1.5, "b": [1.0, 2.0], "c": [0, 1, 2], "d": True}
    json.dumps(payload)


def test_dynamics_report(coupled):
    report = DynamicsService(coupled).dynamics()
    assert report["success"]
    assert report["command"] == "dynamics"
    assert max(report["identity_residuals"].values()) < 1e-12
    assert report["propagator_deviation"] < 1e-10
    assert report["symmetric_point"]["regime"] == "trigonometric"
    assert parse_config(report["config_text"]) == coupled
    json.dumps(report)


def test_seeded_dynamics_report():
    report = DynamicsService(parse_config("ratio=0.5 omega_t=1.0 alpha=1+0.5j")).dynamics()
    assert report["seeded"]["delta"] == pytest.approx(1.25)


def test_ppt_report(coupled):
    report = DynamicsService(coupled).ppt()
    assert report["ppt"]["fully_inseparable"]
    assert report["power_iteration"] == pytest.approx(report["ppt"]["min_eig"], abs=1e-6)


def test_covariance_report(coupled):
    report = DynamicsService(coupled).covariance()
    assert report["physical"]
    assert len(report["covariance"]) == 6


def test_state_report_with_dump(tmp_path, coupled):
    dump = tmp_path / "amps.bin"
    report = DynamicsService(coupled).state(dump)
    assert report["success"]
    assert report["comparison"]["agree"]
    assert report["contract_ok"]
    assert dump.exists()


def test_state_failure_is_a_contract_violation():
    report = DynamicsService(parse_config("ratio=0.9 omega_t=2.5 cutoff=2")).state()
    assert not report["success"]
    assert report["error_type"] == "ContractViolation"
    assert report["exit_code"] == 3


def test_teleclone_reports():
    symmetric = TelecloneService(parse_config("ratio=0.5857864376269049 symmetric=true")).teleclone()
    assert symmetric["f2"] == pytest.approx(2.0 / 3.0, abs=1e-9)
    frontier = TelecloneService(parse_config("f3_target=0.6")).teleclone()
    assert frontier["frontier"]
    assert frontier["f2"] == pytest.approx(8.0 / 11.0)
    direct = TelecloneService(parse_config("n2=1 n3=0.25")).teleclone()
    assert (direct["f2"], direct["f3"]) == pytest.approx((0.8, 0.5))


def test_teleclone_without_couplings_fails():
    report = TelecloneService(RunConfig()).teleclone()
    assert not report["success"]
    assert report["error_type"] == "ConfigError"
    assert report["exit_code"] == 2
    assert report["command"] == "teleclone"


def test_teleclone_mc_report():
    run = parse_config("ratio=0.5857864376269049 symmetric=true samples=20000 seed=4 z=1+1j")
    report = TelecloneService(run).teleclone_mc()
    assert report["success"]
    assert abs(report["z_scores"]["f2"]) < 4.0
    assert report["clone_report"]["samples"] == 20000


def test_twb_report_with_oracle():
    report = ConditionalService(parse_config("ratio=0.5 omega_t=0.8 eta=0.6 cutoff=40")).twb()
    assert report["success"]
    for key in ("p0", "zeta12", "fid"):
        assert report["oracle"][key] == pytest.approx(report["twb"][key], abs=1e-6)


def test_twb_sweep_and_errors():
    run = parse_config("n2_grid=0.5,1 n3_grid=0.5 eta_grid=0.5,1")
    report = ConditionalService(run).twb_sweep()
    assert len(report["rows"]) == 4
    failed = ConditionalService(parse_config("n2=0.5 n3=0.5 detected_mode=1")).twb()
    assert failed["error_type"] == "DomainError"


def test_classical_reports(tmp_path):
    sweep = ClassicalService(parse_config("steps=10 e5=0.05")).sweep()
    assert len(sweep["rows"]) == 10
    assert sweep["threshold_e5"] == pytest.approx(0.050438, abs=1e-6)
    assert "point" in sweep
    missing = ClassicalService(RunConfig()).compare()
    assert missing["error_type"] == "ConfigError"
    bad = tmp_path / "bad.csv"
    bad.write_text("e5_joules,e2_joules\nx,1\n")
    failed = ClassicalService(parse_config(f"data={bad}")).compare()
    assert failed["error_type"] == "DataFormatError"
    assert "line 2" in failed["error"]
