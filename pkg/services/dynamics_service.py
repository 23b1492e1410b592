"""
Dynamics service: coefficients, covariance, PPT and Fock-state reports
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from backends.analytic_backend import AnalyticBackend
from backends.base_backend import compare_backends
from backends.fock_backend import FockBackend
from trimode.dynamics import (
    heisenberg_coefficients,
    mode_populations,
    propagator_oracle,
    reduced_parameters,
    seeded_displacements,
    seeded_populations,
    symmetric_point,
)
from trimode.errors import TrimodeError
from trimode.fock import dump_amplitudes
from trimode.gaussian import (
    covariance_from_couplings,
    is_physical,
    min_eigenvalue_power,
    partial_transpose_matrix,
    ppt_test,
)

from .base_service import BaseService

logger = logging.getLogger(__name__)


class DynamicsService(BaseService):
    """Closed-form dynamics of the three-mode state and its Fock cross-check"""

    emoji = "🧮"

    def dynamics(self) -> Dict[str, Any]:
        """Heisenberg coefficients, populations and their consistency checks"""
        try:
            cfg = self.config.coupling_config()
            logger.info(f"🧮 Evolving couplings {reduced_parameters(cfg)}")
            coeffs = heisenberg_coefficients(cfg)
            oracle_gap = float(np.max(np.abs(coeffs.as_matrix() - propagator_oracle(cfg))))
            pops = mode_populations(cfg)
            result = {
                "reduced": reduced_parameters(cfg),
                "coefficients": {"f": coeffs.f, "g": coeffs.g, "h": coeffs.h},
                "populations": {"n1": pops.n1, "n2": pops.n2, "n3": pops.n3},
                "identity_residuals": coeffs.identity_residuals(),
                "propagator_deviation": oracle_gap,
            }
            if self.config.alpha != 0:
                seeded = seeded_populations(cfg, self.config.alpha)
                result["seeded"] = {
                    "populations": {"n1": seeded.n1, "n2": seeded.n2, "n3": seeded.n3},
                    "delta": seeded.delta,
                    "displacements": seeded_displacements(cfg, self.config.alpha),
                }
            if cfg.ratio != float("inf"):
                point = symmetric_point(cfg.ratio, include_hyperbolic=self.config.include_hyperbolic)
                result["symmetric_point"] = (
                    None if point is None
                    else {"omega_t": point.omega_t, "n": point.n, "regime": point.regime}
                )
            logger.info(f"🧮 Populations N1={pops.n1:.6g} N2={pops.n2:.6g} N3={pops.n3:.6g}")
            return self._report("dynamics", **result)
        except TrimodeError as e:
            return self._failure("dynamics", e)

    def covariance(self) -> Dict[str, Any]:
        try:
            cfg = self.config.coupling_config()
            logger.info("🧮 Building covariance matrix")
            cov = covariance_from_couplings(cfg)
            return self._report(
                "covariance",
                reduced=reduced_parameters(cfg),
                covariance=cov.to_list(),
                physical=is_physical(cov.c),
            )
        except TrimodeError as e:
            return self._failure("covariance", e)

    def ppt(self, cross_check: bool = True) -> Dict[str, Any]:
        """Partial-transpose eigenvalues, optionally confirmed by power iteration"""
        try:
            cfg = self.config.coupling_config()
            logger.info(f"🔗 PPT test at {reduced_parameters(cfg)}")
            cov = covariance_from_couplings(cfg)
            report = ppt_test(cov)
            result = {"reduced": reduced_parameters(cfg), "ppt": report.to_dict()}
            if cross_check:
                result["power_iteration"] = [
                    min_eigenvalue_power(partial_transpose_matrix(cov.c, j, 3))
                    for j in range(3)
                ]
            logger.info(f"🔗 Fully inseparable: {report.fully_inseparable}")
            return self._report("ppt", **result)
        except TrimodeError as e:
            return self._failure("ppt", e)

    def state(self, dump_path: Optional[Path] = None) -> Dict[str, Any]:
        """Truncated Fock state compared against the analytic backend"""
        try:
            cfg = self.config.coupling_config()
            alpha = self.config.alpha
            logger.info(f"🧬 Building Fock state (alpha={alpha}, cutoff={self.config.cutoff})")
            fock = FockBackend(cfg, alpha=alpha, cutoff=self.config.cutoff)
            analytic = AnalyticBackend(cfg, alpha=alpha)
            try:
                comparison = compare_backends(analytic, fock)
                pops = fock.populations()
                result = {
                    "reduced": reduced_parameters(cfg),
                    "cutoff": fock.state.cutoff,
                    "tail_bound": fock.tail_bound(),
                    "norm": fock.state.norm_sq,
                    "populations": {"n1": pops.n1, "n2": pops.n2, "n3": pops.n3},
                    "contract_ok": fock.check_contract() and analytic.check_contract(),
                    "comparison": comparison,
                }
                if dump_path is not None:
                    result["amplitudes_file"] = str(dump_amplitudes(fock.state, dump_path))
            finally:
                fock.close()
            logger.info(f"🧬 Fock state agrees with closed forms: {comparison['agree']}")
            return self._report("state", **result)
        except TrimodeError as e:
            return self._failure("state", e)
