"""
Analytic backend: Heisenberg closed forms for the evolved state.
"""

import logging

import numpy as np

from trimode.dynamics import (
    CouplingConfig,
    Populations,
    heisenberg_coefficients,
    mode_populations,
    seeded_displacements,
    seeded_populations,
)
from trimode.gaussian import Covariance6, covariance_from_couplings, is_physical

from .base_backend import StateBackend

logger = logging.getLogger(__name__)

CONTRACT_TOLERANCE = 1e-10


class AnalyticBackend(StateBackend):
    """Closed-form populations and covariance; displacements do not change C"""

    def __init__(self, cfg: CouplingConfig, alpha: complex = 0j):
        super().__init__(cfg, alpha)
        self.backend_name = "Analytic Gaussian"
        self._coeffs = heisenberg_coefficients(cfg)
        logger.debug(f"Analytic backend ready for {cfg.regime} regime, alpha={self.alpha}")

    def populations(self) -> Populations:
        if self.alpha == 0:
            return mode_populations(self.cfg)
        return seeded_populations(self.cfg, self.alpha)

    def covariance(self) -> Covariance6:
        return covariance_from_couplings(self.cfg)

    def mean_fields(self) -> np.ndarray:
        return np.array(seeded_displacements(self.cfg, self.alpha))

    def check_contract(self) -> bool:
        residual = self._coeffs.max_residual()
        physical = is_physical(self.covariance().c)
        if residual > CONTRACT_TOLERANCE or not physical:
            logger.error(
                f"Analytic contract failed: identity residual {residual:.3g}, physical={physical}"
            )
            return False
        return True
