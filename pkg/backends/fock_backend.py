"""
Truncated Fock-space backend.

Builds the state amplitudes once on construction and serves moments from
them. Cutoffs default to the tail policy in `trimode.fock`.
"""

import logging
import time
from typing import Optional

import numpy as np

from trimode.dynamics import CouplingConfig, Populations
from trimode.errors import ContractViolation
from trimode.fock import (
    MAX_TAIL_BOUND,
    TriFockState,
    build_seeded_state,
    build_vacuum_state,
    mean_fields,
    moments,
)
from trimode.gaussian import Covariance6

from .base_backend import StateBackend

logger = logging.getLogger(__name__)


class FockBackend(StateBackend):
    """
    Brute-force oracle for the analytic backend.

    Raises ContractViolation when the cutoff leaves more than `max_tail`
    of the state outside the truncated space.
    """

    def __init__(self, cfg: CouplingConfig, alpha: complex = 0j,
                 cutoff: Optional[int] = None, max_tail: float = MAX_TAIL_BOUND):
        super().__init__(cfg, alpha)
        self.backend_name = "Truncated Fock"
        self.requested_cutoff = cutoff
        self.max_tail = max_tail
        self.state: Optional[TriFockState] = None
        self._moments = None
        self._build()

    def _build(self):
        start_time = time.time()
        try:
            if self.alpha == 0:
                self.state = build_vacuum_state(self.cfg, self.requested_cutoff, self.max_tail)
            else:
                self.state = build_seeded_state(
                    self.cfg, self.alpha, self.requested_cutoff, max_tail=self.max_tail
                )
        except ContractViolation as e:
            logger.error(f"Fock state construction failed: {str(e)}")
            raise
        elapsed = time.time() - start_time
        logger.debug(
            f"Built Fock state at cutoff {self.state.cutoff} in {elapsed:.2f}s "
            f"(tail {self.state.tail_bound:.2e})"
        )

    def _ensure_moments(self):
        if self.state is None:
            self._build()
        if self._moments is None:
            self._moments = moments(self.state)
        return self._moments

    def populations(self) -> Populations:
        return self._ensure_moments()[0]

    def covariance(self) -> Covariance6:
        return self._ensure_moments()[1]

    def mean_fields(self) -> np.ndarray:
        if self.state is None:
            self._build()
        return mean_fields(self.state)

    def tail_bound(self) -> float:
        if self.state is None:
            self._build()
        return self.state.tail_bound

    def error_bound(self) -> float:
        """Covariance shift from truncating and renormalising the state"""
        if self.state is None:
            self._build()
        return self.state.moment_error_bound

    def check_contract(self) -> bool:
        """Norm deficit tracks the tail bound and the vacuum support law holds"""
        try:
            if self.state is None:
                self._build()
            deficit = abs(1.0 - self.state.norm_sq)
            tail = self.state.tail_bound
            if deficit > max(10.0 * tail, 1e-12):
                logger.error(f"Norm deficit {deficit:.3g} exceeds tail bound {tail:.3g}")
                return False
            if not self.state.seeded and self.state.off_support_weight() > 0.0:
                logger.error("Vacuum-seeded state has weight off n1 = n2 + n3")
                return False
            return True
        except Exception as e:
            logger.error(f"Fock contract check failed: {str(e)}")
            return False

    def close(self):
        self.state = None
        self._moments = None
