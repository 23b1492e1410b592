"""
Base state backend.

Every backend describes the same evolved three-mode state and answers the
same questions, so an analytic claim can be checked by swapping backends.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from trimode.dynamics import CouplingConfig, Populations
from trimode.gaussian import Covariance6

logger = logging.getLogger(__name__)


class StateBackend(ABC):
    """
    Abstract base class for state backends.

    Implementations provide:
    1. populations - mean photon numbers of the three modes
    2. covariance - quadrature covariance matrix
    3. check_contract - internal consistency of the representation
    """

    def __init__(self, cfg: CouplingConfig, alpha: complex = 0j):
        self.cfg = cfg
        self.alpha = complex(alpha)
        self.backend_name = "Unknown"

    @abstractmethod
    def populations(self) -> Populations:
        """Mean photon numbers (N1, N2, N3)"""
        pass

    @abstractmethod
    def covariance(self) -> Covariance6:
        """Quadrature covariance over (q1, q2, q3, p1, p2, p3)"""
        pass

    @abstractmethod
    def check_contract(self) -> bool:
        """True when the representation passes its own consistency checks"""
        pass

    def mean_fields(self) -> np.ndarray:
        """<a_j>; zero unless seeded"""
        return np.zeros(3, dtype=complex)

    def tail_bound(self) -> float:
        """Probability mass the representation leaves out"""
        return 0.0

    def error_bound(self) -> float:
        """Largest expected deviation of a second moment caused by the representation"""
        return 0.0

    def get_backend_name(self) -> str:
        return self.backend_name

    def close(self):
        """Release cached state - optional to implement"""
        pass


def compare_backends(a: StateBackend, b: StateBackend, tol: Optional[float] = None) -> dict:
    """
    Largest deviations between two backends.

    The tolerance defaults to 10 times the larger error bound, floored at 1e-10.
    """
    if tol is None:
        tol = max(1e-10, 10.0 * max(a.error_bound(), b.error_bound()))
    pops_a, pops_b = np.array(a.populations().as_tuple()), np.array(b.populations().as_tuple())
    scale = max(1.0, float(np.max(np.abs(pops_a))))
    deviations = {
        "populations": float(np.max(np.abs(pops_a - pops_b))) / scale,
        "covariance": float(np.max(np.abs(a.covariance().c - b.covariance().c))) / scale,
        "mean_fields": float(np.max(np.abs(a.mean_fields() - b.mean_fields()))),
    }
    agree = all(value <= tol for value in deviations.values())
    logger.debug(
        f"{a.get_backend_name()} vs {b.get_backend_name()}: {deviations} (tol {tol:.3g})"
    )
    return {
        "backends": [a.get_backend_name(), b.get_backend_name()],
        "deviations": deviations,
        "tolerance": tol,
        "agree": agree,
    }
