"""
Covariance-matrix description of the evolved Gaussian state.

Conventions: quadratures q = a + a^dag and p = -i(a - a^dag), ordered
(q1, q2, q3, p1, p2, p3); the vacuum covariance is the identity. The
characteristic function is chi(lambda) = Tr[rho D(lambda)] with
lambda_j = (p_j - i x_j)/sqrt(2), so that chi = exp(-x^T C x / 4) for a
zero-mean state.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from trimode.dynamics import CouplingConfig, ModeCoefficients, heisenberg_coefficients
from trimode.errors import ContractViolation, DomainError

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
PHYSICALITY_TOLERANCE = 1e-10
DEFAULT_PPT_SCALE = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """J = [[0, -I], [I, 0]] over (q..., p...)"""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True, eq=False)
class Covariance6:
    """Real symmetric 6x6 covariance over (x1, x2, x3, p1, p2, p3)"""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.shape != (6, 6):
            raise DomainError(f"covariance must be 6x6, got shape {c.shape}")
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.max(np.abs(c - c.T)) > SYMMETRY_TOLERANCE * scale:
            raise DomainError("covariance matrix is not symmetric")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.c)))

    def to_list(self):
        return self.c.tolist()


@dataclass(frozen=True)
class PptReport:
    """Minimum eigenvalue of each partially transposed Gamma_j"""

    min_eig: Tuple[float, float, float]
    fully_inseparable: bool
    tolerance: float
    entangled_cuts: Tuple[bool, bool, bool] = field(default=(False, False, False))

    def to_dict(self) -> dict:
        return {
            "min_eig": list(self.min_eig),
            "fully_inseparable": self.fully_inseparable,
            "entangled_cuts": list(self.entangled_cuts),
            "tolerance": self.tolerance,
        }


def covariance_from_moments(
    m: np.ndarray, n: np.ndarray, means: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Quadrature covariance from normally ordered moments.

    Args:
        m: matrix of <a_j a_k>
        n: matrix of <a_j^dag a_k>
        means: vector of <a_j> (zero when omitted)

    Returns:
        Real (2n x 2n) symmetrised covariance over (q..., p...)
    """
    m = np.asarray(m, dtype=complex)
    n = np.asarray(n, dtype=complex)
    modes = m.shape[0]
    eye = np.eye(modes)
    # (a..., a^dag...) -> (q..., p...)
    t = np.block([[eye, eye], [-1j * eye, 1j * eye]])
    second = np.block([[m, eye + n.T], [n, m.conj()]])
    cov = np.real(t @ second @ t.T)
    if means is not None:
        means = np.asarray(means, dtype=complex)
        r = np.real(t @ np.concatenate([means, means.conj()]))
        cov = cov - np.outer(r, r)
    return 0.5 * (cov + cov.T)


def _heisenberg_blocks(coeffs: ModeCoefficients) -> Tuple[np.ndarray, np.ndarray]:
    """a(t) = A a + B a^dag with a = (a1, a2, a3)"""
    f, g, h = coeffs.f, coeffs.g, coeffs.h
    a = np.array(
        [
            [f[0].conjugate(), 0.0, 0.0],
            [0.0, g[1], g[2]],
            [0.0, h[1], h[2]],
        ],
        dtype=complex,
    )
    b = np.array(
        [
            [0.0, f[1].conjugate(), f[2].conjugate()],
            [g[0], 0.0, 0.0],
            [h[0], 0.0, 0.0],
        ],
        dtype=complex,
    )
    return a, b


def covariance_from_couplings(cfg: CouplingConfig) -> Covariance6:
    """Covariance of U_t|0,0,0> from the Heisenberg coefficients"""
    a, b = _heisenberg_blocks(heisenberg_coefficients(cfg))
    m = a @ b.T
    n = b.conj() @ b.T
    return Covariance6(covariance_from_moments(0.5 * (m + m.T), n))


def _lambda_to_phase_space(lambdas: Sequence[complex]) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=complex)
    x = -math.sqrt(2.0) * lam.imag
    p = math.sqrt(2.0) * lam.real
    return np.concatenate([x, p])


def characteristic_function(cov: Covariance6, lambdas: Sequence[complex]) -> complex:
    """chi(lambda) = exp(-x^T C x / 4)"""
    x = _lambda_to_phase_space(lambdas)
    return complex(np.exp(-0.25 * x @ cov.c @ x))


def characteristic_function_heisenberg(cfg: CouplingConfig, lambdas: Sequence[complex]) -> complex:
    """chi through the transformed arguments: exp(-(|l1'|^2 + |l2'|^2 + |l3'|^2)/2)"""
    coeffs = heisenberg_coefficients(cfg)
    f, g, h = coeffs.f, coeffs.g, coeffs.h
    l1, l2, l3 = (complex(x) for x in lambdas)
    p1 = f[0] * l1 - g[0] * l2.conjugate() - h[0] * l3.conjugate()
    p2 = -f[1].conjugate() * l1.conjugate() + g[1].conjugate() * l2 + h[1].conjugate() * l3
    p3 = -f[2].conjugate() * l1.conjugate() + g[2].conjugate() * l2 + h[2].conjugate() * l3
    return complex(math.exp(-0.5 * (abs(p1) ** 2 + abs(p2) ** 2 + abs(p3) ** 2)))


def partial_transpose_matrix(c: np.ndarray, mode: int, n_modes: int) -> np.ndarray:
    """Gamma_j = Lambda_j C Lambda_j - iJ, Lambda_j flipping p_j (mode is 0-based)"""
    flip = np.ones(2 * n_modes)
    flip[n_modes + mode] = -1.0
    return flip[:, None] * np.asarray(c) * flip[None, :] - 1j * symplectic_form(n_modes)


def partial_transpose_min_eigenvalues(c: np.ndarray, n_modes: int) -> Tuple[float, ...]:
    """Smallest eigenvalue of Gamma_j for every mode j"""
    return tuple(
        float(np.linalg.eigvalsh(partial_transpose_matrix(c, j, n_modes))[0])
        for j in range(n_modes)
    )


def default_tolerance(cov: Covariance6) -> float:
    """1e-9 scaled by the largest covariance entry"""
    return DEFAULT_PPT_SCALE * max(1.0, cov.scale)


def ppt_test(cov: Covariance6, tol: Optional[float] = None) -> PptReport:
    """
    Gaussian partial-transpose test on the three single-mode cuts.

    The state is fully inseparable when every Gamma_j has an eigenvalue
    below -tol.
    """
    if tol is None:
        tol = default_tolerance(cov)
    min_eig = partial_transpose_min_eigenvalues(cov.c, 3)
    cuts = tuple(value < -tol for value in min_eig)
    logger.debug(f"PPT minimum eigenvalues {min_eig} at tolerance {tol:.3g}")
    return PptReport(
        min_eig=min_eig,
        fully_inseparable=all(cuts),
        tolerance=tol,
        entangled_cuts=cuts,
    )


def is_physical(c: np.ndarray, tol: float = PHYSICALITY_TOLERANCE) -> bool:
    """Uncertainty relation C + iJ >= 0"""
    c = np.asarray(c, dtype=float)
    n_modes = c.shape[0] // 2
    return float(np.linalg.eigvalsh(c + 1j * symplectic_form(n_modes))[0]) >= -tol


def min_eigenvalue_power(
    h: np.ndarray, tol: float = 1e-8, max_iter: int = 200_000, seed: int = 7
) -> float:
    """
    Smallest eigenvalue of a Hermitian matrix by power iteration on sigma*I - h.

    sigma is the largest absolute row sum, so sigma*I - h is positive
    semidefinite and its dominant eigenvalue is sigma - lambda_min. Iterates
    until the eigen-residual drops below tol, which bounds the error.
    """
    h = np.asarray(h, dtype=complex)
    dim = h.shape[0]
    sigma = float(np.max(np.sum(np.abs(h), axis=1))) + 1.0
    shifted = sigma * np.eye(dim) - h

    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = shifted @ v
        mu = float(np.real(np.vdot(v, w)))
        if np.linalg.norm(w - mu * v) < tol:
            return sigma - mu
        v = w / np.linalg.norm(w)
    raise ContractViolation(f"power iteration did not reach residual {tol} in {max_iter} steps")
