"""
Heisenberg dynamics of the interlinked bilinear interaction

    H = g1 a1^dag a3^dag + g2 a2^dag a3 + h.c.

The field operators evolve linearly,

    a1^dag(t) = f1 a1^dag + f2 a2 + f3 a3
    a2(t)     = g1 a1^dag + g2 a2 + g3 a3
    a3(t)     = h1 a1^dag + h2 a2 + h3 a3

and every observable of the vacuum-seeded state follows from the nine
coefficients. Sign convention: f1 = (|g2|^2 - |g1|^2 cos wt)/w^2 and
g2 = (|g2|^2 cos wt - |g1|^2)/w^2, which is the only choice that gives the
identity at t = 0 and preserves the canonical commutators; f2 and g1 follow
from the same requirement. This is checked against the matrix exponential of
the equations of motion (`propagator_oracle`).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import expm

from trimode.errors import ConfigError, ContractViolation, DomainError
from trimode.numerics import cos_kernel, sin_kernel, versine_kernel

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-12

TRIGONOMETRIC = "trigonometric"
HYPERBOLIC = "hyperbolic"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class CouplingConfig:
    """Complex couplings gamma1, gamma2 (1/time) and the interaction time t"""

    gamma1: complex
    gamma2: complex
    t: float

    def __post_init__(self):
        violations = []
        if not math.isfinite(self.t) or self.t < 0:
            violations.append(f"t must be finite and >= 0, got {self.t}")
        if not (cmath.isfinite(self.gamma1) and cmath.isfinite(self.gamma2)):
            violations.append("couplings must be finite")
        elif self.gamma1 == 0 and self.gamma2 == 0:
            violations.append("gamma1 and gamma2 cannot both vanish")
        if violations:
            raise ConfigError(violations)
        object.__setattr__(self, "gamma1", complex(self.gamma1))
        object.__setattr__(self, "gamma2", complex(self.gamma2))
        object.__setattr__(self, "t", float(self.t))

    @property
    def omega_sq(self) -> float:
        """Omega^2 = |gamma2|^2 - |gamma1|^2, negative in the hyperbolic regime"""
        return abs(self.gamma2) ** 2 - abs(self.gamma1) ** 2

    @property
    def omega_t(self) -> float:
        """|Omega| t"""
        return math.sqrt(abs(self.omega_sq)) * self.t

    @property
    def ratio(self) -> float:
        if self.gamma2 == 0:
            return math.inf
        return abs(self.gamma1) / abs(self.gamma2)

    @property
    def regime(self) -> str:
        return regime_of(abs(self.gamma1), abs(self.gamma2))


def regime_of(abs_gamma1: float, abs_gamma2: float) -> str:
    if abs_gamma1 == abs_gamma2:
        return DEGENERATE
    return TRIGONOMETRIC if abs_gamma2 > abs_gamma1 else HYPERBOLIC


@dataclass(frozen=True)
class ModeCoefficients:
    """The nine Heisenberg coefficients plus Omega (Gamma = i Omega)"""

    f: Tuple[complex, complex, complex]
    g: Tuple[complex, complex, complex]
    h: Tuple[complex, complex, complex]
    omega: complex

    @property
    def gamma(self) -> complex:
        return 1j * self.omega

    def as_matrix(self) -> np.ndarray:
        """Rows f, g, h acting on (a1^dag, a2, a3)"""
        return np.array([self.f, self.g, self.h], dtype=complex)

    def identity_residuals(self) -> dict:
        """Deviations of the six Bogoliubov/cross identities from their targets"""
        f, g, h = self.f, self.g, self.h

        def hermitian_form(u, v):
            # -u1 conj(v1) + u2 conj(v2) + u3 conj(v3)
            return -u[0] * v[0].conjugate() + u[1] * v[1].conjugate() + u[2] * v[2].conjugate()

        return {
            "f_norm": abs(-hermitian_form(f, f) - 1.0),
            "g_norm": abs(hermitian_form(g, g) - 1.0),
            "h_norm": abs(hermitian_form(h, h) - 1.0),
            "fg_cross": abs(hermitian_form(f, g)),
            "fh_cross": abs(hermitian_form(f, h)),
            "gh_cross": abs(hermitian_form(g, h)),
        }

    def max_residual(self) -> float:
        return max(self.identity_residuals().values())


@dataclass(frozen=True)
class Populations:
    """Mean photon numbers of the three modes"""

    n1: float
    n2: float
    n3: float

    @property
    def delta(self) -> float:
        """The conserved quantity N1 - N2 - N3"""
        return self.n1 - self.n2 - self.n3

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.n1, self.n2, self.n3)


@dataclass(frozen=True)
class SymmetricPoint:
    """Interaction point where N2 = N3 = n"""

    ratio: float
    omega_t: float
    n: float
    regime: str

    def config(self, gamma2: float = 1.0) -> CouplingConfig:
        """Real couplings gamma2 and ratio*gamma2 reaching this point"""
        if self.regime == DEGENERATE:
            # Omega vanishes; N2 = N3 at |gamma2| t = 2
            return CouplingConfig(gamma1=gamma2, gamma2=gamma2, t=2.0 / abs(gamma2))
        return config_from_reduced(self.ratio, self.omega_t, gamma2=gamma2)


def _coefficients(gamma1: complex, gamma2: complex, t: float) -> ModeCoefficients:
    """Closed-form coefficients for any real t (negative t is the inverse map)"""
    w2 = abs(gamma2) ** 2 - abs(gamma1) ** 2
    s = sin_kernel(w2, t)
    v = versine_kernel(w2, t)
    c = cos_kernel(w2, t)
    g1c, g2c = gamma1.conjugate(), gamma2.conjugate()

    f = (1.0 + abs(gamma1) ** 2 * v, g1c * g2c * v, 1j * g1c * s)
    g = (-gamma1 * gamma2 * v, 1.0 - abs(gamma2) ** 2 * v, -1j * gamma2 * s)
    h = (-1j * gamma1 * s, -1j * g2c * s, complex(c))
    return ModeCoefficients(
        f=tuple(complex(x) for x in f),
        g=tuple(complex(x) for x in g),
        h=tuple(complex(x) for x in h),
        omega=cmath.sqrt(w2),
    )


def heisenberg_coefficients(cfg: CouplingConfig) -> ModeCoefficients:
    """
    Heisenberg coefficients in all three regimes.

    The trigonometric (|gamma2| > |gamma1|), hyperbolic (|gamma2| < |gamma1|)
    and degenerate (|gamma2| = |gamma1|) regimes share one evaluation through
    the kernels in `trimode.numerics`, which switch to cosh/sinh with real
    arithmetic and to Taylor limits as |Omega| t -> 0.
    """
    coeffs = _coefficients(cfg.gamma1, cfg.gamma2, cfg.t)
    logger.debug(f"Coefficients for {cfg.regime} regime at |Omega|t={cfg.omega_t:.6g}")
    return coeffs


def backward_coefficients(cfg: CouplingConfig) -> ModeCoefficients:
    """Coefficients at -t, i.e. of the inverse evolution"""
    return _coefficients(cfg.gamma1, cfg.gamma2, -cfg.t)


def coefficient_matrix(cfg: CouplingConfig) -> np.ndarray:
    return heisenberg_coefficients(cfg).as_matrix()


def propagator_oracle(cfg: CouplingConfig) -> np.ndarray:
    """exp(M t) for d/dt (a1^dag, a2, a3) = M (a1^dag, a2, a3), rows f, g, h"""
    g1, g2 = cfg.gamma1, cfg.gamma2
    generator = np.array(
        [
            [0.0, 0.0, 1j * g1.conjugate()],
            [0.0, 0.0, -1j * g2],
            [-1j * g1, -1j * g2.conjugate(), 0.0],
        ],
        dtype=complex,
    )
    return expm(generator * cfg.t)


def mode_populations(cfg: CouplingConfig) -> Populations:
    """N2 = |g1|^2, N3 = |h1|^2 and N1 = N2 + N3 for vacuum input"""
    w2 = cfg.omega_sq
    s = sin_kernel(w2, cfg.t)
    v = versine_kernel(w2, cfg.t)
    a1, a2 = abs(cfg.gamma1) ** 2, abs(cfg.gamma2) ** 2
    n2 = a1 * a2 * v * v
    n3 = a1 * s * s
    return Populations(n1=n2 + n3, n2=n2, n3=n3)


def seeded_populations(cfg: CouplingConfig, alpha: complex) -> Populations:
    """Populations for the seed |alpha, 0, 0>; N1 - N2 - N3 = |alpha|^2"""
    vac = mode_populations(cfg)
    a2 = abs(alpha) ** 2
    return Populations(
        n1=vac.n1 * (1.0 + a2) + a2,
        n2=vac.n2 * (1.0 + a2),
        n3=vac.n3 * (1.0 + a2),
    )


def seeded_displacements(cfg: CouplingConfig, alpha: complex) -> Tuple[complex, complex, complex]:
    """
    Displacements taking the vacuum-seeded state to the alpha-seeded one:
    (alpha f1(-t), -conj(alpha f2(-t)), -conj(alpha f3(-t))). These are also
    the mean field amplitudes <a_j> of the seeded state.
    """
    back = backward_coefficients(cfg)
    alpha = complex(alpha)
    return (
        alpha * back.f[0],
        -(alpha * back.f[1]).conjugate(),
        -(alpha * back.f[2]).conjugate(),
    )


def reduced_parameters(cfg: CouplingConfig) -> dict:
    """(ratio, |Omega| t, regime): everything the observables depend on"""
    return {"ratio": cfg.ratio, "omega_t": cfg.omega_t, "regime": cfg.regime}


def config_from_reduced(ratio: float, omega_t: float, gamma2: float = 1.0) -> CouplingConfig:
    """
    Real positive couplings reproducing (ratio, |Omega| t).

    At ratio == 1 Omega vanishes, so omega_t is read as |gamma2| t instead.
    """
    violations = []
    if not ratio >= 0 or not math.isfinite(ratio):
        violations.append(f"ratio must be finite and >= 0, got {ratio}")
    if not omega_t >= 0 or not math.isfinite(omega_t):
        violations.append(f"omega_t must be finite and >= 0, got {omega_t}")
    if gamma2 <= 0:
        violations.append(f"gamma2 must be > 0, got {gamma2}")
    if violations:
        raise ConfigError(violations)
    gamma1 = ratio * gamma2
    omega = math.sqrt(abs(gamma2 ** 2 - gamma1 ** 2))
    t = omega_t / gamma2 if omega == 0.0 else omega_t / omega
    return CouplingConfig(gamma1=gamma1, gamma2=gamma2, t=t)


def optimal_symmetric_ratio() -> float:
    """|gamma1/gamma2| = sqrt(6 - sqrt(32)), where symmetric clones reach F = 2/3"""
    return math.sqrt(6.0 - math.sqrt(32.0))


def symmetric_point(ratio: float, include_hyperbolic: bool = False) -> Optional[SymmetricPoint]:
    """
    Smallest interaction time where N2 = N3, for coupling ratio r = |gamma1/gamma2|.

    cos(Omega t) = r^2/(2 - r^2) and N = 4 r^2/(2 - r^2)^2. For r > 1 the
    cosine bound is exceeded and None is returned; with include_hyperbolic the
    1 < r < sqrt(2) solution cosh(|Omega| t) = r^2/(2 - r^2) is returned too
    (those points have N > 4, i.e. clones below the classical limit).
    """
    if not ratio > 0 or not math.isfinite(ratio):
        raise DomainError(f"ratio must be a positive finite number, got {ratio}")

    r2 = ratio * ratio
    if r2 >= 2.0:
        return None
    target = r2 / (2.0 - r2)
    n = 4.0 * r2 / (2.0 - r2) ** 2

    if ratio < 1.0:
        point = SymmetricPoint(ratio=ratio, omega_t=math.acos(target), n=n, regime=TRIGONOMETRIC)
    elif ratio == 1.0:
        point = SymmetricPoint(ratio=ratio, omega_t=0.0, n=n, regime=DEGENERATE)
    elif include_hyperbolic:
        point = SymmetricPoint(ratio=ratio, omega_t=math.acosh(target), n=n, regime=HYPERBOLIC)
    else:
        return None

    pops = mode_populations(point.config())
    tol = 1e-10 * max(1.0, n)
    if abs(pops.n2 - n) > tol or abs(pops.n3 - n) > tol:
        raise ContractViolation(
            f"symmetric point check failed at ratio={ratio}: N2={pops.n2}, N3={pops.n3}, N={n}"
        )
    return point
