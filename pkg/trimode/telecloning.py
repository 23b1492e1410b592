"""
1 -> 2 telecloning of coherent states over the three-mode state.

Mode 1 and the signal mode b are measured jointly; the outcome beta is
complex Gaussian around -conj(z) with variance 1 + N1, and modes 2 and 3 are
left in coherent states with amplitudes (z + conj(beta)) kappa_j. A
beta-dependent displacement turns them into clones whose fidelity with |z>
does not depend on z.

For a seeded crystal the outcome distribution is shifted by the mode-1
displacement d1 and the clones carry the displacements d2, d3. The
correction used here removes both shifts, so each seeded outcome beta is
equivalent to the unseeded outcome beta - d1 and the fidelities coincide.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from trimode.dynamics import (
    CouplingConfig,
    ModeCoefficients,
    backward_coefficients,
    mode_populations,
    reduced_parameters,
)
from trimode.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

MIN_MC_SAMPLES = 1_000
DEFAULT_CHUNK = 25_000
FRONTIER_RANGE = (0.5, 2.0 / 3.0)


@dataclass(frozen=True)
class TeleclonePlan:
    """Gains kappa_j = sqrt(N_j/(1+N1)) and the optional seed"""

    kappa2: float
    kappa3: float
    n1: float
    n2: float
    n3: float
    seed_alpha: Optional[complex] = None
    # coefficients at -t; the seeded displacements are built from f
    f_coeffs: Optional[ModeCoefficients] = None

    def __post_init__(self):
        if min(self.n1, self.n2, self.n3) < 0:
            raise DomainError(f"populations must be >= 0, got {(self.n1, self.n2, self.n3)}")
        if not (0 <= self.kappa2 < 1 and 0 <= self.kappa3 < 1):
            raise DomainError(f"gains must lie in [0, 1), got {(self.kappa2, self.kappa3)}")
        if self.seed_alpha is not None and self.f_coeffs is None:
            raise ConfigError("seeded plans need the back-evolved coefficients")

    @classmethod
    def from_populations(cls, n2: float, n3: float) -> "TeleclonePlan":
        n1 = n2 + n3
        return cls(
            kappa2=math.sqrt(n2 / (1.0 + n1)),
            kappa3=math.sqrt(n3 / (1.0 + n1)),
            n1=n1,
            n2=n2,
            n3=n3,
        )

    @classmethod
    def from_config(cls, cfg: CouplingConfig, alpha: Optional[complex] = None) -> "TeleclonePlan":
        pops = mode_populations(cfg)
        plan = cls.from_populations(pops.n2, pops.n3)
        if alpha is None or alpha == 0:
            return plan
        back = backward_coefficients(cfg)
        return cls(
            kappa2=plan.kappa2,
            kappa3=plan.kappa3,
            n1=plan.n1,
            n2=plan.n2,
            n3=plan.n3,
            seed_alpha=complex(alpha),
            f_coeffs=back,
        )

    @property
    def seeded(self) -> bool:
        return self.seed_alpha is not None

    @property
    def kappas(self) -> Tuple[float, float]:
        return (self.kappa2, self.kappa3)

    @property
    def displacements(self) -> Tuple[complex, complex, complex]:
        """(alpha f1, -conj(alpha f2), -conj(alpha f3)) with f taken at -t"""
        if not self.seeded:
            return (0j, 0j, 0j)
        a, f = self.seed_alpha, self.f_coeffs.f
        return (a * f[0], -(a * f[1]).conjugate(), -(a * f[2]).conjugate())


@dataclass(frozen=True)
class CloneReport:
    """Clone fidelities, analytic or Monte-Carlo"""

    f2: float
    f3: float
    input_z: complex
    mc_stderr: Optional[Tuple[float, float]] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        stderr2, stderr3 = self.mc_stderr if self.mc_stderr else (None, None)
        return {
            "f2": self.f2,
            "f3": self.f3,
            "stderr2": stderr2,
            "stderr3": stderr3,
            "samples": self.samples,
            "seed": self.seed,
            "config": dict(self.config),
        }


def _as_generator(rng: Union[None, int, np.random.Generator, np.random.SeedSequence]):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def outcome_density(beta, z: complex, n1: float):
    """P_z(beta) = exp(-|beta + conj(z)|^2/(1+N1)) / (pi (1+N1))"""
    width = 1.0 + n1
    beta = np.asarray(beta, dtype=complex)
    value = np.exp(-np.abs(beta + np.conj(z)) ** 2 / width) / (math.pi * width)
    return float(value) if value.ndim == 0 else value


def outcome_sampler(z: complex, n1: float, rng_seed=None, size: int = 1,
                    shift: complex = 0j) -> np.ndarray:
    """
    Draw measurement outcomes beta ~ P_z, optionally shifted by `shift`.

    Each quadrature has variance (1 + N1)/2. The same seed always yields the
    same samples.
    """
    if n1 < 0:
        raise DomainError(f"n1 must be >= 0, got {n1}")
    rng = _as_generator(rng_seed)
    sigma = math.sqrt((1.0 + n1) / 2.0)
    centre = -np.conj(z) + shift
    return centre + sigma * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def conditional_amplitudes(z: complex, beta, plan: TeleclonePlan):
    """
    Coherent amplitudes of modes 2 and 3 after the outcome beta.

    Unseeded: delta_j = (z + conj(beta)) kappa_j. Seeded:
    zeta_j = (z + conj(beta) - conj(d1)) kappa_j + d_j.
    """
    beta = np.asarray(beta, dtype=complex)
    d1, d2, d3 = plan.displacements
    w = z + np.conj(beta) - np.conj(d1)
    return (w * plan.kappa2 + d2, w * plan.kappa3 + d3)


def seeded_correction(beta, plan: TeleclonePlan):
    """
    Arguments u_j of the correction D_2^dag(u_2) x D_3^dag(u_3):
    u_j = conj(beta) - conj(d1) + d_j. Without a seed these are conj(beta).
    """
    beta = np.asarray(beta, dtype=complex)
    d1, d2, d3 = plan.displacements
    base = np.conj(beta) - np.conj(d1)
    return (base + d2, base + d3)


def corrected_clone_amplitudes(z: complex, beta, plan: TeleclonePlan):
    """c_j after the correction; unseeded c_j = z kappa_j + conj(beta)(kappa_j - 1)"""
    zeta2, zeta3 = conditional_amplitudes(z, beta, plan)
    u2, u3 = seeded_correction(beta, plan)
    return (zeta2 - u2, zeta3 - u3)


def symmetric_fidelity(n: float) -> float:
    """F(N) = 1/(2 + 3N - 2 sqrt(N(2N + 1))) for N2 = N3 = N"""
    if n < 0:
        raise DomainError(f"population must be >= 0, got {n}")
    return 1.0 / (2.0 + 3.0 * n - 2.0 * math.sqrt(n * (2.0 * n + 1.0)))


def _clone_fidelity(own: float, other: float) -> float:
    return 1.0 / (2.0 + other + 2.0 * own - 2.0 * math.sqrt(own * (own + other + 1.0)))


def clone_fidelities(n2: float, n3: float) -> Tuple[float, float]:
    """Closed-form (F2, F3); independent of the input amplitude"""
    if n2 < 0 or n3 < 0:
        raise DomainError(f"populations must be >= 0, got ({n2}, {n3})")
    return _clone_fidelity(n2, n3), _clone_fidelity(n3, n2)


def asymmetric_frontier(f3_target: float) -> Tuple[float, float, float]:
    """
    Populations maximising F2 at fixed F3, and that F2.

    N2 = 1/F3 - 1, N3 = 1/(4 N2), F2 = 4(1 - F3)/(4 - 3 F3). The target is
    accepted on [1/2, 2/3]: F3 = 1/2 is the N2 = 1 end, F3 = 2/3 the
    symmetric optimum.
    """
    low, high = FRONTIER_RANGE
    if not (low - 1e-15 <= f3_target <= high + 1e-15):
        raise DomainError(f"f3 target must lie in [1/2, 2/3], got {f3_target}")
    n2 = 1.0 / f3_target - 1.0
    n3 = 1.0 / (4.0 * n2)
    f2 = 4.0 * (1.0 - f3_target) / (4.0 - 3.0 * f3_target)
    return n2, n3, f2


def analytic_report(n2: float, n3: float, z: complex = 0j,
                    config: Optional[dict] = None) -> CloneReport:
    """Closed-form fidelities packaged like a Monte-Carlo run, without errors"""
    f2, f3 = clone_fidelities(n2, n3)
    return CloneReport(f2=f2, f3=f3, input_z=complex(z), config=dict(config or {}))


def _mc_chunk(z: complex, plan: TeleclonePlan, size: int, seed_seq: np.random.SeedSequence):
    """Sums and sums of squares of the per-sample overlaps exp(-|c_j - z|^2)"""
    beta = outcome_sampler(z, plan.n1, seed_seq, size=size, shift=plan.displacements[0])
    c2, c3 = corrected_clone_amplitudes(z, beta, plan)
    fid2 = np.exp(-np.abs(c2 - z) ** 2)
    fid3 = np.exp(-np.abs(c3 - z) ** 2)
    return np.array([fid2.sum(), fid3.sum(), (fid2 ** 2).sum(), (fid3 ** 2).sum()])


def mc_teleclone(z: complex, cfg: CouplingConfig, alpha: Optional[complex] = None,
                 samples: int = 100_000, rng_seed: int = 0, workers: int = 1,
                 chunk_size: int = DEFAULT_CHUNK) -> CloneReport:
    """
    Monte-Carlo estimate of the clone fidelities.

    Samples are split into chunks seeded by children of SeedSequence(rng_seed),
    so the estimate depends only on (rng_seed, samples, chunk_size) and not on
    the number of workers.
    """
    if samples < MIN_MC_SAMPLES:
        raise ConfigError(f"samples must be >= {MIN_MC_SAMPLES}, got {samples}")
    if workers < 1 or chunk_size < 1:
        raise ConfigError("workers and chunk_size must be >= 1")

    plan = TeleclonePlan.from_config(cfg, alpha)
    sizes = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        sizes.append(samples % chunk_size)
    children = np.random.SeedSequence(rng_seed).spawn(len(sizes))
    logger.debug(f"MC telecloning: {samples} samples in {len(sizes)} chunks on {workers} worker(s)")

    if workers == 1:
        partials = [_mc_chunk(z, plan, n, seq) for n, seq in zip(sizes, children)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda args: _mc_chunk(z, plan, *args), zip(sizes, children)))

    s2, s3, q2, q3 = np.sum(partials, axis=0)
    mean2, mean3 = s2 / samples, s3 / samples
    var2 = max(0.0, q2 / samples - mean2 ** 2) * samples / (samples - 1)
    var3 = max(0.0, q3 / samples - mean3 ** 2) * samples / (samples - 1)

    config = dict(reduced_parameters(cfg))
    if plan.seeded:
        config["alpha"] = [plan.seed_alpha.real, plan.seed_alpha.imag]
    return CloneReport(
        f2=float(mean2),
        f3=float(mean3),
        input_z=complex(z),
        mc_stderr=(math.sqrt(var2 / samples), math.sqrt(var3 / samples)),
        samples=samples,
        seed=rng_seed,
        config=config,
    )
