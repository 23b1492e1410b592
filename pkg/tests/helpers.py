"""
Shared generators for randomised checks
"""

import math

import numpy as np

from trimode.dynamics import CouplingConfig, mode_populations


def random_config(rng: np.random.Generator, regime: str = "trigonometric",
                  max_omega_t: float = math.pi) -> CouplingConfig:
    """Complex couplings with random phases in the requested regime"""
    phase1, phase2 = rng.uniform(-math.pi, math.pi, size=2)
    gamma2 = rng.uniform(0.2, 3.0)
    if regime == "trigonometric":
        gamma1 = gamma2 * rng.uniform(0.02, 0.98)
    elif regime == "hyperbolic":
        gamma1 = gamma2 * rng.uniform(1.02, 2.0)
    else:
        gamma1 = gamma2
    omega = math.sqrt(abs(gamma2 ** 2 - gamma1 ** 2))
    omega_t = rng.uniform(0.01, max_omega_t)
    t = omega_t / omega if omega > 0 else omega_t / gamma2
    return CouplingConfig(
        gamma1=gamma1 * complex(math.cos(phase1), math.sin(phase1)),
        gamma2=gamma2 * complex(math.cos(phase2), math.sin(phase2)),
        t=t,
    )


def random_bounded_configs(rng: np.random.Generator, count: int, max_n1: float = 2.0,
                           min_pop: float = 1e-3):
    """Trigonometric configs with N2, N3 > min_pop and N1 <= max_n1"""
    configs = []
    while len(configs) < count:
        cfg = random_config(rng)
        pops = mode_populations(cfg)
        if pops.n1 <= max_n1 and pops.n2 > min_pop and pops.n3 > min_pop:
            configs.append(cfg)
    return configs
