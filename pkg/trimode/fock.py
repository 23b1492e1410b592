"""
Truncated three-mode Fock-space engine.

Builds the evolved vacuum state

    |T0> = (1 + N1)^(-1/2) sum_{p,q} x^p y^q sqrt((p+q)!/(p! q!)) |p+q, p, q>

with |x|^2 = N2/(1+N1), |y|^2 = N3/(1+N1), and the seeded state |T_alpha>,
and extracts moments and reduced densities from them. The phases of x and y
are those of g1/f1 and h1/f1: the state is annihilated by the back-evolved
mode operators, so moments agree with the Heisenberg covariance including
the off-diagonal entries.

Everything here is a brute-force cross-check of the closed forms in
`dynamics`, `gaussian` and `conditional`.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from trimode.dynamics import (
    CouplingConfig,
    Populations,
    heisenberg_coefficients,
    mode_populations,
    seeded_displacements,
)
from trimode.errors import ConfigError, ContractViolation, DataFormatError
from trimode.gaussian import Covariance6, covariance_from_moments

logger = logging.getLogger(__name__)

N_MODES = 3
DEFAULT_TAIL_TARGET = 1e-6
MAX_TAIL_BOUND = 0.01
COHERENT_MARGIN_SIGMAS = 6.0


@dataclass(frozen=True, eq=False)
class TriFockState:
    """
    Three-mode state truncated at `cutoff` photons per mode.

    `data` is either the full tensor amps[n1, n2, n3] or, for vacuum-seeded
    states, the (p, q) pair grid holding the amplitude of |p+q, p, q>. The
    tensor view `amps` is expanded from the grid on first use.
    """

    cutoff: int
    data: np.ndarray
    tail_bound: float
    seeded: bool = False
    moment_error_bound: float = 0.0

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        dim = self.cutoff + 1
        if data.shape == (dim, dim):
            p, q = np.indices((dim, dim))
            if np.any(data[p + q > self.cutoff] != 0):
                raise ConfigError("pair grid has weight beyond p + q = cutoff")
        elif data.shape != (dim, dim, dim):
            raise ConfigError(
                f"amplitudes must have shape {(dim,) * 2} or {(dim,) * 3}, got {data.shape}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def is_pair_grid(self) -> bool:
        return self.data.ndim == 2

    @cached_property
    def amps(self) -> np.ndarray:
        if not self.is_pair_grid:
            return self.data
        p, q = np.indices((self.dim, self.dim))
        inside = p + q <= self.cutoff
        amps = np.zeros((self.dim,) * N_MODES, dtype=complex)
        amps[(p + q)[inside], p[inside], q[inside]] = self.data[inside]
        amps.setflags(write=False)
        return amps

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))

    def normalized(self) -> np.ndarray:
        return self.amps / math.sqrt(self.norm_sq)

    def off_support_weight(self) -> float:
        """Largest |amp| with n1 != n2 + n3"""
        if self.is_pair_grid:
            return 0.0
        n1, n2, n3 = np.indices(self.data.shape)
        mask = n1 != n2 + n3
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.data[mask])))

    def amplitude(self, n1: int, n2: int, n3: int) -> complex:
        if not self.is_pair_grid:
            return complex(self.data[n1, n2, n3])
        if n1 != n2 + n3 or n1 > self.cutoff:
            return 0j
        return complex(self.data[n2, n3])


def _pair_ratios(cfg: CouplingConfig) -> Tuple[complex, complex, float]:
    """(x, y, f1) with x = g1/f1, y = h1/f1; f1 = sqrt(1 + N1) is real"""
    coeffs = heisenberg_coefficients(cfg)
    f1 = coeffs.f[0].real
    return coeffs.g[0] / f1, coeffs.h[0] / f1, f1


def _power_grid(base: complex, k: np.ndarray) -> np.ndarray:
    """base**k elementwise with 0**0 = 1, in log form so large k cannot overflow"""
    if base == 0:
        return np.where(k == 0, 1.0 + 0j, 0j)
    log_mag = k * math.log(abs(base))
    return np.exp(log_mag + 1j * k * np.angle(base))


def vacuum_tail_bound(n1: float, cutoff: int) -> float:
    """Probability that n1 exceeds the cutoff: (N1/(1+N1))^(cutoff+1)"""
    if n1 <= 0:
        return 0.0
    return (n1 / (1.0 + n1)) ** (cutoff + 1)


def truncation_moment_error(n1: float, cutoff: int, tail: float) -> float:
    """
    Largest shift of a quadrature covariance entry caused by truncating and
    renormalising the state.

    Conditioning the thermal n1 distribution on n1 <= cutoff lowers <n1> by
    (cutoff + 1) tail / (1 - tail). The pair moments <a1 a2> and <a1 a3>
    move by at most that divided by sqrt(N1 / (1 + N1)), and covariance
    entries carry twice the moment shift.
    """
    if tail <= 0.0:
        return 0.0
    if tail >= 1.0:
        return math.inf
    shift = (cutoff + 1) * tail / (1.0 - tail)
    if n1 > 0:
        shift /= math.sqrt(n1 / (1.0 + n1))
    return 2.0 * shift


def choose_cutoff(n1: float, alpha: complex = 0.0, target: float = DEFAULT_TAIL_TARGET,
                  cfg: Optional[CouplingConfig] = None) -> int:
    """
    Cutoff leaving less than `target` of the thermal n1 tail outside the box.

    Seeded states add the coherent mean |d|^2 plus a 6-sigma margin of the
    largest displacement (sigma scaled by the thermal width sqrt(1 + 2 N1)).
    """
    if n1 <= 0:
        cutoff = 0
    else:
        r = n1 / (1.0 + n1)
        cutoff = max(0, math.ceil(math.log(target) / math.log(r)) - 1)

    if alpha != 0 and cfg is not None:
        d_max = max(abs(d) for d in seeded_displacements(cfg, alpha))
        width = math.sqrt(1.0 + 2.0 * n1)
        cutoff += math.ceil(d_max ** 2 + COHERENT_MARGIN_SIGMAS * d_max * width)
    logger.debug(f"Cutoff {cutoff} chosen for N1={n1:.4g}, alpha={alpha}")
    return cutoff


def _check_cutoff(cutoff: int):
    if not isinstance(cutoff, (int, np.integer)) or cutoff < 0:
        raise ConfigError(f"cutoff must be a non-negative integer, got {cutoff}")


def _check_tail(tail: float, max_tail: Optional[float]):
    if max_tail is not None and tail > max_tail:
        raise ContractViolation(
            f"tail bound {tail:.3g} exceeds {max_tail:.3g}; raise the cutoff"
        )


def build_vacuum_state(cfg: CouplingConfig, cutoff: Optional[int] = None,
                       max_tail: Optional[float] = MAX_TAIL_BOUND) -> TriFockState:
    """
    |T0> on the support n1 = p + q <= cutoff.

    Args:
        cfg: couplings and interaction time
        cutoff: photons per mode; chosen by `choose_cutoff` when omitted
        max_tail: reject cutoffs leaving more probability than this outside
            the box; None disables the check

    Returns:
        TriFockState with the exact truncated mass as tail_bound
    """
    pops = mode_populations(cfg)
    if cutoff is None:
        cutoff = choose_cutoff(pops.n1)
    _check_cutoff(cutoff)
    tail = vacuum_tail_bound(pops.n1, cutoff)
    _check_tail(tail, max_tail)

    x, y, f1 = _pair_ratios(cfg)
    dim = cutoff + 1
    p, q = np.indices((dim, dim))
    inside = p + q <= cutoff
    log_binom = gammaln(p + q + 1) - gammaln(p + 1) - gammaln(q + 1)
    grid = np.exp(0.5 * log_binom) * _power_grid(x, p) * _power_grid(y, q) / f1
    grid = np.where(inside, grid, 0j)
    return TriFockState(
        cutoff=cutoff,
        data=grid,
        tail_bound=tail,
        seeded=False,
        moment_error_bound=truncation_moment_error(pops.n1, cutoff, tail),
    )


def _seeded_direct(cfg: CouplingConfig, alpha: complex, cutoff: int) -> np.ndarray:
    """Triple sum over |n+p+q, p, q> with the seed entering as (alpha/f1)^n"""
    x, y, f1 = _pair_ratios(cfg)
    kappa = complex(alpha) / f1
    dim = cutoff + 1
    n, p, q = np.indices((dim, dim, dim))
    total = n + p + q
    inside = total <= cutoff
    log_mag = (
        0.5 * gammaln(total + 1) - gammaln(n + 1)
        - 0.5 * gammaln(p + 1) - 0.5 * gammaln(q + 1)
        - 0.5 * abs(alpha) ** 2
    )
    values = (np.exp(log_mag) * _power_grid(kappa, n) * _power_grid(x, p)
              * _power_grid(y, q) / f1)
    amps = np.zeros((dim, dim, dim), dtype=complex)
    amps[total[inside], p[inside], q[inside]] = values[inside]
    return amps


def displacement_operator(d: complex, cutoff: int, pad: Optional[int] = None) -> np.ndarray:
    """
    Truncated D(d) = exp(d a^dag - conj(d) a), (cutoff+1) square.

    The exponential is taken in a padded space and cropped, which keeps the
    retained block accurate up to the padding mass.
    """
    if pad is None:
        pad = max(20, math.ceil(abs(d) ** 2 + 10 * abs(d)))
    dim = cutoff + 1 + pad
    lower = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)
    generator = d * lower.conj().T - np.conj(d) * lower
    return expm(generator)[: cutoff + 1, : cutoff + 1]


def apply_local(amps: np.ndarray, operators: Sequence[np.ndarray]) -> np.ndarray:
    """(O1 x O2 x O3) psi for single-mode matrices O_j"""
    o1, o2, o3 = operators
    return np.einsum("ia,jb,kc,abc->ijk", o1, o2, o3, amps, optimize=True)


def _seeded_by_displacement(cfg: CouplingConfig, alpha: complex, cutoff: int,
                            pad: int) -> np.ndarray:
    big = cutoff + pad
    vacuum = build_vacuum_state(cfg, cutoff=big, max_tail=None)
    ops = [displacement_operator(d, big) for d in seeded_displacements(cfg, alpha)]
    return apply_local(vacuum.amps, ops)[: cutoff + 1, : cutoff + 1, : cutoff + 1]


def build_seeded_state(cfg: CouplingConfig, alpha: complex, cutoff: Optional[int] = None,
                       method: str = "direct", pad: int = 30,
                       max_tail: Optional[float] = MAX_TAIL_BOUND) -> TriFockState:
    """
    |T_alpha> = U_t |alpha, 0, 0>.

    method="direct" evaluates the closed triple sum; method="displacement"
    applies D1(alpha f1(-t)) D2(-conj(alpha f2(-t))) D3(-conj(alpha f3(-t)))
    to |T0> in a space padded by `pad` photons and crops to the cutoff.
    """
    pops = mode_populations(cfg)
    if cutoff is None:
        cutoff = choose_cutoff(pops.n1, alpha=alpha, cfg=cfg)
    _check_cutoff(cutoff)

    if alpha == 0:
        return build_vacuum_state(cfg, cutoff=cutoff, max_tail=max_tail)
    if method == "direct":
        amps = _seeded_direct(cfg, alpha, cutoff)
    elif method == "displacement":
        amps = _seeded_by_displacement(cfg, alpha, cutoff, pad)
    else:
        raise ConfigError(f"unknown seeded-state method '{method}'")

    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    _check_tail(tail, max_tail)
    return TriFockState(
        cutoff=cutoff,
        data=amps,
        tail_bound=tail,
        seeded=True,
        moment_error_bound=truncation_moment_error(pops.n1, cutoff, tail),
    )


def _lower(psi: np.ndarray, axis: int) -> np.ndarray:
    """a_axis psi"""
    dim = psi.shape[axis]
    out = np.zeros_like(psi)
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[axis] = slice(1, dim)
    dst[axis] = slice(0, dim - 1)
    shape = [1] * psi.ndim
    shape[axis] = dim - 1
    out[tuple(dst)] = psi[tuple(src)] * np.sqrt(np.arange(1, dim)).reshape(shape)
    return out


def _pair_grid_moments(state: TriFockState) -> Tuple[np.ndarray, np.ndarray]:
    """
    (m, n) of a vacuum-seeded state straight from its (p, q) grid.

    Only <a1 a2>, <a1 a3> and <a2^dag a3> survive off the diagonal; every
    other pairing changes n1 - n2 - n3.
    """
    c = state.data / math.sqrt(state.norm_sq)
    p, q = np.indices(c.shape)
    weight = np.abs(c) ** 2
    n = np.zeros((N_MODES, N_MODES), dtype=complex)
    n[0, 0] = np.sum(weight * (p + q))
    n[1, 1] = np.sum(weight * p)
    n[2, 2] = np.sum(weight * q)
    # <a2^dag a3>: |p+q, p, q> -> |p+q, p-1, q+1>
    n[1, 2] = np.sum(np.conj(c[1:, :-1]) * np.sqrt(p[1:, :-1]) * c[:-1, 1:] * np.sqrt(q[:-1, 1:]))
    n[2, 1] = np.conj(n[1, 2])
    m = np.zeros((N_MODES, N_MODES), dtype=complex)
    m[0, 1] = m[1, 0] = np.sum(np.conj(c[:-1, :]) * c[1:, :] * np.sqrt((p + q)[1:, :] * p[1:, :]))
    m[0, 2] = m[2, 0] = np.sum(np.conj(c[:, :-1]) * c[:, 1:] * np.sqrt((p + q)[:, 1:] * q[:, 1:]))
    return m, n


def moments(state: TriFockState) -> Tuple[Populations, Covariance6]:
    """
    Populations and quadrature covariance by ladder-operator contraction.

    Only annihilators are applied, so every moment is exact for the
    (renormalised) truncated vector. It differs from the untruncated state
    by at most `state.moment_error_bound`.
    """
    if state.is_pair_grid:
        m, n = _pair_grid_moments(state)
        pops = Populations(*(float(n[j, j].real) for j in range(N_MODES)))
        return pops, Covariance6(covariance_from_moments(m, n))

    psi = state.normalized()
    lowered = [_lower(psi, axis) for axis in range(N_MODES)]
    means = np.array([np.vdot(psi, lowered[j]) for j in range(N_MODES)])
    n = np.array([[np.vdot(lowered[j], lowered[k]) for k in range(N_MODES)]
                  for j in range(N_MODES)])
    m = np.array([[np.vdot(psi, _lower(lowered[k], j)) for k in range(N_MODES)]
                  for j in range(N_MODES)])
    pops = Populations(*(float(n[j, j].real) for j in range(N_MODES)))
    cov = Covariance6(covariance_from_moments(0.5 * (m + m.T), n, means))
    return pops, cov


def mean_fields(state: TriFockState) -> np.ndarray:
    """<a_j> for the three modes"""
    if state.is_pair_grid:
        return np.zeros(N_MODES, dtype=complex)
    psi = state.normalized()
    return np.array([np.vdot(psi, _lower(psi, axis)) for axis in range(N_MODES)])


def reduce(state: TriFockState, keep: Iterable[int], normalize: bool = True) -> np.ndarray:
    """
    Reduced density matrix over the kept modes (1-based, in the given order).

    The result is indexed by the kept modes in row-major order, e.g. keep
    (1, 2) gives rho[(n1, n2), (m1, m2)].
    """
    keep = [int(k) - 1 for k in keep]
    if not keep or any(k not in range(N_MODES) for k in keep) or len(set(keep)) != len(keep):
        raise ConfigError(f"keep must be distinct modes among 1, 2, 3, got {[k + 1 for k in keep]}")
    traced = [axis for axis in range(N_MODES) if axis not in keep]
    psi = state.normalized() if normalize else state.amps
    moved = np.transpose(psi, keep + traced).reshape(state.dim ** len(keep), -1)
    return moved @ moved.conj().T


def characteristic_function_fock(state: TriFockState, lambdas: Sequence[complex],
                                 pad: Optional[int] = None) -> complex:
    """Tr[rho D1(l1) D2(l2) D3(l3)] in the truncated space"""
    psi = state.normalized()
    ops = [displacement_operator(lam, state.cutoff, pad) for lam in lambdas]
    return complex(np.vdot(psi, apply_local(psi, ops)))


def dump_amplitudes(state: TriFockState, path) -> Path:
    """
    Binary dump, little-endian: uint32 cutoff, uint32 mode count, then the
    amplitude tensor in row-major order as (real, imag) float64 pairs.
    """
    path = Path(path)
    header = np.array([state.cutoff, N_MODES], dtype="<u4")
    with path.open("wb") as handle:
        handle.write(header.tobytes())
        handle.write(np.ascontiguousarray(state.amps, dtype="<c16").tobytes())
    logger.debug(f"Dumped {state.amps.size} amplitudes to {path}")
    return path


def load_amplitudes(path) -> TriFockState:
    """
    Inverse of dump_amplitudes; tail_bound is the norm deficit. Tensors with
    no weight off n1 = n2 + n3 come back as vacuum-seeded pair grids.
    """
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise DataFormatError(f"{path}: missing header")
    cutoff, modes = (int(v) for v in np.frombuffer(raw[:8], dtype="<u4"))
    if modes != N_MODES:
        raise DataFormatError(f"{path}: expected {N_MODES} modes, header says {modes}")
    expected = (cutoff + 1) ** N_MODES * 16
    if len(raw) - 8 != expected:
        raise DataFormatError(f"{path}: expected {expected} payload bytes, found {len(raw) - 8}")
    amps = np.frombuffer(raw[8:], dtype="<c16").reshape((cutoff + 1,) * N_MODES)
    weight = np.abs(amps) ** 2
    tail = max(0.0, 1.0 - float(np.sum(weight)))
    n1 = float(np.sum(weight * np.arange(cutoff + 1)[:, None, None]))
    error = truncation_moment_error(n1, cutoff, tail)
    tensor = TriFockState(cutoff=cutoff, data=amps, tail_bound=tail, moment_error_bound=error)
    if tensor.off_support_weight() > 0.0:
        return TriFockState(cutoff=cutoff, data=amps, tail_bound=tail, seeded=True,
                            moment_error_bound=error)
    p, q = np.indices((cutoff + 1, cutoff + 1))
    inside = p + q <= cutoff
    grid = np.where(inside, amps[np.minimum(p + q, cutoff), p, q], 0j)
    return TriFockState(cutoff=cutoff, data=grid, tail_bound=tail, moment_error_bound=error)
