"""
Conditional twin-beam generation by on/off photodetection.

An on/off detector of efficiency eta on mode 3 of |T0> has no-click element
Pi_0 = sum_n (1 - eta)^n |n><n|. The conditional state of modes 1 and 2
approaches the twin beam sqrt(1 - xi^2) sum_n xi^n |n, n> as eta -> 1.
Detecting mode 2 instead exchanges the roles of N2 and N3; detecting mode 1
leaves modes 2 and 3 unentangled.

Closed forms take populations; the *_state functions work on a TriFockState
and are their brute-force counterparts.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from trimode.errors import ConfigError, DomainError
from trimode.fock import TriFockState
from trimode.gaussian import covariance_from_moments

logger = logging.getLogger(__name__)

DETECTABLE_MODES = (1, 2, 3)
SWEEP_COLUMNS = ("n2", "n3", "eta", "p0", "zeta12", "fid")


@dataclass(frozen=True)
class TwbReport:
    p0: float
    zeta12: float
    fid: float
    xi_star: float
    eta: float
    detected_mode: int = 3

    def to_dict(self) -> dict:
        return {
            "p0": self.p0,
            "zeta12": self.zeta12,
            "fid": self.fid,
            "xi_star": self.xi_star,
            "eta": self.eta,
            "detected_mode": self.detected_mode,
        }


def _check_eta(eta: float):
    if not (0.0 <= eta <= 1.0):
        raise ConfigError(f"eta must lie in [0, 1], got {eta}")


def _check_populations(n2: float, n3: float):
    if n2 < 0 or n3 < 0:
        raise DomainError(f"populations must be >= 0, got ({n2}, {n3})")


def _roles(n2: float, n3: float, detected_mode: int) -> Tuple[float, float]:
    """(kept, detected) populations: detecting mode 2 swaps N2 and N3"""
    if detected_mode == 3:
        return n2, n3
    if detected_mode == 2:
        return n3, n2
    raise DomainError(
        f"twin-beam closed forms need detection on mode 2 or 3, got mode {detected_mode}"
    )


def no_click_probability(n3: float, eta: float) -> float:
    """P0 = 1/(1 + eta N3), N3 being the population of the detected mode"""
    _check_eta(eta)
    if n3 < 0:
        raise DomainError(f"population must be >= 0, got {n3}")
    return 1.0 / (1.0 + eta * n3)


def photon_correlation(n2: float, n3: float, eta: float, detected_mode: int = 3) -> float:
    """
    zeta12 = N3 (1 - eta)(1 + N3) / ((1 + eta N3)(2 N2 + N3 (1 - eta))).

    Zero for an ideal detector. The expression is undefined when the
    denominator vanishes (N2 = 0 with N3 = 0 or eta = 1) and raises DomainError.
    """
    _check_eta(eta)
    _check_populations(n2, n3)
    kept, detected = _roles(n2, n3, detected_mode)
    denominator = (1.0 + eta * detected) * (2.0 * kept + detected * (1.0 - eta))
    if denominator == 0.0:
        raise DomainError(f"photon correlation undefined at N2={kept}, N3={detected}, eta={eta}")
    return detected * (1.0 - eta) * (1.0 + detected) / denominator


def optimal_xi(n2: float, n3: float, detected_mode: int = 3) -> float:
    """xi* = sqrt(N2/(1 + N1)), independent of eta"""
    kept, detected = _roles(n2, n3, detected_mode)
    return math.sqrt(kept / (1.0 + kept + detected))


def twb_fidelity(n2: float, n3: float, eta: float, xi: Optional[float] = None,
                 detected_mode: int = 3) -> Tuple[float, float]:
    """
    Fidelity of the conditional state with a twin beam.

    With xi given:
        F = (1 + eta N3)/(1 + N1) (1 - xi^2) / (1 - xi sqrt(N2/(1 + N1)))^2
    Otherwise the maximum over xi, F = (1 + eta N3)/(1 + N3) at xi*.

    Returns:
        (fidelity, xi used)
    """
    _check_eta(eta)
    _check_populations(n2, n3)
    kept, detected = _roles(n2, n3, detected_mode)
    n1 = kept + detected
    if xi is None:
        return (1.0 + eta * detected) / (1.0 + detected), optimal_xi(n2, n3, detected_mode)
    if not abs(xi) < 1.0:
        raise ConfigError(f"|xi| must be < 1, got {xi}")
    k = math.sqrt(kept / (1.0 + n1))
    fid = (1.0 + eta * detected) / (1.0 + n1) * (1.0 - xi * xi) / (1.0 - xi * k) ** 2
    return fid, xi


def twb_report(n2: float, n3: float, eta: float, detected_mode: int = 3) -> TwbReport:
    _, detected = _roles(n2, n3, detected_mode)
    fid, xi_star = twb_fidelity(n2, n3, eta, detected_mode=detected_mode)
    return TwbReport(
        p0=no_click_probability(detected, eta),
        zeta12=photon_correlation(n2, n3, eta, detected_mode),
        fid=fid,
        xi_star=xi_star,
        eta=eta,
        detected_mode=detected_mode,
    )


def twb_sweep(n2_values: Iterable[float], n3_values: Iterable[float],
              eta_values: Iterable[float], detected_mode: int = 3) -> List[dict]:
    """Rows with SWEEP_COLUMNS over the (N2, N3, eta) grid"""
    rows = []
    n3_values, eta_values = list(n3_values), list(eta_values)
    for n2 in n2_values:
        for n3 in n3_values:
            for eta in eta_values:
                report = twb_report(n2, n3, eta, detected_mode)
                rows.append({
                    "n2": n2, "n3": n3, "eta": eta,
                    "p0": report.p0, "zeta12": report.zeta12, "fid": report.fid,
                })
    logger.debug(f"TWB sweep produced {len(rows)} rows")
    return rows


def _detected_axis(detected_mode: int) -> int:
    if detected_mode not in DETECTABLE_MODES:
        raise ConfigError(f"detected mode must be one of {DETECTABLE_MODES}, got {detected_mode}")
    return detected_mode - 1


def _weighted_partial(state: TriFockState, eta: float, detected_mode: int) -> np.ndarray:
    """Tr_det[|psi><psi| Pi_0] over the two remaining modes (in mode order)"""
    _check_eta(eta)
    axis = _detected_axis(detected_mode)
    kept = [a for a in range(3) if a != axis]
    psi = np.transpose(state.normalized(), kept + [axis])
    weights = np.power(1.0 - eta, np.arange(state.dim))
    weighted = psi * np.sqrt(weights)[None, None, :]
    flat = weighted.reshape(state.dim ** 2, state.dim)
    return flat @ flat.conj().T


def no_click_probability_state(state: TriFockState, eta: float, detected_mode: int = 3) -> float:
    """Tr[|psi><psi| Pi_0] on the truncated state"""
    return float(np.trace(_weighted_partial(state, eta, detected_mode)).real)


def conditional_density(state: TriFockState, eta: float, detected_mode: int = 3) -> np.ndarray:
    """
    Normalised conditional state after a no-click on `detected_mode`.

    Returns a (dim^2, dim^2) density over the two remaining modes, indexed
    row-major by their photon numbers.
    """
    if state.seeded:
        raise DomainError("conditional twin-beam generation needs the vacuum-seeded state")
    unnormalised = _weighted_partial(state, eta, detected_mode)
    p0 = float(np.trace(unnormalised).real)
    if p0 <= 0.0:
        raise DomainError(f"no-click probability vanishes at eta={eta}")
    return unnormalised / p0


def reference_phase(state: TriFockState, detected_mode: int = 3) -> float:
    """Phase of the pair amplitude feeding the twin beam in the remaining modes"""
    axis = _detected_axis(detected_mode)
    if axis == 0:
        raise DomainError("detecting mode 1 does not leave a twin beam")
    index = [1, 1, 1]
    index[axis] = 0
    if state.cutoff < 1:
        return 0.0
    return float(np.angle(state.amplitude(*index) / state.amplitude(0, 0, 0)))


def twb_reference(xi: float, cutoff: int, phase: float = 0.0) -> np.ndarray:
    """sqrt(1 - xi^2) sum_n (xi e^{i phase})^n |n, n> as a flat two-mode vector"""
    if not abs(xi) < 1.0:
        raise ConfigError(f"|xi| must be < 1, got {xi}")
    dim = cutoff + 1
    n = np.arange(dim)
    vec = np.zeros((dim, dim), dtype=complex)
    vec[n, n] = math.sqrt(1.0 - xi * xi) * (xi * np.exp(1j * phase)) ** n
    return vec.reshape(-1)


def twb_fidelity_state(rho: np.ndarray, xi: float, phase: float = 0.0) -> float:
    """<xi| rho |xi>"""
    dim = int(round(math.sqrt(rho.shape[0])))
    ref = twb_reference(xi, dim - 1, phase)
    return float(np.vdot(ref, rho @ ref).real)


def density_metrics(rho: np.ndarray) -> dict:
    """<n1>, <n2> and zeta12 = (Var(n1 - n2)) / (<n1> + <n2>) from a two-mode density"""
    dim = int(round(math.sqrt(rho.shape[0])))
    probs = np.real(np.diag(rho)).reshape(dim, dim)
    n_a, n_b = np.indices((dim, dim))
    mean_a = float(np.sum(probs * n_a))
    mean_b = float(np.sum(probs * n_b))
    diff = n_a - n_b
    variance = float(np.sum(probs * diff ** 2)) - (mean_a - mean_b) ** 2
    total = mean_a + mean_b
    if total == 0.0:
        raise DomainError("photon correlation undefined for the two-mode vacuum")
    return {"n1": mean_a, "n2": mean_b, "zeta12": variance / total}


def conditional_covariance(rho: np.ndarray) -> np.ndarray:
    """4x4 quadrature covariance over (q_a, q_b, p_a, p_b) of a two-mode density"""
    dim = int(round(math.sqrt(rho.shape[0])))
    lower = np.diag(np.sqrt(np.arange(1, dim)), k=1)
    eye = np.eye(dim)
    ops = [np.kron(lower, eye), np.kron(eye, lower)]

    def expect(op):
        return np.trace(rho @ op)

    means = np.array([expect(a) for a in ops])
    m = np.array([[expect(a @ b) for b in ops] for a in ops])
    n = np.array([[expect(a.conj().T @ b) for b in ops] for a in ops])
    return covariance_from_moments(0.5 * (m + m.T), n, means)
