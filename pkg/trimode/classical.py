"""
Classical field evolution in the seeded crystal.

Output energy at omega_2 as a function of the ordinary pump energy E5:

    E2 = (w2/w1) c1 E4 c2 E5 / D^2 [cos(sqrt(D) z) - 1]^2 E1,  D = c2 E5 - c1 E4

(1 - cos(sqrt(D) z))/D is the versine kernel shared with the quantum
coefficients, so D < 0 continues through cosh and D = 0 is the
removable-singularity limit z^4/4 without special casing.
"""

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np

from trimode.errors import ConfigError, DataFormatError, DomainError
from trimode.numerics import versine_kernel

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("e5_joules", "e2_joules")

# Geometry of the BBO experiment (degrees, nanometres); documentation only
WAVELENGTH_SEED_NM = 1064.0
WAVELENGTH_PUMP_NM = 532.0
WAVELENGTH_OUTPUT_NM = 355.0
CUT_ANGLE_DEG = 32.0
PHASE_MATCH_ANGLE_DEG = 37.74
INTERACTION_ANGLE_1_DEG = 10.6
INTERACTION_ANGLE_3_DEG = -10.6
INTERACTION_ANGLE_2_DEG = 3.5


@dataclass(frozen=True)
class ClassicalParams:
    """Couplings c1, c2 in 1/(J m^2), energies in J, crystal length z in m"""

    c1: float = 8.3e4
    c2: float = 2.6e5
    e1: float = 0.024
    e4: float = 0.158
    z: float = 0.004
    omega_ratio: float = WAVELENGTH_SEED_NM / WAVELENGTH_OUTPUT_NM

    def __post_init__(self):
        violations = [
            f"{name} must be positive and finite, got {value}"
            for name, value in asdict(self).items()
            if not (math.isfinite(value) and value > 0)
        ]
        if violations:
            raise ConfigError(violations)


@dataclass(frozen=True)
class ResidualSummary:
    rows: List[dict] = field(default_factory=list)
    max_abs: float = 0.0
    rms: float = 0.0

    def to_dict(self) -> dict:
        return {"rows": list(self.rows), "max_abs": self.max_abs, "rms": self.rms, "count": len(self.rows)}


def threshold_energy(p: ClassicalParams) -> float:
    """E5 where c2 E5 = c1 E4"""
    return p.c1 * p.e4 / p.c2


def output_energy(e5, p: ClassicalParams):
    """E2(E5) in joules; accepts scalars or arrays"""
    e5_arr = np.asarray(e5, dtype=float)
    if np.any(~np.isfinite(e5_arr)) or np.any(e5_arr < 0):
        raise DomainError(f"pump energy must be finite and >= 0, got {e5}")
    detuning = p.c2 * e5_arr - p.c1 * p.e4
    v = versine_kernel(detuning, p.z)
    e2 = p.omega_ratio * (p.c1 * p.e4) * (p.c2 * e5_arr) * np.square(v) * p.e1
    if np.ndim(e2) == 0:
        return float(e2)
    return e2


def sweep(e5_grid: Iterable[float], p: ClassicalParams) -> List[dict]:
    """Rows {e5_joules, e2_joules} for a sorted grid"""
    grid = np.asarray(list(e5_grid), dtype=float)
    if grid.size > 1 and np.any(np.diff(grid) < 0):
        raise ConfigError("pump energy grid must be sorted")
    if grid.size == 0:
        return []
    e2 = np.atleast_1d(output_energy(grid, p))
    return [{"e5_joules": float(a), "e2_joules": float(b)} for a, b in zip(grid, e2)]


def linear_grid(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    if stop < start:
        raise ConfigError(f"sweep end {stop} is below its start {start}")
    return np.linspace(start, stop, steps)


def _read_text(path: Path) -> str:
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise DataFormatError(f"{path}: cannot read measurement file ({e.strerror})")
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        line = raw.count(b"\n", 0, e.start) + 1
        raise DataFormatError(f"{path}: byte {raw[e.start]:#04x} is not UTF-8 text", line=line)


def read_measurements(path) -> List[tuple]:
    """(line number, e5, e2) triples from a CSV with columns e5_joules, e2_joules"""
    path = Path(path)
    reader = csv.DictReader(io.StringIO(_read_text(path), newline=""))
    rows = []
    try:
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataFormatError(f"{path}: missing column(s) {', '.join(missing)}", line=1)
        for record in reader:
            line = reader.line_num
            try:
                e5 = float(record["e5_joules"])
                e2 = float(record["e2_joules"])
            except (TypeError, ValueError):
                raise DataFormatError(f"{path}: non-numeric value in {dict(record)}", line=line)
            if not (math.isfinite(e5) and math.isfinite(e2)):
                raise DataFormatError(f"{path}: non-finite value in {dict(record)}", line=line)
            if e5 < 0:
                raise DataFormatError(f"{path}: negative pump energy {e5}", line=line)
            rows.append((line, e5, e2))
    except csv.Error as e:
        raise DataFormatError(f"{path}: {str(e)}", line=reader.line_num)
    if not rows:
        raise DataFormatError(f"{path}: no measurement rows")
    return rows


def compare_measurements(path, p: ClassicalParams) -> ResidualSummary:
    """Per-row prediction and residual against a measurement file, with max-abs and RMS"""
    measurements = read_measurements(path)
    e5 = np.array([m[1] for m in measurements])
    measured = np.array([m[2] for m in measurements])
    predicted = np.atleast_1d(output_energy(e5, p))
    residual = measured - predicted

    rows = [
        {"line": line, "e5_joules": float(a), "e2_joules": float(b),
         "predicted": float(c), "residual": float(r)}
        for (line, _, _), a, b, c, r in zip(measurements, e5, measured, predicted, residual)
    ]
    summary = ResidualSummary(
        rows=rows,
        max_abs=float(np.max(np.abs(residual))),
        rms=float(np.sqrt(np.mean(residual ** 2))),
    )
    logger.debug(f"Compared {len(rows)} measurements from {path}: rms={summary.rms:.3g}")
    return summary


def write_rows(path, rows: List[dict], columns: Iterable[str] = CSV_COLUMNS) -> Path:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    return path


def synthetic_measurements(grid: Iterable[float], p: ClassicalParams, sigma: float,
                           seed: Optional[int] = None, path=None) -> List[dict]:
    """Model curve plus Gaussian noise of width sigma (J); written as CSV when path is given"""
    if sigma < 0:
        raise ConfigError(f"sigma must be >= 0, got {sigma}")
    rows = sweep(grid, p)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=len(rows)) if sigma > 0 else np.zeros(len(rows))
    noisy = [{"e5_joules": r["e5_joules"], "e2_joules": r["e2_joules"] + float(n)}
             for r, n in zip(rows, noise)]
    if path is not None:
        write_rows(path, noisy)
    return noisy
