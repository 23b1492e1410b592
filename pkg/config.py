"""
Run configuration: key=value parsing, validation and environment settings
"""

import cmath
import logging
import math
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from dotenv import load_dotenv

from trimode.classical import ClassicalParams
from trimode.dynamics import CouplingConfig, config_from_reduced, symmetric_point
from trimode.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

ENERGY_KEYS = ("e1", "e4", "e5", "e5_from", "e5_to", "sigma")
UNIT_SCALES = {"J": 1.0, "mJ": 1e-3}
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class Settings:
    """Environment-level defaults (.env or process environment)"""

    output_dir: Path
    log_level: str
    default_cutoff: Optional[int]
    default_seed: int


DEFAULT_SETTINGS = Settings(output_dir=Path("reports"), log_level="INFO", default_cutoff=None, default_seed=0)


def load_settings(env_file: Optional[str] = None) -> Settings:
    load_dotenv(env_file)
    cutoff = os.environ.get("TRIMODE_DEFAULT_CUTOFF")
    seed = os.environ.get("TRIMODE_DEFAULT_SEED", "0")
    try:
        return Settings(
            output_dir=Path(os.environ.get("TRIMODE_OUTPUT_DIR", "reports")),
            log_level=os.environ.get("TRIMODE_LOG_LEVEL", "INFO").upper(),
            default_cutoff=int(cutoff) if cutoff else None,
            default_seed=int(seed),
        )
    except ValueError as e:
        raise ConfigError(f"invalid environment setting: {str(e)}")


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a subcommand needs. Couplings are given either reduced
    (ratio, omega_t) or physical (gamma1, gamma2 magnitudes with optional
    phases, and t). Energies are stored in joules.
    """

    # couplings
    ratio: Optional[float] = None
    omega_t: Optional[float] = None
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    phase1: float = 0.0
    phase2: float = 0.0
    t: Optional[float] = None
    symmetric: bool = False
    include_hyperbolic: bool = False
    # state
    alpha: complex = 0j
    cutoff: Optional[int] = None
    # telecloning
    z: complex = 0j
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    f3_target: Optional[float] = None
    # conditional
    eta: float = 1.0
    xi: Optional[float] = None
    detected_mode: int = 3
    n2: Optional[float] = None
    n3: Optional[float] = None
    n2_grid: Tuple[float, ...] = ()
    n3_grid: Tuple[float, ...] = ()
    eta_grid: Tuple[float, ...] = ()
    # classical
    c1: float = ClassicalParams.c1
    c2: float = ClassicalParams.c2
    e1: float = ClassicalParams.e1
    e4: float = ClassicalParams.e4
    crystal_length: float = ClassicalParams.z
    omega_ratio: float = ClassicalParams.omega_ratio
    e5: Optional[float] = None
    e5_from: float = 0.0
    e5_to: float = 0.1
    steps: int = 50
    sigma: float = 0.0
    data: Optional[str] = None
    # output
    output: Optional[str] = None
    format: Optional[str] = None

    @property
    def has_reduced(self) -> bool:
        return self.ratio is not None

    @property
    def has_physical(self) -> bool:
        return self.gamma1 is not None or self.gamma2 is not None

    def coupling_config(self) -> CouplingConfig:
        """Resolve the couplings; the symmetric flag picks omega_t from the ratio"""
        if self.has_physical:
            return CouplingConfig(
                gamma1=cmath.rect(self.gamma1, self.phase1),
                gamma2=cmath.rect(self.gamma2, self.phase2),
                t=self.t,
            )
        if self.ratio is None:
            raise ConfigError("couplings required: give ratio (and omega_t) or gamma1, gamma2, t")
        if self.symmetric:
            point = symmetric_point(self.ratio, include_hyperbolic=self.include_hyperbolic)
            if point is None:
                raise DomainError(f"no symmetric point for ratio {self.ratio}")
            return point.config()
        if self.omega_t is None:
            raise ConfigError("omega_t is required unless symmetric=true")
        return config_from_reduced(self.ratio, self.omega_t)

    def classical_params(self) -> ClassicalParams:
        return ClassicalParams(
            c1=self.c1,
            c2=self.c2,
            e1=self.e1,
            e4=self.e4,
            z=self.crystal_length,
            omega_ratio=self.omega_ratio,
        )

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, complex):
                value = [value.real, value.imag]
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    def to_text(self) -> str:
        """Canonical key=value text; parse_config(cfg.to_text()) == cfg"""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name}={_render(value)}")
        return "\n".join(lines) + "\n"


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _to_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw}")


def _to_float(raw: str) -> float:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(f"not finite: {raw}")
    return value


def _to_complex(raw: str) -> complex:
    value = complex(raw.replace(" ", ""))
    if not cmath.isfinite(value):
        raise ValueError(f"not finite: {raw}")
    return value


def _to_grid(raw: str) -> Tuple[float, ...]:
    if not raw:
        return ()
    return tuple(_to_float(part) for part in raw.split(","))


def _to_str(raw: str) -> str:
    return raw


CONVERTERS: Dict[str, Callable[[str], Any]] = {
    **{name: _to_bool for name in ("symmetric", "include_hyperbolic")},
    **{name: _to_complex for name in ("alpha", "z")},
    **{name: _to_grid for name in ("n2_grid", "n3_grid", "eta_grid")},
    **{name: int for name in ("cutoff", "samples", "seed", "workers", "detected_mode", "steps")},
    **{name: _to_str for name in ("data", "output", "format")},
}
for _field in fields(RunConfig):
    CONVERTERS.setdefault(_field.name, _to_float)


def tokenize(text: str) -> Dict[str, Tuple[str, int]]:
    """
    Split key=value text into {key: (raw value, line)}.

    Pairs are separated by whitespace or newlines; '#' starts a comment.
    """
    pairs: Dict[str, Tuple[str, int]] = {}
    violations = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for token in line.split():
            key, sep, raw = token.partition("=")
            if not sep or not key:
                violations.append(f"line {line_no}: expected key=value, got '{token}'")
                continue
            if key in pairs:
                violations.append(f"line {line_no}: duplicate key '{key}'")
                continue
            pairs[key] = (raw, line_no)
    if violations:
        raise ConfigError(violations)
    return pairs


def parse_config(text: str = "", overrides: Optional[Mapping[str, Any]] = None,
                 settings: Optional[Settings] = None) -> RunConfig:
    """
    Build a validated RunConfig from key=value text.

    Args:
        text: config text (a file's content or flag pairs)
        overrides: values given on the command line; they replace keys from text
        settings: environment defaults for cutoff and seed

    Raises:
        ConfigError listing every violation found
    """
    pairs = {key: raw for key, (raw, _) in tokenize(text).items()}
    for key, value in (overrides or {}).items():
        if value is not None:
            pairs[key] = value if isinstance(value, str) else _render(value)

    violations = []
    unit = pairs.pop("unit", "J")
    if unit not in UNIT_SCALES:
        violations.append(f"unit must be one of {sorted(UNIT_SCALES)}, got '{unit}'")
        unit = "J"

    values: Dict[str, Any] = {}
    for key, raw in pairs.items():
        if key not in CONVERTERS:
            violations.append(f"unknown key '{key}'")
            continue
        try:
            values[key] = CONVERTERS[key](raw)
        except (TypeError, ValueError) as e:
            violations.append(f"{key}: invalid value '{raw}' ({str(e)})")

    scale = UNIT_SCALES[unit]
    for key in ENERGY_KEYS:
        if key in values:
            values[key] = values[key] * scale

    if settings is not None:
        if "cutoff" not in values and settings.default_cutoff is not None:
            values["cutoff"] = settings.default_cutoff
        if "seed" not in values:
            values["seed"] = settings.default_seed

    # range checks run on whatever converted, so one pass reports everything
    cfg = RunConfig(**values)
    violations.extend(validate(cfg))
    if violations:
        raise ConfigError(violations)
    logger.debug(f"Parsed run config with {len(values)} explicit keys")
    return cfg


def validate(cfg: RunConfig) -> list:
    """Every range violation of cfg (empty when valid)"""
    v = []

    def check(condition: bool, message: str):
        if not condition:
            v.append(message)

    if cfg.has_reduced and cfg.has_physical:
        v.append("give either ratio/omega_t or gamma1/gamma2/t, not both")
    if cfg.has_physical and None in (cfg.gamma1, cfg.gamma2, cfg.t):
        v.append("physical couplings need gamma1, gamma2 and t")
    if cfg.omega_t is not None and cfg.ratio is None:
        v.append("omega_t given without ratio")
    if cfg.ratio is not None:
        check(cfg.ratio >= 0, f"ratio must be >= 0, got {cfg.ratio}")
    if cfg.omega_t is not None:
        check(cfg.omega_t >= 0, f"omega_t must be >= 0, got {cfg.omega_t}")
    for name in ("gamma1", "gamma2", "t"):
        value = getattr(cfg, name)
        if value is not None:
            check(value >= 0, f"{name} must be >= 0, got {value}")

    if cfg.cutoff is not None:
        check(cfg.cutoff >= 0, f"cutoff must be >= 0, got {cfg.cutoff}")
    check(cfg.samples >= 1000, f"samples must be >= 1000, got {cfg.samples}")
    check(cfg.seed >= 0, f"seed must be >= 0, got {cfg.seed}")
    check(cfg.workers >= 1, f"workers must be >= 1, got {cfg.workers}")
    if cfg.f3_target is not None:
        check(0.5 <= cfg.f3_target <= 2.0 / 3.0,
              f"f3_target must lie in [1/2, 2/3], got {cfg.f3_target}")

    check(0.0 <= cfg.eta <= 1.0, f"eta must lie in [0, 1], got {cfg.eta}")
    for value in cfg.eta_grid:
        check(0.0 <= value <= 1.0, f"eta_grid values must lie in [0, 1], got {value}")
    if cfg.xi is not None:
        check(abs(cfg.xi) < 1.0, f"|xi| must be < 1, got {cfg.xi}")
    check(cfg.detected_mode in (1, 2, 3), f"detected_mode must be 1, 2 or 3, got {cfg.detected_mode}")
    for name in ("n2", "n3"):
        value = getattr(cfg, name)
        if value is not None:
            check(value >= 0, f"{name} must be >= 0, got {value}")
    for name in ("n2_grid", "n3_grid"):
        for value in getattr(cfg, name):
            check(value >= 0, f"{name} values must be >= 0, got {value}")

    for name in ("c1", "c2", "e1", "e4", "crystal_length", "omega_ratio"):
        value = getattr(cfg, name)
        check(value > 0, f"{name} must be > 0, got {value}")
    if cfg.e5 is not None:
        check(cfg.e5 >= 0, f"e5 must be >= 0, got {cfg.e5}")
    check(cfg.e5_from >= 0, f"e5_from must be >= 0, got {cfg.e5_from}")
    check(cfg.e5_to >= cfg.e5_from, f"e5_to must be >= e5_from, got {cfg.e5_to}")
    check(cfg.steps >= 1, f"steps must be >= 1, got {cfg.steps}")
    check(cfg.sigma >= 0, f"sigma must be >= 0, got {cfg.sigma}")
    if cfg.format is not None:
        check(cfg.format in FORMATS, f"format must be one of {FORMATS}, got '{cfg.format}'")
    return v


def resolve_output(cfg: RunConfig, settings: Settings) -> Optional[Path]:
    """Relative output paths land under the configured report directory"""
    if cfg.output is None:
        return None
    path = Path(cfg.output)
    if not path.is_absolute():
        path = settings.output_dir / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
