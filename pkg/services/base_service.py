"""
Shared report plumbing for the service classes
"""

import logging
from typing import Any, Dict

import numpy as np

from config import RunConfig
from trimode.errors import TrimodeError

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """numpy scalars/arrays and complex numbers to plain JSON types"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


class BaseService:
    """Holds the run configuration and shapes success/failure reports"""

    emoji = "⚙️"

    def __init__(self, run_config: RunConfig):
        self.config = run_config
        logger.debug(f"{type(self).__name__} initialized")

    def _report(self, command: str, **payload) -> Dict[str, Any]:
        report = {
            "success": True,
            "command": command,
            "config": self.config.to_dict(),
            "config_text": self.config.to_text(),
        }
        report.update(payload)
        return to_jsonable(report)

    def _failure(self, command: str, error: TrimodeError) -> Dict[str, Any]:
        logger.error(f"{self.emoji} {command} failed: {str(error)}")
        payload = error.to_dict()
        payload["command"] = command
        payload["config"] = to_jsonable(self.config.to_dict())
        return payload
