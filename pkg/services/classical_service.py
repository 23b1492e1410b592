"""
Classical seeded-crystal model service
"""

import logging
from typing import Any, Dict, List

from trimode.classical import (
    compare_measurements,
    linear_grid,
    output_energy,
    sweep,
    threshold_energy,
)
from trimode.errors import ConfigError, TrimodeError

from .base_service import BaseService

logger = logging.getLogger(__name__)


class ClassicalService(BaseService):
    """Output energy predictions and residuals against measurements"""

    emoji = "🔥"

    def sweep_rows(self) -> List[dict]:
        run = self.config
        params = run.classical_params()
        grid = linear_grid(run.e5_from, run.e5_to, run.steps)
        logger.info(f"🔥 Sweeping E5 over [{run.e5_from}, {run.e5_to}] J in {run.steps} steps")
        return sweep(grid, params)

    def sweep(self) -> Dict[str, Any]:
        try:
            params = self.config.classical_params()
            rows = self.sweep_rows()
            result = {"threshold_e5": threshold_energy(params), "rows": rows}
            if self.config.e5 is not None:
                result["point"] = {
                    "e5_joules": self.config.e5,
                    "e2_joules": output_energy(self.config.e5, params),
                }
            return self._report("classical-sweep", **result)
        except TrimodeError as e:
            return self._failure("classical-sweep", e)

    def compare(self) -> Dict[str, Any]:
        try:
            if self.config.data is None:
                raise ConfigError("classical-compare needs a data file")
            logger.info(f"🔥 Comparing measurements in {self.config.data}")
            summary = compare_measurements(self.config.data, self.config.classical_params())
            logger.info(f"🔥 max |residual|={summary.max_abs:.3g} J, RMS={summary.rms:.3g} J")
            return self._report("classical-compare", **summary.to_dict())
        except TrimodeError as e:
            return self._failure("classical-compare", e)
