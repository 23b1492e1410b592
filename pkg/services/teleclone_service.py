"""
Telecloning service
"""

import logging
from typing import Any, Dict

from trimode.dynamics import mode_populations, reduced_parameters
from trimode.errors import TrimodeError
from trimode.telecloning import analytic_report, asymmetric_frontier, mc_teleclone

from .base_service import BaseService

logger = logging.getLogger(__name__)


class TelecloneService(BaseService):
    """Analytic and Monte-Carlo 1 -> 2 telecloning fidelities"""

    emoji = "📡"

    def _populations(self):
        """(n2, n3, reduced) from explicit populations or from the couplings"""
        if self.config.n2 is not None and self.config.n3 is not None:
            return self.config.n2, self.config.n3, None
        cfg = self.config.coupling_config()
        pops = mode_populations(cfg)
        return pops.n2, pops.n3, reduced_parameters(cfg)

    def teleclone(self) -> Dict[str, Any]:
        """
        Closed-form clone fidelities.

        An f3_target selects the asymmetric frontier point; otherwise the
        populations come from n2/n3 or from the couplings.
        """
        try:
            if self.config.f3_target is not None:
                logger.info(f"📡 Asymmetric frontier at F3={self.config.f3_target}")
                n2, n3, _ = asymmetric_frontier(self.config.f3_target)
                reduced, frontier = None, True
            else:
                n2, n3, reduced = self._populations()
                frontier = False
                logger.info(f"📡 Clone fidelities for N2={n2:.6g}, N3={n3:.6g}")

            report = analytic_report(n2, n3, z=self.config.z, config=reduced)
            logger.info(f"📡 F2={report.f2:.6f} F3={report.f3:.6f}")
            return self._report(
                "teleclone",
                reduced=reduced,
                populations={"n2": n2, "n3": n3},
                f2=report.f2,
                f3=report.f3,
                frontier=frontier,
            )
        except TrimodeError as e:
            return self._failure("teleclone", e)

    def teleclone_mc(self) -> Dict[str, Any]:
        """Monte-Carlo protocol run, reported next to the closed form"""
        try:
            cfg = self.config.coupling_config()
            logger.info(
                f"📡 Monte-Carlo telecloning: {self.config.samples} samples, seed {self.config.seed}"
            )
            report = mc_teleclone(
                self.config.z,
                cfg,
                alpha=self.config.alpha if self.config.alpha != 0 else None,
                samples=self.config.samples,
                rng_seed=self.config.seed,
                workers=self.config.workers,
            )
            pops = mode_populations(cfg)
            exact = analytic_report(pops.n2, pops.n3, z=self.config.z, config=report.config)
            stderr2, stderr3 = report.mc_stderr
            logger.info(f"📡 F2={report.f2:.5f}±{stderr2:.5f} F3={report.f3:.5f}±{stderr3:.5f}")
            return self._report(
                "teleclone-mc",
                reduced=reduced_parameters(cfg),
                clone_report=report.to_dict(),
                analytic={"f2": exact.f2, "f3": exact.f3},
                z_scores={
                    "f2": (report.f2 - exact.f2) / stderr2 if stderr2 > 0 else 0.0,
                    "f3": (report.f3 - exact.f3) / stderr3 if stderr3 > 0 else 0.0,
                },
            )
        except TrimodeError as e:
            return self._failure("teleclone-mc", e)
