"""
Conditional twin-beam service
"""

import logging
from typing import Any, Dict, List

from trimode.conditional import (
    SWEEP_COLUMNS,
    conditional_density,
    density_metrics,
    no_click_probability_state,
    reference_phase,
    twb_fidelity,
    twb_fidelity_state,
    twb_report,
    twb_sweep,
)
from trimode.dynamics import mode_populations, reduced_parameters
from trimode.errors import ConfigError, TrimodeError
from trimode.fock import build_vacuum_state

from .base_service import BaseService

logger = logging.getLogger(__name__)


class ConditionalService(BaseService):
    """On/off conditioning of the three-mode state"""

    emoji = "🎯"

    def twb(self) -> Dict[str, Any]:
        """
        Closed-form TWB report. When the couplings and a cutoff are given
        the same quantities are also computed from the conditional density.
        """
        try:
            run = self.config
            use_couplings = run.n2 is None or run.n3 is None
            if use_couplings:
                cfg = run.coupling_config()
                pops = mode_populations(cfg)
                n2, n3, reduced = pops.n2, pops.n3, reduced_parameters(cfg)
            else:
                n2, n3, reduced = run.n2, run.n3, None

            logger.info(f"🎯 Conditioning mode {run.detected_mode} at eta={run.eta}")
            report = twb_report(n2, n3, run.eta, run.detected_mode)
            result = {
                "reduced": reduced,
                "populations": {"n2": n2, "n3": n3},
                "twb": report.to_dict(),
            }
            if run.xi is not None:
                result["fid_at_xi"], _ = twb_fidelity(n2, n3, run.eta, run.xi, run.detected_mode)

            if use_couplings and run.cutoff is not None:
                state = build_vacuum_state(cfg, cutoff=run.cutoff)
                rho = conditional_density(state, run.eta, run.detected_mode)
                phase = reference_phase(state, run.detected_mode)
                metrics = density_metrics(rho)
                result["oracle"] = {
                    "tail_bound": state.tail_bound,
                    "p0": no_click_probability_state(state, run.eta, run.detected_mode),
                    "zeta12": metrics["zeta12"],
                    "fid": twb_fidelity_state(rho, report.xi_star, phase),
                }
            logger.info(f"🎯 P0={report.p0:.6g} zeta12={report.zeta12:.6g} F={report.fid:.6g}")
            return self._report("twb", **result)
        except TrimodeError as e:
            return self._failure("twb", e)

    def sweep_rows(self) -> List[dict]:
        """Grid rows for CSV output; raises instead of returning a failure dict"""
        run = self.config
        if not (run.n2_grid and run.n3_grid):
            raise ConfigError("twb sweeps need n2_grid and n3_grid")
        etas = run.eta_grid or (run.eta,)
        logger.info(
            f"🎯 TWB sweep over {len(run.n2_grid)}x{len(run.n3_grid)}x{len(etas)} points"
        )
        return twb_sweep(run.n2_grid, run.n3_grid, etas, run.detected_mode)

    def twb_sweep(self) -> Dict[str, Any]:
        try:
            rows = self.sweep_rows()
            return self._report("twb", columns=list(SWEEP_COLUMNS), rows=rows)
        except TrimodeError as e:
            return self._failure("twb", e)
