"""Drawdown in a pumped unconfined aquifer over a leaky aquitard, with a vadose zone.

The Laplace and Laplace-Hankel domain solutions are inverted numerically
(de Hoog, with a Gaver-Stehfest cross-check).  Entry points:

* :func:`drawdown_D` and :func:`drawdown` for single evaluations,
* :func:`run_scenario` with :func:`parse_config` or :func:`builtin` for curves,
* ``python -m leaky_unconfined`` for the command line.
"""

from .drawdown import (PointResult, SolverControls, averaged_drawdown, delayed_drawdown,
                       drawdown, drawdown_D, transformed_drawdown)
from .errors import ConfigError, ConvergenceError, DomainError, PoleError, SingularityError
from .laplace import (ddbar_sC, field_bar, sbar_1, sbar_C, sbar_U, sigma_bar, transform_point,
                      vadose_chi, vadose_profile, vadose_qD, aquitard_q1b)
from .params import (Aquifer, Aquitard, DimensionlessGroups, PhysicalSystem, SeriesControls,
                     Vadose, Well, to_dimensionless)
from .scenarios import (CurveResult, Observation, ScenarioConfig, Sweep, TimeGrid, builtin,
                        convergence_report, emit_config, emit_csv, emit_plot_script,
                        list_builtins, parse_config, run_scenario)
from .transforms import LaplaceConfig, OscillatoryQuadConfig

__version__ = "0.1.0"
