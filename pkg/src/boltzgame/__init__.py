"""Monte Carlo simulation of Boltzmann-type opinion games between competing leader groups."""

from .best_reply import (ControlSystem, StrategyParams, build_system, equal_penalty_control,
                         limit_control, solve_controls, strategy_drift, total_control,
                         total_control_local)
from .errors import ConfigError, DomainError, IllPosedError
from .hetero import KnowledgeParams, knowledge_quartile_stats
from .kernels import (CredibilitySpec, DiffusionSpec, KernelSpec, admissible_noise_bounds, eval_D,
                      eval_K, eval_P, eval_R)
from .moments import MeanSystemParams, asymptotic_consensus, integrate_means, mean_rhs
from .scenario import Scenario, load_scenario, preset
from .simulation import RunRecord, Simulator, estimate_moments, run
from .stationary import StationaryDensity, StationaryParams, stationary_params

__version__ = "0.1.0"
