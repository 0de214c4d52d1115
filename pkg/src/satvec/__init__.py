"""Satellite-terrestrial VEC offloading simulator and optimizer."""

from .channel import (
    ChannelRealization,
    FadingParams,
    GeometryParams,
    antenna_loss_db,
    path_loss_db,
    realize_channels,
)
from .config import ExperimentSpec, ScenarioDefaults, load_config, parse_config
from .errors import ConfigError, DegenerateRateError, InfeasibleProblem
from .experiments import execute_experiment, run_experiment, sample_trial
from .model import (
    CostBreakdown,
    Decision,
    ScenarioConfig,
    check_feasible,
    evaluate,
    rate_sat,
    rate_terrestrial,
    sinr_sat,
)
from .orchestrator import (
    SolveResult,
    SolveTrace,
    alternate_optimize,
    baseline_random,
    baseline_rsu_only,
    baseline_saps_only,
    multi_start,
    multi_start_runs,
)
from .precoding import (
    FpState,
    PrecodingSolution,
    fp_objective,
    solve_precoding_subproblem,
    solve_v,
    surrogate_rate,
    update_gamma,
    update_lambda,
    update_y,
    update_z,
)
from .split import SplitSubproblem, build_split_subproblem, solve_split, split_cost
from .subchannel import AlphaSubproblem, build_alpha_subproblem, solve_alpha

__version__ = "0.1.0"
