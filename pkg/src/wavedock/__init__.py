"""Wave-platform docking: stochastic landing environment and DRL agents."""

from .waves import (
    FrequencyGrid,
    JonswapParams,
    WaveRealization,
    sample_spectrum,
    spectral_density,
    synthesize_from_spectrum,
    synthesize_wave,
)
from .env import (
    ActionSpec,
    EnvConfig,
    EnvState,
    LandingEnv,
    NumericalFault,
    RewardParams,
    Transition,
    UavParams,
    hover_control,
    reference_descent_velocity,
    reward,
    rk4_step,
    thrust_from_virtual,
)
from .nets import (
    GradientSet,
    MlpNetwork,
    NetworkFormatError,
    deserialize,
    load_network,
    save_network,
    serialize,
    sgd_step,
    soft_update,
)
from .dqn import DqnConfig, EpsilonSchedule, ReplayBuffer, compute_targets, learn_step, select_action
from .ppo import PpoConfig, RolloutBatch, compute_gae, critic_loss, ppo_loss, sample_action
from .config import ConfigError, RunConfig, load_config, save_config
from .harness import EvalReport, TrainRecord, evaluate, export_plots, moving_average, run_training

__version__ = "0.1.0"

__all__ = [
    "ActionSpec", "ConfigError", "DqnConfig", "EnvConfig", "EnvState", "EpsilonSchedule",
    "EvalReport", "FrequencyGrid", "GradientSet", "JonswapParams", "LandingEnv",
    "MlpNetwork", "NetworkFormatError", "NumericalFault", "PpoConfig", "ReplayBuffer",
    "RewardParams", "RolloutBatch", "RunConfig", "TrainRecord", "Transition", "UavParams",
    "WaveRealization", "compute_gae", "compute_targets", "critic_loss", "deserialize",
    "evaluate", "export_plots", "hover_control", "learn_step", "load_config",
    "load_network", "moving_average", "ppo_loss", "reference_descent_velocity", "reward",
    "rk4_step", "run_training", "sample_action", "sample_spectrum", "save_config",
    "save_network", "select_action", "serialize", "sgd_step", "soft_update",
    "spectral_density", "synthesize_from_spectrum", "synthesize_wave",
    "thrust_from_virtual",
]
