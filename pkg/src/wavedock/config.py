"""Run configuration: defaults, YAML round-trip, and validation.

One hierarchical file drives everything. Sections mirror the library's
parameter dataclasses; the agent choice selects the action-space mode and
which learner block applies. Unknown keys and invariant violations are
collected and reported together so a bad file fails loudly, once.

The default sea state deliberately uses a spectrum scale constant far
above the deep-water literature value: the density formula is kept
verbatim, so k_w doubles as the overall amplitude knob, and the default
is calibrated to a platform heave a five-metre descent can actually land
on (std(z_w) ~ 0.15 m).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

import yaml

from .dqn import DqnConfig, EpsilonSchedule
from .env import ActionSpec, EnvConfig, RewardParams, UavParams
from .ppo import PpoConfig
from .waves import FrequencyGrid, JonswapParams

AGENTS = ("dqn", "double", "dueling", "ppo")


class ConfigError(ValueError):
    """Invalid run configuration; message lists every offending field."""


@dataclass(frozen=True)
class WaveSettings:
    """Sea-state block: spectrum parameters plus the sampling grid."""

    enabled: bool = True
    alpha_w: float = 0.0081
    k_w: float = 18.0
    f_p: float = 0.1
    gamma_w: float = 3.3
    sigma_low: float = 0.07
    sigma_high: float = 0.09
    g: float = 9.81
    f_min: float = 0.02
    f_max: float = 1.0
    n_bins: int = 256

    def params(self) -> JonswapParams:
        return JonswapParams(
            alpha_w=self.alpha_w, k_w=self.k_w, f_p=self.f_p, gamma_w=self.gamma_w,
            sigma_low=self.sigma_low, sigma_high=self.sigma_high, g=self.g,
        )

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(f_min=self.f_min, f_max=self.f_max, n_bins=self.n_bins)


@dataclass(frozen=True)
class EvalSettings:
    episodes: int = 50
    success_impact_threshold: float = 2.5


@dataclass(frozen=True)
class RunConfig:
    """Everything a training or evaluation run needs, in one place."""

    agent: str = "ppo"
    episodes: int = 500
    seed: int = 7
    out_dir: str = "runs/out"
    wave: WaveSettings = field(default_factory=WaveSettings)
    uav: UavParams = field(default_factory=UavParams)
    env: EnvConfig = field(default_factory=EnvConfig)
    action: ActionSpec = field(default_factory=ActionSpec)
    reward: RewardParams = field(default_factory=RewardParams)
    dqn: DqnConfig = field(default_factory=DqnConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    eval: EvalSettings = field(default_factory=EvalSettings)

    def replace(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)


# -- dict/YAML round trip ----------------------------------------------------

_NESTED = {
    "wave": WaveSettings,
    "uav": UavParams,
    "env": EnvConfig,
    "action": ActionSpec,
    "reward": RewardParams,
    "dqn": DqnConfig,
    "ppo": PpoConfig,
    "eval": EvalSettings,
}


def _to_plain(value):
    if dataclasses.is_dataclass(value):
        return {f.name: _to_plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, tuple):
        return list(value)
    return value


def config_to_dict(config: RunConfig) -> dict:
    return _to_plain(config)


def _build_dataclass(cls, data: dict, prefix: str, errors: list):
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            errors.append(f"{prefix}{key}: unknown field")
            continue
        if key == "epsilon" and isinstance(value, dict):
            value = _build_dataclass(EpsilonSchedule, value, f"{prefix}{key}.", errors)
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"{prefix.rstrip('.') or cls.__name__}: {exc}")
        return cls()


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from a nested plain dict, collecting every problem."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    kwargs = {}
    top_fields = {f.name for f in fields(RunConfig)}
    for key, value in data.items():
        if key not in top_fields:
            errors.append(f"{key}: unknown field")
        elif key in _NESTED:
            if not isinstance(value, dict):
                errors.append(f"{key}: expected a mapping")
            else:
                kwargs[key] = _build_dataclass(_NESTED[key], value, f"{key}.", errors)
        else:
            kwargs[key] = value
    try:
        config = RunConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(str(exc))
        config = None
    if config is not None:
        errors.extend(validate(config))
    if errors:
        raise ConfigError("invalid configuration: " + "; ".join(errors))
    return config


def validate(config: RunConfig) -> list:
    """Cross-field checks the individual dataclasses cannot see."""
    errors = []
    if config.agent not in AGENTS:
        errors.append(f"agent: must be one of {AGENTS}, got {config.agent!r}")
    if config.episodes < 1:
        errors.append("episodes: must be >= 1")
    if config.wave.enabled and config.wave.f_max >= 0.5 / config.env.dt:
        errors.append(
            f"wave.f_max: {config.wave.f_max} Hz violates Nyquist for env.dt={config.env.dt}"
        )
    if config.eval.episodes < 1:
        errors.append("eval.episodes: must be >= 1")
    return errors


def load_config(path) -> RunConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    return config_from_dict(data)


def save_config(config: RunConfig, path) -> None:
    """Write the fully-resolved configuration (defaults filled in)."""
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(config), fh, sort_keys=True)
