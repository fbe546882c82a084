"""Discrete-time vertical landing environment over a heaving platform.

The vehicle is reduced to its vertical axis: altitude z and rate zdot,
driven by a virtual acceleration command U. The platform underneath moves
with a per-episode random wave record; the agent observes the height error
e_z = z - z_w and its own rate, and is rewarded for tracking a decaying
reference descent speed. Contact (e_z <= 0) ends the episode and reports
the impact speed relative to the platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .waves import FrequencyGrid, JonswapParams, WaveRealization, synthesize_wave


@dataclass(frozen=True)
class UavParams:
    """Vehicle constants: mass, vertical drag coefficient, gravity, start height."""

    m: float = 1.0
    k_fdz: float = 0.1
    g: float = 9.81
    h0: float = 5.0

    def __post_init__(self):
        if self.m <= 0.0:
            raise ValueError("UavParams.m must be positive")
        if self.k_fdz < 0.0:
            raise ValueError("UavParams.k_fdz must be non-negative")
        if self.g <= 0.0:
            raise ValueError("UavParams.g must be positive")
        if self.h0 <= 0.0:
            raise ValueError("UavParams.h0 must be positive")


@dataclass(frozen=True)
class EnvState:
    """Observation pair: height error above the platform and vertical rate."""

    e_z: float
    zdot: float

    def as_array(self) -> np.ndarray:
        return np.array([self.e_z, self.zdot])


@dataclass(frozen=True)
class ActionSpec:
    """Action space description.

    Discrete mode exposes exactly three commands {u0 + delta_u, u0,
    u0 - delta_u} (index order: up, hold, down). Continuous mode accepts
    any command, clamped to [u_min, u_max] before integration.
    """

    mode: str = "discrete"
    u0: float = 9.81
    delta_u: float = 1.5
    u_min: float = 0.0
    u_max: float = 19.62

    def __post_init__(self):
        if self.mode not in ("discrete", "continuous"):
            raise ValueError(f"ActionSpec.mode must be discrete|continuous, got {self.mode!r}")
        if not self.u_min < self.u0 < self.u_max:
            raise ValueError("ActionSpec requires u_min < u0 < u_max")
        if self.delta_u <= 0.0:
            raise ValueError("ActionSpec.delta_u must be positive")

    @property
    def n_actions(self) -> int:
        return 3

    def discrete_controls(self) -> np.ndarray:
        return np.array([self.u0 + self.delta_u, self.u0, self.u0 - self.delta_u])


@dataclass(frozen=True)
class RewardParams:
    """Gains and reference-descent shape for the tracking reward.

    k1, k2  weights on height error and velocity error.
    v_max   asymptotic descent speed far above the platform [m/s].
    h_c     decay height of the reference profile [m].
    v_td    touchdown speed target [m/s].
    """

    k1: float = 1.0
    k2: float = 2.0
    v_max: float = 2.0
    h_c: float = 5.0 / 3.0
    v_td: float = 0.1

    def __post_init__(self):
        if self.k1 < 0.0 or self.k2 < 0.0:
            raise ValueError("RewardParams gains must be non-negative")
        if not self.v_max > self.v_td >= 0.0:
            raise ValueError("RewardParams requires v_max > v_td >= 0")
        if self.h_c <= 0.0:
            raise ValueError("RewardParams.h_c must be positive")


@dataclass(frozen=True)
class Transition:
    """(s, a, r, s', done) tuple as stored for learning."""

    s: EnvState
    a: float
    r: float
    s_next: EnvState
    done: bool


def hover_control(params: UavParams, z: float) -> float:
    """Stabilizing hover command at height z: cancels drag and gravity."""
    return (params.k_fdz / params.m) * z + params.g


def thrust_from_virtual(params: UavParams, U: float, phi: float, theta: float) -> float:
    """Actual thrust [N] producing virtual vertical command U at roll/pitch (phi, theta)."""
    c = math.cos(phi) * math.cos(theta)
    if abs(c) < 1e-12:
        raise ValueError("attitude is thrust-singular: cos(phi)*cos(theta) == 0")
    return params.m * U / c


def reference_descent_velocity(e_p: float, rp: RewardParams) -> float:
    """Required descent rate: -v_td at the pad, decaying toward -v_max with height."""
    h = max(e_p, 0.0)
    return -rp.v_td - (rp.v_max - rp.v_td) * (1.0 - math.exp(-h / rp.h_c))


def reward(state: EnvState, zdot_d: float, rp: RewardParams) -> float:
    """Tracking reward -k1|e_p| - k2|zdot - zdot_d|; zero only at perfect tracking."""
    return -rp.k1 * abs(state.e_z) - rp.k2 * abs(state.zdot - zdot_d)


def rk4_step(params: UavParams, z: float, zdot: float, U: float, dt: float) -> tuple[float, float]:
    """One classical fourth-order Runge-Kutta step of the vertical dynamics.

    zddot = -(k_fdz/m) z - g + U, with U held constant over the step.
    """
    a = -params.k_fdz / params.m
    c = U - params.g

    def acc(x):
        return a * x + c

    k1z, k1v = zdot, acc(z)
    k2z, k2v = zdot + 0.5 * dt * k1v, acc(z + 0.5 * dt * k1z)
    k3z, k3v = zdot + 0.5 * dt * k2v, acc(z + 0.5 * dt * k2z)
    k4z, k4v = zdot + dt * k3v, acc(z + dt * k3z)
    z_next = z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    v_next = zdot + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return z_next, v_next


class NumericalFault(RuntimeError):
    """State became non-finite during integration."""


@dataclass(frozen=True)
class EnvConfig:
    """Episode mechanics: step size, budget, and state clamps."""

    dt: float = 0.01
    max_steps: int = 1000
    e_max: float = 10.0
    v_clamp: float = 10.0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("EnvConfig.dt must be positive")
        if self.max_steps < 1:
            raise ValueError("EnvConfig.max_steps must be >= 1")
        if self.e_max <= 0.0 or self.v_clamp <= 0.0:
            raise ValueError("EnvConfig clamps must be positive")


class LandingEnv:
    """Gym-style environment for the wave-platform landing phase.

    reset(seed) draws a fresh wave realization (or a flat platform when
    wave_params is None) and places the vehicle h0 above the platform with
    zero rate. step(action) integrates one dt with RK4 and returns
    (state, reward, done, info). Discrete actions are indices into the
    three-command set; continuous actions are commands in [u_min, u_max].
    """

    def __init__(
        self,
        uav: UavParams = UavParams(),
        action_spec: ActionSpec = ActionSpec(),
        reward_params: RewardParams = RewardParams(),
        env_config: EnvConfig = EnvConfig(),
        wave_params: Optional[JonswapParams] = None,
        wave_grid: FrequencyGrid = FrequencyGrid(),
        record_trace: bool = False,
    ):
        self.uav = uav
        self.action_spec = action_spec
        self.reward_params = reward_params
        self.config = env_config
        self.wave_params = wave_params
        self.wave_grid = wave_grid
        self.record_trace = record_trace

        self.wave: WaveRealization = WaveRealization.flat(env_config.max_steps + 1, env_config.dt)
        self.z = 0.0
        self.zdot = 0.0
        self.k = 0
        self.done = True
        self.trace: list[tuple] = []

    @property
    def state(self) -> EnvState:
        return EnvState(e_z=float(self.z - self.wave.z_w[self.k]), zdot=float(self.zdot))

    def reset(self, seed=None) -> EnvState:
        """Start a new episode: fresh wave, vehicle at h0 above the platform, at rest."""
        n = self.config.max_steps + 1
        if self.wave_params is None:
            self.wave = WaveRealization.flat(n, self.config.dt)
        else:
            self.wave = synthesize_wave(
                self.wave_params,
                self.wave_grid,
                duration=self.config.max_steps * self.config.dt,
                dt=self.config.dt,
                rng_seed=seed,
            )
        self.z = float(self.wave.z_w[0] + self.uav.h0)
        self.zdot = 0.0
        self.k = 0
        self.done = False
        self.trace = []
        return self.state

    def control_from_action(self, action) -> float:
        """Map an agent action (index or command) to the applied command U."""
        if self.action_spec.mode == "discrete":
            idx = int(action)
            if idx not in (0, 1, 2):
                raise ValueError(f"discrete action index must be 0..2, got {action!r}")
            return float(self.action_spec.discrete_controls()[idx])
        return float(np.clip(action, self.action_spec.u_min, self.action_spec.u_max))

    def step(self, action) -> tuple[EnvState, float, bool, dict]:
        """Advance one time step under the given action.

        info carries the platform sample, the applied command, and on
        contact the impact speed |zdot - zdot_w|. Exceeding the state
        clamps aborts the episode with a large negative terminal reward.
        """
        if self.done:
            raise RuntimeError("step() called on a finished episode; call reset()")
        U = self.control_from_action(action)
        self.z, self.zdot = rk4_step(self.uav, self.z, self.zdot, U, self.config.dt)
        self.k += 1

        if not (math.isfinite(self.z) and math.isfinite(self.zdot)):
            self.done = True
            raise NumericalFault(f"non-finite state at step {self.k}: z={self.z}, zdot={self.zdot}")

        z_w = float(self.wave.z_w[self.k])
        zdot_w = float(self.wave.zdot_w[self.k])
        state = EnvState(e_z=self.z - z_w, zdot=self.zdot)
        info = {"z": self.z, "z_w": z_w, "zdot_w": zdot_w, "U": U, "aborted": False}

        contact = state.e_z <= 0.0
        out_of_bounds = abs(state.e_z) > self.config.e_max or abs(self.zdot) > self.config.v_clamp
        if contact:
            r = reward(state, reference_descent_velocity(state.e_z, self.reward_params), self.reward_params)
            self.done = True
            info["impact_velocity"] = abs(self.zdot - zdot_w)
        elif out_of_bounds:
            r = -self.reward_params.k1 * self.config.e_max * 10.0
            self.done = True
            info["aborted"] = True
        else:
            r = reward(state, reference_descent_velocity(state.e_z, self.reward_params), self.reward_params)
            self.done = self.k >= self.config.max_steps

        if self.record_trace:
            self.trace.append((self.k * self.config.dt, self.z, z_w, self.zdot, U, r))
        return state, r, self.done, info
