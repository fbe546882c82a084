"""Proximal Policy Optimization with a Gaussian actor and a value critic.

On-policy: the actor rolls out a fixed horizon, generalized advantage
estimates are computed by backward recursion, and the clipped surrogate
objective plus a squared critic loss are minimized over a few shuffled
minibatch epochs. Stored log-probabilities are never recomputed under the
updated actor, so the behavior policy stays honest between update phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import LandingEnv, NumericalFault
from .dqn import EpisodeResult
from .nets import MlpNetwork, sgd_step

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PpoConfig:
    lr_actor: float = 3e-4
    lr_critic: float = 3e-4
    discount: float = 0.99
    gae_lambda: float = 0.95
    clip_ratio: float = 0.2
    horizon: int = 20
    epochs: int = 4
    minibatch_size: int = 5
    capacity: int = 10_000
    entropy_coef: float = 0.0
    normalize_advantages: bool = True
    action_hold: int = 5
    head_init_scale: float = 0.01
    log_std_init: float = math.log(0.5 * 9.81)
    hidden_sizes: tuple = (32, 32, 16)
    reward_scale: float = 0.01
    obs_scale: tuple = (0.2, 0.5)

    def __post_init__(self):
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must lie in (0, 1]")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("gae_lambda must lie in [0, 1]")
        if self.clip_ratio <= 0.0:
            raise ValueError("clip_ratio must be positive")
        if not self.minibatch_size <= self.horizon:
            raise ValueError("need minibatch_size <= horizon")
        if self.action_hold < 1:
            raise ValueError("action_hold must be >= 1")


@dataclass
class RolloutBatch:
    """One rollout chunk with its advantage estimates and value targets."""

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    log_probs: np.ndarray
    values: np.ndarray
    dones: np.ndarray
    advantages: np.ndarray = None
    value_targets: np.ndarray = None

    def subset(self, idx) -> "RolloutBatch":
        return RolloutBatch(
            states=self.states[idx],
            actions=self.actions[idx],
            rewards=self.rewards[idx],
            log_probs=self.log_probs[idx],
            values=self.values[idx],
            dones=self.dones[idx],
            advantages=self.advantages[idx],
            value_targets=self.value_targets[idx],
        )


def build_actor(config: PpoConfig, bounds, state_dim: int = 2, seed=None) -> MlpNetwork:
    return MlpNetwork([state_dim, *config.hidden_sizes], head="gaussian",
                      bounds=bounds, log_std_init=config.log_std_init,
                      head_init_scale=config.head_init_scale, seed=seed)


def build_critic(config: PpoConfig, state_dim: int = 2, seed=None) -> MlpNetwork:
    return MlpNetwork([state_dim, *config.hidden_sizes], head="linear", n_out=1, seed=seed)


def gaussian_log_prob(action, mean, log_std):
    """Log-density of the (unclamped) Gaussian policy at the given action."""
    std = np.exp(log_std)
    z = (action - mean) / std
    return -0.5 * z * z - log_std - 0.5 * LOG_2PI


def sample_action(actor: MlpNetwork, obs: np.ndarray, rng: np.random.Generator):
    """Draw a command from the actor's Gaussian, clamp to the action bounds.

    Returns (action, log_prob) where log_prob is the unclamped Gaussian
    density evaluated at the stored (clamped) action, so ratios formed
    later against a re-evaluated density are consistent.
    """
    mean, log_std = actor.forward(obs)
    raw = mean + math.exp(log_std) * rng.standard_normal()
    action = float(np.clip(raw, actor.bounds[0], actor.bounds[1]))
    return action, float(gaussian_log_prob(action, mean, log_std))


def compute_gae(rewards, values, dones, bootstrap_value, gamma, lam):
    """Backward-recursive generalized advantage estimates and value targets.

    A terminal flag cuts the accumulation: the TD residual there uses a
    zero successor value and the weighted sum restarts. value targets are
    advantage + value.
    """
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    dones = np.asarray(dones, dtype=bool)
    n = len(rewards)
    if not (len(values) == len(dones) == n):
        raise ValueError("rewards, values, dones must have equal length")
    adv = np.zeros(n)
    carry = 0.0
    for k in range(n - 1, -1, -1):
        v_next = bootstrap_value if k == n - 1 else values[k + 1]
        live = 0.0 if dones[k] else 1.0
        delta = rewards[k] + gamma * v_next * live - values[k]
        carry = delta + gamma * lam * live * carry
        adv[k] = carry
    return adv, adv + values


def ppo_loss(actor: MlpNetwork, batch: RolloutBatch, clip_ratio: float,
             entropy_coef: float = 0.0):
    """Negated clipped surrogate and its parameter gradients.

    The probability ratio is exp(logp_new - logp_old); samples whose
    clipped branch is active contribute no actor gradient.
    """
    out = actor.forward(batch.states)
    mean, log_std = out[:, 0], out[:, 1]
    logp_new = gaussian_log_prob(batch.actions, mean, log_std)
    ratio = np.exp(logp_new - batch.log_probs)
    adv = batch.advantages
    surr_raw = ratio * adv
    surr_clip = np.clip(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio) * adv
    objective = np.minimum(surr_raw, surr_clip)
    entropy = log_std + 0.5 * (LOG_2PI + 1.0)
    loss = float(-np.mean(objective) - entropy_coef * np.mean(entropy))

    n = len(adv)
    active = surr_raw <= surr_clip
    d_logp = -(adv * ratio * active) / n
    std = np.exp(log_std)
    z = (batch.actions - mean) / std
    d_mean = d_logp * z / std
    d_log_std = d_logp * (z * z - 1.0) - entropy_coef / n
    upstream = np.stack([d_mean, d_log_std], axis=1)
    return loss, actor.backward(batch.states, upstream)


def critic_loss(critic: MlpNetwork, batch: RolloutBatch):
    """Mean squared error against the value targets, with gradients."""
    v = critic.forward(batch.states)[:, 0]
    err = v - batch.value_targets
    loss = float(np.mean(err**2))
    upstream = (2.0 * err / len(err))[:, None]
    return loss, critic.backward(batch.states, upstream)


def _update_phase(config, actor, critic, rollout: RolloutBatch, bootstrap, rng):
    """GAE + epochs of shuffled-minibatch SGD on one collected chunk."""
    adv, targets = compute_gae(
        rollout.rewards, rollout.values, rollout.dones,
        bootstrap, config.discount, config.gae_lambda,
    )
    if config.normalize_advantages and len(adv) > 1:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    rollout.advantages = adv
    rollout.value_targets = targets
    n = len(adv)
    actor_losses, critic_losses = [], []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.minibatch_size):
            mb = rollout.subset(order[start : start + config.minibatch_size])
            c_loss, c_grads = critic_loss(critic, mb)
            sgd_step(critic, c_grads, config.lr_critic)
            a_loss, a_grads = ppo_loss(actor, mb, config.clip_ratio, config.entropy_coef)
            sgd_step(actor, a_grads, config.lr_actor)
            actor_losses.append(a_loss)
            critic_losses.append(c_loss)
    return float(np.mean(actor_losses)), float(np.mean(critic_losses))


class _RolloutStore:
    def __init__(self):
        self.states, self.actions, self.rewards = [], [], []
        self.log_probs, self.values, self.dones = [], [], []

    def __len__(self):
        return len(self.states)

    def push(self, s, a, r, logp, v, done):
        self.states.append(s)
        self.actions.append(a)
        self.rewards.append(r)
        self.log_probs.append(logp)
        self.values.append(v)
        self.dones.append(done)

    def as_batch(self) -> RolloutBatch:
        return RolloutBatch(
            states=np.asarray(self.states),
            actions=np.asarray(self.actions),
            rewards=np.asarray(self.rewards),
            log_probs=np.asarray(self.log_probs),
            values=np.asarray(self.values),
            dones=np.asarray(self.dones, dtype=bool),
        )


def train(config: PpoConfig, env: LandingEnv, episodes: int, seed):
    """Algorithm: per episode regenerate the wave, roll out with the current
    policy, and every `horizon` steps (or at episode end) run the epoch-wise
    minibatch update phase. Returns (actor, critic, results)."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if env.action_spec.mode != "continuous":
        raise ValueError("PPO requires a continuous-mode environment")
    root = np.random.SeedSequence(seed)
    actor_ss, critic_ss, agent_ss, wave_ss = root.spawn(4)
    rng = np.random.default_rng(agent_ss)
    wave_seeds = wave_ss.spawn(episodes)

    bounds = (env.action_spec.u_min, env.action_spec.u_max)
    actor = build_actor(config, bounds, seed=actor_ss)
    critic = build_critic(config, seed=critic_ss)
    obs_scale = np.asarray(config.obs_scale)

    results = []
    for episode in range(episodes):
        state = env.reset(seed=wave_seeds[episode])
        obs = state.as_array() * obs_scale
        total_reward = 0.0
        steps = 0
        impact = None
        landed = False
        aborted = False
        a_losses, c_losses = [], []
        store = _RolloutStore()

        done = False
        while not done:
            action, logp = sample_action(actor, obs, rng)
            value = float(critic.forward(obs)[0])
            # zero-order hold: one learner step spans action_hold integrator steps
            hold_reward = 0.0
            fault = False
            for _ in range(config.action_hold):
                try:
                    next_state, r, done, info = env.step(action)
                except NumericalFault:
                    fault = True
                    break
                hold_reward += r
                total_reward += r
                steps += 1
                if info["aborted"]:
                    aborted = True
                if "impact_velocity" in info:
                    impact = info["impact_velocity"]
                    landed = True
                if done:
                    break
            if fault:
                aborted = True
                store = _RolloutStore()  # discard the tainted chunk
                break
            next_obs = next_state.as_array() * obs_scale
            store.push(obs, action, hold_reward * config.reward_scale, logp, value, done)
            obs = next_obs

            if len(store) >= config.horizon or done:
                bootstrap = 0.0 if done else float(critic.forward(obs)[0])
                a_loss, c_loss = _update_phase(config, actor, critic, store.as_batch(),
                                               bootstrap, rng)
                a_losses.append(a_loss)
                c_losses.append(c_loss)
                store = _RolloutStore()

        results.append(
            EpisodeResult(
                episode=episode,
                total_reward=total_reward,
                mean_loss=(float(np.mean(a_losses) + np.mean(c_losses)) if a_losses else None),
                steps=steps,
                impact_velocity=impact,
                landed=landed,
                actor_loss=float(np.mean(a_losses)) if a_losses else None,
                critic_loss=float(np.mean(c_losses)) if c_losses else None,
                aborted=aborted,
            )
        )
    return actor, critic, results
