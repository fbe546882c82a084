"""Value-based learners: DQN, Double DQN, and Dueling DQN.

One learner drives one environment: per episode a fresh wave is drawn,
actions are epsilon-greedy over the prediction network's Q-values, and
every step a uniform minibatch from the replay buffer feeds a single
clipped SGD update. The target network trails the prediction network via
periodic soft blending.

The buffer stores raw transitions; observation and reward scaling are
applied at learning time so all conditioning knobs live in the config.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .env import LandingEnv, NumericalFault, Transition
from .nets import GradientSet, MlpNetwork, sgd_step, soft_update


@dataclass
class TransitionBatch:
    """Column-major minibatch view used by target computation and the loss."""

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray


class ReplayBuffer:
    """Bounded FIFO transition store with uniform minibatch sampling."""

    def __init__(self, capacity: int, state_dim: int = 2):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._states = np.zeros((capacity, state_dim))
        self._actions = np.zeros(capacity, dtype=np.int64)
        self._rewards = np.zeros(capacity)
        self._next_states = np.zeros((capacity, state_dim))
        self._dones = np.zeros(capacity, dtype=bool)
        self._head = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, tr: Transition) -> None:
        """Insert one transition, evicting the oldest when full."""
        i = self._head
        self._states[i] = tr.s.as_array()
        self._actions[i] = int(tr.a)
        self._rewards[i] = tr.r
        self._next_states[i] = tr.s_next.as_array()
        self._dones[i] = tr.done
        self._head = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        """Uniform minibatch without replacement within the batch."""
        if batch_size > self._size:
            raise ValueError(f"cannot sample {batch_size} from buffer of size {self._size}")
        idx = rng.choice(self._size, size=batch_size, replace=False)
        return TransitionBatch(
            states=self._states[idx].copy(),
            actions=self._actions[idx].copy(),
            rewards=self._rewards[idx].copy(),
            next_states=self._next_states[idx].copy(),
            dones=self._dones[idx].copy(),
        )


@dataclass(frozen=True)
class EpsilonSchedule:
    """Per-episode exponential exploration decay with a floor."""

    eps0: float = 1.0
    eps_f: float = 0.05
    decay_rate: float = 0.05 ** (1.0 / 80.0)  # floor reached at episode 80

    def __post_init__(self):
        if not 0.0 < self.eps_f <= self.eps0 <= 1.0:
            raise ValueError("EpsilonSchedule requires 0 < eps_f <= eps0 <= 1")
        if not 0.0 < self.decay_rate <= 1.0:
            raise ValueError("EpsilonSchedule.decay_rate must lie in (0, 1]")

    def value(self, episode: int) -> float:
        return max(self.eps_f, self.eps0 * self.decay_rate**episode)


VARIANTS = ("dqn", "double", "dueling")


@dataclass(frozen=True)
class DqnConfig:
    variant: str = "dqn"
    lr: float = 1e-3
    batch_size: int = 64
    discount: float = 0.995
    capacity: int = 10_000
    sync_freq: int = 10
    soft_tau: float = 0.8
    grad_clip: float = 1.0
    warm_start: int = 200
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    hidden_sizes: tuple = (32, 32, 16)
    reward_scale: float = 0.01
    obs_scale: tuple = (0.2, 0.5)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must lie in (0, 1]")
        if not self.batch_size <= self.warm_start <= self.capacity:
            raise ValueError("need batch_size <= warm_start <= capacity")


def build_q_network(config: DqnConfig, n_actions: int = 3, state_dim: int = 2,
                    seed=None) -> MlpNetwork:
    head = "dueling" if config.variant == "dueling" else "linear"
    return MlpNetwork([state_dim, *config.hidden_sizes], head=head, n_out=n_actions, seed=seed)


def select_action(net: MlpNetwork, obs: np.ndarray, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy over Q-values; argmax ties resolve to the lowest index."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(net.n_out))
    return int(np.argmax(net.forward(obs)))


def compute_targets(batch: TransitionBatch, prediction_net: MlpNetwork,
                    target_net: MlpNetwork, gamma: float, variant: str) -> np.ndarray:
    """Bootstrap targets for the minibatch; terminal transitions use the bare reward.

    The double variant selects the successor action with the prediction
    network but evaluates it with the target network.
    """
    q_next = target_net.forward(batch.next_states)
    if variant == "double":
        greedy = np.argmax(prediction_net.forward(batch.next_states), axis=1)
        bootstrap = q_next[np.arange(len(greedy)), greedy]
    else:
        bootstrap = q_next.max(axis=1)
    return batch.rewards + gamma * bootstrap * ~batch.dones


def learn_step(config: DqnConfig, buffer: ReplayBuffer, prediction_net: MlpNetwork,
               target_net: MlpNetwork, rng: np.random.Generator):
    """One minibatch update; returns the MSE loss, or None before warm start.

    Gradient flows only through the Q output of the action actually taken.
    """
    if len(buffer) < config.warm_start:
        return None
    raw = buffer.sample(config.batch_size, rng)
    scale = np.asarray(config.obs_scale)
    batch = TransitionBatch(
        states=raw.states * scale,
        actions=raw.actions,
        rewards=raw.rewards * config.reward_scale,
        next_states=raw.next_states * scale,
        dones=raw.dones,
    )
    targets = compute_targets(batch, prediction_net, target_net, config.discount, config.variant)
    q = prediction_net.forward(batch.states)
    rows = np.arange(len(batch.actions))
    err = q[rows, batch.actions] - targets
    loss = float(np.mean(err**2))

    upstream = np.zeros_like(q)
    upstream[rows, batch.actions] = 2.0 * err / len(err)
    grads = prediction_net.backward(batch.states, upstream)
    sgd_step(prediction_net, grads, config.lr, clip=config.grad_clip)
    return loss


@dataclass
class EpisodeResult:
    """Per-episode training metrics shared by all agents."""

    episode: int
    total_reward: float
    mean_loss: float | None
    steps: int
    impact_velocity: float | None
    landed: bool
    epsilon: float | None = None
    actor_loss: float | None = None
    critic_loss: float | None = None
    aborted: bool = False


def train(config: DqnConfig, env: LandingEnv, episodes: int, seed):
    """Run the full two-loop learning procedure; returns (prediction_net, results).

    Per episode: fresh wave from a spawned seed, epsilon-greedy rollout,
    per-step replay learning, soft target sync every sync_freq updates.
    Fully reproducible for a fixed seed. Environment numerical faults
    abort the episode and training continues.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    root = np.random.SeedSequence(seed)
    init_ss, agent_ss, wave_ss = root.spawn(3)
    rng = np.random.default_rng(agent_ss)
    wave_seeds = wave_ss.spawn(episodes)

    prediction_net = build_q_network(config, seed=init_ss)
    target_net = prediction_net.clone()
    buffer = ReplayBuffer(config.capacity)
    obs_scale = np.asarray(config.obs_scale)

    results = []
    updates = 0
    for episode in range(episodes):
        state = env.reset(seed=wave_seeds[episode])
        eps = config.epsilon.value(episode)
        total_reward = 0.0
        losses = []
        impact = None
        landed = False
        aborted = False
        steps = 0

        done = False
        while not done:
            action = select_action(prediction_net, state.as_array() * obs_scale, eps, rng)
            try:
                next_state, r, done, info = env.step(action)
            except NumericalFault:
                aborted = True
                break
            buffer.push(Transition(s=state, a=action, r=r, s_next=next_state, done=done))
            total_reward += r
            steps += 1
            state = next_state
            if info["aborted"]:
                aborted = True
            if "impact_velocity" in info:
                impact = info["impact_velocity"]
                landed = True

            loss = learn_step(config, buffer, prediction_net, target_net, rng)
            if loss is not None:
                losses.append(loss)
                updates += 1
                if updates % config.sync_freq == 0:
                    soft_update(target_net, prediction_net, config.soft_tau)

        results.append(
            EpisodeResult(
                episode=episode,
                total_reward=total_reward,
                mean_loss=float(np.mean(losses)) if losses else None,
                steps=steps,
                impact_velocity=impact,
                landed=landed,
                epsilon=eps,
                aborted=aborted,
            )
        )
    return prediction_net, results
