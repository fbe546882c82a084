"""Campaign orchestration: training runs, frozen-policy evaluation, reporting.

Everything a run produces is deterministic for a fixed config and seed:
CSV logs use shortest round-trip float formatting and weight files are raw
parameter bytes, so re-running a campaign is byte-for-byte reproducible.
Wall-clock inference timing is reported separately and never written into
the deterministic artifacts.
"""

from __future__ import annotations

import csv
import dataclasses
import os
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dqn as dqn_mod
from . import ppo as ppo_mod
from .config import ConfigError, RunConfig, save_config
from .dqn import EpisodeResult
from .env import LandingEnv, NumericalFault
from .nets import MlpNetwork, load_network, save_network
from .waves import sample_spectrum, synthesize_wave

TrainRecord = EpisodeResult  # one row per episode, shared by all agents

LOG_COLUMNS = (
    "episode", "total_reward", "mean_loss", "steps",
    "impact_velocity", "landed", "epsilon", "actor_loss", "critic_loss",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float):  # np.float64 included; plain-float repr either way
        return repr(float(value))
    return str(value)


def write_records(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOG_COLUMNS)
        for r in records:
            writer.writerow([_fmt(getattr(r, c)) for c in LOG_COLUMNS])


def read_records(path) -> list:
    def _opt(s):
        return None if s == "" else float(s)

    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(LOG_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {sorted(missing)}")
        for row in reader:
            records.append(
                TrainRecord(
                    episode=int(row["episode"]),
                    total_reward=float(row["total_reward"]),
                    mean_loss=_opt(row["mean_loss"]),
                    steps=int(row["steps"]),
                    impact_velocity=_opt(row["impact_velocity"]),
                    landed=row["landed"] == "1",
                    epsilon=_opt(row["epsilon"]),
                    actor_loss=_opt(row["actor_loss"]),
                    critic_loss=_opt(row["critic_loss"]),
                )
            )
    return records


def build_env(config: RunConfig, record_trace: bool = False) -> LandingEnv:
    """Assemble the landing environment for the configured agent."""
    mode = "continuous" if config.agent == "ppo" else "discrete"
    return LandingEnv(
        uav=config.uav,
        action_spec=dataclasses.replace(config.action, mode=mode),
        reward_params=config.reward,
        env_config=config.env,
        wave_params=config.wave.params() if config.wave.enabled else None,
        wave_grid=config.wave.grid(),
        record_trace=record_trace,
    )


def run_training(config: RunConfig):
    """Train the configured agent; returns (records, weights_path, log_path).

    Output files land in config.out_dir: <agent>_train_log.csv,
    <agent>_weights.wdnet and <agent>_config.yaml, each written via a
    temporary file and an atomic rename so interrupted runs never leave a
    half-written artifact behind.
    """
    if config.agent not in ("dqn", "double", "dueling", "ppo"):
        raise ConfigError(f"agent: unknown agent {config.agent!r}")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    env = build_env(config)

    if config.agent == "ppo":
        actor, _critic, records = ppo_mod.train(config.ppo, env, config.episodes, config.seed)
        net = actor
    else:
        dqn_config = dataclasses.replace(config.dqn, variant=config.agent)
        net, records = dqn_mod.train(dqn_config, env, config.episodes, config.seed)

    log_path = out / f"{config.agent}_train_log.csv"
    weights_path = out / f"{config.agent}_weights.wdnet"
    _atomic(write_records, records, log_path)
    _atomic(save_network, net, weights_path)
    _atomic(save_config, config, out / f"{config.agent}_config.yaml")
    return records, weights_path, log_path


def _atomic(writer, payload, path: Path) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        writer(payload, tmp)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


# -- evaluation --------------------------------------------------------------


@dataclass
class EpisodeEval:
    episode: int
    steps: int
    landed: bool
    time_to_land: float | None
    impact_velocity: float | None
    total_reward: float
    success: bool


@dataclass
class EvalReport:
    """Aggregate metrics of a frozen policy over fresh-wave episodes."""

    episodes: list
    mean_impact_velocity: float | None
    mean_time_to_land: float | None
    success_rate: float
    inference_time_ms: float | None

    def summary(self) -> str:
        lines = [
            f"episodes:             {len(self.episodes)}",
            f"success rate:         {self.success_rate:.3f}",
            f"mean impact velocity: "
            + (f"{self.mean_impact_velocity:.4f} m/s" if self.mean_impact_velocity is not None else "n/a"),
            f"mean time to land:    "
            + (f"{self.mean_time_to_land:.3f} s" if self.mean_time_to_land is not None else "n/a"),
        ]
        if self.inference_time_ms is not None:
            lines.append(f"inference time:       {self.inference_time_ms:.4f} ms (median)")
        return "\n".join(lines)


def greedy_policy(net: MlpNetwork, obs_scale):
    """Deterministic policy from a trained network: argmax for Q heads,
    the distribution mean for a Gaussian actor."""
    scale = np.asarray(obs_scale)

    if net.head == "gaussian":

        def act(state_vec):
            return float(net.forward(state_vec * scale)[0])

    else:

        def act(state_vec):
            return int(np.argmax(net.forward(state_vec * scale)))

    return act


def run_policy_episodes(env: LandingEnv, policy, n_episodes: int, seed,
                        success_threshold: float, traces=None):
    """Roll a deterministic policy; returns per-episode EpisodeEval rows."""
    wave_seeds = np.random.SeedSequence(seed).spawn(n_episodes)
    rows = []
    for e in range(n_episodes):
        state = env.reset(seed=wave_seeds[e])
        total = 0.0
        steps = 0
        impact = None
        landed = False
        done = False
        while not done:
            try:
                state, r, done, info = env.step(policy(state.as_array()))
            except NumericalFault:
                break
            total += r
            steps += 1
            if "impact_velocity" in info:
                impact = info["impact_velocity"]
                landed = True
        success = landed and impact < success_threshold
        rows.append(
            EpisodeEval(
                episode=e,
                steps=steps,
                landed=landed,
                time_to_land=steps * env.config.dt if landed else None,
                impact_velocity=impact,
                total_reward=total,
                success=success,
            )
        )
        if traces is not None:
            traces.append(list(env.trace))
    return rows


def measure_inference_ms(net: MlpNetwork, obs, passes: int = 10_000) -> float:
    """Median wall-clock of single-state forward passes, in milliseconds."""
    obs = np.asarray(obs, dtype=float)
    samples = np.empty(passes)
    for i in range(passes):
        t0 = time.perf_counter()
        net.forward(obs)
        samples[i] = time.perf_counter() - t0
    return float(np.median(samples) * 1e3)


def evaluate(weights_path, config: RunConfig, n_episodes: int = None, seed: int = None,
             measure_timing: bool = True, trace_dir=None) -> EvalReport:
    """Run a frozen policy on fresh waves and aggregate landing metrics.

    Value nets act greedily (epsilon = 0); a Gaussian actor is evaluated
    at its mean. Never mutates the weight file.
    """
    net = load_network(weights_path)
    n_episodes = n_episodes if n_episodes is not None else config.eval.episodes
    seed = seed if seed is not None else config.seed
    # the head type, not the config, decides how the policy acts
    if net.head == "gaussian":
        agent = "ppo"
    elif config.agent in ("dqn", "double", "dueling"):
        agent = config.agent
    else:
        agent = "dqn"
    obs_scale = config.ppo.obs_scale if agent == "ppo" else config.dqn.obs_scale

    eval_config = config.replace(agent=agent)
    env = build_env(eval_config, record_trace=trace_dir is not None)
    policy = greedy_policy(net, obs_scale)
    traces = [] if trace_dir is not None else None
    rows = run_policy_episodes(env, policy, n_episodes, seed,
                               config.eval.success_impact_threshold, traces)

    landed = [r for r in rows if r.landed]
    report = EvalReport(
        episodes=rows,
        mean_impact_velocity=(float(np.mean([r.impact_velocity for r in landed])) if landed else None),
        mean_time_to_land=(float(np.mean([r.time_to_land for r in landed])) if landed else None),
        success_rate=float(np.mean([r.success for r in rows])),
        inference_time_ms=(
            measure_inference_ms(net, np.zeros(net.n_in)) if measure_timing else None
        ),
    )
    if trace_dir is not None:
        _write_traces(traces, trace_dir)
    return report


def _write_traces(traces, trace_dir) -> None:
    out = Path(trace_dir)
    out.mkdir(parents=True, exist_ok=True)
    for e, trace in enumerate(traces):
        with open(out / f"episode_{e:04d}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "z", "z_w", "zdot", "U", "reward"])
            for row in trace:
                writer.writerow([_fmt(float(v)) for v in row])


def write_eval_csv(report: EvalReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "steps", "landed", "time_to_land",
                         "impact_velocity", "total_reward", "success"])
        for r in report.episodes:
            writer.writerow([
                r.episode, r.steps, _fmt(r.landed), _fmt(r.time_to_land),
                _fmt(r.impact_velocity), _fmt(r.total_reward), _fmt(r.success),
            ])


# -- reporting ---------------------------------------------------------------


def moving_average(series, window: int):
    """Centred moving mean and standard deviation with truncated edges.

    Returns (means, stds), each as long as the input. A window of 1 is the
    identity with zero deviation; empty input yields empty output.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=float)
    n = len(x)
    means = np.empty(n)
    stds = np.empty(n)
    half_lo = (window - 1) // 2
    half_hi = window // 2
    for i in range(n):
        chunk = x[max(0, i - half_lo) : min(n, i + half_hi + 1)]
        means[i] = chunk.mean()
        stds[i] = chunk.std()
    return means, stds


def _write_curve(path, header, xs, means, stds) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for x, m, s in zip(xs, means, stds):
            writer.writerow([_fmt(x), _fmt(float(m)), _fmt(float(s))])


def export_plots(log_paths, out_dir, config: RunConfig = None, window: int = 20) -> list:
    """Emit per-figure (x, mean, std) CSVs from training logs.

    One bundle per log: reward, loss and steps-to-land curves plus the
    per-episode impact velocities; a cross-agent comparison table when
    several logs are given; and, when a config is supplied, the wave
    realization and spectrum panels. Returns the written paths.
    """
    log_paths = [Path(p) for p in log_paths]
    if not log_paths:
        raise ValueError("no training logs given")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    summary_rows = []
    for path in log_paths:
        agent = path.stem.replace("_train_log", "")
        records = read_records(path)
        episodes = [r.episode for r in records]

        for metric, values in (
            ("reward", [r.total_reward for r in records]),
            ("steps", [float(r.steps) for r in records]),
        ):
            means, stds = moving_average(values, window)
            p = out / f"{agent}_{metric}.csv"
            _write_curve(p, ["episode", "mean", "std"], episodes, means, stds)
            written.append(p)

        loss_pairs = [(r.episode, r.mean_loss) for r in records if r.mean_loss is not None]
        if loss_pairs:
            xs = [e for e, _ in loss_pairs]
            means, stds = moving_average([v for _, v in loss_pairs], window)
            p = out / f"{agent}_loss.csv"
            _write_curve(p, ["episode", "mean", "std"], xs, means, stds)
            written.append(p)

        p = out / f"{agent}_impact.csv"
        with open(p, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["episode", "impact_velocity"])
            for r in records:
                if r.impact_velocity is not None:
                    writer.writerow([r.episode, _fmt(r.impact_velocity)])
        written.append(p)

        tail = records[-100:]
        tail_landed = [r for r in tail if r.impact_velocity is not None]
        summary_rows.append([
            agent,
            _fmt(float(np.mean([r.total_reward for r in tail]))),
            _fmt(float(np.mean([r.impact_velocity for r in tail_landed])) if tail_landed else None),
            _fmt(float(np.mean([r.steps for r in tail]))),
            _fmt(float(np.mean([r.landed for r in tail]))),
        ])

    if len(summary_rows) > 1:
        p = out / "comparison.csv"
        with open(p, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["agent", "tail_reward", "tail_impact_velocity",
                             "tail_steps", "tail_landed_fraction"])
            writer.writerows(summary_rows)
        written.append(p)

    if config is not None and config.wave.enabled:
        written.extend(export_wave_panels(config, out, seed=config.seed))
    return written


def export_wave_panels(config: RunConfig, out_dir, seed, duration: float = None) -> list:
    """Wave time series (t, z_w) and sampled spectrum (f, S) CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params, grid = config.wave.params(), config.wave.grid()
    duration = duration if duration is not None else config.env.max_steps * config.env.dt
    wave = synthesize_wave(params, grid, duration, config.env.dt, seed)

    ts_path = out / "wave_timeseries.csv"
    with open(ts_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "z_w"])
        for i, z in enumerate(wave.z_w):
            writer.writerow([_fmt(i * wave.dt), _fmt(float(z))])

    spec_path = out / "wave_spectrum.csv"
    spec = sample_spectrum(params, grid)
    with open(spec_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f", "S"])
        for f, s in spec:
            writer.writerow([_fmt(float(f)), _fmt(float(s))])
    return [ts_path, spec_path]
