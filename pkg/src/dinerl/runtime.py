"""Control loop: monitor the simulator, pick actions, learn, explain, record.

Each step runs the same pipeline: observe, compute the per-channel Q-matrix,
select an action (epsilon-greedy with decay), step the simulator, store the
transition, run one learning step, retrain the dynamics model on schedule,
then derive the explanation events for the step and emit one StepRecord.

Control commands (threshold changes, explanation requests, pause/resume)
are applied only between steps, so emitted records are never rewritten.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from . import dine
from .agent import AgentHyper, ChannelSpec, DecomposedAgent, aggregate_q, select_from_q
from .config import RunConfig
from .envmodel import EnvModel
from .errors import UndefinedInputError
from .protocol import SCHEMA_VERSION, canonical_json
from .replay import ReplayMemory, Transition
from .swimsim import (
    ACTION_NAMES,
    CHANNEL_NAMES,
    N_ACTIONS,
    N_CHANNELS,
    SimState,
    SwimSim,
    generate_workload,
    load_workload_csv,
)

OBS_DIM = 5


@dataclass
class StepRecord:
    step: int
    state: SimState
    observation: np.ndarray
    action: int
    legal: bool
    reward: np.ndarray
    q_values: np.ndarray       # (channels, actions), online nets at decision time
    q_aggregate: np.ndarray
    events: list
    epsilon: float
    rho: float
    phi: float
    model_ready: bool

    def to_message(self) -> dict:
        return {
            "type": "step_record",
            "step": self.step,
            "state": self.state.to_dict(),
            "observation": self.observation.tolist(),
            "action": int(self.action),
            "action_name": ACTION_NAMES[self.action],
            "legal": bool(self.legal),
            "reward": self.reward.tolist(),
            "reward_total": float(self.reward.sum()),
            "q_values": self.q_values.tolist(),
            "q_aggregate": self.q_aggregate.tolist(),
            "events": [
                dine.event_to_dict(e, list(ACTION_NAMES), list(CHANNEL_NAMES))
                for e in self.events
            ],
            "epsilon": self.epsilon,
            "thresholds": {"rho": self.rho, "phi": self.phi},
            "model_ready": self.model_ready,
        }


@dataclass
class RunSummary:
    steps: int
    cumulative_reward: list[float]
    cumulative_total: float
    dine_counts: dict[str, int]
    illegal_actions: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def zscore_series(values) -> np.ndarray:
    """Standardize a raw series; degenerate (short or constant) input maps to zeros."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return np.zeros_like(arr)
    std = arr.std()
    if std == 0.0:
        return np.zeros_like(arr)
    return (arr - arr.mean()) / std


def header_message(cfg: RunConfig) -> dict:
    return {"type": "header", "schema_version": SCHEMA_VERSION, "config": cfg.to_dict()}


def interaction_counts(records: list[dict], rho: float) -> tuple[int, int]:
    """Recompute interaction events from stored Q-matrices at a new rho.

    Returns (event count, count of steps with at least one event).
    """
    events = 0
    steps = 0
    for record in records:
        found = dine.detect_important_interactions(
            np.array(record["q_values"]), record["action"], rho, step=record["step"]
        )
        events += len(found)
        steps += 1 if found else 0
    return events, steps


def extremum_counts(records: list[dict], phi: float) -> tuple[int, int]:
    """Filter stored extremum events by margin at a new phi.

    Exact only when the trace was recorded at phi=0 (every candidate event
    present); at higher recording thresholds the result is a lower bound.
    Returns (event count, count of steps with at least one event).
    """
    events = 0
    steps = 0
    for record in records:
        hits = 0
        for event in record["events"]:
            if event["type"] != "reward_channel_extremum":
                continue
            margin = event["margin"]
            if (margin >= phi) if phi > 0 else (margin > 0):
                hits += 1
        events += hits
        steps += 1 if hits else 0
    return events, steps


class TraceWriter:
    """JSONL sink: one header line, then one line per step record."""

    def __init__(self, path: str, cfg: RunConfig):
        self._fh = open(path, "w", encoding="utf-8")
        self.write(header_message(cfg))

    def write(self, message: dict) -> None:
        self._fh.write(canonical_json(message))
        self._fh.write("\n")

    def close(self) -> None:
        self._fh.close()


def _spawn_seeds(seed: int, count: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


def build_channels() -> list[ChannelSpec]:
    weights = (4.0, 2.0, 1.0)
    return [ChannelSpec(i, name, weights[i]) for i, name in enumerate(CHANNEL_NAMES)]


class ControlLoop:
    """One full adaptation run over a workload trace."""

    def __init__(self, cfg: RunConfig):
        cfg.validate()
        self.cfg = cfg
        if cfg.workload_csv:
            workload = load_workload_csv(cfg.workload_csv)
        else:
            workload = generate_workload(cfg.workload)
        self.sim = SwimSim(cfg.sim, workload)

        agent_seed, model_seed, action_seed = _spawn_seeds(cfg.seed, 3)
        self.agent = DecomposedAgent(
            OBS_DIM, N_ACTIONS, build_channels(), cfg.hyper, seed=agent_seed, hidden=cfg.hidden
        )
        self.model = EnvModel(
            OBS_DIM, N_ACTIONS, hidden=cfg.hidden,
            learning_rate=cfg.model.learning_rate, seed=model_seed,
        )
        self.memory = ReplayMemory(cfg.replay_capacity, OBS_DIM, N_CHANNELS, N_ACTIONS)
        self.action_rng = np.random.default_rng(action_seed)

        self.thresholds = dine.DineThresholds(cfg.thresholds.rho, cfg.thresholds.phi)
        self.step_index = 0
        self.paused = False
        self.recent: deque[StepRecord] = deque(maxlen=500)

        self._cum_reward = np.zeros(N_CHANNELS)
        self._dine_counts = {
            "important_interaction": 0,
            "reward_channel_extremum": 0,
            "reward_channel_dominance": 0,
        }
        self._illegal = 0

    @property
    def done(self) -> bool:
        return self.step_index >= self.cfg.total_steps or self.sim.done

    def set_threshold(self, kind: str, value: float) -> int:
        """Change rho or phi; returns the step index it first applies to."""
        if kind not in ("rho", "phi"):
            raise UndefinedInputError(f"unknown threshold kind: {kind!r}")
        candidate = replace(self.thresholds, **{kind: float(value)})
        candidate.validate()
        self.thresholds = candidate
        return self.step_index

    def explanation_for_step(self, step: int) -> dict:
        """Minimal sufficient explanation over a backlogged step's Q-matrix."""
        record = next((r for r in self.recent if r.step == step), None)
        if record is None:
            raise UndefinedInputError(f"step {step} not in the record backlog")
        channels = dine.minimal_sufficient_explanation(record.q_values, record.action)
        return {
            "type": "msx_reply",
            "step": step,
            "action": int(record.action),
            "action_name": ACTION_NAMES[record.action],
            "channels": channels,
            "channel_names": [CHANNEL_NAMES[c] for c in channels],
        }

    def _detect_events(self, q: np.ndarray, obs: np.ndarray, action: int) -> list:
        events = list(
            dine.detect_important_interactions(q, action, self.thresholds.rho, step=self.step_index)
        )
        if self.model.is_ready():
            predicted = self.model.predict_all(obs)
            next_qs = [self.agent.channel_q_values(predicted[a]) for a in range(N_ACTIONS)]
            events.extend(dine.detect_extrema(q, next_qs, self.thresholds.phi, step=self.step_index))
        events.append(dine.reward_channel_dominance(q, step=self.step_index))
        return events

    def step_once(self) -> StepRecord | None:
        """Run one control step; None when the run is over."""
        if self.done:
            return None
        cfg = self.cfg
        obs = self.sim.observe()
        state_before = self.sim.state()
        q = self.agent.channel_q_values(obs)
        epsilon = cfg.hyper.epsilon_at(self.step_index)
        action = select_from_q(q, epsilon, self.action_rng)

        next_obs, reward, info = self.sim.step(action)
        self.memory.push(
            Transition(obs, action, reward * cfg.reward_scale, next_obs, illegal=not info["legal"])
        )
        self.agent.learn_step(self.memory)

        if (self.step_index + 1) % cfg.model.interval == 0 and len(self.memory) >= cfg.model.min_size:
            self.model.train(
                self.memory,
                epochs=cfg.model.epochs,
                holdout_fraction=cfg.model.holdout_fraction,
                min_size=cfg.model.min_size,
            )

        events = self._detect_events(q, obs, action)
        record = StepRecord(
            step=self.step_index,
            state=state_before,
            observation=obs,
            action=action,
            legal=info["legal"],
            reward=reward,
            q_values=q,
            q_aggregate=aggregate_q(q),
            events=events,
            epsilon=epsilon,
            rho=self.thresholds.rho,
            phi=self.thresholds.phi,
            model_ready=self.model.is_ready(),
        )
        self.recent.append(record)
        self.step_index += 1

        self._cum_reward += reward
        if not info["legal"]:
            self._illegal += 1
        for event in events:
            if isinstance(event, dine.ImportantInteraction):
                self._dine_counts["important_interaction"] += 1
            elif isinstance(event, dine.RewardChannelExtremum):
                self._dine_counts["reward_channel_extremum"] += 1
            else:
                self._dine_counts["reward_channel_dominance"] += 1
        return record

    def summary(self) -> RunSummary:
        return RunSummary(
            steps=self.step_index,
            cumulative_reward=[float(v) for v in self._cum_reward],
            cumulative_total=float(self._cum_reward.sum()),
            dine_counts=dict(self._dine_counts),
            illegal_actions=self._illegal,
        )

    def run(self, record_sink=None, bus=None) -> RunSummary:
        """Drive the loop to completion; bus (if any) is polled between steps."""
        cfg = self.cfg
        writer = TraceWriter(cfg.trace, cfg) if cfg.trace else None
        try:
            while not self.done:
                if bus is not None:
                    bus.service(self)
                    if self.paused:
                        continue
                record = self.step_once()
                if record is None:
                    break
                message = record.to_message()
                if writer is not None:
                    writer.write(message)
                if record_sink is not None:
                    record_sink(message)
        finally:
            if writer is not None:
                writer.close()
        return self.summary()
