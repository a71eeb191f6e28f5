"""Decomposed double-DQN: one online/target network pair per reward channel.

Action selection sums the per-channel Q-rows and takes the argmax. The
bootstrapping target for channel c picks the greedy action a* from the
*aggregated online* Q-values at the next state and evaluates it on channel
c's *target* network, so a single shared a* couples the sub-agents.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import nnet
from .errors import ConfigurationError, DimensionError
from .replay import ReplayMemory, Transition


@dataclass(frozen=True)
class ChannelSpec:
    channel_id: int
    name: str
    weight: float = 1.0


@dataclass
class AgentHyper:
    gamma: float = 0.99
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 10_000
    batch_size: int = 32
    target_sync_interval: int = 500
    learning_rate: float = 1e-4

    def __post_init__(self) -> None:
        if not (0.0 <= self.gamma < 1.0):
            raise ConfigurationError(f"gamma must be in [0, 1): {self.gamma}")
        if not (0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0):
            raise ConfigurationError(
                f"need 0 <= epsilon_end <= epsilon_start <= 1: {self.epsilon_start}, {self.epsilon_end}"
            )
        if min(self.epsilon_decay_steps, self.batch_size, self.target_sync_interval) < 1:
            raise ConfigurationError("decay steps, batch size, sync interval must be positive")
        if self.learning_rate <= 0:
            raise ConfigurationError(f"learning_rate must be positive: {self.learning_rate}")

    def epsilon_at(self, step: int) -> float:
        if step >= self.epsilon_decay_steps:
            return self.epsilon_end
        frac = max(0.0, step / self.epsilon_decay_steps)
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac


@dataclass
class SubAgent:
    online: nnet.Network
    target: nnet.Network
    opt: nnet.OptimizerState
    channel: ChannelSpec


def aggregate_q(q: np.ndarray) -> np.ndarray:
    """Sum the per-channel rows of a (C, A) Q-matrix into one row of length A."""
    q = np.asarray(q, dtype=np.float64)
    return q.sum(axis=0)


def greedy_action(q: np.ndarray) -> int:
    """Argmax of the aggregated row; ties resolve to the lowest action id."""
    return int(np.argmax(aggregate_q(q)))


def select_from_q(q: np.ndarray, epsilon: float, rng: np.random.Generator | int) -> int:
    """Epsilon-greedy pick over a precomputed (C, A) Q-matrix."""
    if not (0.0 <= epsilon <= 1.0):
        raise ConfigurationError(f"epsilon must be in [0, 1]: {epsilon}")
    gen = np.random.default_rng(rng) if isinstance(rng, int) else rng
    n_actions = np.asarray(q).shape[-1]
    if gen.random() < epsilon:
        return int(gen.integers(0, n_actions))
    return greedy_action(q)


class DecomposedAgent:
    """One sub-agent per reward channel plus the aggregated decision rule."""

    def __init__(
        self,
        state_dim: int,
        n_actions: int,
        channels: list[ChannelSpec],
        hyper: AgentHyper | None = None,
        seed: int = 0,
        hidden: tuple[int, ...] = (64, 64),
    ):
        ids = [c.channel_id for c in channels]
        if sorted(ids) != list(range(len(channels))):
            raise ConfigurationError(f"channel ids must be 0..C-1 and unique: {ids}")
        self.state_dim = int(state_dim)
        self.n_actions = int(n_actions)
        self.hyper = hyper or AgentHyper()
        self.train_steps = 0
        shape = [self.state_dim, *hidden, self.n_actions]
        seeds = np.random.SeedSequence(seed).spawn(len(channels) + 1)
        self.rng = np.random.default_rng(seeds[-1])
        self.subagents: list[SubAgent] = []
        for spec, ss in zip(sorted(channels, key=lambda c: c.channel_id), seeds):
            online = nnet.init_network(shape, seed=int(ss.generate_state(1)[0]))
            target = nnet.clone_network(online)
            opt = nnet.make_optimizer(online, self.hyper.learning_rate)
            self.subagents.append(SubAgent(online, target, opt, spec))

    @property
    def n_channels(self) -> int:
        return len(self.subagents)

    @property
    def channels(self) -> list[ChannelSpec]:
        return [s.channel for s in self.subagents]

    def channel_q_values(self, state: np.ndarray) -> np.ndarray:
        """(C, A) matrix: row c is sub-agent c's online Q-row for the state."""
        s = np.asarray(state, dtype=np.float64)
        if s.shape != (self.state_dim,):
            raise DimensionError(f"expected state of shape ({self.state_dim},), got {s.shape}")
        return np.stack([nnet.forward(sub.online, s) for sub in self.subagents])

    def select_action(
        self, state: np.ndarray, epsilon: float, rng: np.random.Generator | int | None = None
    ) -> int:
        return select_from_q(self.channel_q_values(state), epsilon, self.rng if rng is None else rng)

    def decomposed_targets(self, batch: list[Transition], gamma: float) -> np.ndarray:
        """(C, B) bootstrapping targets for the taken actions of the batch.

        a* per sample comes from the aggregated online Q at s'; evaluation of
        a* uses each channel's target network (double-DQN split).
        """
        if not batch:
            raise ConfigurationError("batch must be non-empty")
        next_states = np.stack([t.next_state for t in batch])
        rewards = np.stack([t.reward for t in batch]).T  # (C, B)
        online_next = np.stack(
            [nnet.forward_batch(sub.online, next_states) for sub in self.subagents]
        )  # (C, B, A)
        a_star = np.argmax(online_next.sum(axis=0), axis=1)  # (B,)
        targets = np.empty((self.n_channels, len(batch)))
        rows = np.arange(len(batch))
        for c, sub in enumerate(self.subagents):
            target_next = nnet.forward_batch(sub.target, next_states)
            targets[c] = rewards[c] + gamma * target_next[rows, a_star]
        return targets

    def learn_step(
        self,
        mem: ReplayMemory,
        hyper: AgentHyper | None = None,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray | None:
        """Sample one batch and fit every sub-agent; None when memory is underfull.

        Regression targets keep each non-taken action at its current online
        prediction, so the loss only moves the taken action's output.
        """
        hp = hyper or self.hyper
        if len(mem) < hp.batch_size:
            return None
        batch = mem.sample(hp.batch_size, self.rng if rng is None else rng)
        states = np.stack([t.state for t in batch])
        actions = np.array([t.action for t in batch])
        targets = self.decomposed_targets(batch, hp.gamma)
        rows = np.arange(len(batch))
        losses = np.empty(self.n_channels)
        for c, sub in enumerate(self.subagents):
            fit = nnet.forward_batch(sub.online, states)
            fit[rows, actions] = targets[c]
            losses[c] = nnet.train_batch(sub.online, states, fit, sub.opt)
        self.train_steps += 1
        if self.train_steps % hp.target_sync_interval == 0:
            self.sync_targets()
        return losses

    def sync_targets(self) -> None:
        for sub in self.subagents:
            nnet.clone_weights(sub.online, sub.target)

    def save_checkpoint(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        for sub in self.subagents:
            cid = sub.channel.channel_id
            nnet.save_network(sub.online, os.path.join(directory, f"ch{cid}_online.nn"))
            nnet.save_network(sub.target, os.path.join(directory, f"ch{cid}_target.nn"))
        meta = {
            "train_steps": self.train_steps,
            "channels": [
                {"channel_id": s.channel.channel_id, "name": s.channel.name, "weight": s.channel.weight}
                for s in self.subagents
            ],
        }
        with open(os.path.join(directory, "agent.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)

    def load_checkpoint(self, directory: str) -> None:
        with open(os.path.join(directory, "agent.json"), encoding="utf-8") as fh:
            meta = json.load(fh)
        self.train_steps = int(meta["train_steps"])
        for sub in self.subagents:
            cid = sub.channel.channel_id
            online = nnet.load_network(os.path.join(directory, f"ch{cid}_online.nn"))
            target = nnet.load_network(os.path.join(directory, f"ch{cid}_target.nn"))
            nnet.clone_weights(online, sub.online)
            nnet.clone_weights(target, sub.target)
