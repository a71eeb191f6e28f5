"""Experience replay with vector rewards.

The buffer is plain FIFO and doubles as the labeled dataset for the
dynamics model: as_dataset() encodes each stored transition as
(state ++ one-hot(action)) -> next_state, in insertion order.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError, NotReadyError


@dataclass(frozen=True)
class Transition:
    """One agent-environment interaction with a per-channel reward vector."""

    state: np.ndarray
    action: int
    reward: np.ndarray
    next_state: np.ndarray
    illegal: bool = False


class ReplayMemory:
    """Ring buffer of transitions with fixed dimensions and FIFO eviction."""

    def __init__(self, capacity: int, state_dim: int, n_channels: int, n_actions: int):
        if capacity < 1:
            raise ConfigurationError(f"capacity must be positive: {capacity}")
        self.capacity = int(capacity)
        self.state_dim = int(state_dim)
        self.n_channels = int(n_channels)
        self.n_actions = int(n_actions)
        self._items: deque[Transition] = deque(maxlen=self.capacity)
        self.total_pushed = 0

    def __len__(self) -> int:
        return len(self._items)

    def push(self, t: Transition) -> None:
        state = np.asarray(t.state, dtype=np.float64)
        next_state = np.asarray(t.next_state, dtype=np.float64)
        reward = np.asarray(t.reward, dtype=np.float64)
        if state.shape != (self.state_dim,) or next_state.shape != (self.state_dim,):
            raise DataError(
                f"state dims {state.shape}/{next_state.shape} do not match ({self.state_dim},)"
            )
        if reward.shape != (self.n_channels,):
            raise DataError(f"reward arity {reward.shape} does not match ({self.n_channels},)")
        if not (0 <= int(t.action) < self.n_actions):
            raise DataError(f"action {t.action} outside [0, {self.n_actions})")
        self._items.append(Transition(state, int(t.action), reward, next_state, bool(t.illegal)))
        self.total_pushed += 1

    def sample(self, batch_size: int, rng: np.random.Generator | int) -> list[Transition]:
        """Uniform sample with replacement; deterministic for a fixed seed."""
        if batch_size < 1:
            raise ConfigurationError(f"batch_size must be positive: {batch_size}")
        if not self._items:
            raise NotReadyError("memory is empty")
        gen = np.random.default_rng(rng) if isinstance(rng, int) else rng
        idx = gen.integers(0, len(self._items), size=batch_size)
        return [self._items[int(i)] for i in idx]

    def as_dataset(self) -> tuple[np.ndarray, np.ndarray]:
        """(inputs, outputs) arrays in storage order, for dynamics-model training."""
        if not self._items:
            raise NotReadyError("memory is empty")
        n = len(self._items)
        inputs = np.zeros((n, self.state_dim + self.n_actions))
        outputs = np.zeros((n, self.state_dim))
        for i, t in enumerate(self._items):
            inputs[i, : self.state_dim] = t.state
            inputs[i, self.state_dim + t.action] = 1.0
            outputs[i] = t.next_state
        return inputs, outputs

    def contents(self) -> list[Transition]:
        return list(self._items)

    def dump_jsonl(self, path: str) -> None:
        """Write one transition per line for offline debugging."""
        with open(path, "w", encoding="utf-8") as fh:
            for t in self._items:
                fh.write(
                    json.dumps(
                        {
                            "state": t.state.tolist(),
                            "action": t.action,
                            "reward": t.reward.tolist(),
                            "next_state": t.next_state.tolist(),
                            "illegal": t.illegal,
                        }
                    )
                )
                fh.write("\n")
