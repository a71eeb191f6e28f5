"""Learned one-step dynamics model (state, action) -> next state.

Trained by supervised regression on the replay memory's dataset view.
Needed by the extremum explanations, which fan out every action from the
current state and score the predicted successors.
"""

from __future__ import annotations

import numpy as np

from . import nnet
from .errors import ConfigurationError, NotReadyError
from .replay import ReplayMemory


class EnvModel:
    """MLP dynamics approximator with a held-out error estimate."""

    def __init__(
        self,
        state_dim: int,
        n_actions: int,
        hidden: tuple[int, ...] = (64, 64),
        learning_rate: float = 1e-3,
        seed: int = 0,
    ):
        self.state_dim = int(state_dim)
        self.n_actions = int(n_actions)
        shape = [self.state_dim + self.n_actions, *hidden, self.state_dim]
        self.net = nnet.init_network(shape, seed=seed)
        self.opt = nnet.make_optimizer(self.net, learning_rate)
        self.rng = np.random.default_rng(seed)
        self.trained = False
        self.samples_seen = 0
        self.last_holdout_mse: float | None = None

    def is_ready(self) -> bool:
        return self.trained

    def train(
        self,
        mem: ReplayMemory,
        epochs: int = 20,
        holdout_fraction: float = 0.1,
        min_size: int = 100,
        batch_size: int = 64,
    ) -> float:
        """Fit on the replay dataset and return MSE on the held-out tail.

        The holdout is the newest slice by insertion order, so the score
        reflects generalization to the most recent dynamics.
        """
        if not (0.0 < holdout_fraction < 1.0):
            raise ConfigurationError(f"holdout_fraction must be in (0, 1): {holdout_fraction}")
        if len(mem) < min_size:
            raise NotReadyError(f"memory has {len(mem)} < min_size {min_size}")
        inputs, outputs = mem.as_dataset()
        n = inputs.shape[0]
        n_hold = max(1, int(round(n * holdout_fraction)))
        n_train = n - n_hold
        train_x, train_y = inputs[:n_train], outputs[:n_train]
        hold_x, hold_y = inputs[n_train:], outputs[n_train:]

        for _ in range(epochs):
            perm = self.rng.permutation(n_train)
            for start in range(0, n_train, batch_size):
                idx = perm[start : start + batch_size]
                nnet.train_batch(self.net, train_x[idx], train_y[idx], self.opt)

        pred = nnet.forward_batch(self.net, hold_x)
        mse = float(np.mean((pred - hold_y) ** 2))
        self.trained = True
        self.samples_seen += n_train * epochs
        self.last_holdout_mse = mse
        return mse

    def predict_next(self, state: np.ndarray, action: int) -> np.ndarray:
        """Point prediction of the next state; pure once trained."""
        if not self.trained:
            raise NotReadyError("dynamics model has not been trained yet")
        if not (0 <= int(action) < self.n_actions):
            raise ConfigurationError(f"action {action} outside [0, {self.n_actions})")
        x = np.zeros(self.state_dim + self.n_actions)
        x[: self.state_dim] = np.asarray(state, dtype=np.float64)
        x[self.state_dim + int(action)] = 1.0
        return nnet.forward(self.net, x)

    def predict_all(self, state: np.ndarray) -> np.ndarray:
        """(A, state_dim) matrix of predicted successors, one row per action."""
        if not self.trained:
            raise NotReadyError("dynamics model has not been trained yet")
        s = np.asarray(state, dtype=np.float64)
        batch = np.zeros((self.n_actions, self.state_dim + self.n_actions))
        batch[:, : self.state_dim] = s
        batch[np.arange(self.n_actions), self.state_dim + np.arange(self.n_actions)] = 1.0
        return nnet.forward_batch(self.net, batch)
