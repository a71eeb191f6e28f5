"""Reference implementations used as test oracles, written independently
of the package's agent code paths."""

import numpy as np

from dinerl import nnet
from dinerl.agent import AgentHyper


class MonolithicDoubleDQN:
    """Plain scalar-reward double-DQN sharing the nnet primitives.

    Seeding and rng call pattern deliberately mirror a single-channel
    decomposed agent so trajectories are comparable bit for bit.
    """

    def __init__(self, state_dim, n_actions, hyper: AgentHyper, seed: int, hidden=(64, 64)):
        seeds = np.random.SeedSequence(seed).spawn(2)
        self.online = nnet.init_network(
            [state_dim, *hidden, n_actions], seed=int(seeds[0].generate_state(1)[0])
        )
        self.target = nnet.clone_network(self.online)
        self.opt = nnet.make_optimizer(self.online, hyper.learning_rate)
        self.rng = np.random.default_rng(seeds[-1])
        self.hyper = hyper
        self.train_steps = 0

    def learn_step(self, mem):
        hp = self.hyper
        if len(mem) < hp.batch_size:
            return None
        batch = mem.sample(hp.batch_size, self.rng)
        states = np.stack([t.state for t in batch])
        actions = np.array([t.action for t in batch])
        next_states = np.stack([t.next_state for t in batch])
        rewards = np.array([t.reward[0] for t in batch])

        online_next = nnet.forward_batch(self.online, next_states)
        a_star = np.argmax(online_next, axis=1)
        target_next = nnet.forward_batch(self.target, next_states)
        rows = np.arange(len(batch))
        targets = rewards + hp.gamma * target_next[rows, a_star]

        fit = nnet.forward_batch(self.online, states)
        fit[rows, actions] = targets
        loss = nnet.train_batch(self.online, states, fit, self.opt)
        self.train_steps += 1
        if self.train_steps % hp.target_sync_interval == 0:
            nnet.clone_weights(self.online, self.target)
        return loss


def decomposed_value_iteration(transitions, rewards, gamma, n_iters=2000):
    """Tabular fixed point of the shared-greedy decomposed update.

    transitions[s][a] -> next state id; rewards[s][a] -> reward vector.
    Returns Q of shape (C, S, A).
    """
    n_states = len(transitions)
    n_actions = len(transitions[0])
    n_channels = len(rewards[0][0])
    q = np.zeros((n_channels, n_states, n_actions))
    for _ in range(n_iters):
        agg = q.sum(axis=0)  # (S, A)
        greedy = np.argmax(agg, axis=1)  # (S,)
        new_q = np.empty_like(q)
        for s in range(n_states):
            for a in range(n_actions):
                s2 = transitions[s][a]
                for c in range(n_channels):
                    new_q[c, s, a] = rewards[s][a][c] + gamma * q[c, s2, greedy[s2]]
        q = new_q
    return q
