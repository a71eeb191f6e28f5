"""Decomposed interestingness elements (DINEs) computed from Q-matrix snapshots.

Three event types:
  * ImportantInteraction  -- a sub-agent strongly prefers a different action
    than the one the aggregated agent chose (inequality of its normalized
    action-values at or above the rho threshold).
  * RewardChannelExtremum -- the current state value is a local min/max by a
    margin of at least phi against all one-step successors predicted by the
    dynamics model, per channel and for the aggregate.
  * RewardChannelDominance -- the per-channel action-values, absolute and
    with each row shifted so its worst action sits at zero.

Everything here is pure: no function mutates the agent, model, or memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import UndefinedInputError

AGGREGATE_SCOPE = "aggregate"


@dataclass(frozen=True)
class ImportantInteraction:
    step: int
    channel_id: int
    chosen_action: int
    contrast_action: int
    importance: float


@dataclass(frozen=True)
class RewardChannelExtremum:
    step: int
    scope: int | str  # channel id, or AGGREGATE_SCOPE
    kind: str  # "min" | "max"
    margin: float


@dataclass(frozen=True)
class RewardChannelDominance:
    step: int
    absolute: np.ndarray  # (C, A)
    relative: np.ndarray  # (C, A), each row min exactly 0


DineEvent = Union[ImportantInteraction, RewardChannelExtremum, RewardChannelDominance]


@dataclass
class DineThresholds:
    """Runtime-tunable generation thresholds; changes apply from the next step."""

    rho: float = 0.25
    phi: float = 0.05

    def validate(self) -> None:
        if not (0.0 <= self.rho <= 1.0):
            raise UndefinedInputError(f"rho must be in [0, 1]: {self.rho}")
        if self.phi < 0.0:
            raise UndefinedInputError(f"phi must be >= 0: {self.phi}")


def action_value_distribution(q_row: np.ndarray) -> np.ndarray:
    """Normalize a Q-row to a probability vector: shift by the row minimum,
    divide by the shifted sum. An all-equal row maps to the uniform vector."""
    row = np.asarray(q_row, dtype=np.float64)
    n = row.shape[0]
    shifted = row - row.min()
    total = shifted.sum()
    if total == 0.0:
        return np.full(n, 1.0 / n)
    return shifted / total


def gini(p: np.ndarray) -> float:
    """Mean absolute pairwise difference of a probability vector, over 2n.

    Zero for the uniform vector, 1 - 1/n for a one-hot vector.
    """
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    return float(np.abs(p[:, None] - p[None, :]).sum() / (2.0 * n))


def importance_per_channel(q: np.ndarray) -> np.ndarray:
    """Inequality score of each channel's normalized action-value row."""
    q = np.asarray(q, dtype=np.float64)
    return np.array([gini(action_value_distribution(row)) for row in q])


def detect_important_interactions(
    q: np.ndarray, chosen: int, rho: float, step: int = 0
) -> list[ImportantInteraction]:
    """One event per channel whose importance reaches rho and whose own greedy
    action (lowest id on ties) differs from the chosen action."""
    q = np.asarray(q, dtype=np.float64)
    events = []
    for c, row in enumerate(q):
        contrast = int(np.argmax(row))
        if contrast == chosen:
            continue
        importance = gini(action_value_distribution(row))
        if importance >= rho:
            events.append(ImportantInteraction(step, c, int(chosen), contrast, importance))
    return events


def state_value(q_row: np.ndarray) -> float:
    """V(s): the greedy action's value."""
    return float(np.max(np.asarray(q_row, dtype=np.float64)))


def _extremum(v_now: float, next_values: np.ndarray, phi: float) -> tuple[str, float] | None:
    lo, hi = float(next_values.min()), float(next_values.max())
    if phi > 0.0:
        if v_now + phi <= lo:
            return "min", lo - v_now
        if v_now >= hi + phi:
            return "max", v_now - hi
    else:  # phi == 0 requires strict inequality so flat landscapes stay silent
        if v_now < lo:
            return "min", lo - v_now
        if v_now > hi:
            return "max", v_now - hi
    return None


def detect_extrema(
    q_now: np.ndarray,
    predicted_next: list[np.ndarray],
    phi: float,
    step: int = 0,
) -> list[RewardChannelExtremum]:
    """Local min/max events per channel and for the aggregate.

    predicted_next holds one (C, A) Q-matrix per action, evaluated at that
    action's predicted successor state (the full one-step fan-out).
    """
    q_now = np.asarray(q_now, dtype=np.float64)
    nexts = [np.asarray(m, dtype=np.float64) for m in predicted_next]
    events = []
    for c in range(q_now.shape[0]):
        v = state_value(q_now[c])
        succ = np.array([state_value(m[c]) for m in nexts])
        hit = _extremum(v, succ, phi)
        if hit is not None:
            events.append(RewardChannelExtremum(step, c, hit[0], hit[1]))
    v_agg = state_value(q_now.sum(axis=0))
    succ_agg = np.array([state_value(m.sum(axis=0)) for m in nexts])
    hit = _extremum(v_agg, succ_agg, phi)
    if hit is not None:
        events.append(RewardChannelExtremum(step, AGGREGATE_SCOPE, hit[0], hit[1]))
    return events


def reward_channel_dominance(q: np.ndarray, step: int = 0) -> RewardChannelDominance:
    """Absolute Q-rows plus the relative form (each row minus its worst value)."""
    q = np.asarray(q, dtype=np.float64)
    relative = q - q.min(axis=1, keepdims=True)
    return RewardChannelDominance(step, q.copy(), relative)


def minimal_sufficient_explanation(q: np.ndarray, chosen: int) -> list[int]:
    """Smallest advantage-ranked prefix of channels that alone locks in the
    chosen action against the best alternative.

    Channels are ranked by q[c][chosen] - q[c][best_alt] descending; the
    prefix S is sufficient once its summed advantage exceeds the worst-case
    deficit the remaining channels could contribute. Falls back to all
    channels when the aggregate is tied with the alternative.
    """
    q = np.asarray(q, dtype=np.float64)
    agg = q.sum(axis=0)
    if int(np.argmax(agg)) != int(chosen):
        raise UndefinedInputError(f"action {chosen} is not the aggregated greedy action")
    n_actions = q.shape[1]
    if n_actions < 2:
        return list(range(q.shape[0]))
    alt_mask = np.ones(n_actions, dtype=bool)
    alt_mask[int(chosen)] = False
    alt_ids = np.flatnonzero(alt_mask)
    best_alt = int(alt_ids[np.argmax(agg[alt_mask])])
    advantage = q[:, int(chosen)] - q[:, best_alt]
    order = np.argsort(-advantage, kind="stable")
    for k in range(1, len(order) + 1):
        in_set = order[:k]
        rest = order[k:]
        gain = advantage[in_set].sum()
        deficit = np.maximum(0.0, -advantage[rest]).sum()
        if gain > deficit:
            return [int(c) for c in in_set]
    return [int(c) for c in order]


def render_explanation_text(
    event: DineEvent, action_names: list[str], channel_names: list[str]
) -> str:
    """Fixed deterministic templates for the operator dashboard."""
    if isinstance(event, ImportantInteraction):
        return (
            f"At step {event.step}, the {channel_names[event.channel_id]} sub-agent "
            f"would have chosen {action_names[event.contrast_action]} instead of "
            f"{action_names[event.chosen_action]} (importance {event.importance:.2f})."
        )
    if isinstance(event, RewardChannelExtremum):
        kind = "maximum" if event.kind == "max" else "minimum"
        who = (
            "aggregated agent"
            if event.scope == AGGREGATE_SCOPE
            else f"{channel_names[int(event.scope)]} sub-agent"
        )
        return f"At step {event.step}, the {who} reached a local reward {kind} (margin {event.margin:.2f})."
    if isinstance(event, RewardChannelDominance):
        totals = event.relative.sum(axis=0)
        top_action = int(np.argmax(totals))
        top_channel = int(np.argmax(event.relative[:, top_action]))
        return (
            f"At step {event.step}, the {channel_names[top_channel]} sub-agent has the "
            f"largest relative influence on action {action_names[top_action]}."
        )
    raise UndefinedInputError(f"unknown event type: {type(event)!r}")


def event_to_dict(
    event: DineEvent, action_names: list[str], channel_names: list[str]
) -> dict:
    """JSON-ready form shared with the trace file and the wire protocol."""
    text = render_explanation_text(event, action_names, channel_names)
    if isinstance(event, ImportantInteraction):
        return {
            "type": "important_interaction",
            "step": event.step,
            "channel_id": event.channel_id,
            "chosen_action": event.chosen_action,
            "contrast_action": event.contrast_action,
            "importance": event.importance,
            "text": text,
        }
    if isinstance(event, RewardChannelExtremum):
        return {
            "type": "reward_channel_extremum",
            "step": event.step,
            "scope": event.scope,
            "kind": event.kind,
            "margin": event.margin,
            "text": text,
        }
    return {
        "type": "reward_channel_dominance",
        "step": event.step,
        "absolute": event.absolute.tolist(),
        "relative": event.relative.tolist(),
        "text": text,
    }
