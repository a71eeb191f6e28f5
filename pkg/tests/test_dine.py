"""DINE computation tests.

Oracles here are deliberately dumb re-implementations: double loops for the
pairwise-difference inequality score, plain-Python rule evaluation for the
interaction detector, and full subset enumeration for the minimal sufficient
explanation. The library must agree with them, not the other way around.
"""

import itertools

import numpy as np
import pytest

from dinerl.dine import (
    AGGREGATE_SCOPE,
    DineThresholds,
    ImportantInteraction,
    RewardChannelDominance,
    RewardChannelExtremum,
    action_value_distribution,
    detect_extrema,
    detect_important_interactions,
    event_to_dict,
    gini,
    importance_per_channel,
    minimal_sufficient_explanation,
    render_explanation_text,
    reward_channel_dominance,
    state_value,
)
from dinerl.errors import UndefinedInputError

ACTIONS = ["NoAdaptation", "AddServer", "RemoveServer", "IncreaseDimmer", "DecreaseDimmer"]
CHANNELS = ["user_satisfaction", "revenue", "costs"]


def gini_oracle(p):
    """Mean absolute pairwise difference over 2n, by explicit double loop."""
    n = len(p)
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += abs(p[i] - p[j])
    return total / (2.0 * n)


def normalize_oracle(row):
    lo = min(row)
    shifted = [v - lo for v in row]
    s = sum(shifted)
    if s == 0.0:
        return [1.0 / len(row)] * len(row)
    return [v / s for v in shifted]


def interactions_oracle(q, chosen, rho):
    """(channel, contrast, importance) triples by direct rule evaluation."""
    out = []
    for c, row in enumerate(q):
        best = 0
        for a in range(1, len(row)):
            if row[a] > row[best]:  # strict: ties keep the lowest id
                best = a
        if best == chosen:
            continue
        imp = gini_oracle(normalize_oracle(list(row)))
        if imp >= rho:
            out.append((c, best, imp))
    return out


def msx_oracle(q, chosen):
    """Minimum-cardinality sufficient channel set via subset enumeration."""
    q = np.asarray(q, dtype=np.float64)
    agg = q.sum(axis=0)
    alts = [a for a in range(q.shape[1]) if a != chosen]
    best_alt = max(alts, key=lambda a: agg[a])
    adv = q[:, chosen] - q[:, best_alt]
    channels = range(q.shape[0])
    for size in range(1, q.shape[0] + 1):
        for subset in itertools.combinations(channels, size):
            rest = [c for c in channels if c not in subset]
            if sum(adv[c] for c in subset) > sum(max(0.0, -adv[c]) for c in rest):
                return size
    return None  # no sufficient subset exists (tie with the alternative)


# --- normalization -------------------------------------------------------


def test_distribution_example():
    np.testing.assert_allclose(
        action_value_distribution(np.array([2.0, -1.0, 0.5])),
        [2.0 / 3.0, 0.0, 1.0 / 3.0],
        atol=1e-15,
    )


def test_distribution_all_equal_is_uniform():
    np.testing.assert_array_equal(action_value_distribution(np.full(4, 7.3)), np.full(4, 0.25))


def test_distribution_shift_invariant_and_valid():
    rng = np.random.default_rng(0)
    for _ in range(200):
        row = rng.normal(size=rng.integers(2, 9))
        p = action_value_distribution(row)
        assert np.all(p >= 0) and abs(p.sum() - 1.0) < 1e-12
        np.testing.assert_allclose(p, action_value_distribution(row + 17.5), atol=1e-12)


# --- gini ----------------------------------------------------------------


def test_gini_uniform_exactly_zero():
    for n in range(2, 11):
        assert gini(np.full(n, 1.0 / n)) == 0.0


def test_gini_one_hot():
    assert abs(gini(np.array([1.0, 0.0, 0.0])) - 2.0 / 3.0) < 1e-12
    for n in range(2, 11):
        p = np.zeros(n)
        p[0] = 1.0
        assert abs(gini(p) - (1.0 - 1.0 / n)) < 1e-12


def test_gini_half_half():
    # [0.5,0.5,0,0]: 8 ordered pairs differ by 0.5 -> 4 / (2*4) = 0.5
    assert abs(gini(np.array([0.5, 0.5, 0.0, 0.0])) - 0.5) < 1e-12


def test_gini_matches_brute_force_on_random_vectors():
    rng = np.random.default_rng(1)
    for _ in range(500):
        raw = rng.uniform(0, 1, size=rng.integers(2, 11))
        p = raw / raw.sum()
        assert abs(gini(p) - gini_oracle(list(p))) < 1e-9


def test_importance_per_channel_rows():
    q = np.array([[1.0, 1.0], [3.0, 0.0]])
    imp = importance_per_channel(q)
    assert imp[0] == 0.0
    assert abs(imp[1] - 0.5) < 1e-12  # one-hot over n=2


# --- important interactions ----------------------------------------------


def test_interaction_rho_one_never_fires():
    rng = np.random.default_rng(2)
    for _ in range(100):
        q = rng.normal(size=(3, 5))
        assert detect_important_interactions(q, int(rng.integers(5)), 1.0) == []


def test_interaction_single_disagreeing_channel():
    q = np.array([[5.0, 0.0, 0.0], [0.0, 0.0, 4.0]])
    events = detect_important_interactions(q, 0, 0.0, step=7)
    assert len(events) == 1
    e = events[0]
    assert (e.channel_id, e.chosen_action, e.contrast_action, e.step) == (1, 0, 2, 7)
    assert e.contrast_action != e.chosen_action


def test_interaction_tie_breaks_to_lowest_id():
    # channel argmax ties between actions 0 and 2; lowest id 0 == chosen -> silent
    q = np.array([[1.0, 0.0, 1.0]])
    assert detect_important_interactions(q, 0, 0.0) == []
    events = detect_important_interactions(q, 1, 0.0)
    assert len(events) == 1 and events[0].contrast_action == 0


def test_interaction_matches_brute_force_oracle():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        c = int(rng.integers(1, 5))
        a = int(rng.integers(2, 7))
        q = np.round(rng.normal(size=(c, a)), 3)
        chosen = int(rng.integers(a))
        rho = float(rng.choice([0.0, 0.1, 0.25, 0.5, 0.9]))
        got = [(e.channel_id, e.contrast_action, e.importance) for e in
               detect_important_interactions(q, chosen, rho)]
        want = interactions_oracle(q, chosen, rho)
        assert [(g[0], g[1]) for g in got] == [(w[0], w[1]) for w in want]
        for g, w in zip(got, want):
            assert abs(g[2] - w[2]) < 1e-9


def test_interaction_count_monotone_in_rho():
    rng = np.random.default_rng(4)
    cases = [(rng.normal(size=(3, 5)), int(rng.integers(5))) for _ in range(200)]
    last = None
    for rho in np.linspace(0.0, 1.0, 11):
        count = sum(len(detect_important_interactions(q, ch, rho)) for q, ch in cases)
        if last is not None:
            assert count <= last
        last = count
    assert count == 0  # rho = 1.0


# --- state value / extrema -----------------------------------------------


def test_state_value_examples():
    assert state_value(np.array([0.2, 0.7, -0.1])) == 0.7
    assert state_value(np.array([4.2])) == 4.2
    assert state_value(np.full(3, -1.0)) == -1.0


def _fan(*channel_values):
    """One (C, A) matrix per action whose per-channel V(s') hits given values."""
    n_actions = len(channel_values[0])
    out = []
    for a in range(n_actions):
        out.append(np.array([[vals[a], vals[a] - 1.0] for vals in channel_values]))
    return out


def test_extremum_minimum_hand_case():
    q_now = np.array([[0.0, -1.0]])
    events = detect_extrema(q_now, _fan([0.5, 0.7]), phi=0.4, step=3)
    assert len(events) == 2  # channel 0 and the aggregate agree here
    by_scope = {e.scope: e for e in events}
    assert by_scope[0].kind == "min" and abs(by_scope[0].margin - 0.5) < 1e-12
    assert by_scope[0].step == 3
    assert by_scope[AGGREGATE_SCOPE].kind == "min"


def test_extremum_maximum_hand_case():
    q_now = np.array([[2.0, 0.0]])
    events = detect_extrema(q_now, _fan([1.0, 1.4]), phi=0.5)
    assert {(e.scope, e.kind) for e in events} == {(0, "max"), (AGGREGATE_SCOPE, "max")}
    assert all(abs(e.margin - 0.6) < 1e-12 for e in events)
    assert detect_extrema(q_now, _fan([1.0, 1.4]), phi=0.7) == []


def test_extremum_flat_landscape_silent_at_phi_zero():
    q_now = np.array([[1.0, 0.0]])
    assert detect_extrema(q_now, _fan([1.0, 1.0]), phi=0.0) == []


def test_extremum_strict_at_phi_zero():
    q_now = np.array([[1.0, 0.0]])
    events = detect_extrema(q_now, _fan([1.0 + 1e-9, 1.1]), phi=0.0)
    assert [(e.scope, e.kind) for e in events] == [(0, "min"), (AGGREGATE_SCOPE, "min")]


def test_extremum_aggregate_differs_from_channels():
    # each channel moves, the sum stays flat -> aggregate stays silent
    q_now = np.array([[1.0, -9.0], [1.0, -9.0]])
    nxt = [np.array([[2.0, -9.0], [0.0, -9.0]]), np.array([[0.0, -9.0], [2.0, -9.0]])]
    events = detect_extrema(q_now, nxt, phi=0.0)
    assert AGGREGATE_SCOPE not in {e.scope for e in events}


def test_extremum_margin_at_least_phi_and_monotone():
    rng = np.random.default_rng(5)
    cases = []
    for _ in range(300):
        q_now = rng.normal(size=(2, 3))
        nxt = [rng.normal(size=(2, 3)) for _ in range(3)]
        cases.append((q_now, nxt))
    last = None
    for phi in (0.0, 0.1, 0.3, 0.7, 1.5):
        count = 0
        for q_now, nxt in cases:
            events = detect_extrema(q_now, nxt, phi)
            assert all(e.margin >= phi for e in events)
            count += len(events)
        if last is not None:
            assert count <= last
        last = count


# --- dominance ------------------------------------------------------------


def test_dominance_example_row():
    d = reward_channel_dominance(np.array([[2.0, -1.0, 0.5]]), step=11)
    np.testing.assert_array_equal(d.relative, [[3.0, 0.0, 1.5]])
    np.testing.assert_array_equal(d.absolute, [[2.0, -1.0, 0.5]])
    assert d.step == 11


def test_dominance_structure_random():
    rng = np.random.default_rng(6)
    for _ in range(300):
        q = rng.normal(size=(rng.integers(1, 5), rng.integers(2, 7)))
        d = reward_channel_dominance(q)
        assert np.all(d.relative >= 0)
        np.testing.assert_array_equal(d.relative.min(axis=1), np.zeros(q.shape[0]))
        diff = d.absolute - d.relative
        np.testing.assert_allclose(
            diff, np.broadcast_to(diff[:, :1], diff.shape), atol=1e-12
        )  # per-row constant
        np.testing.assert_array_equal(
            np.argmax(d.absolute, axis=1), np.argmax(d.relative, axis=1)
        )


def test_dominance_does_not_alias_input():
    q = np.ones((2, 2))
    d = reward_channel_dominance(q)
    q[0, 0] = 99.0
    assert d.absolute[0, 0] == 1.0


# --- minimal sufficient explanation ----------------------------------------


def test_msx_single_channel():
    assert minimal_sufficient_explanation(np.array([[3.0, 1.0]]), 0) == [0]


def test_msx_hand_example():
    q = np.array([[10.0, 0.0], [0.0, 1.0]])
    assert minimal_sufficient_explanation(q, 0) == [0]


def test_msx_all_channels_agree():
    q = np.array([[2.0, 0.0], [4.0, 1.0], [1.0, 0.5]])
    assert minimal_sufficient_explanation(q, 0) == [1]  # largest advantage alone


def test_msx_rejects_non_greedy_action():
    with pytest.raises(UndefinedInputError):
        minimal_sufficient_explanation(np.array([[1.0, 2.0]]), 0)


def test_msx_tied_aggregate_falls_back_to_all_channels():
    q = np.array([[1.0, 1.0], [2.0, 2.0]])
    assert minimal_sufficient_explanation(q, 0) == [0, 1]


def test_msx_size_matches_subset_enumeration():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 500:
        q = np.round(rng.normal(size=(rng.integers(1, 5), rng.integers(2, 6))), 2)
        chosen = int(np.argmax(q.sum(axis=0)))
        got = minimal_sufficient_explanation(q, chosen)
        want_size = msx_oracle(q, chosen)
        if want_size is None:
            assert got == sorted(got) or len(got) == q.shape[0]
            assert len(got) == q.shape[0]
        else:
            assert len(got) == want_size
        # the returned set itself must be sufficient (when one exists)
        if want_size is not None:
            agg = q.sum(axis=0)
            alts = [a for a in range(q.shape[1]) if a != chosen]
            best_alt = max(alts, key=lambda a: agg[a])
            adv = q[:, chosen] - q[:, best_alt]
            rest = [c for c in range(q.shape[0]) if c not in got]
            assert sum(adv[c] for c in got) > sum(max(0.0, -adv[c]) for c in rest)
        checked += 1


def test_msx_ranked_by_advantage():
    q = np.array([[0.2, 0.0], [5.0, 0.0], [-1.0, 2.4]])
    got = minimal_sufficient_explanation(q, 0)
    assert got[0] == 1  # channel with the largest advantage leads the set


# --- thresholds / rendering -------------------------------------------------


def test_thresholds_validation():
    DineThresholds(0.0, 0.0).validate()
    DineThresholds(1.0, 3.5).validate()
    for rho, phi in ((-0.1, 0.0), (1.1, 0.0), (0.5, -0.01)):
        with pytest.raises(UndefinedInputError):
            DineThresholds(rho, phi).validate()


def test_render_interaction_template():
    e = ImportantInteraction(13, 1, 0, 1, 0.41)
    text = render_explanation_text(e, ACTIONS, CHANNELS)
    assert text == (
        "At step 13, the revenue sub-agent would have chosen AddServer "
        "instead of NoAdaptation (importance 0.41)."
    )
    assert text == render_explanation_text(e, ACTIONS, CHANNELS)


def test_render_extremum_template():
    e = RewardChannelExtremum(5, AGGREGATE_SCOPE, "max", 0.6)
    text = render_explanation_text(e, ACTIONS, CHANNELS)
    assert text.endswith("reached a local reward maximum (margin 0.60).")
    assert "aggregated agent" in text
    per_channel = render_explanation_text(
        RewardChannelExtremum(5, 2, "min", 0.1), ACTIONS, CHANNELS
    )
    assert "costs sub-agent" in per_channel and "minimum" in per_channel


def test_event_to_dict_schema():
    ii = event_to_dict(ImportantInteraction(1, 0, 2, 3, 0.5), ACTIONS, CHANNELS)
    assert ii["type"] == "important_interaction" and ii["contrast_action"] == 3
    ex = event_to_dict(RewardChannelExtremum(2, 0, "min", 0.2), ACTIONS, CHANNELS)
    assert ex["type"] == "reward_channel_extremum" and ex["scope"] == 0
    dom = event_to_dict(reward_channel_dominance(np.ones((2, 2)), step=4), ACTIONS, CHANNELS)
    assert dom["type"] == "reward_channel_dominance"
    assert dom["relative"] == [[0.0, 0.0], [0.0, 0.0]]
    for d in (ii, ex, dom):
        assert isinstance(d["text"], str) and d["text"]
