import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anchscgan.anchors import (anchor_table, balance_anchors, classify_majority, default_noise_removal,
                               select_anchors, select_majority_anchors, select_minority_anchors)
from anchscgan.data import make_dataset
from anchscgan.neighbors import FrequencyTable
from oracles import anchor_selection
from toys import crafted_configs, random_layout


def _as_dict(a):
    return {"minority": a.minority_indices.tolist(), "majority": a.majority_indices.tolist(),
            "noise": a.discarded_noise.tolist(), "overlap": a.overlap_discard.tolist(),
            "k_min": a.k_used_minority, "k_maj": a.k_used_majority, "exhausted": a.exhausted}


@pytest.mark.parametrize("name", sorted(crafted_configs()))
def test_crafted_layouts_match_literal_oracle(name):
    X, y = crafted_configs()[name]
    for noise_removal in (True, False):
        got, _ = select_anchors(make_dataset(X, y), 5, noise_removal, seed=3)
        assert _as_dict(got) == anchor_selection(X, y, 5, noise_removal, 3)


def test_crafted_layouts_cover_every_branch():
    seen = set()
    for X, y in crafted_configs().values():
        a, _ = select_anchors(make_dataset(X, y), 5, True, 0)
        seen.add("noise" if len(a.discarded_noise) else "no-noise")
        seen.add("overlap" if len(a.overlap_discard) else "no-overlap")
        if a.k_used_minority > 5:
            seen.add("grow-min-exhausted" if a.exhausted else "grow-min")
        if a.k_used_majority > 5:
            seen.add("grow-maj-exhausted" if a.exhausted else "grow-maj")
        if a.k_used_minority == a.k_used_majority == 5:
            seen.add("balanced")
    assert seen >= {"noise", "overlap", "grow-min", "grow-min-exhausted", "grow-maj",
                    "grow-maj-exhausted", "balanced"}


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000), k=st.sampled_from([3, 4, 5, 6]), noise=st.booleans())
def test_random_layouts_match_literal_oracle(seed, k, noise):
    X, y = random_layout(seed)
    got, _ = select_anchors(make_dataset(X, y), k, noise, seed=seed)
    assert _as_dict(got) == anchor_selection(X, y, k, noise, seed)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_selection_invariants(seed):
    X, y = random_layout(seed)
    y = y.astype(int)
    a, pruned = select_anchors(make_dataset(X, y), 5, True, seed=1)
    assert np.all(y[a.minority_indices] == 1) and np.all(y[a.majority_indices] == 0)
    assert np.all(y[a.discarded_noise] == 1) and np.all(y[a.overlap_discard] == 0)
    assert not set(a.indices) & set(a.discarded_noise) & set(a.overlap_discard)
    assert not set(a.minority_indices) & set(a.discarded_noise)
    assert not set(a.majority_indices) & set(a.overlap_discard)
    if not a.exhausted:
        assert len(a.minority_indices) == len(a.majority_indices)
    assert pruned.n == len(y) - len(a.discarded_noise) - len(a.overlap_discard)


def test_minority_rule_on_a_line():
    # k=2: rows 2 and 3 see one majority row each, row 5 sees two, rows 7-9 see none
    X = np.array([[0.0], [1.0], [2.0], [2.5], [10.0], [11.0], [12.0], [30.0], [31.0], [32.0]])
    y = np.array([0, 0, 1, 1, 0, 1, 0, 1, 1, 1])
    anchors, noise = select_minority_anchors(X, y, 2)
    assert anchors.tolist() == [2, 3]
    assert noise.tolist() == [5]
    anchors, noise = select_minority_anchors(X, y, 2, noise_removal=False)
    assert noise.tolist() == []
    assert anchors.tolist() == [2, 3]


def test_second_pass_is_single():
    # 0 is a first-pass anchor; 1 is adjacent to 0; 2 is only adjacent to 1
    X = np.array([[0.0], [1.0], [2.1], [3.3], [-1.0]])
    y = np.array([1, 1, 1, 1, 0])
    anchors, _ = select_minority_anchors(X, y, 1)
    # k=1 neighbours: 0->1, 1->0, 2->1, 3->2; row 0 has no majority neighbour at k=1
    assert anchors.tolist() == []
    anchors, _ = select_minority_anchors(X, y, 2)
    # k=2: 0 -> {1, 4}: first pass. 1 -> {0, 2}: second pass. 2 -> {1, 3}: no
    assert anchors.tolist() == [0, 1]


def test_majority_thresholds_and_exact_half():
    t = FrequencyTable(np.array([10, 11, 12, 13, 14]), np.array([0, 1, 2, 3, 4]), 4)
    anchors, overlap = classify_majority(t)
    assert anchors.tolist() == [11]  # 0 < c < 2
    assert overlap.tolist() == [13, 14]  # c > 2; row 12 with c == 2 is neither


def test_select_majority_requires_matching_k():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([1, 0, 0, 1])
    t = FrequencyTable(np.array([1, 2]), np.array([1, 1]), 3)
    with pytest.raises(ValueError):
        select_majority_anchors(X, y, 2, freq=t)


def test_balance_draw_uses_seeded_sorted_pool():
    X, y = crafted_configs()["random_s11"]
    a1, _ = select_anchors(make_dataset(X, y), 5, True, seed=0)
    a2, _ = select_anchors(make_dataset(X, y), 5, True, seed=0)
    assert a1.minority_indices.tolist() == a2.minority_indices.tolist()
    picks = set()
    for s in range(10):
        a, _ = select_anchors(make_dataset(X, y), 5, True, seed=s)
        picks.add(tuple(a.minority_indices))
    assert len(picks) > 1


def test_balance_keeps_previous_anchors():
    X, y = crafted_configs()["random_s0"]
    mn, noise = select_minority_anchors(X, y, 5)
    mj, over = select_majority_anchors(X, y, 5)
    a = balance_anchors(X, y, 5, mn, mj, 0, noise, over)
    assert set(mj) <= set(a.majority_indices)
    assert set(mn) == set(a.minority_indices)


def test_default_noise_removal_threshold():
    assert default_noise_removal(np.r_[np.zeros(29), [1]])
    assert not default_noise_removal(np.r_[np.zeros(30), [1]])


def test_anchor_table_rows():
    X, y = crafted_configs()["grid_edge"]
    d = make_dataset(X, y)
    a, _ = select_anchors(d, 5, True, 0)
    rows = anchor_table(d, a)
    assert len(rows) == d.n
    for rid, cls, is_a, is_n, is_o in rows:
        assert cls == y[rid]
        assert is_a == int(rid in set(a.indices))
        assert is_n == int(rid in set(a.discarded_noise))
        assert is_o == int(rid in set(a.overlap_discard))
