import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amparser.amdep import check_well_typed
from amparser.amtypes import APP, EMPTY, IGNORE, MOD
from amparser.asgraph import is_isomorphic
from amparser.corpus import parse_amr, tree_to_amr
from amparser.decode import (
    EXACT_GOAL,
    OPEN_SOURCE_FALLBACK,
    SUBTREE_FALLBACK,
    DecodeConfig,
    GuardError,
    ScoreTable,
    ScoreTableError,
    cle_arborescence,
    decode,
    exact_decode,
    fixed_tree_decode,
    is_projective,
    projective_decode,
    type_unaware_decode,
)
from amparser.decode.instances import InstanceConfig, random_table, supertag_for
from amparser.decode.scoretable import NEG_INF, from_scores

from builders import DATA, WORKED_AMR, SENTENCE, constants, worked_tree
from oracles import brute_arborescence, brute_decode, brute_skeleton, rank_key


def worked_table():
    """Gold supertags only, uniform edge scores, label scores that favour the
    gold operations."""
    g = constants()
    rows = [
        [(None, 0.0)],
        [(g["writer"], 0.0), (None, -1.0)],
        [(g["want"], 0.0), (None, -1.0)],
        [(None, 0.0)],
        [(g["sleep"], 0.0), (None, -1.0)],
        [(g["sound"], 0.0), (None, -1.0)],
    ]
    labels = {(3, 2): {APP("s"): 0.0}, (3, 5): {APP("o"): 0.0}, (5, 6): {MOD("m"): 0.0}}
    for h in range(0, 7):
        for d in (1, 4):
            if h != d:
                labels.setdefault((h, d), {})[IGNORE] = 0.0
    return from_scores(SENTENCE, rows, np.zeros((7, 7)), labels, label_default=-1.0)


def content_arcs(tree):
    return {(h, d, str(op)) for h, d, op in tree.edges() if op != IGNORE} | {(0, tree.root, "ROOT")}


WORKED_ARCS = {(3, 2, "APP_s"), (3, 5, "APP_o"), (5, 6, "MOD_m"), (0, 3, "ROOT")}


def key(result):
    return rank_key(result.root_type, result.score)


# --- arborescences --------------------------------------------------------------


def test_cle_small_example():
    E = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float)
    E[2, 1] = 0
    assert cle_arborescence(E) == {1: 0, 2: 1}


def test_cle_single_token():
    assert cle_arborescence(np.zeros((2, 2))) == {1: 0}


def test_cle_forces_single_root():
    # two strong roots: only one may hang from the virtual root
    E = np.full((4, 4), -5.0)
    E[0, 1] = E[0, 2] = E[0, 3] = 3.0
    heads = cle_arborescence(E)
    assert sum(1 for h in heads.values() if h == 0) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_cle_matches_brute_force(n, seed):
    rng = random.Random(seed)
    E = np.array([[rng.randint(-4, 4) for _ in range(n + 1)] for _ in range(n + 1)], dtype=float)
    heads = cle_arborescence(E)
    assert sum(1 for h in heads.values() if h == 0) == 1
    score = sum(E[h, d] for d, h in heads.items())
    assert score == brute_arborescence(E)[0]


# --- projective -----------------------------------------------------------------


def test_projective_worked():
    res = projective_decode(worked_table(), 1)
    assert res.status == EXACT_GOAL
    assert res.score == 0.0
    assert content_arcs(res.tree) == WORKED_ARCS
    assert is_isomorphic(tree_to_amr(res.tree), parse_amr(WORKED_AMR))


def test_projective_single_token():
    tab = from_scores(["writer"], [[(constants()["writer"], -0.5)]])
    res = projective_decode(tab, 1)
    assert res.score == -0.5
    assert res.tree.heads == [0]
    assert res.status == EXACT_GOAL


def test_projective_fallback_minimises_open_sources():
    g = constants()
    tab = from_scores(["sleeps"], [[(g["sleep"], 0.0)]])
    res = projective_decode(tab, 1)
    assert res.status == OPEN_SOURCE_FALLBACK
    assert res.open_sources == 1
    assert res.status_label == "open-source-fallback(1)"


def test_projective_rejects_bad_k():
    with pytest.raises(ValueError):
        projective_decode(worked_table(), 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_projective_properties(seed):
    tab = random_table(random.Random(seed), InstanceConfig(max_n=6, k=3))
    res = projective_decode(tab, 3)
    assert check_well_typed(res.tree) is not None
    assert is_projective(res.tree.heads)
    assert res.score == tab.tree_score(res.tree)
    if res.status == EXACT_GOAL:
        assert res.root_type is EMPTY


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_projective_monotone_in_k(seed):
    tab = random_table(random.Random(seed), InstanceConfig(max_n=5, k=3))
    keys = [key(projective_decode(tab, k)) for k in (1, 2, 3)]
    assert keys == sorted(keys)


def test_projective_items_bounded():
    tab = random_table(random.Random(4), InstanceConfig(k=3), n=6)
    res = projective_decode(tab, 3)
    n = tab.n
    assert res.stats["items"] <= n**3 * res.stats["types"]


def test_projective_deadline():
    tab = random_table(random.Random(1), InstanceConfig(k=3), n=6)
    with pytest.raises(TimeoutError):
        projective_decode(tab, 3, deadline=0.0)


# --- exact ----------------------------------------------------------------------


def test_exact_worked_agrees_with_projective():
    tab = worked_table()
    ex, pr = exact_decode(tab, 1), projective_decode(tab, 1)
    assert ex.score == pr.score == 0.0
    assert content_arcs(ex.tree) == WORKED_ARCS


def test_exact_guard():
    tab = random_table(random.Random(0), InstanceConfig(k=1), n=11)
    with pytest.raises(GuardError):
        exact_decode(tab)
    with pytest.raises(GuardError):
        exact_decode(tab, guard_n=5)


@pytest.mark.parametrize("seed", range(25))
def test_exact_matches_brute_force(seed):
    rng = random.Random(seed)
    tab = random_table(rng, InstanceConfig(max_n=3, k=2), n=rng.randint(1, 3))
    res = exact_decode(tab, 2)
    assert key(res) == brute_decode(tab, 2)[0]
    assert res.score == tab.tree_score(res.tree)


@pytest.mark.parametrize("seed", range(4))
def test_exact_matches_brute_force_n4(seed):
    tab = random_table(random.Random(100 + seed), InstanceConfig(k=2), n=4)
    assert key(exact_decode(tab, 2)) == brute_decode(tab, 2)[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_dominates_approximations(seed):
    tab = random_table(random.Random(seed), InstanceConfig(max_n=5, k=2))
    ex = key(exact_decode(tab, 2))
    assert key(projective_decode(tab, 2)) <= ex
    assert key(fixed_tree_decode(tab, 2)) <= ex


# --- fixed tree -----------------------------------------------------------------


def test_fixed_tree_worked_with_gold_skeleton():
    tab = worked_table()
    E = np.full((7, 7), -1.0)
    for h, d in [(2, 1), (3, 2), (0, 3), (3, 4), (3, 5), (5, 6)]:
        E[h, d] = 1.0
    tab.edges = E
    res = fixed_tree_decode(tab, 1)
    assert res.status == EXACT_GOAL
    assert res.tree.heads == [2, 3, 0, 3, 3, 5]
    assert content_arcs(res.tree) == WORKED_ARCS
    assert is_isomorphic(tree_to_amr(res.tree), parse_amr(WORKED_AMR))


def test_fixed_tree_bottom_fallback_for_incompatible_child():
    g = constants()
    # "soundly" hangs below "writer" but writer has no use for a (m)-typed child
    # other than MOD_m; forbid that label so the child must turn into bottom
    tab = from_scores(
        ["writer", "soundly"],
        [[(g["writer"], 0.0)], [(g["sound"], 0.0), (None, -2.0)]],
        np.array([[0, 1, -9], [0, 0, 1], [0, -9, 0]], dtype=float),
        {(1, 2): {MOD("m"): NEG_INF}},
    )
    res = fixed_tree_decode(tab, 1)
    assert res.tree.heads == [0, 1]
    assert res.tree.supertags[1] is None
    assert res.tree.labels[1] == IGNORE
    assert res.root_type is EMPTY


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_fixed_tree_keeps_cle_skeleton(seed):
    tab = random_table(random.Random(seed), InstanceConfig(max_n=6, k=3))
    res = fixed_tree_decode(tab, 3)
    skeleton = cle_arborescence(tab.edges)
    assert res.tree.heads == [skeleton[d] for d in range(1, tab.n + 1)]
    assert check_well_typed(res.tree) is not None
    assert res.score == tab.tree_score(res.tree)


@pytest.mark.parametrize("seed", range(30))
def test_fixed_tree_matches_skeleton_oracle(seed):
    tab = random_table(random.Random(seed), InstanceConfig(max_n=5, k=2))
    skeleton = cle_arborescence(tab.edges)
    heads = tuple(skeleton[d] for d in range(1, tab.n + 1))
    assert key(fixed_tree_decode(tab, 2)) == brute_skeleton(tab, 2, heads)


def test_fixed_tree_star_item_count():
    # a head with d leaf children: at most 2^d child subsets per type
    d = 3
    n = d + 1
    rows = [[(supertag_for("(o, o2, s)", "h"), 0.0)]]
    rows += [[(supertag_for("()", f"c{i}"), 0.0)] for i in range(d)]
    E = np.full((n + 1, n + 1), -5.0)
    E[0, 1] = 1.0
    for i in range(2, n + 1):
        E[1, i] = 1.0
    tab = from_scores([f"w{i}" for i in range(n)], rows, E)
    res = fixed_tree_decode(tab, 1)
    assert res.status == EXACT_GOAL
    assert res.tree.heads == [0, 1, 1, 1]
    leaves = d * 2  # each leaf: its supertag or bottom
    assert res.stats["items"] <= 2**d * 8 + leaves


# --- type-unaware ---------------------------------------------------------------


def test_type_unaware_single_token():
    tab = from_scores(["writer"], [[(constants()["writer"], 0.0), (None, -1.0)]])
    res = type_unaware_decode(tab, 1)
    assert res.status == EXACT_GOAL
    assert check_well_typed(res.tree) is not None


def test_type_unaware_equals_fixed_tree_when_argmax_is_typed():
    tab = worked_table()
    E = np.full((7, 7), -1.0)
    for h, d in [(2, 1), (3, 2), (0, 3), (3, 4), (3, 5), (5, 6)]:
        E[h, d] = 1.0
    tab.edges = E
    a, b = type_unaware_decode(tab, 1), fixed_tree_decode(tab, 1)
    assert a.tree.heads == b.tree.heads
    assert a.tree.labels == b.tree.labels
    assert a.score == b.score


def test_type_unaware_adversarial_falls_back():
    tab = ScoreTable.loads((DATA / "adversarial_type_unaware.json").read_text())
    res = type_unaware_decode(tab, 4)
    assert res.status == SUBTREE_FALLBACK
    assert check_well_typed(res.tree) is not None
    assert fixed_tree_decode(tab, 4).status == EXACT_GOAL


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_type_unaware_always_well_typed(seed):
    tab = random_table(random.Random(seed), InstanceConfig(max_n=6, k=3))
    res = type_unaware_decode(tab, 3)
    assert check_well_typed(res.tree) is not None


# --- score tables and configuration ---------------------------------------------


def test_score_table_json_roundtrip():
    tab = random_table(random.Random(8), InstanceConfig(k=3), n=5)
    back = ScoreTable.loads(tab.dumps())
    assert back.dumps() == tab.dumps()
    assert key(projective_decode(back, 3)) == key(projective_decode(tab, 3))


def test_score_table_json_shape():
    doc = json.loads(worked_table().dumps())
    assert set(doc) >= {"tokens", "supertags", "edges", "labels", "label_default"}
    assert doc["supertags"][0][0]["graph"] == "_|_"


def test_score_table_validation():
    with pytest.raises(ScoreTableError):
        from_scores([], [])
    with pytest.raises(ScoreTableError):
        from_scores(["a"], [[]])
    with pytest.raises(ScoreTableError):
        from_scores(["a"], [[(None, 0.0)]], np.zeros((3, 3)))
    with pytest.raises(ScoreTableError):
        ScoreTable.from_json({"tokens": [{"form": "a", "pos": "_"}], "supertags": [[{"graph": "_|_", "score": "x"}]], "edges": [], "labels": []})


def test_kbest_keeps_bottom():
    tab = random_table(random.Random(3), InstanceConfig(k=3), n=3)
    for i in range(1, 4):
        best = tab.kbest(i, 1)
        assert best[-1].is_bottom
        assert len(best) == 2


def test_decode_config_validation():
    with pytest.raises(ValueError):
        DecodeConfig(decoder="greedy")
    with pytest.raises(ValueError):
        DecodeConfig(k=0)


def test_decode_retry_decrement_reaches_k1():
    tab = random_table(random.Random(2), InstanceConfig(k=3), n=4)
    with pytest.raises(TimeoutError):
        decode(tab, DecodeConfig(k=3, time_limit=0.0))
    with pytest.raises(TimeoutError):
        decode(tab, DecodeConfig(k=3, time_limit=0.0, retry_decrement=True))
    res = decode(tab, DecodeConfig(k=3, time_limit=60.0, retry_decrement=True))
    assert res.stats["k"] == 3


def test_decode_dispatch():
    tab = worked_table()
    for name in ("projective", "fixed-tree", "exact", "type-unaware"):
        res = decode(tab, DecodeConfig(decoder=name, k=1))
        assert check_well_typed(res.tree) is not None


def test_is_projective():
    assert is_projective([2, 0, 2])
    assert not is_projective([3, 0, 2, 2])
    assert is_projective([0])


def test_uniform_scores_tie_with_the_worked_tree():
    # with uniform edge and label scores the worked tree is one of several
    # optima, so only the score and the status are determined
    g = constants()
    rows = [
        [(None, 0.0)],
        [(g["writer"], 0.0), (None, -1.0)],
        [(g["want"], 0.0), (None, -1.0)],
        [(None, 0.0)],
        [(g["sleep"], 0.0), (None, -1.0)],
        [(g["sound"], 0.0), (None, -1.0)],
    ]
    tab = from_scores(SENTENCE, rows, np.zeros((7, 7)))
    gold = tab.tree_score(worked_tree())
    for fn in (projective_decode, exact_decode):
        res = fn(tab, 1)
        assert res.status == EXACT_GOAL
        assert res.score == gold
