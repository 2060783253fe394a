import random
import time
from itertools import permutations

import pytest

from kgpatterns.datasets import book_author_pattern, toy_graph
from kgpatterns.graph import (
    LabeledMultigraph,
    OccurrenceStream,
    PatternGraph,
    automorphisms,
    canonical_code,
    enumerate_occurrences,
    is_occurrence,
    merge_patterns,
    merge_patterns_with_maps,
)
from oracles import (
    brute_force_isomorphic,
    brute_force_occurrences,
    random_connected_pattern,
    random_graph,
    relabel,
)


def test_multigraph_basics():
    g = LabeledMultigraph([1, 2], [(1, "A"), (1, "B")], [(1, 2, "r"), (1, 2, "s"), (2, 2, "r")])
    assert g.vertices == {1, 2}
    assert g.labels_of(1) == {"A", "B"}
    assert g.vertex_label_symbols == {"A", "B"}
    assert g.edge_label_symbols == {"r", "s"}
    assert g.n_labels == 5
    assert sorted(g.out_edges(1)) == [(1, 2, "r"), (1, 2, "s")]
    assert sorted(g.in_edges(2)) == [(1, 2, "r"), (1, 2, "s"), (2, 2, "r")]
    assert g.copy() == g
    assert "digraph" in g.to_dot()


def test_duplicate_labels_are_idempotent():
    g = LabeledMultigraph()
    g.add_edge(1, 2, "r")
    g.add_edge(1, 2, "r")
    g.add_vertex_label(1, "A")
    g.add_vertex_label(1, "A")
    assert len(g.edges) == 1 and len(g.vertex_labels) == 1


def test_pattern_validation():
    with pytest.raises(ValueError):
        PatternGraph([1, 3], [(1, "A")])
    with pytest.raises(ValueError):
        PatternGraph([1, 2])
    p = PatternGraph([1, 2], [(1, "A")], [(1, 2, "r")])
    assert p.n_vertices == 2 and p.label_count == 2 and p.is_connected()
    assert not PatternGraph([1, 2], [(1, "A"), (2, "A")]).is_connected()


def test_pattern_json_round_trip():
    p = PatternGraph([1, 2, 3], [(1, "A"), (3, "B")], [(1, 2, "r"), (2, 3, "s"), (3, 3, "r")])
    assert PatternGraph.from_json(p.to_json()) == p


def test_book_author_pattern_has_four_occurrences():
    stream = enumerate_occurrences(book_author_pattern(), toy_graph())
    found = sorted(stream)
    assert found == [(1, 5), (2, 5), (3, 5), (3, 6)]
    assert stream.complete


@pytest.mark.parametrize("seed", range(60))
def test_occurrences_match_brute_force(seed):
    rng = random.Random(seed)
    d = random_graph(rng, rng.randint(3, 7), rng.randint(2, 10), rng.randint(3, 14))
    p = random_connected_pattern(rng, rng.randint(1, 4), loops=rng.random() < 0.3)
    found = list(enumerate_occurrences(p, d))
    assert len(found) == len(set(found))
    assert set(found) == brute_force_occurrences(p, d)
    for emb in found:
        assert is_occurrence(p, d, {v: emb[v - 1] for v in p.vertices})


def test_occurrence_order_is_deterministic():
    d = toy_graph()
    p = book_author_pattern()
    assert list(enumerate_occurrences(p, d)) == list(enumerate_occurrences(p, d))


def test_is_occurrence_rejects_non_injective_and_wrong_maps():
    d = toy_graph()
    p = book_author_pattern()
    assert is_occurrence(p, d, {1: 1, 2: 5})
    assert not is_occurrence(p, d, {1: 5, 2: 1})
    assert not is_occurrence(p, d, {1: 1})
    q = PatternGraph([1, 2], [], [(1, 2, "<author>")])
    assert not is_occurrence(q, d, {1: 1, 2: 1})


def test_max_count_truncates():
    stream = OccurrenceStream(book_author_pattern(), toy_graph(), max_count=2)
    assert len(list(stream)) == 2
    assert stream.complete is False


def test_expired_deadline_truncates():
    rng = random.Random(0)
    d = random_graph(rng, 60, 0, 600, preds=("r",))
    p = PatternGraph(range(1, 5), [], [(1, 2, "r"), (2, 3, "r"), (3, 4, "r")])
    stream = OccurrenceStream(p, d, deadline=time.monotonic() - 1)
    list(stream)
    assert stream.complete is False


def test_blocked_sets_are_respected_live():
    d = toy_graph()
    p = book_author_pattern()
    blocked_e, blocked_l = set(), set()
    stream = OccurrenceStream(p, d, blocked_edges=blocked_e, blocked_vertex_labels=blocked_l)
    taken = []
    for emb in stream:
        taken.append(emb)
        blocked_l.add((emb[0], "a <Book>"))
        blocked_e.add((emb[0], emb[1], "<author>"))
    # book 3 is used once only: its Book label is blocked after the first hit
    assert taken == [(1, 5), (2, 5), (3, 5)]


def test_self_loops_and_parallel_edges():
    d = LabeledMultigraph([1, 2], [], [(1, 1, "r"), (1, 2, "r"), (1, 2, "s")])
    loop = PatternGraph([1], [], [(1, 1, "r")])
    assert list(enumerate_occurrences(loop, d)) == [(1,)]
    par = PatternGraph([1, 2], [], [(1, 2, "r"), (1, 2, "s")])
    assert list(enumerate_occurrences(par, d)) == [(1, 2)]


@pytest.mark.parametrize("seed", range(80))
def test_canonical_code_is_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    p = random_connected_pattern(rng, rng.randint(1, 6), loops=True)
    perm = list(range(1, p.n_vertices + 1))
    rng.shuffle(perm)
    assert canonical_code(relabel(p, perm)) == canonical_code(p)


@pytest.mark.parametrize("seed", range(40))
def test_canonical_code_separates_non_isomorphic(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(2, 4)
    a = random_connected_pattern(rng, n, alphabet=("A",), preds=("r",))
    b = random_connected_pattern(rng, n, alphabet=("A",), preds=("r",))
    assert (canonical_code(a) == canonical_code(b)) == brute_force_isomorphic(a, b)


def test_canonical_code_on_symmetric_patterns():
    # a directed 4-cycle and two 2-cycles sharing nothing but labels differ
    cycle = PatternGraph(range(1, 5), [], [(1, 2, "r"), (2, 3, "r"), (3, 4, "r"), (4, 1, "r")])
    rotated = relabel(cycle, [2, 3, 4, 1])
    assert canonical_code(cycle) == canonical_code(rotated)
    star_in = PatternGraph(range(1, 4), [], [(2, 1, "r"), (3, 1, "r")])
    star_out = PatternGraph(range(1, 4), [], [(1, 2, "r"), (1, 3, "r")])
    assert canonical_code(star_in) != canonical_code(star_out)


def test_canonical_returns_isomorphic_copy():
    p = PatternGraph([1, 2, 3], [(3, "A")], [(1, 2, "r"), (2, 3, "s")])
    q, ren = p.canonical()
    assert brute_force_isomorphic(p, q)
    assert q.canonical_code() == p.canonical_code()
    assert is_occurrence(p, q, ren)


@pytest.mark.parametrize("seed", range(25))
def test_automorphism_count_matches_brute_force(seed):
    rng = random.Random(seed)
    p = random_connected_pattern(rng, rng.randint(1, 5), alphabet=("A",), preds=("r",))
    expected = 0
    for perm in permutations(range(1, p.n_vertices + 1)):
        if relabel(p, perm) == p:
            expected += 1
    assert len(automorphisms(p)) == expected


def test_merge_patterns_fuses_shared_vertices():
    p3 = book_author_pattern()
    lives = PatternGraph([1, 2], [], [(1, 2, "<livesIn>")])
    merged, m1, m2 = merge_patterns_with_maps(p3, lives, {2: 1})
    assert merged.n_vertices == 3 and merged.label_count == 3
    assert m1[2] == m2[1]
    expected = PatternGraph([1, 2, 3], [(1, "a <Book>")], [(1, 2, "<author>"), (2, 3, "<livesIn>")])
    assert brute_force_isomorphic(merged, expected)


def test_merge_on_two_vertices_and_label_union():
    a = PatternGraph([1, 2], [(1, "A")], [(1, 2, "r")])
    b = PatternGraph([1, 2], [(1, "A"), (2, "B")], [(2, 1, "s")])
    merged = merge_patterns(a, b, {1: 1, 2: 2})
    expected = PatternGraph([1, 2], [(1, "A"), (2, "B")], [(1, 2, "r"), (2, 1, "s")])
    assert brute_force_isomorphic(merged, expected)


def test_merge_rejects_bad_correspondences():
    a = book_author_pattern()
    with pytest.raises(ValueError):
        merge_patterns(a, a, {})
    with pytest.raises(ValueError):
        merge_patterns(a, a, {1: 3})
    with pytest.raises(ValueError):
        merge_patterns(a, a, {1: 1, 2: 1})
