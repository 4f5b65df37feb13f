from __future__ import annotations

import random
from math import inf

import pytest
from hypothesis import given, settings, strategies as st

from hedonica import (Comparison, OrderingProfile, bell, chordless_four_cycles, distance, friendship_graph,
                      graph_stats, make_partition, partitions_iter, underlying_graph, validate_partition)
from hedonica.model import restricted_growth_strings
from hedonica.properties import random_profile


def test_profile_three_tiers():
    p = OrderingProfile.from_lists([[1, 2], [(0, 2)], []])
    assert p.level(0, 1) == 2 and p.level(0, 2) == 1 and p.level(0, 0) == 0
    assert p.level(1, 0) == p.level(1, 2) == 1
    assert p.level(2, 0) == -1
    assert p.prefers(0, 1, 2) is Comparison.GREATER
    assert p.prefers(1, 0, 2) is Comparison.EQUAL
    assert p.enemies(2) == {0, 1}
    assert not p.is_strict and not p.is_mutual


@pytest.mark.parametrize("lists, msg", [
    ([[0]], "ranks itself"),
    ([[1, 1], []], "appears twice"),
    ([[5], []], "out of range"),
])
def test_profile_rejects_bad_rankings(lists, msg):
    with pytest.raises(ValueError, match=msg):
        OrderingProfile.from_lists(lists)


def test_pentagon_graph(pentagon):
    g = friendship_graph(pentagon)
    assert g.edges() == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]
    s = graph_stats(g)
    assert (s.girth, s.bipartite, s.max_degree, s.mutual) == (5, False, 2, True)


def test_edgeless_graph():
    p = OrderingProfile.from_lists([[], [], []])
    s = graph_stats(friendship_graph(p))
    assert s.max_degree == 0 and s.girth == inf and s.to_dict()["girth"] is None and s.bipartite


def test_one_sided_arcs_kept_out_of_reciprocal_graph():
    p = OrderingProfile.from_lists([[1], []])
    assert friendship_graph(p).edges() == []
    assert friendship_graph(p).one_sided() == [(0, 1)]
    assert underlying_graph(p).edges() == [(0, 1)]


def test_distance_basics(pentagon):
    g = friendship_graph(pentagon)
    assert distance(g, 2, 2) == 0
    assert distance(g, 0, 1) == 1
    assert distance(g, 0, 2) == 2
    iso = friendship_graph(OrderingProfile.from_lists([[], []]))
    assert distance(iso, 0, 1) == inf


def test_chordless_four_cycles():
    square = OrderingProfile.from_lists([[1, 3], [0, 2], [1, 3], [0, 2]])
    assert chordless_four_cycles(friendship_graph(square)) == [(0, 1, 2, 3)]
    chord = OrderingProfile.from_lists([[1, 2, 3], [0, 2], [0, 1, 3], [0, 2]])
    assert chordless_four_cycles(friendship_graph(chord)) == []


@pytest.mark.parametrize("n, count", [(1, 1), (3, 5), (5, 52), (9, 21147)])
def test_partition_counts(n, count):
    parts = list(partitions_iter(n))
    assert len(parts) == count == bell(n)
    assert len(set(map(make_partition, parts))) == count


def test_partitions_are_valid_and_ordered():
    parts = list(partitions_iter(4))
    assert parts[0] == (frozenset(range(4)),)
    assert parts[-1] == tuple(frozenset([i]) for i in range(4))
    assert all(validate_partition(p, 4) is None for p in parts)


def test_rgs_rejects_zero():
    with pytest.raises(ValueError):
        next(restricted_growth_strings(0))


@pytest.mark.parametrize("blocks, n, expected", [
    ([[0, 1], [2]], 3, None),
    ([[0, 1], [1, 2]], 3, "agent 1 duplicated"),
    ([[0]], 2, "agent 1 missing"),
    ([[0], []], 1, "empty block"),
    ([[0, 7]], 1, "agent 7 out of range"),
])
def test_validate_partition(blocks, n, expected):
    assert validate_partition(blocks, n) == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10_000))
def test_distance_symmetric_and_triangle(n, seed):
    rng = random.Random(seed)
    g = friendship_graph(random_profile(n, rng, 3))
    for _ in range(10):
        i, j, k = (rng.randrange(n) for _ in range(3))
        assert distance(g, i, j) == distance(g, j, i)
        if distance(g, i, k) < inf and distance(g, k, j) < inf:
            assert distance(g, i, j) <= distance(g, i, k) + distance(g, k, j)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 10), st.integers(0, 10_000))
def test_girth_matches_brute_force(n, seed):
    rng = random.Random(seed)
    g = friendship_graph(random_profile(n, rng, 3))
    # shortest cycle through edge (u,v) = 1 + dist(u,v) with that edge removed
    best = inf
    for u, v in g.edges():
        adj = [set(a) for a in g.adj]
        adj[u].discard(v)
        adj[v].discard(u)
        frontier, seen, d = {u}, {u}, 0
        while frontier and v not in frontier:
            frontier = {w for x in frontier for w in adj[x]} - seen
            seen |= frontier
            d += 1
        if v in frontier:
            best = min(best, d + 1)
    assert graph_stats(g).girth == best
