from fractions import Fraction

import numpy as np
import pytest

from src.classic import (MultiGraph, cliques_with_bridge, complete_graph, cycle_graph,
                         karger_amplified, karger_contract, karger_repetitions, quickselect,
                         quicksort, quicksort_comparisons)
from src.errors import DisconnectedGraphError, DuplicateKeyError, InvalidParameterError
from src.randsrc import RandomSource, outcome_masses, shuffle


@pytest.mark.parametrize("items,expected", [([], 0), ([5], 0), ([2, 1], 1)])
def test_quicksort_small_inputs(src, items, expected):
    trace = quicksort(src, items)
    assert trace.comparisons == expected
    assert trace.output == sorted(items)


def test_quicksort_sorts(src):
    # GIVEN
    items = shuffle(src, range(500))

    # WHEN
    trace = quicksort(src, items)

    # THEN
    assert trace.output == list(range(500))
    assert trace.n == 500
    assert trace.comparisons >= 499


def test_quicksort_exact_mean_for_three_keys():
    # GIVEN
    # depth 13 completes every run that needs at most six 2-bit pivot draws
    masses = outcome_masses(lambda s: quicksort(s, [3, 1, 2]).comparisons, max_depth=13)

    # WHEN
    total = sum(masses.values())
    mean = sum(c * m for c, m in masses.items()) / total

    # THEN
    assert set(masses) == {2, 3}
    assert mean == Fraction(8, 3)


def test_quicksort_rejects_duplicates(src):
    with pytest.raises(DuplicateKeyError):
        quicksort(src, [1, 2, 2])


def test_quickselect_small_cases(src):
    assert quickselect(src, [7], 1).comparisons == 0
    trace = quickselect(src, [4, 9], 1)
    assert trace.output == 4
    assert trace.comparisons == 1


def test_quickselect_finds_every_rank(src):
    items = shuffle(src, range(0, 200, 2))
    for k in (1, 17, 50, 100):
        assert quickselect(src, items, k).output == 2 * (k - 1)


def test_quickselect_mean_within_linear_bound():
    # GIVEN
    src = RandomSource(99)
    n = 200
    items = list(range(n))

    # WHEN
    counts = [quickselect(src, items, n // 2).comparisons for _ in range(300)]

    # THEN
    assert max(counts) < n * n
    assert np.mean(counts) <= 4 * n


@pytest.mark.parametrize("k", [0, 4])
def test_quickselect_rejects_rank_out_of_range(src, k):
    with pytest.raises(InvalidParameterError):
        quickselect(src, [1, 2, 3], k)


def test_multigraph_rejects_self_loops_and_strays():
    with pytest.raises(InvalidParameterError):
        MultiGraph.from_edges(3, [(1, 1)])
    with pytest.raises(InvalidParameterError):
        MultiGraph.from_edges(3, [(0, 3)])


def test_two_vertex_multigraph_cut_is_every_edge(src):
    # GIVEN
    g = MultiGraph.from_edges(2, [(0, 1)] * 5)

    # WHEN
    cut = karger_contract(src, g)

    # THEN
    assert cut.cut_size == 5
    assert set(cut.partition) == {frozenset({0}), frozenset({1})}


def test_cycle_always_cuts_two_edges(src):
    g = cycle_graph(6)
    for _ in range(50):
        cut = karger_contract(src, g)
        assert cut.cut_size == 2
        assert len(cut.partition[0]) + len(cut.partition[1]) == 6


def test_contraction_rejects_disconnected_and_tiny_graphs(src):
    with pytest.raises(DisconnectedGraphError):
        karger_contract(src, MultiGraph.from_edges(4, [(0, 1), (2, 3)]))
    with pytest.raises(InvalidParameterError):
        karger_contract(src, MultiGraph.from_edges(1, []))


def test_complete_graph_success_rate_meets_floor():
    # GIVEN
    src = RandomSource(5)
    g = complete_graph(4)
    runs = 3000

    # WHEN
    hits = sum(karger_contract(src, g).cut_size == 3 for _ in range(runs))

    # THEN
    assert hits / runs >= 2 / (4 * 3)


def test_bridge_graph_amplified_finds_the_bridge():
    # GIVEN
    src = RandomSource(8)
    g = cliques_with_bridge(4)
    reps = karger_repetitions(g.vertex_count, 0.01)

    # WHEN
    cut = karger_amplified(src, g, reps)

    # THEN
    assert reps == 129
    assert cut.cut_size == 1
    assert set(cut.partition) == {frozenset(range(4)), frozenset(range(4, 8))}


def test_single_repetition_matches_one_contraction():
    g = cliques_with_bridge(3)
    assert karger_amplified(RandomSource(3), g, 1) == karger_contract(RandomSource(3), g)


def test_karger_repetition_argument_checks():
    with pytest.raises(InvalidParameterError):
        karger_amplified(RandomSource(0), cycle_graph(3), 0)
    with pytest.raises(InvalidParameterError):
        karger_repetitions(1, 0.1)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 17, 200])
def test_comparison_count_matches_full_quicksort(n):
    # GIVEN
    seed = 9000 + n

    # WHEN
    fast = quicksort_comparisons(RandomSource(seed), n)
    full = quicksort(RandomSource(seed), list(range(n)))

    # THEN
    assert fast == full.comparisons


def test_comparison_count_mean_for_three_keys():
    masses = outcome_masses(lambda s: quicksort_comparisons(s, 3), max_depth=13)
    total = sum(masses.values())
    assert sum(c * m for c, m in masses.items()) / total == Fraction(8, 3)


def test_comparison_count_rejects_negative_size(src):
    with pytest.raises(InvalidParameterError):
        quicksort_comparisons(src, -1)
