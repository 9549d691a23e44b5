from itertools import permutations

import numpy as np
import pytest

from src.errors import DuplicateKeyError, InvalidParameterError, MissingKeyError
from src.randsrc import RandomSource, shuffle
from src.treap import Treap, build_treap


def _with_priorities(pairs):
    t = Treap()
    for key, priority in pairs:
        t.insert(key, priority=priority)
    return t


def test_insert_into_empty_needs_no_rotation(src):
    t = Treap()
    assert t.insert(5, src) == 0
    assert t.search(5).depth == 0
    assert len(t) == 1


def test_second_insert_rotates_half_the_time():
    # GIVEN
    orderings = [(1, 2), (2, 1)]

    # WHEN
    rotations = [_with_priorities([(1, p1)]).insert(2, priority=p2) for p1, p2 in orderings]

    # THEN
    assert np.mean(rotations) == 0.5


def test_shape_depends_only_on_key_priority_set():
    # GIVEN
    pairs = [(k, p) for k, p in zip(range(6), [40, 10, 55, 20, 35, 5])]

    # WHEN
    shapes = {_with_priorities(order).shape() for order in permutations(pairs)}

    # THEN
    assert len(shapes) == 1


def test_search_reports_found_value_and_depth():
    t = _with_priorities([(2, 9), (1, 5), (3, 1)])
    assert t.search(2).depth == 0
    assert t.search(3).depth == 1
    t2 = Treap()
    t2.insert("k", priority=1, value="payload")
    assert t2.get("k") == "payload"
    assert t2.get("missing", "default") == "default"
    assert not t.search(7).found


def test_exhaustive_mean_depth_of_middle_key():
    # GIVEN
    depths = []

    # WHEN
    for priorities in permutations(range(3)):
        t = _with_priorities(zip([1, 2, 3], priorities))
        depths.append(t.search(2).depth)

    # THEN
    assert np.mean(depths) == 1.0


def test_duplicate_and_missing_keys(src):
    t = build_treap([1, 2, 3], src)
    with pytest.raises(DuplicateKeyError):
        t.insert(2, src)
    with pytest.raises(MissingKeyError):
        t.delete(9)
    with pytest.raises(InvalidParameterError):
        t.insert(4)


def test_delete_sole_element(src):
    t = build_treap([1], src)
    assert t.delete(1) == 0
    assert len(t) == 0
    assert t.keys() == []


def test_delete_rotations_for_two_keys():
    # GIVEN
    orderings = [(1, 2), (2, 1)]

    # WHEN
    counts = [_with_priorities([(1, p1), (2, p2)]).delete(1) for p1, p2 in orderings]

    # THEN
    assert np.mean(counts) == 0.5


def test_random_operations_keep_invariants():
    # GIVEN
    src = RandomSource(77)
    t = Treap()
    reference = set()

    # WHEN
    for _ in range(2000):
        key = src.uniform_below(300)
        if key in reference:
            t.delete(key)
            reference.discard(key)
        else:
            t.insert(key, src)
            reference.add(key)

    # THEN
    assert t.check_invariants()
    assert t.keys() == sorted(reference)
    assert set(t.depths()) == reference


def test_equal_priorities_keep_earlier_insert_on_top():
    t = _with_priorities([(1, 7), (2, 7)])
    assert t.search(1).depth == 0
    assert t.stats.priority_ties == 1
    assert t.check_invariants()


def test_priority_ties_count_inserts_not_comparisons():
    # GIVEN
    t = _with_priorities([(2, 7), (1, 7), (3, 7), (4, 9)])
    assert t.stats.priority_ties == 2

    # WHEN
    t.delete(2)
    t.delete(4)

    # THEN
    assert t.stats.priority_ties == 2
    assert t.check_invariants()


def test_split_rotations_equal_pivot_depth():
    # GIVEN
    src = RandomSource(12)
    t = build_treap(shuffle(src, range(64)), src)
    depth = t.search(40).depth

    # WHEN
    result = t.split(40, keep_pivot=True)

    # THEN
    assert result.rotations == depth
    assert result.left.keys() == list(range(40))
    assert result.right.keys() == list(range(41, 64))
    assert result.pivot == (40, None)
    assert len(t) == 0
    assert result.left.check_invariants() and result.right.check_invariants()


def test_split_singleton_leaves_two_empty_treaps(src):
    result = build_treap([3], src).split(3)
    assert len(result.left) == 0 and len(result.right) == 0
    assert result.rotations == 0
    assert result.pivot is None


def test_split_then_merge_matches_fresh_build():
    # GIVEN
    src = RandomSource(21)
    priorities = shuffle(src, range(100))
    pairs = list(zip(range(100), priorities))
    t = _with_priorities(pairs)

    # WHEN
    parts = t.split(57)
    merged = Treap.merge(parts.left, parts.right)

    # THEN
    expected = _with_priorities([(k, p) for k, p in pairs if k != 57])
    assert merged.shape() == expected.shape()
    assert len(merged) == 99
    assert len(parts.left) == 0 and len(parts.right) == 0


def test_merge_edge_cases(src):
    t = build_treap([1, 2, 3], src)
    shape = t.shape()
    assert Treap.merge(Treap(), t).shape() == shape

    low = _with_priorities([(1, 5)])
    high = _with_priorities([(2, 9)])
    merged = Treap.merge(low, high)
    assert merged.search(2).depth == 0
    assert merged.stats.rotations == 2


def test_merge_rejects_overlapping_ranges(src):
    with pytest.raises(InvalidParameterError):
        Treap.merge(build_treap([1, 5], src), build_treap([3, 7], src))


def test_split_missing_pivot(src):
    with pytest.raises(MissingKeyError):
        build_treap([1, 2], src).split(9)


def test_expected_depth_is_logarithmic():
    # GIVEN
    src = RandomSource(3)
    n = 1000

    # WHEN
    t = build_treap(range(n), src)
    depths = list(t.depths().values())

    # THEN
    assert np.mean(depths) < 2 * np.log(n) + 1
    assert t.stats.rotations > 0
