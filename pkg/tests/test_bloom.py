import math

import numpy as np
import pytest

from src.bloom import (BloomFilter, BloomParams, bit_set_probability, false_positive_rate, plan,
                       saturation_bound)
from src.errors import ContractViolation, InvalidParameterError, SerializationError
from src.randsrc import RandomSource


def _keys(src, count, exclude=()):
    keys, seen = [], set(exclude)
    while len(keys) < count:
        key = src.bits(32)
        if key not in seen:
            seen.add(key)
            keys.append(key)
    return keys


def test_plan_reference_sizes():
    coarse = plan(100, 0.5)
    assert 145 <= coarse.m <= 146
    assert coarse.k == 1

    fine = plan(1000, 0.01)
    assert fine.m == 9582
    assert fine.k == 7
    assert fine.alpha_prime > fine.alpha


@pytest.mark.parametrize("n,eps", [(0, 0.1), (10, 0), (10, 1)])
def test_plan_rejects(n, eps):
    with pytest.raises(InvalidParameterError):
        plan(n, eps)


def test_false_positive_formulas():
    # GIVEN
    m, k = 10 ** 6, 5
    params = BloomParams.from_mk(m, round(m * math.log(2) / k), k)

    # WHEN
    approx = false_positive_rate(params, params.n_target, exact=False)
    exact = false_positive_rate(params, params.n_target)

    # THEN
    assert approx == pytest.approx(2.0 ** -k, rel=1e-4)
    assert exact == pytest.approx(approx, rel=1e-4)
    assert bit_set_probability(m, k, 0) == 0.0


def test_single_insert_sets_at_most_k_bits(src):
    bf = BloomFilter(BloomParams.from_mk(1000, 10, 4), src)
    bf.insert("only")
    assert 1 <= np.count_nonzero(bf.array) <= 4
    bf.insert("only")
    assert np.count_nonzero(bf.array) <= 4


def test_no_false_negatives(src):
    # GIVEN
    keys = _keys(src, 500)
    bf = BloomFilter(plan(500, 0.01), src)

    # WHEN
    for key in keys:
        bf.insert(key)

    # THEN
    assert all(key in bf for key in keys)
    assert BloomFilter(plan(10, 0.1), src).query("fresh") is False


def test_false_positive_rate_tracks_formula():
    # GIVEN
    src = RandomSource(808)
    params = plan(2000, 0.05)
    bf = BloomFilter(params, src)
    keys = _keys(src, 2000)
    probes = _keys(src, 20000, exclude=keys)

    # WHEN
    for key in keys:
        bf.insert(key)
    observed = sum(bf.query(p) for p in probes) / len(probes)

    # THEN
    predicted = false_positive_rate(params, 2000)
    se = math.sqrt(predicted * (1 - predicted) / len(probes))
    assert 0.7 * predicted - 4 * se <= observed <= 1.3 * predicted + 4 * se


def test_counting_insert_then_remove_clears(src):
    bf = BloomFilter(BloomParams.from_mk(512, 10, 3), src, counting=True)
    bf.insert(17)
    assert int(bf.array.sum()) == 3
    bf.remove(17)
    assert int(bf.array.sum()) == 0


def test_counting_removal_keeps_remaining_keys(src):
    # GIVEN
    keys = _keys(src, 300)
    bf = BloomFilter(plan(300, 0.02), src, counting=True)
    for key in keys:
        bf.insert(key)

    # WHEN
    for key in keys[::2]:
        bf.remove(key)

    # THEN
    assert all(key in bf for key in keys[1::2])


def test_saturated_counters_are_never_decremented():
    # GIVEN
    src = RandomSource(4)
    bf = BloomFilter(BloomParams.from_mk(101, 5, 3), src, counting=True, counter_bits=2)

    # WHEN
    for _ in range(5):
        bf.insert("hot")
    for _ in range(5):
        bf.remove("hot")

    # THEN
    assert bf.cap == 3
    assert all(bf.array[pos] == 3 for pos in bf.positions("hot"))
    assert bf.saturated_fraction() > 0


def test_remove_contract(src):
    counting = BloomFilter(BloomParams.from_mk(64, 4, 2), src, counting=True)
    with pytest.raises(ContractViolation):
        counting.remove("never-inserted")
    with pytest.raises(InvalidParameterError):
        BloomFilter(BloomParams.from_mk(64, 4, 2), src).remove("x")


def test_count_estimate():
    # GIVEN
    src = RandomSource(10)
    bf = BloomFilter(BloomParams.from_mk(10007, 10, 4), src, counting=True)
    assert len(set(bf.positions("k"))) == 4

    # WHEN
    for _ in range(3):
        bf.insert("k")

    # THEN
    assert bf.count_estimate("k") == 3
    assert bf.count_estimate("other") in (0, 3)


def test_saturation_stays_below_bound():
    # GIVEN
    src = RandomSource(55)
    params = plan(2000, 0.01)
    bf = BloomFilter(params, src, counting=True, counter_bits=3)

    # WHEN
    for key in _keys(src, 2000):
        bf.insert(key)

    # THEN
    bound = saturation_bound(params.m, bf.cap)
    assert np.count_nonzero(bf.array == bf.cap) <= max(bound * 3, 5)


@pytest.mark.parametrize("counting", [False, True])
def test_serialized_filter_answers_identically(src, counting):
    # GIVEN
    bf = BloomFilter(plan(200, 0.05), src, counting=counting)
    keys = _keys(src, 200)
    for key in keys:
        bf.insert(key)

    # WHEN
    restored = BloomFilter.from_bytes(bf.to_bytes())

    # THEN
    assert np.array_equal(restored.array, bf.array)
    assert restored.params == bf.params
    assert all(restored.query(k) == bf.query(k) for k in keys + _keys(src, 200)[:50])


def test_bad_serialized_filter(src):
    data = BloomFilter(plan(20, 0.1), src).to_bytes()
    with pytest.raises(SerializationError):
        BloomFilter.from_bytes(b'ZZZZ' + data[4:])
    with pytest.raises(SerializationError):
        BloomFilter.from_bytes(data[:-1])
