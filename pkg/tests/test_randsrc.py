from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from src.errors import BitsExhausted, InvalidParameterError
from src.randsrc import (RandomSource, ScriptedSource, bernoulli, geometric, outcome_masses,
                         parse_seed, shuffle, uniform_below)


def test_same_seed_replays_identical_bits():
    # GIVEN
    a, b = RandomSource(42), RandomSource(42)

    # WHEN
    draws_a = [a.bits(13) for _ in range(100)]
    draws_b = [b.bits(13) for _ in range(100)]

    # THEN
    assert draws_a == draws_b
    assert a.bits_consumed == b.bits_consumed == 1300


def test_forks_are_independent_of_parent_position():
    # GIVEN
    parent = RandomSource(7)
    parent.bits(100)

    # WHEN
    child = parent.fork(3)
    fresh = RandomSource(7, stream=(3,))

    # THEN
    assert [child.word() for _ in range(8)] == [fresh.word() for _ in range(8)]
    assert RandomSource(7).fork(1).word() != RandomSource(7).fork(2).word()


def test_block_size_does_not_change_the_stream():
    a, b = RandomSource(9, block_words=1), RandomSource(9, block_words=1024)
    assert [a.bits(7) for _ in range(500)] == [b.bits(7) for _ in range(500)]


def test_bits_zero_draws_nothing():
    src = RandomSource(1)
    assert src.bits(0) == 0
    assert src.bits_consumed == 0


@pytest.mark.parametrize("text,expected", [
    ("1337", 1337),
    ("0x5EED", 0x5EED),
    ("0x_ff", 255),
    (12, 12),
])
def test_parse_seed(text, expected):
    assert parse_seed(text) == expected


@pytest.mark.parametrize("text", ["seed", "-1", str(1 << 64), "0xg"])
def test_parse_seed_rejects(text):
    with pytest.raises(InvalidParameterError):
        parse_seed(text)


@pytest.mark.parametrize("method", ["rejection", "range_coding"])
def test_uniform_below_one_consumes_no_bits(method):
    src = RandomSource(5)
    assert uniform_below(src, 1, method) == 0
    assert src.bits_consumed == 0


def test_uniform_below_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        uniform_below(RandomSource(0), 0)
    with pytest.raises(InvalidParameterError):
        uniform_below(RandomSource(0), 4, method="dice")


def test_rejection_sampling_is_exactly_uniform():
    # GIVEN
    depth = 12

    # WHEN
    masses = outcome_masses(lambda s: uniform_below(s, 6, 'rejection'), max_depth=depth)

    # THEN
    assert sorted(masses) == list(range(6))
    assert len(set(masses.values())) == 1


def test_range_coding_masses_converge_to_uniform():
    # GIVEN
    depth = 12

    # WHEN
    masses = outcome_masses(lambda s: uniform_below(s, 6, 'range_coding'), max_depth=depth)

    # THEN
    assert sorted(masses) == list(range(6))
    for mass in masses.values():
        assert Fraction(1, 6) - Fraction(2, 1 << depth) < mass <= Fraction(1, 6)


def test_mean_bits_per_die_roll():
    # GIVEN
    rolls = 20000
    rejection, coding = RandomSource(11), RandomSource(11)

    # WHEN
    for _ in range(rolls):
        uniform_below(rejection, 6, 'rejection')
        uniform_below(coding, 6, 'range_coding')

    # THEN
    assert rejection.bits_consumed / rolls < 6
    assert coding.bits_consumed / rolls <= 5


def test_uniform_below_two_is_one_bit():
    src = RandomSource(3)
    for _ in range(50):
        assert uniform_below(src, 2) in (0, 1)
    assert src.bits_consumed == 50


def test_bernoulli_degenerate_probabilities_draw_nothing():
    src = RandomSource(3)
    assert bernoulli(src, 0) is False
    assert bernoulli(src, 1) is True
    assert src.bits_consumed == 0


def test_bernoulli_half_is_one_bit():
    assert outcome_masses(lambda s: bernoulli(s, 0.5), max_depth=1) == {
        True: Fraction(1, 2), False: Fraction(1, 2)}


def test_bernoulli_mass_matches_p():
    # GIVEN
    p = Fraction(1, 3)
    depth = 20

    # WHEN
    masses = outcome_masses(lambda s: bernoulli(s, p), max_depth=depth)

    # THEN
    assert 0 <= p - masses[True] <= Fraction(1, 1 << depth)
    assert 0 <= (1 - p) - masses[False] <= Fraction(1, 1 << depth)


def test_geometric_with_certain_success():
    src = RandomSource(2)
    assert geometric(src, 1).value == 1
    assert src.bits_consumed == 0


def test_geometric_moments():
    # GIVEN
    src = RandomSource(17)
    p = 0.5
    count = 20000

    # WHEN
    values = np.array([geometric(src, p).value for _ in range(count)], dtype=float)

    # THEN
    assert values.min() >= 1
    assert abs(values.mean() - 1 / p) < 4 * values.std(ddof=1) / np.sqrt(count)
    assert abs(values.var(ddof=1) - (1 - p) / p ** 2) < 0.2


@pytest.mark.parametrize("p,n", [(0.5, 2), (0.5, 4), (0.25, 3), (0.25, 8), (0.1, 10)])
def test_geometric_tail_matches_closed_form(p, n):
    # GIVEN
    src = RandomSource(int(1000 * p) + n)
    count = 20000
    expected = (1 - p) ** (n - 1)

    # WHEN
    values = np.array([geometric(src, p).value for _ in range(count)])
    rate = float(np.mean(values >= n))

    # THEN
    assert abs(rate - expected) <= 3 * np.sqrt(expected * (1 - expected) / count)


@pytest.mark.parametrize("p", [0, -0.1, 1.5])
def test_geometric_rejects_bad_p(p):
    with pytest.raises(InvalidParameterError):
        geometric(RandomSource(0), p)


def test_shuffle_trivial_inputs():
    src = RandomSource(4)
    assert shuffle(src, []) == []
    assert shuffle(src, ["a"]) == ["a"]
    assert src.bits_consumed == 0


def test_shuffle_permutation_frequencies():
    # GIVEN
    src = RandomSource(23)
    trials = 60000
    counts = {perm: 0 for perm in permutations("abc")}

    # WHEN
    for _ in range(trials):
        counts[tuple(shuffle(src, "abc"))] += 1

    # THEN
    for count in counts.values():
        assert abs(count / trials - 1 / 6) < 0.01


def test_scripted_source_replays_and_exhausts():
    # GIVEN
    src = ScriptedSource([1, 0, 1])

    # WHEN / THEN
    assert src.bits(2) == 0b10
    assert src.bit() == 1
    with pytest.raises(BitsExhausted):
        src.bit()
    with pytest.raises(BitsExhausted):
        src.fork(0)
