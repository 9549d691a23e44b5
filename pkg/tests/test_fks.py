import numpy as np
import pytest

from src.errors import DuplicateKeyError, InvalidParameterError, SerializationError
from src.fks import FksTable
from src.randsrc import RandomSource


def _distinct(src, count, bits=32):
    keys = set()
    while len(keys) < count:
        keys.add(src.bits(bits))
    return sorted(keys)


def test_single_key_table(src):
    table = FksTable.build(src, [42])
    assert table.total_slots == 1
    assert table.collisions() == 0
    assert table.lookup(42).found
    assert not table.lookup(7).found


def test_build_is_perfect_and_linear_space():
    # GIVEN
    src = RandomSource(101)
    keys = _distinct(src, 64)

    # WHEN
    table = FksTable.build(src, keys)

    # THEN
    assert table.collisions() == 0
    assert table.total_slots <= 5 * len(keys)
    assert sum(table.bin_sizes()) == len(keys)
    for key in keys:
        result = table.lookup(key)
        assert result.found
        assert result.evaluations <= 2
    assert table.stats.max_lookup_evaluations <= 2


def test_absent_keys_are_rejected(src):
    keys = _distinct(src, 200)
    table = FksTable.build(src, keys)
    members = set(keys)
    probes = [k for k in _distinct(src, 500) if k not in members]
    assert not any(table.lookup(k).found for k in probes)


def test_payloads_are_returned(src):
    table = FksTable.build(src, ["alpha", "beta", "gamma"], payloads=[1, 2, 3])
    assert table.lookup("beta").payload == 2
    assert "gamma" in table
    assert "delta" not in table


def test_expected_outer_rounds_at_most_two():
    # GIVEN
    src = RandomSource(9)
    builds = 50

    # WHEN
    rounds = np.array([FksTable.build(src, _distinct(src, 100)).stats.outer_rounds
                       for _ in range(builds)], dtype=float)

    # THEN
    se = max(rounds.std(ddof=1), 1.0) / np.sqrt(builds)
    assert rounds.mean() <= 2 + 3 * se


def test_build_rejects_bad_input(src):
    with pytest.raises(InvalidParameterError):
        FksTable.build(src, [])
    with pytest.raises(DuplicateKeyError):
        FksTable.build(src, [3, 5, 3])
    with pytest.raises(InvalidParameterError):
        FksTable.build(src, [1, 2], payloads=[1])


def test_serialized_table_answers_identically(src):
    # GIVEN
    keys = _distinct(src, 150)
    table = FksTable.build(src, keys, payloads=list(range(150)))

    # WHEN
    restored = FksTable.from_bytes(table.to_bytes())

    # THEN
    assert restored.items() == table.items()
    for key in keys[:20] + [keys[-1] + 1]:
        assert restored.lookup(key) == table.lookup(key)


def test_serialization_errors(src):
    data = FksTable.build(src, [1, 2, 3]).to_bytes()
    with pytest.raises(SerializationError):
        FksTable.from_bytes(b'NOPE' + data[4:])
    with pytest.raises(SerializationError):
        FksTable.from_bytes(data + b'\x00')
    with pytest.raises(SerializationError):
        FksTable.from_bytes(data[:-3])


def test_string_keys_and_mixed_payloads_round_trip(src):
    # GIVEN
    keys = ["alpha-key-long", "beta-key-long", b"raw-bytes-key", 2 ** 70 + 5]
    payloads = ["first", -(2 ** 40), b"\x00\xff", None]
    table = FksTable.build(src, keys, payloads=payloads)

    # WHEN
    restored = FksTable.from_bytes(table.to_bytes())

    # THEN
    assert restored.items() == table.items()
    for key, payload in zip(keys, payloads):
        result = restored.lookup(key)
        assert result.found and result.payload == payload
    assert not restored.lookup("gamma-key-long").found


def test_unserializable_payload(src):
    table = FksTable.build(src, [1, 2], payloads=[1.5, 2])
    with pytest.raises(SerializationError):
        table.to_bytes()
