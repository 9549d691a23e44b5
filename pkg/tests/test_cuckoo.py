import numpy as np
import pytest

from src.cuckoo import CuckooTable
from src.errors import DuplicateKeyError, InvalidParameterError, LoadLimitExceeded, MissingKeyError
from src.randsrc import RandomSource


def test_first_insert_lands_in_primary_slot(src):
    # GIVEN
    table = CuckooTable(src, m_bits=8)

    # WHEN
    moved = table.insert(99, "x")

    # THEN
    assert moved == 0
    assert table.slots[table.h1(99)] == (99, "x")
    assert table.lookup(99).probes == 1


def test_absent_key_costs_two_probes(src):
    table = CuckooTable(src, m_bits=8)
    table.insert(1)
    result = table.lookup(2)
    assert not result.found
    assert result.probes == 2


def test_fill_to_load_limit():
    # GIVEN
    src = RandomSource(2024)
    table = CuckooTable(src, m_bits=10, load_limit=0.45)
    target = int(0.45 * table.m)
    keys = set()
    while len(keys) < target:
        keys.add(src.bits(32))

    # WHEN
    moves = [table.insert(key, key % 97, src) for key in sorted(keys)]

    # THEN
    assert table.check_invariants()
    assert len(table) == target
    assert np.mean(moves) <= 10
    assert table.stats.rehashes <= 3
    for key in keys:
        result = table.lookup(key)
        assert result.found and result.payload == key % 97
        assert result.probes <= 2
    assert table.stats.max_probes <= 2


def test_insert_then_delete_empties_table(src):
    table = CuckooTable(src, m_bits=6)
    table.insert(5, "five")
    assert table.delete(5) == "five"
    assert len(table) == 0
    assert all(slot is None for slot in table.slots)


def test_contract_errors(src):
    table = CuckooTable(src, m_bits=3, load_limit=0.3)
    table.insert(1)
    table.insert(2)
    with pytest.raises(DuplicateKeyError):
        table.insert(1)
    with pytest.raises(LoadLimitExceeded):
        table.insert(3)
    with pytest.raises(MissingKeyError):
        table.delete(4)
    with pytest.raises(InvalidParameterError):
        table.lookup(1 << 40)


@pytest.mark.parametrize("limit", [0, 0.5, 0.9])
def test_rejects_load_limit_outside_half(src, limit):
    with pytest.raises(InvalidParameterError):
        CuckooTable(src, load_limit=limit)


def test_rehash_keeps_every_entry(src):
    # GIVEN
    table = CuckooTable(src, m_bits=8)
    for key in range(0, 100, 3):
        table.insert(key, -key)
    before = table.items()

    # WHEN
    table._rehash(src, None)

    # THEN
    assert table.items() == before
    assert table.stats.rehashes == 1
    assert table.check_invariants()


def test_matches_dictionary_model():
    # GIVEN
    src = RandomSource(606)
    table = CuckooTable(src, m_bits=9)
    model = {}

    # WHEN
    for step in range(3000):
        key = src.uniform_below(400)
        if key in model and src.bit():
            assert table.delete(key) == model.pop(key)
        elif key not in model and len(model) < 200:
            table.insert(key, step)
            model[key] = step

    # THEN
    assert table.items() == model
    assert table.check_invariants()
    for key in range(400):
        assert (key in table) == (key in model)
