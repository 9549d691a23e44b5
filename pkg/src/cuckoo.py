"""
Cuckoo Hashing - one table, two tabulation hash functions

Every stored key sits at T[h1(x)] or T[h2(x)]. Inserts displace residents
along an eviction chain; a chain longer than the element count triggers a
rehash with fresh tables. The table never grows on its own: crossing the
load limit is reported to the caller.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .errors import DuplicateKeyError, InvalidParameterError, LoadLimitExceeded, MissingKeyError
from .hashfam import HashFunctionHandle, encode_key, sample_tabulation
from .randsrc import RandomSource

DEFAULT_LOAD_LIMIT = 0.45
DEFAULT_KEY_BITS = 32
CHAR_BITS = 8


@dataclass
class CuckooStats:
    inserts: int = 0
    displacements: int = 0
    rehashes: int = 0
    lookups: int = 0
    max_probes: int = 0


@dataclass(frozen=True)
class CuckooLookup:
    found: bool
    payload: Any = None
    probes: int = 0


class CuckooTable:
    """
    Cuckoo hash table of 2^m_bits slots

    Args:
        src: randomness for the initial hash functions and later rehashes
        m_bits: log2 of the slot count
        key_bits: widest key accepted (tabulation splits keys into 8-bit characters)
        load_limit: maximum occupied fraction, below 1/2
        rehash_after_m2: also rehash after m^2 inserts since the last rehash
    """

    def __init__(self, src: RandomSource, m_bits: int = 10, key_bits: int = DEFAULT_KEY_BITS,
                 load_limit: float = DEFAULT_LOAD_LIMIT, rehash_after_m2: bool = False):
        if not 0 < load_limit < 0.5:
            raise InvalidParameterError(f"load_limit must lie in (0, 0.5), got {load_limit}")
        if m_bits < 1:
            raise InvalidParameterError(f"m_bits must be >= 1, got {m_bits}")
        self.m_bits = m_bits
        self.m = 1 << m_bits
        self.key_bits = key_bits
        self.chars = max(1, math.ceil(key_bits / CHAR_BITS))
        self.load_limit = load_limit
        self.rehash_after_m2 = rehash_after_m2
        self.slots: List[Optional[Tuple[int, Any]]] = [None] * self.m
        self.size = 0
        self.stats = CuckooStats()
        self._inserts_since_rehash = 0
        self._src = src
        self.h1, self.h2 = self._draw_functions(src)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, key) -> bool:
        return self.lookup(key).found

    @property
    def load(self) -> float:
        return self.size / self.m

    def _draw_functions(self, src: RandomSource) -> Tuple[HashFunctionHandle, HashFunctionHandle]:
        return (sample_tabulation(src, self.chars, CHAR_BITS, self.m_bits),
                sample_tabulation(src, self.chars, CHAR_BITS, self.m_bits))

    def _encode(self, key) -> int:
        x = encode_key(key)
        if x >> (self.chars * CHAR_BITS):
            raise InvalidParameterError(f"key {key!r} wider than {self.key_bits} bits")
        return x

    def lookup(self, key) -> CuckooLookup:
        """Reads T[h1(x)] then T[h2(x)]; never more than two probes"""
        x = self._encode(key)
        probes = 0
        result = CuckooLookup(found=False, probes=2)
        for h in (self.h1, self.h2):
            probes += 1
            slot = self.slots[h(x)]
            if slot is not None and slot[0] == x:
                result = CuckooLookup(found=True, payload=slot[1], probes=probes)
                break
        self.stats.lookups += 1
        self.stats.max_probes = max(self.stats.max_probes, result.probes)
        return result

    def insert(self, key, payload: Any = None, src: Optional[RandomSource] = None) -> int:
        """
        Insert an absent key

        Args:
            key: key to add
            payload: value stored with the key
            src: randomness for a rehash this insert triggers; defaults to the
                table's own source

        Returns:
            Displacements made by this insert (rehash reinsertion excluded)
        """
        x = self._encode(key)
        if self.lookup(key).found:
            raise DuplicateKeyError(f"key {key!r} already present")
        if (self.size + 1) / self.m > self.load_limit:
            raise LoadLimitExceeded(
                f"insert would raise load to {(self.size + 1) / self.m:.4f} > {self.load_limit}")
        self.stats.inserts += 1
        self._inserts_since_rehash += 1
        pending, moved = self._place((x, payload), self.size + 1)
        self.stats.displacements += moved
        self.size += 1
        if pending is not None:
            self._rehash(src or self._src, pending)
        elif self.rehash_after_m2 and self._inserts_since_rehash >= self.m * self.m:
            self._rehash(src or self._src, None)
        return moved

    def _place(self, entry: Tuple[int, Any], max_loop: int) -> Tuple[Optional[Tuple[int, Any]], int]:
        """Eviction chain of at most max_loop steps; returns (entry left in hand, displacements)"""
        pos = self.h1(entry[0])
        moved = 0
        for _ in range(max_loop):
            if self.slots[pos] is None:
                self.slots[pos] = entry
                return None, moved
            entry, self.slots[pos] = self.slots[pos], entry
            moved += 1
            h1 = self.h1(entry[0])
            pos = self.h2(entry[0]) if pos == h1 else h1
        return entry, moved

    def _rehash(self, src: RandomSource, pending: Optional[Tuple[int, Any]]) -> None:
        entries = [s for s in self.slots if s is not None]
        if pending is not None:
            entries.append(pending)
        while True:
            self.stats.rehashes += 1
            self.h1, self.h2 = self._draw_functions(src)
            self.slots = [None] * self.m
            placed = 0
            for entry in entries:
                left, _ = self._place(entry, placed + 1)
                if left is not None:
                    break
                placed += 1
            else:
                self._inserts_since_rehash = 0
                return

    def delete(self, key) -> Any:
        """Clear whichever of the two slots holds key; returns its payload"""
        x = self._encode(key)
        for h in (self.h1, self.h2):
            pos = h(x)
            slot = self.slots[pos]
            if slot is not None and slot[0] == x:
                self.slots[pos] = None
                self.size -= 1
                return slot[1]
        raise MissingKeyError(f"key {key!r} not present")

    def items(self) -> Dict[int, Any]:
        return {s[0]: s[1] for s in self.slots if s is not None}

    def check_invariants(self) -> bool:
        """Every key at one of its two positions, occupancy within the load limit"""
        occupied = 0
        for pos, slot in enumerate(self.slots):
            if slot is None:
                continue
            occupied += 1
            if pos != self.h1(slot[0]) and pos != self.h2(slot[0]):
                return False
        return occupied == self.size and occupied <= self.load_limit * self.m
