"""
Bloom Filters - plain and counting variants with parameter planning

Positions come from two mod_p hashes combined as h(x) + i*h'(x) mod m for
i = 0..k-1. The counting variant keeps small saturating counters; a
counter that reached its cap is never decremented again.
"""
import math
import struct
from collections import Counter
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import ContractViolation, InvalidParameterError, SerializationError
from .hashfam import HashFunctionHandle, encode_key, sample_mod_p
from .randsrc import RandomSource

BITS_PER_ELEMENT_FACTOR = 1.442
DEFAULT_COUNTER_BITS = 4
DEFAULT_KEY_BITS = 64

BLOOM_MAGIC = b'RLBF'
BLOOM_VERSION = 1
_VARIANT_BITS, _VARIANT_COUNTING = 0, 1


@dataclass(frozen=True)
class BloomParams:
    m: int
    n_target: int
    k: int
    alpha: float
    alpha_prime: float

    @classmethod
    def from_mk(cls, m: int, n_target: int, k: int) -> 'BloomParams':
        if m < 2 or k < 1:
            raise InvalidParameterError(f"need m >= 2 and k >= 1, got m={m}, k={k}")
        alpha = n_target / m
        return cls(m=m, n_target=n_target, k=k, alpha=alpha, alpha_prime=alpha * (1 + 1 / m))


def plan(n_target: int, epsilon_fp: float) -> BloomParams:
    """
    Size a filter for n_target keys at false-positive rate epsilon_fp

    m = ceil(1.442 n lg(1/eps)) + 1 and k = round(ln 2 / alpha'), at least 1.
    """
    if not 0 < epsilon_fp < 1:
        raise InvalidParameterError(f"epsilon_fp must lie in (0, 1), got {epsilon_fp}")
    if n_target < 1:
        raise InvalidParameterError(f"n_target must be >= 1, got {n_target}")
    m = math.ceil(BITS_PER_ELEMENT_FACTOR * n_target * math.log2(1 / epsilon_fp)) + 1
    alpha = n_target / m
    alpha_prime = alpha * (1 + 1 / m)
    k = max(1, math.floor(math.log(2) / alpha_prime + 0.5))
    return BloomParams(m=m, n_target=n_target, k=k, alpha=alpha, alpha_prime=alpha_prime)


def bit_set_probability(m: int, k: int, n_inserted: int) -> float:
    """Pr[A[i] = 1] = 1 - (1 - 1/m)^(k n)"""
    return -math.expm1(k * n_inserted * math.log1p(-1 / m))


def false_positive_rate(params: BloomParams, n_inserted: int, exact: bool = True) -> float:
    """(1 - (1 - 1/m)^(kn))^k, or the (1 - e^(-k alpha'))^k approximation"""
    if exact:
        return bit_set_probability(params.m, params.k, n_inserted) ** params.k
    alpha_prime = n_inserted / params.m * (1 + 1 / params.m)
    return (1 - math.exp(-params.k * alpha_prime)) ** params.k


def saturation_bound(m: int, c: int) -> float:
    """Expected number of counters reaching c, at most m (e ln2 / c)^c"""
    return m * (math.e * math.log(2) / c) ** c


class BloomFilter:
    """
    Bloom filter over int/str/bytes keys

    Args:
        params: sizing from `plan` or `BloomParams.from_mk`
        src: randomness for h and h'
        counting: keep saturating counters instead of bits
        counter_bits: counter width; the cap is 2^counter_bits - 1
    """

    def __init__(self, params: BloomParams, src: RandomSource, counting: bool = False,
                 counter_bits: int = DEFAULT_COUNTER_BITS, key_bits: int = DEFAULT_KEY_BITS):
        if counting and not 1 <= counter_bits <= 8:
            raise InvalidParameterError(f"counter_bits must lie in [1, 8], got {counter_bits}")
        self.params = params
        self.counting = counting
        self.counter_bits = counter_bits if counting else 1
        self.cap = (1 << self.counter_bits) - 1
        universe_max = (1 << key_bits) - 1
        self.h = sample_mod_p(src, universe_max, params.m)
        self.h_prime = sample_mod_p(src, universe_max, params.m)
        self.array = np.zeros(params.m, dtype=np.uint8)
        self.inserted = 0

    def positions(self, key) -> List[int]:
        x = encode_key(key)
        h, step, m = self.h(x), self.h_prime(x), self.params.m
        return [(h + i * step) % m for i in range(self.params.k)]

    def insert(self, key) -> None:
        positions = self.positions(key)
        if self.counting:
            for pos in positions:
                if self.array[pos] < self.cap:
                    self.array[pos] += 1
        else:
            self.array[positions] = 1
        self.inserted += 1

    def query(self, key) -> bool:
        return bool(np.all(self.array[self.positions(key)]))

    def __contains__(self, key) -> bool:
        return self.query(key)

    def remove(self, key) -> None:
        """
        Decrement the key's counters (counting variant only)

        Raises:
            ContractViolation: a counter the key maps to is already zero
        """
        if not self.counting:
            raise InvalidParameterError("remove needs the counting variant")
        needed = Counter(self.positions(key))
        for pos, times in needed.items():
            value = int(self.array[pos])
            if value != self.cap and value < times:
                raise ContractViolation(f"counter {pos} is {value}; key was not inserted")
        for pos, times in needed.items():
            if self.array[pos] != self.cap:
                self.array[pos] -= times
        self.inserted -= 1

    def count_estimate(self, key) -> int:
        """min over the key's counters (bit variant: 0 or 1)"""
        return int(self.array[self.positions(key)].min())

    def saturated_fraction(self) -> float:
        return float(np.count_nonzero(self.array == self.cap)) / self.params.m

    def fill_ratio(self) -> float:
        return float(np.count_nonzero(self.array)) / self.params.m

    # --- serialization ---

    def to_bytes(self) -> bytes:
        """
        magic 'RLBF' | u8 version | u8 variant | u8 counter bits |
        u64 m | u32 k | u64 n_target | u64 inserted | h | h' | array
        (bits packed little-endian, counters one byte each)
        """
        variant = _VARIANT_COUNTING if self.counting else _VARIANT_BITS
        header = struct.pack('<BBBQIQQ', BLOOM_VERSION, variant, self.counter_bits,
                             self.params.m, self.params.k, self.params.n_target, self.inserted)
        body = self.array.tobytes() if self.counting else np.packbits(self.array, bitorder='little').tobytes()
        return b''.join([BLOOM_MAGIC, header, self.h.to_bytes(), self.h_prime.to_bytes(), body])

    @classmethod
    def from_bytes(cls, data: bytes) -> 'BloomFilter':
        if data[:4] != BLOOM_MAGIC:
            raise SerializationError("bad Bloom filter magic")
        try:
            version, variant, counter_bits, m, k, n_target, inserted = struct.unpack_from('<BBBQIQQ', data, 4)
        except struct.error as e:
            raise SerializationError(f"truncated Bloom header: {e}")
        if version != BLOOM_VERSION:
            raise SerializationError(f"unsupported Bloom version {version}")
        pos = 4 + struct.calcsize('<BBBQIQQ')
        h, pos = HashFunctionHandle.read_from(data, pos)
        h_prime, pos = HashFunctionHandle.read_from(data, pos)
        body = data[pos:]
        obj = cls.__new__(cls)
        obj.params = BloomParams.from_mk(m, n_target, k)
        obj.counting = variant == _VARIANT_COUNTING
        obj.counter_bits = counter_bits
        obj.cap = (1 << counter_bits) - 1
        obj.h, obj.h_prime = h, h_prime
        obj.inserted = inserted
        raw = np.frombuffer(body, dtype=np.uint8)
        if obj.counting:
            if raw.size != m:
                raise SerializationError(f"expected {m} counters, got {raw.size}")
            obj.array = raw.copy()
        else:
            if raw.size != (m + 7) // 8:
                raise SerializationError(f"expected {(m + 7) // 8} bit bytes, got {raw.size}")
            obj.array = np.unpackbits(raw, count=m, bitorder='little')
        return obj
