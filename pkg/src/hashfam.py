"""
Hash Families - samplable universal, multiply-shift and tabulation hashing

A HashFunctionHandle is one sampled member of a family. Handles are
immutable once sampled and evaluate with plain integer arithmetic, so they
can be shared by readers, serialized, and restored bit-for-bit.
"""
import json
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Tuple, Union

from .errors import InvalidParameterError, SerializationError
from .randsrc import RandomSource, uniform_below

FAMILIES = ('mod_p', 'multiply_shift', 'tabulation')
FAMILY_TAGS = {name: i + 1 for i, name in enumerate(FAMILIES)}

MAX_WORD_BITS = 64
MAX_KEY_BITS = 64

HANDLE_MAGIC = b'RLHF'
HANDLE_VERSION = 1

# Deterministic Miller-Rabin witnesses; exact for every n < 3.3e24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test"""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1024)
def next_prime(x: int) -> int:
    """Smallest prime strictly greater than x"""
    candidate = max(2, x + 1)
    while not is_prime(candidate):
        candidate += 1
    return candidate


def encode_key(key: Union[int, str, bytes]) -> int:
    """Map an int, str or bytes key to a nonnegative int (bytes little-endian)"""
    if isinstance(key, bool):
        return int(key)
    if isinstance(key, int):
        if key < 0:
            raise InvalidParameterError(f"integer keys must be >= 0, got {key}")
        return key
    if isinstance(key, str):
        key = key.encode('utf-8')
    if isinstance(key, (bytes, bytearray)):
        return int.from_bytes(bytes(key), 'little')
    raise InvalidParameterError(f"Unsupported key type: {type(key).__name__}")


@dataclass(frozen=True)
class HashFunctionHandle:
    """
    One sampled hash function

    Fields by family:
        mod_p:          a, b, p, m
        multiply_shift: a, k, ell (m = 2^ell)
        tabulation:     c, char_bits, m_bits, tables (m = 2^m_bits)
    """
    family: str
    m: int
    universe_bits: int
    a: int = 0
    b: int = 0
    p: int = 0
    k: int = 0
    ell: int = 0
    c: int = 0
    char_bits: int = 0
    m_bits: int = 0
    tables: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"Unknown hash family: {self.family}")
        if self.m < 1:
            raise InvalidParameterError(f"range m must be >= 1, got {self.m}")
        if self.family == 'mod_p':
            if not is_prime(self.p) or self.p < self.m:
                raise InvalidParameterError(f"mod_p needs prime p >= m, got p={self.p}, m={self.m}")
            if not (1 <= self.a < self.p and 0 <= self.b < self.p):
                raise InvalidParameterError("mod_p needs 1 <= a < p and 0 <= b < p")
        elif self.family == 'multiply_shift':
            if not 1 <= self.ell <= self.k <= MAX_WORD_BITS:
                raise InvalidParameterError(f"need 1 <= ell <= k <= 64, got ell={self.ell}, k={self.k}")
            if self.a % 2 == 0 or not 0 < self.a < (1 << self.k):
                raise InvalidParameterError(f"multiplier must be odd in (0, 2^k), got {self.a}")
        elif len(self.tables) != self.c or any(len(t) != 1 << self.char_bits for t in self.tables):
            raise InvalidParameterError("tabulation needs c tables of 2^char_bits entries")

    def __call__(self, x: int) -> int:
        if self.family == 'mod_p':
            return ((self.a * x + self.b) % self.p) % self.m
        if self.family == 'multiply_shift':
            return ((self.a * x) & ((1 << self.k) - 1)) >> (self.k - self.ell)
        if x >> (self.c * self.char_bits):
            raise InvalidParameterError(
                f"key {x} wider than {self.c * self.char_bits} tabulation bits")
        mask = (1 << self.char_bits) - 1
        h = 0
        for table in self.tables:
            h ^= table[x & mask]
            x >>= self.char_bits
        return h

    # --- serialization ---

    def _int_fields(self) -> List[int]:
        fields = [self.m, self.universe_bits]
        if self.family == 'mod_p':
            fields += [self.a, self.b, self.p]
        elif self.family == 'multiply_shift':
            fields += [self.a, self.k, self.ell]
        else:
            fields += [self.c, self.char_bits, self.m_bits]
            fields += [v for table in self.tables for v in table]
        return fields

    def to_bytes(self) -> bytes:
        """
        Versioned binary layout, little-endian:
            magic 'RLHF' | u8 version | u8 family tag | u32 field count |
            per field: u16 byte length + unsigned magnitude bytes
        """
        fields = self._int_fields()
        parts = [HANDLE_MAGIC, struct.pack('<BBI', HANDLE_VERSION, FAMILY_TAGS[self.family], len(fields))]
        for value in fields:
            raw = value.to_bytes(max(1, (value.bit_length() + 7) // 8), 'little')
            parts.append(struct.pack('<H', len(raw)))
            parts.append(raw)
        return b''.join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> 'HashFunctionHandle':
        handle, used = cls.read_from(data, 0)
        if used != len(data):
            raise SerializationError(f"{len(data) - used} trailing bytes after hash handle")
        return handle

    @classmethod
    def read_from(cls, data: bytes, offset: int) -> Tuple['HashFunctionHandle', int]:
        """Parse one handle at `offset`; returns (handle, offset after it)"""
        try:
            if data[offset:offset + 4] != HANDLE_MAGIC:
                raise SerializationError("bad hash handle magic")
            version, tag, count = struct.unpack_from('<BBI', data, offset + 4)
            if version != HANDLE_VERSION:
                raise SerializationError(f"unsupported hash handle version {version}")
            pos = offset + 10
            fields = []
            for _ in range(count):
                (length,) = struct.unpack_from('<H', data, pos)
                pos += 2
                if pos + length > len(data):
                    raise SerializationError("truncated hash handle")
                fields.append(int.from_bytes(data[pos:pos + length], 'little'))
                pos += length
        except struct.error as e:
            raise SerializationError(f"truncated hash handle: {e}")
        families = {v: k for k, v in FAMILY_TAGS.items()}
        if tag not in families:
            raise SerializationError(f"unknown family tag {tag}")
        return cls._from_fields(families[tag], fields), pos

    @classmethod
    def _from_fields(cls, family: str, fields: List[int]) -> 'HashFunctionHandle':
        if len(fields) < 5:
            raise SerializationError(f"{family} handle needs at least 5 fields, got {len(fields)}")
        m, universe_bits, f0, f1, f2 = fields[:5]
        if family == 'mod_p':
            return cls(family, m, universe_bits, a=f0, b=f1, p=f2)
        if family == 'multiply_shift':
            return cls(family, m, universe_bits, a=f0, k=f1, ell=f2)
        c, char_bits, m_bits = f0, f1, f2
        size = 1 << char_bits
        flat = fields[5:]
        if len(flat) != c * size:
            raise SerializationError(f"tabulation handle expects {c * size} entries, got {len(flat)}")
        tables = tuple(tuple(flat[i * size:(i + 1) * size]) for i in range(c))
        return cls(family, m, universe_bits, c=c, char_bits=char_bits, m_bits=m_bits, tables=tables)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'family': self.family, 'm': self.m, 'universe_bits': self.universe_bits}
        if self.family == 'mod_p':
            data.update(a=self.a, b=self.b, p=self.p)
        elif self.family == 'multiply_shift':
            data.update(a=self.a, k=self.k, ell=self.ell)
        else:
            data.update(c=self.c, char_bits=self.char_bits, m_bits=self.m_bits,
                        tables=[list(t) for t in self.tables])
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> 'HashFunctionHandle':
        try:
            data = json.loads(text)
            family = data['family']
            if family == 'tabulation':
                data['tables'] = tuple(tuple(t) for t in data['tables'])
            return cls(**data)
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise SerializationError(f"Invalid hash handle JSON: {e}")


@dataclass(frozen=True)
class PairwiseBitBlock:
    """n pairwise-independent uniform values derived from few base values"""
    base_bits: Tuple[int, ...]
    derived: Tuple[int, ...]
    alphabet_size: int


def sample_mod_p(src: RandomSource, universe_max: int, m: int) -> HashFunctionHandle:
    """
    h(x) = ((a x + b) mod p) mod m with p the first prime above universe_max

    Args:
        universe_max: largest key that will be hashed
        m: number of buckets

    Returns:
        2-universal HashFunctionHandle
    """
    if m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m}")
    if universe_max < 0:
        raise InvalidParameterError(f"universe_max must be >= 0, got {universe_max}")
    p = next_prime(max(universe_max, m - 1))
    a = 1 + uniform_below(src, p - 1)
    b = uniform_below(src, p)
    return HashFunctionHandle('mod_p', m=m, universe_bits=universe_max.bit_length(), a=a, b=b, p=p)


def sample_multiply_shift(src: RandomSource, k: int, ell: int) -> HashFunctionHandle:
    """Dietzfelbinger multiply-shift: ((a x) mod 2^k) div 2^(k - ell), a odd"""
    if not 1 <= k <= MAX_WORD_BITS:
        raise InvalidParameterError(f"k must lie in [1, {MAX_WORD_BITS}], got {k}")
    if not 1 <= ell <= k:
        raise InvalidParameterError(f"need 1 <= ell <= k, got ell={ell}, k={k}")
    a = (src.bits(k - 1) << 1) | 1
    return HashFunctionHandle('multiply_shift', m=1 << ell, universe_bits=k, a=a, k=k, ell=ell)


def sample_tabulation(src: RandomSource, c: int, char_bits: int, m_bits: int) -> HashFunctionHandle:
    """Simple tabulation: XOR of c per-character tables of random m_bits words"""
    if c < 1 or char_bits < 1:
        raise InvalidParameterError(f"need c >= 1 and char_bits >= 1, got c={c}, char_bits={char_bits}")
    if c * char_bits > MAX_KEY_BITS:
        raise InvalidParameterError(
            f"c * char_bits = {c * char_bits} exceeds the {MAX_KEY_BITS}-bit key width")
    if not 0 <= m_bits <= MAX_WORD_BITS:
        raise InvalidParameterError(f"m_bits must lie in [0, {MAX_WORD_BITS}], got {m_bits}")
    size = 1 << char_bits
    tables = tuple(tuple(src.bits(m_bits) for _ in range(size)) for _ in range(c))
    return HashFunctionHandle('tabulation', m=1 << m_bits, universe_bits=c * char_bits,
                              c=c, char_bits=char_bits, m_bits=m_bits, tables=tables)


def pairwise_bits(src: RandomSource, n: int, alphabet_size: int = 2) -> PairwiseBitBlock:
    """
    Subset-sum construction of pairwise-independent values

    Draws ceil(lg(n+1)) uniform base values; derived value i (1..n) is the
    sum mod alphabet_size of the base values selected by the bits of i.
    For alphabet_size 2 this is the XOR construction.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if alphabet_size < 2:
        raise InvalidParameterError(f"alphabet_size must be >= 2, got {alphabet_size}")
    base = tuple(uniform_below(src, alphabet_size) for _ in range(n.bit_length()))
    derived = []
    for i in range(1, n + 1):
        total = sum(value for j, value in enumerate(base) if (i >> j) & 1)
        derived.append(total % alphabet_size)
    return PairwiseBitBlock(base_bits=base, derived=tuple(derived), alphabet_size=alphabet_size)


def sample_family(src: RandomSource, family: str, params: Dict[str, int]) -> HashFunctionHandle:
    """Dispatch on family name; used by the CLI and config-driven callers"""
    try:
        if family == 'mod_p':
            return sample_mod_p(src, int(params['universe_max']), int(params['m']))
        if family == 'multiply_shift':
            return sample_multiply_shift(src, int(params['k']), int(params['ell']))
        if family == 'tabulation':
            return sample_tabulation(src, int(params['c']), int(params['char_bits']), int(params['m_bits']))
    except KeyError as e:
        raise InvalidParameterError(f"{family} needs parameter {e}")
    raise InvalidParameterError(f"Unknown hash family: {family}")
