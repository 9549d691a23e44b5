"""
FKS Hashing - static two-level perfect hash table

Keys are hashed into n bins by a 2-universal outer function; bin i gets a
quadratic table of max(1, n_i^2) slots with an inner function resampled
until it is injective on the bin. Lookups cost one outer and at most one
inner evaluation.
"""
import struct
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .errors import DuplicateKeyError, InvalidParameterError, SerializationError
from .hashfam import HashFunctionHandle, encode_key, sample_mod_p
from .randsrc import RandomSource

DEFAULT_SLOT_FACTOR = 4
FKS_MAGIC = b'RLFK'
FKS_VERSION = 2

_EMPTY, _KEY_ONLY, _KEY_INT, _KEY_STR, _KEY_BYTES = 0, 1, 2, 3, 4


@dataclass
class FksStats:
    outer_rounds: int = 0
    inner_rounds: int = 0
    lookups: int = 0
    hash_evaluations: int = 0
    max_lookup_evaluations: int = 0


@dataclass
class FksBin:
    count: int
    inner: Optional[HashFunctionHandle]
    slots: List[Optional[Tuple[int, Any]]]


@dataclass(frozen=True)
class LookupResult:
    found: bool
    payload: Any = None
    evaluations: int = 0


class FksTable:
    """
    Two-level perfect hash table over nonnegative integer keys

    Build with `FksTable.build(src, keys)`; the table is immutable after.
    """

    def __init__(self, outer: HashFunctionHandle, bins: List[FksBin], n: int):
        self.outer = outer
        self.bins = bins
        self.n = n
        self.stats = FksStats()

    @property
    def total_slots(self) -> int:
        return sum(len(b.slots) for b in self.bins)

    @classmethod
    def build(cls, src: RandomSource, keys: Iterable, payloads: Optional[Iterable] = None,
              slot_factor: int = DEFAULT_SLOT_FACTOR) -> 'FksTable':
        """
        Build a table over distinct keys

        Args:
            src: randomness for every outer and inner function
            keys: distinct int/str/bytes keys
            payloads: optional values aligned with keys
            slot_factor: outer resampling threshold, sum n_i^2 <= slot_factor * n

        Returns:
            FksTable with stats.outer_rounds / inner_rounds filled in
        """
        raw_keys = list(keys)
        encoded = [encode_key(k) for k in raw_keys]
        n = len(encoded)
        if n < 1:
            raise InvalidParameterError("FKS build needs at least one key")
        if len(set(encoded)) != n:
            raise DuplicateKeyError("FKS build keys must be distinct")
        values = list(payloads) if payloads is not None else [None] * n
        if len(values) != n:
            raise InvalidParameterError(f"{len(values)} payloads for {n} keys")
        universe_max = max(encoded)
        stats = FksStats()

        while True:
            stats.outer_rounds += 1
            outer = sample_mod_p(src, universe_max, n)
            buckets: List[List[int]] = [[] for _ in range(n)]
            for idx, x in enumerate(encoded):
                buckets[outer(x)].append(idx)
            if sum(len(b) ** 2 for b in buckets) <= slot_factor * n:
                break

        bins = []
        for members in buckets:
            if not members:
                bins.append(FksBin(count=0, inner=None, slots=[None]))
                continue
            m_i = len(members) ** 2
            while True:
                stats.inner_rounds += 1
                inner = sample_mod_p(src, universe_max, m_i)
                slots: List[Optional[Tuple[int, Any]]] = [None] * m_i
                for idx in members:
                    pos = inner(encoded[idx])
                    if slots[pos] is not None:
                        break
                    slots[pos] = (encoded[idx], values[idx])
                else:
                    break
            bins.append(FksBin(count=len(members), inner=inner, slots=slots))

        table = cls(outer, bins, n)
        table.stats = stats
        return table

    def lookup(self, key) -> LookupResult:
        """Membership test with the stored key compared at the probed slot"""
        x = encode_key(key)
        evaluations = 1
        b = self.bins[self.outer(x)]
        result = LookupResult(found=False, evaluations=evaluations)
        if b.inner is not None:
            evaluations += 1
            slot = b.slots[b.inner(x)]
            if slot is not None and slot[0] == x:
                result = LookupResult(found=True, payload=slot[1], evaluations=evaluations)
            else:
                result = LookupResult(found=False, evaluations=evaluations)
        self.stats.lookups += 1
        self.stats.hash_evaluations += evaluations
        self.stats.max_lookup_evaluations = max(self.stats.max_lookup_evaluations, evaluations)
        return result

    def __contains__(self, key) -> bool:
        return self.lookup(key).found

    def bin_sizes(self) -> List[int]:
        return [b.count for b in self.bins]

    def collisions(self) -> int:
        """Keys sharing an inner slot with another key; zero after a valid build"""
        total = 0
        for b in self.bins:
            if b.inner is None:
                continue
            occupied = sum(1 for s in b.slots if s is not None)
            total += b.count - occupied
        return total

    def items(self) -> Dict[int, Any]:
        return {s[0]: s[1] for b in self.bins for s in b.slots if s is not None}

    # --- serialization ---

    def to_bytes(self) -> bytes:
        """
        magic 'RLFK' | u8 version | u32 n | outer handle | per bin:
        u32 count, inner handle if count > 0, u32 slot count, slots as
        u8 tag, then for non-empty slots u16 length + key magnitude and
        for payload tags u32 length + payload bytes (int payloads signed)

        Raises:
            SerializationError: a payload that is not int, str or bytes
        """
        parts = [FKS_MAGIC, struct.pack('<BI', FKS_VERSION, self.n), self.outer.to_bytes()]
        for b in self.bins:
            parts.append(struct.pack('<I', b.count))
            if b.inner is not None:
                parts.append(b.inner.to_bytes())
            parts.append(struct.pack('<I', len(b.slots)))
            for slot in b.slots:
                if slot is None:
                    parts.append(struct.pack('<B', _EMPTY))
                    continue
                key, payload = slot
                tag, raw = _encode_payload(payload)
                key_raw = key.to_bytes(max(1, (key.bit_length() + 7) // 8), 'little')
                parts.append(struct.pack('<BH', tag, len(key_raw)))
                parts.append(key_raw)
                if tag != _KEY_ONLY:
                    parts.append(struct.pack('<I', len(raw)))
                    parts.append(raw)
        return b''.join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> 'FksTable':
        if data[:4] != FKS_MAGIC:
            raise SerializationError("bad FKS table magic")
        try:
            version, n = struct.unpack_from('<BI', data, 4)
            if version != FKS_VERSION:
                raise SerializationError(f"unsupported FKS version {version}")
            outer, pos = HashFunctionHandle.read_from(data, 9)
            bins = []
            for _ in range(outer.m):
                (count,) = struct.unpack_from('<I', data, pos)
                pos += 4
                inner = None
                if count:
                    inner, pos = HashFunctionHandle.read_from(data, pos)
                (slot_count,) = struct.unpack_from('<I', data, pos)
                pos += 4
                slots: List[Optional[Tuple[int, Any]]] = []
                for _ in range(slot_count):
                    (tag,) = struct.unpack_from('<B', data, pos)
                    pos += 1
                    if tag == _EMPTY:
                        slots.append(None)
                        continue
                    if tag not in _PAYLOAD_DECODERS:
                        raise SerializationError(f"unknown slot tag {tag}")
                    key, pos = _read_chunk(data, pos, '<H')
                    payload = None
                    if tag != _KEY_ONLY:
                        raw, pos = _read_chunk(data, pos, '<I')
                        payload = _PAYLOAD_DECODERS[tag](raw)
                    slots.append((int.from_bytes(key, 'little'), payload))
                bins.append(FksBin(count=count, inner=inner, slots=slots))
        except struct.error as e:
            raise SerializationError(f"truncated FKS table: {e}")
        except UnicodeDecodeError as e:
            raise SerializationError(f"bad string payload in FKS table: {e}")
        if pos != len(data):
            raise SerializationError(f"{len(data) - pos} trailing bytes after FKS table")
        return cls(outer, bins, n)


def _encode_payload(payload: Any) -> Tuple[int, bytes]:
    if payload is None:
        return _KEY_ONLY, b''
    if isinstance(payload, bool):
        raise SerializationError("bool payloads are not serializable; store an int")
    if isinstance(payload, int):
        return _KEY_INT, payload.to_bytes((payload.bit_length() + 8) // 8, 'little', signed=True)
    if isinstance(payload, str):
        return _KEY_STR, payload.encode('utf-8')
    if isinstance(payload, (bytes, bytearray)):
        return _KEY_BYTES, bytes(payload)
    raise SerializationError(f"cannot serialize payload of type {type(payload).__name__}")


def _read_chunk(data: bytes, pos: int, length_format: str) -> Tuple[bytes, int]:
    (length,) = struct.unpack_from(length_format, data, pos)
    pos += struct.calcsize(length_format)
    if pos + length > len(data):
        raise SerializationError(f"truncated FKS table: chunk of {length} bytes at offset {pos}")
    return data[pos:pos + length], pos + length


_PAYLOAD_DECODERS = {
    _KEY_ONLY: lambda raw: None,
    _KEY_INT: lambda raw: int.from_bytes(raw, 'little', signed=True),
    _KEY_STR: lambda raw: raw.decode('utf-8'),
    _KEY_BYTES: bytes,
}
