"""
Count-Min Sketch - d x w counters over a stream of (index, count) updates

Each row j adds the update to cell h_j(index). Nonnegative streams answer
point queries by the row minimum; general (signed) streams use the lower
median. Heavy hitters are tracked with a lazily pruned min-heap.
"""
import heapq
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .errors import ConfigurationMismatch, InvalidParameterError, ModeError
from .hashfam import HashFunctionHandle, encode_key, sample_mod_p
from .randsrc import RandomSource, sample_discrete

MODES = ('nonnegative', 'general')
DEFAULT_KEY_BITS = 64


@dataclass(frozen=True)
class CmsParams:
    epsilon: float
    delta: float
    width: int
    depth: int

    @classmethod
    def from_error(cls, epsilon: float, delta: float) -> 'CmsParams':
        """w = ceil(e / epsilon), d = ceil(ln(1 / delta))"""
        if epsilon <= 0:
            raise InvalidParameterError(f"epsilon must be > 0, got {epsilon}")
        if not 0 < delta < 1:
            raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
        width = max(1, math.ceil(math.e / epsilon))
        depth = max(1, math.ceil(math.log(1 / delta)))
        return cls(epsilon=epsilon, delta=delta, width=width, depth=depth)


class CountMinSketch:
    """
    Count-min sketch with 2-universal row hashes

    Args:
        params: dimensions from CmsParams.from_error
        src: randomness for the d row hashes
        mode: 'nonnegative' (min queries, exact l1) or 'general' (signed updates)
    """

    def __init__(self, params: CmsParams, src: RandomSource, mode: str = 'nonnegative',
                 key_bits: int = DEFAULT_KEY_BITS):
        if mode not in MODES:
            raise InvalidParameterError(f"Unknown mode: {mode}")
        self.params = params
        self.mode = mode
        self.key_bits = key_bits
        universe_max = (1 << key_bits) - 1
        self.rows: List[HashFunctionHandle] = [
            sample_mod_p(src, universe_max, params.width) for _ in range(params.depth)
        ]
        self.cells = np.zeros((params.depth, params.width), dtype=np.int64)
        # exact ||a||_1 in nonnegative mode, sum of |c_t| otherwise
        self.l1 = 0
        self.updates = 0

    def empty_like(self) -> 'CountMinSketch':
        """Fresh sketch sharing params and row hashes (inner products need both)"""
        other = self.__class__.__new__(self.__class__)
        other.params = self.params
        other.mode = self.mode
        other.key_bits = self.key_bits
        other.rows = list(self.rows)
        other.cells = np.zeros_like(self.cells)
        other.l1 = 0
        other.updates = 0
        return other

    def _columns(self, index) -> List[int]:
        x = encode_key(index)
        return [h(x) for h in self.rows]

    def update(self, index, count: int = 1) -> None:
        if count < 0 and self.mode == 'nonnegative':
            raise ModeError(f"negative count {count} in nonnegative mode")
        cols = self._columns(index)
        self.cells[np.arange(self.params.depth), cols] += count
        self.l1 += abs(count)
        self.updates += 1

    def point_query_min(self, index) -> int:
        """Row minimum; never below the true count in nonnegative mode"""
        if self.mode != 'nonnegative':
            raise ModeError("point_query_min needs nonnegative mode; use point_query_median")
        cols = self._columns(index)
        return int(self.cells[np.arange(self.params.depth), cols].min())

    def point_query_median(self, index) -> int:
        """Lower median of the d row cells"""
        cols = self._columns(index)
        values = np.sort(self.cells[np.arange(self.params.depth), cols])
        return int(values[(self.params.depth - 1) // 2])

    def inner_product(self, other: 'CountMinSketch') -> int:
        """min over rows of the row dot products; never below the true a . b"""
        if self.mode != 'nonnegative' or other.mode != 'nonnegative':
            raise ModeError("inner_product needs nonnegative sketches")
        if self.params != other.params or self.rows != other.rows:
            raise ConfigurationMismatch("inner_product needs identical params and row hashes")
        row_dots = np.einsum('ij,ij->i', self.cells, other.cells)
        return int(row_dots.min())

    def row_sums(self) -> np.ndarray:
        return self.cells.sum(axis=1)


class HeavyHitterTracker:
    """
    Indices whose estimate is at least phi * ||a||_1

    Heap entries carry the estimate seen at insertion; entries superseded
    by a later estimate are skipped when popped.
    """

    def __init__(self, phi: float):
        if not 0 < phi <= 1:
            raise InvalidParameterError(f"phi must lie in (0, 1], got {phi}")
        self.phi = phi
        self._heap: List[Tuple[int, int]] = []
        self._current: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._current)

    def __contains__(self, index) -> bool:
        return encode_key(index) in self._current

    def heavy_update(self, sketch: CountMinSketch, index, count: int = 1) -> None:
        """Apply the update to the sketch, then admit index and evict stale entries"""
        sketch.update(index, count)
        key = encode_key(index)
        estimate = sketch.point_query_min(index)
        threshold = self.phi * sketch.l1
        if estimate >= threshold:
            self._current[key] = estimate
            heapq.heappush(self._heap, (estimate, key))
        while self._heap and self._heap[0][0] < threshold:
            stored, stale = heapq.heappop(self._heap)
            if self._current.get(stale) == stored:
                del self._current[stale]

    def heavy_hitters(self) -> List[Tuple[int, int]]:
        """(index, estimate) pairs, largest estimate first"""
        return sorted(self._current.items(), key=lambda kv: (-kv[1], kv[0]))


def heavy_update(tracker: HeavyHitterTracker, sketch: CountMinSketch, index, count: int = 1) -> None:
    tracker.heavy_update(sketch, index, count)


def zipf_cumulative(n_keys: int, s: float) -> np.ndarray:
    """Normalized cumulative weights of 1/i^s over keys 1..n_keys"""
    weights = 1.0 / np.power(np.arange(1, n_keys + 1, dtype=np.float64), s)
    cumulative = np.cumsum(weights)
    return cumulative / cumulative[-1]


def zipf_stream(src: RandomSource, n_keys: int, s: float, length: int) -> List[int]:
    """Stream of key indices in [0, n_keys), index i drawn with weight 1/(i+1)^s"""
    cumulative = zipf_cumulative(n_keys, s)
    return [min(sample_discrete(src, cumulative), n_keys - 1) for _ in range(length)]
