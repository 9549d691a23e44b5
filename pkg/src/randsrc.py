"""
Random Source - seeded bit stream and the samplers built on it

Every randomized structure in randlab draws its randomness through a
RandomSource, so a (seed, call sequence) pair replays exactly. The source
counts every bit it hands out; samplers are written so that count means
something (e.g. rejection sampling vs range coding for a die roll).
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from .errors import BitsExhausted, InvalidParameterError

T = TypeVar('T')

WORD_BITS = 64
DEFAULT_BLOCK_WORDS = 256


def parse_seed(text) -> int:
    """
    Parse a seed given as decimal or 0x-hex

    Args:
        text: str such as "1337" or "0x5EED", or an int

    Returns:
        Seed as a nonnegative int below 2^64
    """
    if isinstance(text, int):
        value = text
    else:
        cleaned = str(text).strip().replace('_', '')
        try:
            value = int(cleaned, 16) if cleaned.lower().startswith('0x') else int(cleaned, 10)
        except ValueError:
            raise InvalidParameterError(f"Seed must be decimal or 0x-hex, got: {text!r}")
    if not 0 <= value < (1 << 64):
        raise InvalidParameterError(f"Seed must fit in 64 unsigned bits, got: {value}")
    return value


class RandomSource:
    """
    Single-owner stream of unbiased bits

    Words come from numpy's counter-based Philox generator keyed by
    (seed, stream path); bits are handed out most-significant first from a
    buffer. Not thread-safe: give each thread its own `fork()`.
    """

    def __init__(self, seed: int = 0, stream: Tuple[int, ...] = (),
                 block_words: int = DEFAULT_BLOCK_WORDS):
        self.seed = parse_seed(seed)
        self.stream = tuple(int(s) for s in stream)
        self.bits_consumed = 0
        self._block_words = max(1, int(block_words))
        seed_seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        self._bitgen = np.random.Philox(seed_seq)
        self._words: List[int] = []
        self._word_pos = 0
        self._buffer = 0
        self._buffered = 0

    def __repr__(self) -> str:
        return (f"RandomSource(seed={self.seed:#x}, stream={self.stream}, "
                f"bits_consumed={self.bits_consumed})")

    def _next_word(self) -> int:
        if self._word_pos >= len(self._words):
            self._words = self._bitgen.random_raw(self._block_words).tolist()
            self._word_pos = 0
        word = self._words[self._word_pos]
        self._word_pos += 1
        return word

    def bits(self, k: int) -> int:
        """Draw k bits as an int in [0, 2^k); k=0 draws nothing and returns 0"""
        if k <= 0:
            return 0
        while self._buffered < k:
            self._buffer = (self._buffer << WORD_BITS) | self._next_word()
            self._buffered += WORD_BITS
        self._buffered -= k
        out = self._buffer >> self._buffered
        self._buffer &= (1 << self._buffered) - 1
        self.bits_consumed += k
        return out

    def bit(self) -> int:
        return self.bits(1)

    def word(self, width: int = WORD_BITS) -> int:
        return self.bits(width)

    def fork(self, stream_id: int) -> 'RandomSource':
        """Child source on its own stream, derived from (seed, stream path + stream_id)"""
        return RandomSource(self.seed, self.stream + (int(stream_id),), self._block_words)

    # Convenience wrappers so callers can write src.uniform_below(n)
    def uniform_below(self, n: int, method: str = 'rejection') -> int:
        return uniform_below(self, n, method)

    def bernoulli(self, p) -> bool:
        return bernoulli(self, p)


class ScriptedSource(RandomSource):
    """RandomSource fed from an explicit bit list; used to enumerate sampler outcomes"""

    def __init__(self, bits: Iterable[int]):
        super().__init__(seed=0)
        self._script = [1 if b else 0 for b in bits]
        self._cursor = 0

    def bits(self, k: int) -> int:
        if k <= 0:
            return 0
        if self._cursor + k > len(self._script):
            raise BitsExhausted(f"script of {len(self._script)} bits exhausted at bit {self._cursor}")
        out = 0
        for b in self._script[self._cursor:self._cursor + k]:
            out = (out << 1) | b
        self._cursor += k
        self.bits_consumed += k
        return out

    def fork(self, stream_id: int) -> 'RandomSource':
        raise BitsExhausted("scripted sources cannot fork")


@dataclass(frozen=True)
class GeometricSample:
    """Number of Bernoulli(p) trials up to and including the first success"""
    value: int
    p: float


def uniform_below(src: RandomSource, n: int, method: str = 'rejection') -> int:
    """
    Uniform integer in [0, n)

    Args:
        src: bit source
        n: number of outcomes, n >= 1
        method: 'rejection' (draw ceil(lg n) bits until the value is < n) or
            'range_coding' (refine a dyadic interval until it nests inside
            one of the n equal cells)

    Returns:
        Integer in [0, n); n=1 consumes no bits
    """
    if n < 1:
        raise InvalidParameterError(f"uniform_below needs n >= 1, got {n}")
    if n == 1:
        return 0
    if method == 'rejection':
        width = (n - 1).bit_length()
        while True:
            s = src.bits(width)
            if s < n:
                return s
    if method == 'range_coding':
        # interval [x / 2^k, (x + 1) / 2^k), exact integer arithmetic
        x, k = 0, 0
        while True:
            s = (x * n) >> k
            if (x + 1) * n <= (s + 1) << k:
                return s
            x = (x << 1) | src.bit()
            k += 1
    raise InvalidParameterError(f"Unknown method: {method}")


def bernoulli(src: RandomSource, p) -> bool:
    """
    True with probability exactly p

    Compares a lazily drawn uniform U = 0.b1b2... with the binary
    expansion of p and stops at the first differing bit (2 bits expected).
    """
    if p <= 0:
        return False
    if p >= 1:
        return True
    num, den = Fraction(p).as_integer_ratio()
    while True:
        num <<= 1
        p_bit = 1 if num >= den else 0
        if p_bit:
            num -= den
        u_bit = src.bit()
        if u_bit != p_bit:
            return u_bit < p_bit
        if num == 0:
            # remaining expansion of p is all zeros, so U >= p
            return False


def geometric(src: RandomSource, p) -> GeometricSample:
    """Trials until first success with success probability p, 0 < p <= 1"""
    if not 0 < p <= 1:
        raise InvalidParameterError(f"geometric needs 0 < p <= 1, got {p}")
    value = 1
    while not bernoulli(src, p):
        value += 1
    return GeometricSample(value=value, p=float(p))


def shuffle(src: RandomSource, items: Sequence[T]) -> List[T]:
    """Uniformly random permutation (Fisher-Yates) as a new list"""
    result = list(items)
    for i in range(len(result) - 1, 0, -1):
        j = uniform_below(src, i + 1)
        result[i], result[j] = result[j], result[i]
    return result


def uniform_float(src: RandomSource) -> float:
    """Float in [0, 1) with 53 random bits"""
    return src.bits(53) / float(1 << 53)


def sample_discrete(src: RandomSource, cumulative: np.ndarray) -> int:
    """Index drawn with probabilities given by a normalized cumulative array"""
    u = uniform_float(src)
    return int(np.searchsorted(cumulative, u, side='right'))


def outcome_masses(sampler, max_depth: int = 20) -> dict:
    """
    Exact probability mass of each sampler outcome over all bit strings

    Drives `sampler(src)` with every bit prefix up to `max_depth` bits,
    depth first, and weights each terminating run by 2^-bits_used. Runs
    still undecided at `max_depth` are left out, so masses sum to <= 1.

    Returns:
        Dict outcome -> Fraction
    """
    masses: dict = {}
    stack: List[List[int]] = [[]]
    while stack:
        prefix = stack.pop()
        src = ScriptedSource(prefix)
        try:
            outcome = sampler(src)
        except BitsExhausted:
            if len(prefix) < max_depth:
                stack.append(prefix + [1])
                stack.append(prefix + [0])
            continue
        weight = Fraction(1, 1 << src.bits_consumed)
        masses[outcome] = masses.get(outcome, Fraction(0)) + weight
    return masses
