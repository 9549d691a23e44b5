"""
Skip List - layered sorted lists with geometric tower heights

Each element's tower grows one level at a time with probability p,
drawing one Bernoulli trial per level through the RandomSource. Searches
count every forward link they follow.
"""
import math
from dataclasses import dataclass
from typing import Any, List, Optional

from .errors import ConfigurationMismatch, DuplicateKeyError, InvalidParameterError, MissingKeyError
from .randsrc import RandomSource, bernoulli

HEIGHT_SLACK = 16
DEFAULT_N_MAX = 1 << 20


class _Node:
    __slots__ = ('key', 'value', 'forward')

    def __init__(self, key, value, height: int):
        self.key = key
        self.value = value
        self.forward: List[Optional['_Node']] = [None] * height


@dataclass
class SkipListStats:
    links_traversed: int = 0
    searches: int = 0
    link_count: int = 0


@dataclass(frozen=True)
class SkipSearchResult:
    found: bool
    links: int
    value: Any = None


@dataclass
class SkipSplitResult:
    left: 'SkipList'
    right: 'SkipList'
    links_mutated: int


def max_height_for(p: float, n_max: int) -> int:
    """1 + ceil(log_{1/p} n_max) + slack; a single level when p = 0"""
    if p == 0:
        return 1
    return 1 + math.ceil(math.log(max(n_max, 2)) / math.log(1 / p)) + HEIGHT_SLACK


class SkipList:
    """
    Sorted dictionary over a skip list

    Args:
        p: promotion probability in [0, 1), fixed for the list's lifetime
        n_max: sizing hint for the height cap
    """

    def __init__(self, p: float = 0.5, n_max: int = DEFAULT_N_MAX):
        if not 0 <= p < 1:
            raise InvalidParameterError(f"p must lie in [0, 1), got {p}")
        self.p = p
        self.n_max = n_max
        self.max_height = max_height_for(p, n_max)
        self.head = _Node(None, None, self.max_height)
        self.level = 1
        self.size = 0
        self.stats = SkipListStats()

    def __len__(self) -> int:
        return self.size

    def __contains__(self, key) -> bool:
        nxt = self._find_prev(key)[0].forward[0]
        return nxt is not None and nxt.key == key

    def _random_height(self, src: RandomSource) -> int:
        height = 1
        while height < self.max_height and bernoulli(src, self.p):
            height += 1
        return height

    def _find_prev(self, key) -> List[_Node]:
        update = [self.head] * self.max_height
        node = self.head
        for i in reversed(range(self.level)):
            while node.forward[i] is not None and node.forward[i].key < key:
                node = node.forward[i]
            update[i] = node
        return update

    def insert(self, key, src: RandomSource, value: Any = None) -> int:
        """Insert an absent key; returns the new tower's height"""
        update = self._find_prev(key)
        nxt = update[0].forward[0]
        if nxt is not None and nxt.key == key:
            raise DuplicateKeyError(f"key {key!r} already present")
        height = self._random_height(src)
        if height > self.level:
            self.level = height
        node = _Node(key, value, height)
        for i in range(height):
            node.forward[i] = update[i].forward[i]
            update[i].forward[i] = node
        self.size += 1
        self.stats.link_count += height
        return height

    def search(self, key) -> SkipSearchResult:
        """Top-down search; every forward link followed is counted"""
        links = 0
        node = self.head
        for i in reversed(range(self.level)):
            while node.forward[i] is not None and node.forward[i].key < key:
                node = node.forward[i]
                links += 1
        candidate = node.forward[0]
        if candidate is not None:
            links += 1
        self.stats.searches += 1
        self.stats.links_traversed += links
        if candidate is not None and candidate.key == key:
            return SkipSearchResult(found=True, links=links, value=candidate.value)
        return SkipSearchResult(found=False, links=links)

    def get(self, key, default=None):
        result = self.search(key)
        return result.value if result.found else default

    def delete(self, key) -> None:
        update = self._find_prev(key)
        node = update[0].forward[0]
        if node is None or node.key != key:
            raise MissingKeyError(f"key {key!r} not present")
        for i in range(len(node.forward)):
            update[i].forward[i] = node.forward[i]
        self.size -= 1
        self.stats.link_count -= len(node.forward)
        self._shrink_level()

    def _shrink_level(self) -> None:
        while self.level > 1 and self.head.forward[self.level - 1] is None:
            self.level -= 1

    def split(self, pivot) -> SkipSplitResult:
        """
        Cut every level at pivot

        This list keeps the keys < pivot; a new list receives keys >= pivot.
        Only pointers crossing the boundary change: on each crossing level
        one link is cut and one head link is set.
        """
        update = self._find_prev(pivot)
        right = SkipList(self.p, self.n_max)
        mutated = 0
        for i in range(self.level):
            crossing = update[i].forward[i]
            if crossing is None:
                continue
            right.head.forward[i] = crossing
            update[i].forward[i] = None
            mutated += 2
        right.level = self.level
        right._shrink_level()
        right.size, right.stats.link_count = _tally(right.head)
        self.size -= right.size
        self.stats.link_count -= right.stats.link_count
        self._shrink_level()
        return SkipSplitResult(left=self, right=right, links_mutated=mutated)

    @classmethod
    def merge(cls, left: 'SkipList', right: 'SkipList') -> 'SkipList':
        """
        Concatenate right onto left; returns left, right is emptied

        Raises:
            ConfigurationMismatch: different promotion probabilities
            InvalidParameterError: key ranges overlap
        """
        if left.p != right.p:
            raise ConfigurationMismatch(f"cannot merge skip lists with p={left.p} and p={right.p}")
        right_first = right.head.forward[0]
        if right_first is not None and left.size and not left.last_key() < right_first.key:
            raise InvalidParameterError("merge needs every left key < every right key")
        if right.max_height > left.max_height:
            left.head.forward.extend([None] * (right.max_height - left.max_height))
            left.max_height = right.max_height
            left.n_max = right.n_max
        tails = left._find_tails()
        for i in range(right.level):
            if right.head.forward[i] is not None:
                tails[i].forward[i] = right.head.forward[i]
        left.level = max(left.level, right.level)
        left.size += right.size
        left.stats.link_count += right.stats.link_count
        right.head = _Node(None, None, right.max_height)
        right.level, right.size, right.stats.link_count = 1, 0, 0
        return left

    def _find_tails(self) -> List[_Node]:
        tails = [self.head] * self.max_height
        node = self.head
        for i in reversed(range(self.level)):
            while node.forward[i] is not None:
                node = node.forward[i]
            tails[i] = node
        return tails

    def last_key(self):
        return self._find_tails()[0].key

    # --- inspection ---

    def keys(self) -> List:
        out = []
        node = self.head.forward[0]
        while node is not None:
            out.append(node.key)
            node = node.forward[0]
        return out

    def tower_heights(self) -> List[int]:
        out = []
        node = self.head.forward[0]
        while node is not None:
            out.append(len(node.forward))
            node = node.forward[0]
        return out

    def dump(self) -> str:
        """One line per level, top level first"""
        lines = []
        for i in reversed(range(self.level)):
            keys = []
            node = self.head.forward[i]
            while node is not None:
                keys.append(repr(node.key))
                node = node.forward[i]
            lines.append(f"L{i}: " + ' '.join(keys))
        return '\n'.join(lines)

    def check_invariants(self) -> bool:
        """Every level sorted, each a subsequence of the level below, heights >= 1"""
        below = None
        for i in range(self.max_height):
            level_keys = []
            node = self.head.forward[i]
            while node is not None:
                if len(node.forward) <= i:
                    return False
                level_keys.append(node.key)
                node = node.forward[i]
            if any(not a < b for a, b in zip(level_keys, level_keys[1:])):
                return False
            if i >= self.level and level_keys:
                return False
            if below is not None and not set(level_keys) <= below:
                return False
            below = set(level_keys)
            if i == 0 and len(level_keys) != self.size:
                return False
        return all(h >= 1 for h in self.tower_heights())


def _tally(head: _Node):
    size, links = 0, 0
    node = head.forward[0]
    while node is not None:
        size += 1
        links += len(node.forward)
        node = node.forward[0]
    return size, links
