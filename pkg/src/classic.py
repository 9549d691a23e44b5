"""
Classic randomized algorithms - QuickSort, QuickSelect, Karger min-cut

Each routine counts the work the textbook analysis counts: element-vs-
pivot comparisons for the sorting/selection pair, and the crossing edges
of the final two super-vertices for contraction.
"""
import math
from collections import deque
from dataclasses import dataclass
from typing import Any, FrozenSet, List, Optional, Sequence, Tuple

from .errors import DisconnectedGraphError, DuplicateKeyError, InvalidParameterError
from .randsrc import RandomSource, uniform_below


@dataclass
class ComparisonTrace:
    """Result of an instrumented sort or selection"""
    n: int
    comparisons: int
    output: Any


@dataclass(frozen=True)
class MultiGraph:
    """Undirected multigraph on vertices 0..vertex_count-1, no self-loops"""
    vertex_count: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise InvalidParameterError(f"vertex_count must be >= 1, got {self.vertex_count}")
        for u, v in self.edges:
            if u == v:
                raise InvalidParameterError(f"self-loop on vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InvalidParameterError(
                    f"edge ({u}, {v}) outside [0, {self.vertex_count})")

    @classmethod
    def from_edges(cls, vertex_count: int, edges) -> 'MultiGraph':
        return cls(vertex_count, tuple((int(u), int(v)) for u, v in edges))

    def is_connected(self) -> bool:
        adjacency: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.vertex_count

    def crossing_edges(self, side: FrozenSet[int]) -> int:
        return sum(1 for u, v in self.edges if (u in side) != (v in side))


@dataclass(frozen=True)
class CutResult:
    partition: Tuple[FrozenSet[int], FrozenSet[int]]
    cut_size: int


def complete_graph(n: int) -> MultiGraph:
    return MultiGraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> MultiGraph:
    if n < 3:
        raise InvalidParameterError(f"a cycle needs n >= 3, got {n}")
    return MultiGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def cliques_with_bridge(k: int) -> MultiGraph:
    """Two k-cliques joined by a single edge; the bridge is the unique min cut for k >= 3"""
    left = [(u, v) for u in range(k) for v in range(u + 1, k)]
    right = [(u + k, v + k) for u, v in left]
    return MultiGraph.from_edges(2 * k, left + right + [(k - 1, k)])


def _check_distinct(items: Sequence) -> None:
    if len(set(items)) != len(items):
        raise DuplicateKeyError("keys must be distinct")


def quicksort(src: RandomSource, items: Sequence) -> ComparisonTrace:
    """
    Randomized QuickSort with a uniform pivot per sublist

    Splitting a sublist of size s costs exactly s - 1 comparisons.

    Returns:
        ComparisonTrace with the sorted list as output
    """
    items = list(items)
    _check_distinct(items)
    counter = [0]

    def sort(sub: List) -> List:
        if len(sub) <= 1:
            return sub
        pivot = sub[uniform_below(src, len(sub))]
        counter[0] += len(sub) - 1
        smaller = [x for x in sub if x < pivot]
        larger = [x for x in sub if pivot < x]
        return sort(smaller) + [pivot] + sort(larger)

    output = sort(items)
    return ComparisonTrace(n=len(items), comparisons=counter[0], output=output)


def quicksort_comparisons(src: RandomSource, n: int) -> int:
    """
    Comparison count of randomized QuickSort on n distinct keys, without the keys

    Only sublist sizes are tracked: a pivot of rank r splits size s into
    r and s - 1 - r. Pivot ranks are drawn exactly as uniform_below() draws
    them, so the count matches quicksort() on sorted input for the same
    source state.
    """
    if n < 0:
        raise InvalidParameterError(f"n must be >= 0, got {n}")
    bits = src.bits
    comparisons = 0
    pending = [n]
    while pending:
        s = pending.pop()
        if s <= 1:
            continue
        comparisons += s - 1
        width = (s - 1).bit_length()
        r = bits(width)
        while r >= s:
            r = bits(width)
        # keys above the pivot are pushed first so the pile below splits next, as in quicksort()
        pending.append(s - 1 - r)
        pending.append(r)
    return comparisons


def quickselect(src: RandomSource, items: Sequence, k: int) -> ComparisonTrace:
    """
    Hoare's FIND: k-th smallest element (1-based) of distinct keys

    Keeps only the pile holding the target; a pivot of rank k is returned
    at once.
    """
    items = list(items)
    n = len(items)
    if not 1 <= k <= n:
        raise InvalidParameterError(f"rank k must lie in [1, {n}], got {k}")
    _check_distinct(items)
    comparisons = 0
    while True:
        pivot = items[uniform_below(src, len(items))]
        comparisons += len(items) - 1
        smaller = [x for x in items if x < pivot]
        rank = len(smaller) + 1
        if k == rank:
            return ComparisonTrace(n=n, comparisons=comparisons, output=pivot)
        if k < rank:
            items = smaller
        else:
            items = [x for x in items if pivot < x]
            k -= rank


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def karger_contract(src: RandomSource, g: MultiGraph) -> CutResult:
    """
    One run of random edge contraction down to two super-vertices

    Edges that became self-loops are dropped lazily when drawn, so each
    contraction picks uniformly among the surviving edges.
    """
    if g.vertex_count < 2:
        raise InvalidParameterError("contraction needs at least 2 vertices")
    if not g.is_connected():
        raise DisconnectedGraphError(f"graph with {g.vertex_count} vertices is disconnected")
    uf = _UnionFind(g.vertex_count)
    edges = list(g.edges)
    components = g.vertex_count
    while components > 2:
        i = uniform_below(src, len(edges))
        u, v = edges[i]
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            edges[i] = edges[-1]
            edges.pop()
            continue
        uf.union(ru, rv)
        components -= 1
    root = uf.find(0)
    side = frozenset(x for x in range(g.vertex_count) if uf.find(x) == root)
    other = frozenset(range(g.vertex_count)) - side
    return CutResult(partition=(side, other), cut_size=g.crossing_edges(side))


def karger_amplified(src: RandomSource, g: MultiGraph, repetitions: int) -> CutResult:
    """Smallest cut over independent contraction runs"""
    if repetitions < 1:
        raise InvalidParameterError(f"repetitions must be >= 1, got {repetitions}")
    best: Optional[CutResult] = None
    for _ in range(repetitions):
        cut = karger_contract(src, g)
        if best is None or cut.cut_size < best.cut_size:
            best = cut
    return best


def karger_repetitions(n: int, failure_delta: float) -> int:
    """Runs needed so a fixed min cut is missed with probability <= failure_delta"""
    if n < 2 or not 0 < failure_delta < 1:
        raise InvalidParameterError(f"need n >= 2 and 0 < delta < 1, got n={n}, delta={failure_delta}")
    return max(1, math.ceil(math.comb(n, 2) * math.log(1 / failure_delta)))
