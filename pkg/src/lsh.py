"""
Locality-Sensitive Hashing - bit sampling for Hamming space

A single sampled coordinate collides for two points at distance r with
probability 1 - r/d. PlebIndex concatenates k samples into g_j and keeps
ell tables per replica; queries examine at most 2*ell colliding points
per replica and accept the first within r2. NnsLadder runs a binary
search over a geometric ladder of PLEB indices for approximate nearest
neighbors. l1_embed maps [0,1]^d vectors to unary bit strings.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameterError
from .hashfam import HashFunctionHandle, sample_mod_p
from .randsrc import RandomSource, uniform_below

# Conservative per-replica failure bound: 1/e for missing the near point
# plus 1/2 for the candidate budget being eaten by far points
PER_REPLICA_FAILURE = 1 / math.e + 0.5
BUCKET_FACTOR = 4


def as_bit_matrix(points) -> np.ndarray:
    """2-D uint8 array of 0/1 from a sequence of bit vectors"""
    arr = np.asarray(points, dtype=np.uint8)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InvalidParameterError(f"points must form a 2-D bit matrix, got shape {arr.shape}")
    if arr.size and arr.max() > 1:
        raise InvalidParameterError("bit vectors may only contain 0 and 1")
    return arr


def hamming_distance(a: np.ndarray, b: np.ndarray) -> int:
    if len(a) != len(b):
        raise InvalidParameterError(f"length mismatch: {len(a)} vs {len(b)}")
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def pairwise_hamming(points: np.ndarray) -> np.ndarray:
    """All pairwise distances via two matrix products"""
    x = points.astype(np.float64)
    dist = x @ (1.0 - x).T
    return np.rint(dist + dist.T).astype(np.int64)


def diameter(points: np.ndarray) -> int:
    if len(points) < 2:
        return 0
    return int(pairwise_hamming(points).max())


def linear_scan_nearest(points: np.ndarray, q: np.ndarray) -> Tuple[int, int]:
    """Exact nearest neighbor (lowest index on ties) and its distance"""
    dists = np.count_nonzero(points != np.asarray(q, dtype=np.uint8), axis=1)
    best = int(np.argmin(dists))
    return best, int(dists[best])


def single_bit_collision(src: RandomSource, a: np.ndarray, b: np.ndarray) -> bool:
    """Draw h(p) = p[i] for a uniform coordinate i and report h(a) == h(b)"""
    i = uniform_below(src, len(a))
    return int(a[i]) == int(b[i])


def pad_dimension(d: int, r: float, n: int) -> int:
    """Junk zero bits to append: ceil(d ln n) when r/d >= 1/ln n, else 0"""
    if n >= 2 and r * math.log(n) >= d:
        return math.ceil(d * math.log(n))
    return 0


def l1_embed(v: Sequence[float], resolution: int) -> np.ndarray:
    """
    Unary embedding of a [0,1]^d vector

    Coordinate x becomes `resolution` bits, bit j set iff j/resolution < x.
    """
    if resolution < 1:
        raise InvalidParameterError(f"resolution must be >= 1, got {resolution}")
    x = np.asarray(v, dtype=np.float64).ravel()
    if x.size and (x.min() < 0 or x.max() > 1):
        raise InvalidParameterError("l1_embed needs coordinates in [0, 1]")
    thresholds = np.arange(resolution, dtype=np.float64) / resolution
    return (thresholds[None, :] < x[:, None]).astype(np.uint8).ravel()


@dataclass(frozen=True)
class LshParams:
    dim: int
    padded_dim: int
    n: int
    r1: float
    r2: float
    p1: float
    p2: float
    k: int
    rho: float
    ell: int
    replicas: int
    delta: float

    @classmethod
    def derive(cls, n: int, dim: int, r1: float, r2: float, delta: float,
               replicas: Optional[int] = None) -> 'LshParams':
        """
        k = ceil(log_{1/p2} n), rho = ln(1/p1) / ln(1/p2), ell = ceil(n^rho)

        Radii are measured in the unpadded space; p1, p2 use the padded width.
        """
        if not 0 <= r1 < r2 <= dim:
            raise InvalidParameterError(f"need 0 <= r1 < r2 <= d, got r1={r1}, r2={r2}, d={dim}")
        if not 0 < delta < 1:
            raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
        padded = dim + pad_dimension(dim, r1, n)
        p1 = 1 - r1 / padded
        p2 = 1 - r2 / padded
        n_eff = max(n, 2)
        if p2 <= 0:
            k, rho = 1, 0.0
        else:
            k = max(1, math.ceil(math.log(n_eff) / math.log(1 / p2)))
            rho = math.log(1 / p1) / math.log(1 / p2)
        ell = max(1, math.ceil(n ** rho))
        if replicas is None:
            replicas = max(1, math.ceil(math.log(1 / delta) / math.log(1 / PER_REPLICA_FAILURE)))
        return cls(dim=dim, padded_dim=padded, n=n, r1=r1, r2=r2, p1=p1, p2=p2, k=k,
                   rho=rho, ell=ell, replicas=replicas, delta=delta)


@dataclass
class _Table:
    positions: np.ndarray
    reducer: HashFunctionHandle
    buckets: Dict[int, List[Tuple[bytes, int]]] = field(default_factory=dict)

    def signature(self, rows: np.ndarray) -> List[bytes]:
        # junk coordinates are constant zero, so they never separate points
        gathered = rows[:, self.positions]
        packed = np.packbits(gathered, axis=1)
        return [r.tobytes() for r in packed]

    def bucket_of(self, sig: bytes) -> int:
        return self.reducer(int.from_bytes(sig, 'little'))


@dataclass(frozen=True)
class PlebAnswer:
    point_id: Optional[int]
    distance: Optional[int]
    candidates: int
    replica: Optional[int] = None


class PlebIndex:
    """(r1, r2)-PLEB index: replicated sets of ell bit-sampling tables"""

    def __init__(self, points: np.ndarray, params: LshParams, replicas: List[List[_Table]]):
        self.points = points
        self.params = params
        self.replicas = replicas
        self.distance_computations = 0
        self.max_candidates = 0

    def query_replica(self, q, replica: int) -> PlebAnswer:
        """Scan g_1(q)..g_ell(q) of one replica, examining at most 2*ell colliding points"""
        q = np.asarray(q, dtype=np.uint8).reshape(1, -1)
        if q.shape[1] != self.params.dim:
            raise InvalidParameterError(f"query length {q.shape[1]} != d = {self.params.dim}")
        budget = 2 * self.params.ell
        examined = 0
        answer = PlebAnswer(point_id=None, distance=None, candidates=0, replica=replica)
        for table in self.replicas[replica]:
            sig = table.signature(q)[0]
            for stored_sig, pid in table.buckets.get(table.bucket_of(sig), ()):
                if stored_sig != sig:
                    continue
                if examined >= budget:
                    break
                examined += 1
                dist = hamming_distance(self.points[pid], q[0])
                if dist <= self.params.r2:
                    answer = PlebAnswer(point_id=pid, distance=dist, candidates=examined, replica=replica)
                    break
            if answer.point_id is not None or examined >= budget:
                break
        if answer.point_id is None:
            answer = PlebAnswer(point_id=None, distance=None, candidates=examined, replica=replica)
        self.distance_computations += examined
        self.max_candidates = max(self.max_candidates, examined)
        return answer

    def query(self, q) -> PlebAnswer:
        """First point within r2 found across replicas, or an empty answer"""
        total = 0
        for r in range(len(self.replicas)):
            answer = self.query_replica(q, r)
            total += answer.candidates
            if answer.point_id is not None:
                return PlebAnswer(answer.point_id, answer.distance, total, r)
        return PlebAnswer(point_id=None, distance=None, candidates=total)


def build_pleb(src: RandomSource, points, r1: float, r2: float, delta: float,
               replicas: Optional[int] = None) -> PlebIndex:
    """
    Build the amplified (r1, r2)-PLEB structure

    Args:
        src: randomness for coordinate samples and bucket reducers
        points: n x d bit matrix
        r1, r2: near and far radii, r1 < r2 <= d
        delta: overall failure probability, sets the replica count
        replicas: explicit replica count overriding delta
    """
    pts = as_bit_matrix(points)
    n, d = pts.shape
    if n == 0:
        raise InvalidParameterError("cannot index an empty dataset")
    params = LshParams.derive(n, d, r1, r2, delta, replicas)
    sig_bytes = (params.k + 7) // 8
    all_replicas = []
    for _ in range(params.replicas):
        tables = []
        for _ in range(params.ell):
            sampled = [uniform_below(src, params.padded_dim) for _ in range(params.k)]
            real = np.array([pos for pos in sampled if pos < d], dtype=np.intp)
            reducer = sample_mod_p(src, (1 << (8 * sig_bytes)) - 1, BUCKET_FACTOR * n)
            table = _Table(positions=real, reducer=reducer)
            for pid, sig in enumerate(table.signature(pts)):
                table.buckets.setdefault(table.bucket_of(sig), []).append((sig, pid))
            tables.append(table)
        all_replicas.append(tables)
    return PlebIndex(pts, params, all_replicas)


def query_pleb(idx: PlebIndex, q) -> PlebAnswer:
    return idx.query(q)


@dataclass(frozen=True)
class NnsAnswer:
    point_id: int
    distance: int
    rung: int
    probes: int


class NnsLadder:
    """
    Approximate nearest neighbor search over a ladder of PLEB indices

    Rung 0 is an exact-match dictionary. With s = sqrt(1 + eps), rung i >= 1
    uses near radius floor(s^(i-1)) and filter radius s^i, so the first
    rung that answers returns a point within (1 + eps) times the nearest
    distance. Rungs reach the dimension, not just the dataset diameter; the
    last rung has r2 >= d and answers with the exact nearest point.
    """

    def __init__(self, points: np.ndarray, eps: float, rungs: List[Optional[PlebIndex]],
                 radii: List[Tuple[float, float]]):
        self.points = points
        self.eps = eps
        self.rungs = rungs
        self.radii = radii
        self.exact: Dict[bytes, int] = {}
        for pid, row in enumerate(points):
            self.exact.setdefault(row.tobytes(), pid)

    def _probe(self, rung: int, q: np.ndarray) -> Optional[Tuple[int, int]]:
        if rung == 0:
            pid = self.exact.get(q.tobytes())
            return None if pid is None else (pid, 0)
        index = self.rungs[rung]
        if index is None:
            # trivial rung: every stored point is within r2, answer exactly
            return linear_scan_nearest(self.points, q)
        answer = index.query(q)
        return None if answer.point_id is None else (answer.point_id, answer.distance)

    def query(self, q) -> NnsAnswer:
        q = np.asarray(q, dtype=np.uint8)
        lo, hi = 0, len(self.rungs) - 1
        found = None
        probes = 0
        while lo < hi:
            mid = (lo + hi) // 2
            probes += 1
            hit = self._probe(mid, q)
            if hit is not None:
                found, hi = (hit, mid), mid
            else:
                lo = mid + 1
        if found is None or found[1] != lo:
            probes += 1
            hit = self._probe(lo, q)
            found = (hit, lo)
        (pid, dist), rung = found
        return NnsAnswer(point_id=pid, distance=dist, rung=rung, probes=probes)


def build_nns_ladder(src: RandomSource, points, eps: float, delta: float,
                     replicas: Optional[int] = None) -> NnsLadder:
    """
    Radius ladder up to the dimension plus a final trivial rung

    Rungs run past the dataset diameter so a query far from every point
    still meets a PLEB rung before the trivial one. delta is split evenly
    over the binary-search probes.
    """
    if eps <= 0:
        raise InvalidParameterError(f"eps must be > 0, got {eps}")
    pts = as_bit_matrix(points)
    n, d = pts.shape
    if n == 0:
        raise InvalidParameterError("cannot build a ladder over an empty dataset")
    step = math.sqrt(1 + eps)
    radii: List[Tuple[float, float]] = [(0.0, 0.0)]
    i = 0
    while True:
        near, far = math.floor(step ** i), step ** (i + 1)
        if far >= d:
            radii.append((float(near), float(d)))
            break
        if radii[-1][0] != near:
            radii.append((float(near), far))
        i += 1
    probes = max(1, math.ceil(math.log2(len(radii))) + 1)
    rung_delta = delta / probes
    rungs: List[Optional[PlebIndex]] = [None]
    for near, far in radii[1:]:
        if far >= d:
            rungs.append(None)
        else:
            rungs.append(build_pleb(src, pts, near, far, rung_delta, replicas))
    return NnsLadder(pts, eps, rungs, radii)


def nns_query(ladder: NnsLadder, q) -> NnsAnswer:
    return ladder.query(q)
