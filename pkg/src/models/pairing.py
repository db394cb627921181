"""
The configuration model restricted to B-graphs.

Vertex i owns a bucket of d_i consecutive points; point ids run 0..M-1 in bucket
order. A pairing is a fixed-point-free involution on the points; it is restricted
when no pair has both points in L-buckets.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.models.degseq import Bipartition, DegreeSequence, FeasibilityStatus, feasibility
from src.utils.errors import InfeasibleError
from src.utils.validators import ParseError, ValidationError

logger = logging.getLogger(__name__)

DEFECT_FIELDS = ("b0", "b1", "b2", "t1", "t2", "i_dl")

# Directed 2-path type by (first end in L, middle in L, last end in L).
_PATH_TYPES = {
    (False, False, False): 1,
    (True, False, False): 2,
    (True, False, True): 3,
    (False, True, False): 4,
}

# Type signatures of the disjoint-pair counts x1..x5.
DISJOINT_SIGNATURES = ((1, 1), (3, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class Pairing:
    """A restricted pairing: degrees, the L vertices and the mate of every point."""

    degrees: Tuple[int, ...]
    left: Tuple[int, ...]
    mate: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "left", tuple(sorted(self.left)))
        object.__setattr__(self, "mate", tuple(int(q) for q in self.mate))
        total = sum(self.degrees)
        if len(self.mate) != total:
            raise ValidationError(f"Mate array has {len(self.mate)} entries, expected {total}")
        for p, q in enumerate(self.mate):
            if not 0 <= q < total or q == p or self.mate[q] != p:
                raise ValidationError(f"Mate array is not a fixed-point-free involution at point {p}")
            if self.is_left_point(p) and self.is_left_point(q):
                raise ValidationError(f"Pair {{{p}, {q}}} lies inside L-buckets")

    @classmethod
    def from_pairs(
        cls, ds: DegreeSequence, bip: Bipartition, pairs: Iterable[Tuple[int, int]]
    ) -> "Pairing":
        mate = [-1] * ds.M
        for p, q in pairs:
            mate[int(p)] = int(q)
            mate[int(q)] = int(p)
        return cls(ds.degrees, bip.left, tuple(mate))

    @property
    def ds(self) -> DegreeSequence:
        return DegreeSequence(self.degrees)

    @property
    def bip(self) -> Bipartition:
        return Bipartition.from_left(len(self.degrees), self.left)

    @property
    def M(self) -> int:
        return len(self.mate)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        """First point of every bucket, plus M at the end."""
        offsets = [0]
        for d in self.degrees:
            offsets.append(offsets[-1] + d)
        return tuple(offsets)

    @cached_property
    def vertex_of(self) -> Tuple[int, ...]:
        return tuple(v for v, d in enumerate(self.degrees) for _ in range(d))

    @cached_property
    def left_set(self) -> frozenset:
        return frozenset(self.left)

    def points_of(self, vertex: int) -> range:
        return range(self.offsets[vertex], self.offsets[vertex + 1])

    def is_left_point(self, point: int) -> bool:
        return self.vertex_of[point] in self.left_set

    def pairs(self) -> List[Tuple[int, int]]:
        """Every pair once, as (smaller point, larger point)."""
        return [(p, q) for p, q in enumerate(self.mate) if p < q]

    @cached_property
    def multiplicity(self) -> Counter:
        """Number of pairs between each unordered vertex pair (loops keyed (v, v))."""
        counts: Counter = Counter()
        for p, q in self.pairs():
            u, v = self.vertex_of[p], self.vertex_of[q]
            counts[(min(u, v), max(u, v))] += 1
        return counts

    def edge_multiplicity(self, u: int, v: int) -> int:
        return self.multiplicity.get((min(u, v), max(u, v)), 0)

    def has_loop(self, vertex: int) -> bool:
        return (vertex, vertex) in self.multiplicity

    def replace(
        self, removed: Sequence[Tuple[int, int]], added: Sequence[Tuple[int, int]]
    ) -> "Pairing":
        """
        New pairing with the removed pairs swapped for the added ones.

        Raises:
            ValidationError: If a removed pair is absent or the result is not a
                restricted pairing
        """
        mate = list(self.mate)
        for p, q in removed:
            if mate[p] != q:
                raise ValidationError(f"Pair {{{p}, {q}}} is not in the pairing")
            mate[p] = mate[q] = -1
        for p, q in added:
            if mate[p] != -1 or mate[q] != -1:
                raise ValidationError(f"Point of pair {{{p}, {q}}} is still matched")
            mate[p], mate[q] = q, p
        return Pairing(self.degrees, self.left, tuple(mate))

    def to_text(self) -> str:
        """Serialize as `degrees; mates`, plus `; left` (1-based) when L is nonempty."""
        fields = [" ".join(map(str, self.degrees)), " ".join(map(str, self.mate))]
        if self.left:
            fields.append(" ".join(str(v + 1) for v in self.left))
        return "; ".join(fields)

    @classmethod
    def from_text(cls, text: str) -> "Pairing":
        """
        Load a pairing written by to_text.

        Raises:
            ParseError: If a field is missing or holds a non-integer token
        """
        fields = text.strip().split(";")
        if len(fields) not in (2, 3):
            raise ParseError("expected `degrees; mates` with an optional `; left` field")
        parsed = []
        column = 1
        for raw in fields:
            values = []
            for token in raw.split():
                try:
                    values.append(int(token))
                except ValueError:
                    raise ParseError(f"not an integer: {token!r}", 1, column + raw.find(token))
            parsed.append(values)
            column += len(raw) + 1
        degrees, mate = parsed[0], parsed[1]
        left = [v - 1 for v in parsed[2]] if len(parsed) == 3 else []
        return cls(tuple(degrees), tuple(left), tuple(mate))


@dataclass(frozen=True)
class DefectCensus:
    """Loops, double pairs, triple pairs and double loops of a pairing."""

    b0: int = 0
    b1: int = 0
    b2: int = 0
    t1: int = 0
    t2: int = 0
    i_dl: int = 0

    @property
    def has_higher_defect(self) -> bool:
        return self.t1 > 0 or self.t2 > 0 or self.i_dl > 0

    @property
    def is_clean(self) -> bool:
        return not any(getattr(self, name) for name in DEFECT_FIELDS)

    def as_dict(self) -> Dict[str, int]:
        return {name: getattr(self, name) for name in DEFECT_FIELDS}


@dataclass(frozen=True)
class TwoPathCensus:
    """Simple directed 2-paths by type, and ordered vertex-disjoint pairs of them."""

    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    x1: Optional[int] = None
    x2: Optional[int] = None
    x3: Optional[int] = None
    x4: Optional[int] = None
    x5: Optional[int] = None

    def a(self, path_type: int) -> int:
        return getattr(self, f"a{path_type}")


def point_layout(ds: DegreeSequence) -> np.ndarray:
    """Vertex of every point, in bucket order."""
    return np.repeat(np.arange(ds.n, dtype=np.int64), ds.degrees)


def side_points(ds: DegreeSequence, bip: Bipartition) -> Tuple[np.ndarray, np.ndarray]:
    """Points of L-buckets and of R-buckets, each in increasing order."""
    vertex_of = point_layout(ds)
    in_left = np.zeros(ds.n, dtype=bool)
    in_left[list(bip.left)] = True
    mask = in_left[vertex_of]
    points = np.arange(ds.M, dtype=np.int64)
    return points[mask], points[~mask]


def _require_feasible(ds: DegreeSequence, bip: Bipartition) -> None:
    status = feasibility(ds, bip)
    if status is not FeasibilityStatus.FEASIBLE:
        raise InfeasibleError(f"no restricted pairing exists ({status.value})", status)


def sample_restricted(
    ds: DegreeSequence, bip: Bipartition, rng: np.random.Generator
) -> Pairing:
    """
    Draw a uniformly random restricted pairing.

    Uses exactly one `rng.permutation` of the R-points: its first M_1(L) entries are
    the mates of the L-points in order, the rest are paired consecutively.

    Args:
        ds: Degree sequence
        bip: Bipartition (L, R)
        rng: numpy Generator

    Returns:
        Uniform element of M(L, R, d)

    Raises:
        InfeasibleError: If the instance has no restricted pairing
    """
    _require_feasible(ds, bip)
    left_points, right_points = side_points(ds, bip)
    shuffled = rng.permutation(right_points)
    m1l = len(left_points)
    pairs = list(zip(left_points.tolist(), shuffled[:m1l].tolist()))
    rest = shuffled[m1l:]
    pairs.extend(zip(rest[0::2].tolist(), rest[1::2].tolist()))
    return Pairing.from_pairs(ds, bip, pairs)


def sample_pair_batch(
    ds: DegreeSequence, bip: Bipartition, rng: np.random.Generator, size: int
) -> np.ndarray:
    """
    Draw `size` independent restricted pairings as an array of point pairs.

    Same construction as sample_restricted, vectorized: one `rng.permuted` call
    over a (size, M_1(R)) array per batch.

    Returns:
        Integer array of shape (size, M/2, 2)
    """
    _require_feasible(ds, bip)
    left_points, right_points = side_points(ds, bip)
    m1l = len(left_points)
    shuffled = rng.permuted(np.tile(right_points, (size, 1)), axis=1)
    mixed = np.stack([np.broadcast_to(left_points, (size, m1l)), shuffled[:, :m1l]], axis=2)
    rest = shuffled[:, m1l:]
    pure = np.stack([rest[:, 0::2], rest[:, 1::2]], axis=2)
    return np.concatenate([mixed, pure], axis=1)


def pairing_from_row(ds: DegreeSequence, bip: Bipartition, row: np.ndarray) -> Pairing:
    return Pairing.from_pairs(ds, bip, row.tolist())


def defect_census(P: Pairing) -> DefectCensus:
    """
    Classify the non-simplicities of a pairing.

    A vertex pair joined by exactly two pairs is one double pair; by three or
    more, one triple pair. A vertex with c loops contributes c to b0 and
    C(c, 2) to i_dl.
    """
    counts = {name: 0 for name in DEFECT_FIELDS}
    for (u, v), c in P.multiplicity.items():
        if u == v:
            counts["b0"] += c
            counts["i_dl"] += c * (c - 1) // 2
            continue
        mixed = u in P.left_set or v in P.left_set
        if c == 2:
            counts["b1" if mixed else "b2"] += 1
        elif c >= 3:
            counts["t1" if mixed else "t2"] += 1
    return DefectCensus(**counts)


def defect_census_batch(
    ds: DegreeSequence, bip: Bipartition, pairs: np.ndarray
) -> Dict[str, np.ndarray]:
    """
    Vectorized defect_census over a batch from sample_pair_batch.

    Returns:
        Mapping from census field name to an int64 array of length size
    """
    size = pairs.shape[0]
    if pairs.shape[1] == 0:
        return {name: np.zeros(size, dtype=np.int64) for name in DEFECT_FIELDS}
    n = ds.n
    vertex_of = point_layout(ds)
    u = vertex_of[pairs[..., 0]]
    v = vertex_of[pairs[..., 1]]
    row = np.arange(size, dtype=np.int64)[:, None]
    keys = (row * n + np.minimum(u, v)) * n + np.maximum(u, v)
    unique, counts = np.unique(keys.ravel(), return_counts=True)
    rows = unique // (n * n)
    lo = (unique % (n * n)) // n
    hi = unique % n
    in_left = np.zeros(n, dtype=bool)
    in_left[list(bip.left)] = True
    loop = lo == hi
    mixed = in_left[lo] | in_left[hi]

    def tally(mask: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
        w = None if weights is None else weights[mask]
        return np.bincount(rows[mask], weights=w, minlength=size).astype(np.int64)

    return {
        "b0": tally(loop, counts),
        "b1": tally(~loop & (counts == 2) & mixed),
        "b2": tally(~loop & (counts == 2) & ~mixed),
        "t1": tally(~loop & (counts >= 3) & mixed),
        "t2": tally(~loop & (counts >= 3) & ~mixed),
        "i_dl": tally(loop, counts * (counts - 1) // 2),
    }


def is_simple(P: Pairing) -> bool:
    return all(u != v and c == 1 for (u, v), c in P.multiplicity.items())


def project(P: Pairing) -> nx.MultiGraph:
    """Contract every bucket to its vertex; loops and parallel edges are kept."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(len(P.degrees)))
    for p, q in P.pairs():
        graph.add_edge(P.vertex_of[p], P.vertex_of[q])
    return graph


def two_path_type(P: Pairing, a: int, b: int, c: int, d: int) -> Optional[int]:
    """
    Type of the directed 2-path ((a, b), (c, d)) when it is simple, else None.

    The path needs pairs {a, b} and {c, d}, b and c in the same bucket, and three
    distinct vertices; it is simple when neither pair lies in a multiple pair and
    the middle vertex carries no loop. Paths whose vertex sides match no type
    (the reverse of type 2) also give None.
    """
    if b == c or P.mate[a] != b or P.mate[c] != d:
        return None
    x, v, z = P.vertex_of[a], P.vertex_of[b], P.vertex_of[d]
    if P.vertex_of[c] != v or x == v or z == v or x == z:
        return None
    if P.has_loop(v) or P.edge_multiplicity(x, v) != 1 or P.edge_multiplicity(v, z) != 1:
        return None
    return _PATH_TYPES.get((x in P.left_set, v in P.left_set, z in P.left_set))


def simple_two_paths(P: Pairing) -> Dict[int, List[Tuple[int, int, int]]]:
    """Vertex triples (first, middle, last) of every simple directed 2-path, by type."""
    paths: Dict[int, List[Tuple[int, int, int]]] = {1: [], 2: [], 3: [], 4: []}
    for v in range(len(P.degrees)):
        if P.degrees[v] < 2 or P.has_loop(v):
            continue
        bucket = P.points_of(v)
        for b in bucket:
            for c in bucket:
                path_type = two_path_type(P, P.mate[b], b, c, P.mate[c])
                if path_type is not None:
                    paths[path_type].append((P.vertex_of[P.mate[b]], v, P.vertex_of[P.mate[c]]))
    return paths


def _disjoint_pairs(
    first: Sequence[Tuple[int, int, int]], second: Sequence[Tuple[int, int, int]]
) -> int:
    """Ordered pairs (p, q), p from first and q from second, with no common vertex."""
    single: Counter = Counter()
    double: Counter = Counter()
    triple: Counter = Counter()
    for path in second:
        x, v, z = path
        single.update(path)
        double.update([frozenset((x, v)), frozenset((x, z)), frozenset((v, z))])
        triple[frozenset(path)] += 1
    total = 0
    for path in first:
        x, v, z = path
        touching = single[x] + single[v] + single[z]
        touching -= double[frozenset((x, v))] + double[frozenset((x, z))] + double[frozenset((v, z))]
        touching += triple[frozenset(path)]
        total += len(second) - touching
    return total


def two_path_census(P: Pairing, with_disjoint: bool = True) -> TwoPathCensus:
    """
    Count simple directed 2-paths by type.

    Args:
        P: Pairing
        with_disjoint: Also count the ordered vertex-disjoint pairs x1..x5

    Returns:
        TwoPathCensus; x-fields are None when with_disjoint is False
    """
    paths = simple_two_paths(P)
    counts = {f"a{i}": len(paths[i]) for i in range(1, 5)}
    if with_disjoint:
        for index, (j, h) in enumerate(DISJOINT_SIGNATURES, start=1):
            counts[f"x{index}"] = _disjoint_pairs(paths[j], paths[h])
    return TwoPathCensus(**counts)
