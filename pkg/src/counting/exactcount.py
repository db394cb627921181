"""
Exhaustive oracles: exact graph and B-graph counts, exact induced-subgraph
probabilities, pairing enumeration and exact defect-class tables.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from src.counting.formulas import count_restricted_pairings
from src.models.degseq import (
    Bipartition,
    DegreeSequence,
    FeasibilityStatus,
    Infeasible,
    InducedSubgraphSpec,
    feasibility,
    moments,
    residual,
)
from src.models.pairing import DefectCensus, Pairing, defect_census, side_points
from src.utils.errors import SizeLimitError, UndefinedModelError
from src.utils.settings import Settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ClassKey:
    """Defect class C_{l0,l1,l2}; has_higher_defect marks triple pairs or double loops."""

    l0: int = 0
    l1: int = 0
    l2: int = 0
    has_higher_defect: bool = False

    @classmethod
    def of(cls, census: DefectCensus) -> "ClassKey":
        return cls(census.b0, census.b1, census.b2, census.has_higher_defect)

    def shifted(self, d0: int = 0, d1: int = 0, d2: int = 0) -> "ClassKey":
        return ClassKey(self.l0 + d0, self.l1 + d1, self.l2 + d2, self.has_higher_defect)

    def label(self) -> str:
        suffix = "+" if self.has_higher_defect else ""
        return f"C({self.l0},{self.l1},{self.l2}){suffix}"


@dataclass
class ClassTable:
    """Exact class sizes of M(L, R, d)."""

    counts: Dict[ClassKey, int]
    total: int

    def __getitem__(self, key: ClassKey) -> int:
        return self.counts.get(key, 0)

    @property
    def higher_defect_total(self) -> int:
        return sum(c for key, c in self.counts.items() if key.has_higher_defect)

    def as_dict(self) -> Dict[str, int]:
        return {key.label(): count for key, count in sorted(self.counts.items())}


def _check_graph_bound(ds: DegreeSequence, settings: Settings) -> None:
    if ds.M > settings.max_graph_points:
        raise SizeLimitError(
            f"M={ds.M} exceeds the exact graph-count bound {settings.max_graph_points}; "
            "use the Monte Carlo estimators instead"
        )


def _groups(values: Tuple[int, ...]) -> List[Tuple[int, int]]:
    """(residual, multiplicity) pairs of a sorted residual tuple."""
    return sorted(Counter(values).items(), reverse=True)


def _choose_neighbours(groups: List[Tuple[int, int]], need: int) -> Iterator[Tuple[int, List[int]]]:
    """
    Ways to pick `need` distinct vertices across groups of equal residual degree.

    Yields:
        (number of labeled choices, how many were taken from each group)
    """
    sizes = [size for _, size in groups]
    ranges = [range(min(size, need) + 1) for size in sizes]
    for taken in product(*ranges):
        if sum(taken) != need:
            continue
        ways = 1
        for size, k in zip(sizes, taken):
            ways *= math.comb(size, k)
        yield ways, list(taken)


def _decrement(groups: List[Tuple[int, int]], taken: List[int]) -> Tuple[int, ...]:
    residuals: List[int] = []
    for (value, size), k in zip(groups, taken):
        residuals.extend([value - 1] * k)
        residuals.extend([value] * (size - k))
    return tuple(sorted((r for r in residuals if r > 0), reverse=True))


@lru_cache(maxsize=None)
def _count_completions(left: Tuple[int, ...], right: Tuple[int, ...]) -> int:
    """
    Labeled B-graphs realizing the residual degrees `left` (independent) and `right`.

    Both tuples are sorted in decreasing order without zeros. The vertex with the
    largest residual degree is closed first: all of its remaining neighbours are
    chosen at once among the open vertices, grouped by equal residual degree.
    """
    if not left and not right:
        return 1
    if (sum(left) + sum(right)) % 2 or sum(left) > sum(right):
        return 0
    close_left = bool(left) and (not right or left[0] >= right[0])
    if close_left:
        need, rest_left, rest_right = left[0], left[1:], right
        if need > len(rest_right):
            return 0
        groups = _groups(rest_right)
        total = 0
        for ways, taken in _choose_neighbours(groups, need):
            total += ways * _count_completions(rest_left, _decrement(groups, taken))
        return total

    need, rest_left, rest_right = right[0], left, right[1:]
    if need > len(rest_left) + len(rest_right):
        return 0
    left_groups, right_groups = _groups(rest_left), _groups(rest_right)
    total = 0
    for ways, taken in _choose_neighbours(left_groups + right_groups, need):
        split = len(left_groups)
        new_left = _decrement(left_groups, taken[:split])
        new_right = _decrement(right_groups, taken[split:])
        total += ways * _count_completions(new_left, new_right)
    return total


def exact_bgraph_count(
    ds: DegreeSequence, bip: Bipartition, settings: Optional[Settings] = None
) -> int:
    """
    Exact number of labeled simple graphs with degrees ds in which L is independent.

    Raises:
        SizeLimitError: If M exceeds the configured bound
    """
    settings = settings or Settings.from_env()
    _check_graph_bound(ds, settings)
    left = tuple(sorted((ds[i] for i in bip.left if ds[i] > 0), reverse=True))
    right = tuple(sorted((ds[i] for i in bip.right if ds[i] > 0), reverse=True))
    count = _count_completions(left, right)
    logger.debug("g(L,R,d) for %s with |L|=%d: %d", ds, len(bip.left), count)
    return count


def exact_graph_count(ds: DegreeSequence, settings: Optional[Settings] = None) -> int:
    """Exact number of labeled simple graphs with degree sequence ds."""
    return exact_bgraph_count(ds, Bipartition.empty(ds.n), settings)


def exact_induced_probability(
    ds: DegreeSequence, spec: InducedSubgraphSpec, settings: Optional[Settings] = None
) -> Fraction:
    """
    Exact probability that a uniform graph with degrees ds induces H on S.

    Returns:
        g(S, [n] minus S, d') / g(d); 0 when the residual is infeasible

    Raises:
        UndefinedModelError: If no graph has degree sequence ds
    """
    settings = settings or Settings.from_env()
    total = exact_graph_count(ds, settings)
    if total == 0:
        raise UndefinedModelError(f"no simple graph has degree sequence {ds}")
    reduced = residual(ds, spec)
    if isinstance(reduced, Infeasible):
        return Fraction(0)
    return Fraction(exact_bgraph_count(reduced, spec.bipartition(ds.n), settings), total)


def enumerate_pairings(
    ds: DegreeSequence,
    bip: Bipartition,
    visitor: Callable[[Pairing], None],
    settings: Optional[Settings] = None,
) -> int:
    """
    Visit every restricted pairing exactly once.

    L-points are matched first, in increasing order, to distinct R-points; the
    remaining R-points are then matched lowest unmatched point first.

    Args:
        ds: Degree sequence
        bip: Bipartition (L, R)
        visitor: Called once per pairing
        settings: Bounds

    Returns:
        Number of pairings visited

    Raises:
        SizeLimitError: If M_1(R) exceeds the configured bound
    """
    settings = settings or Settings.from_env()
    m1r = moments(ds, bip.right).m1
    if m1r > settings.max_enum_points:
        raise SizeLimitError(
            f"M1(R)={m1r} exceeds the enumeration bound {settings.max_enum_points}"
        )
    if feasibility(ds, bip) is not FeasibilityStatus.FEASIBLE:
        return 0
    left_points, right_points = (points.tolist() for points in side_points(ds, bip))
    mate = [-1] * ds.M
    visited = 0

    def match_pure(free: List[int]) -> None:
        nonlocal visited
        if not free:
            visitor(Pairing(ds.degrees, bip.left, tuple(mate)))
            visited += 1
            return
        first, rest = free[0], free[1:]
        for position, partner in enumerate(rest):
            mate[first], mate[partner] = partner, first
            match_pure(rest[:position] + rest[position + 1:])
        mate[first] = -1

    def match_mixed(index: int, free: List[int]) -> None:
        if index == len(left_points):
            match_pure(free)
            return
        point = left_points[index]
        for position, partner in enumerate(free):
            mate[point], mate[partner] = partner, point
            match_mixed(index + 1, free[:position] + free[position + 1:])
            mate[partner] = -1
        mate[point] = -1

    match_mixed(0, right_points)
    logger.debug("enumerated %d restricted pairings of %s", visited, ds)
    return visited


def exact_class_table(
    ds: DegreeSequence, bip: Bipartition, settings: Optional[Settings] = None
) -> ClassTable:
    """Exact sizes of all defect classes, higher-defect pairings keyed separately."""
    counts: Counter = Counter()

    def tally(P: Pairing) -> None:
        counts[ClassKey.of(defect_census(P))] += 1

    total = enumerate_pairings(ds, bip, tally, settings)
    table = ClassTable(dict(counts), total)
    expected = count_restricted_pairings(ds, bip)
    if table.total != expected:
        raise AssertionError(f"enumerated {table.total} pairings, expected {expected}")
    return table


def exact_p_simple(
    ds: DegreeSequence, bip: Bipartition, settings: Optional[Settings] = None
) -> Fraction:
    """
    Exact probability that a uniform restricted pairing is simple.

    Raises:
        UndefinedModelError: If the instance has no restricted pairing
    """
    table = exact_class_table(ds, bip, settings)
    if table.total == 0:
        raise UndefinedModelError(f"no restricted pairing for {ds}")
    return Fraction(table[ClassKey()], table.total)
