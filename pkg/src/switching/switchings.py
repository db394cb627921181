"""
Labeled switching sites, their application, and the exact double-counting check.

A site is valid between a before state P and an after state P' when the labeled
points follow the kind's layout, every prescribed directed 2-path is simple with
its prescribed type, and the defect census drops by exactly the kind's delta with
triple pairs and double loops untouched. Forward sites are searched in P and
inverse sites in P'; since both directions test the same predicate, summing forward
sites over the higher class equals summing inverse sites over the lower class.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from tqdm import tqdm

from src.counting.exactcount import ClassKey, enumerate_pairings
from src.counting.formulas import predicted_class_ratio
from src.models.degseq import Bipartition, DegreeSequence
from src.models.pairing import DefectCensus, Pairing, defect_census, two_path_type
from src.switching.patterns import PATTERNS, SwitchingName, SwitchingPattern
from src.utils.errors import InvalidSiteError
from src.utils.settings import Settings
from src.utils.validators import ValidationError

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True)
class SwitchingKind:
    name: SwitchingName
    direction: Direction = Direction.FORWARD

    @classmethod
    def forward(cls, name) -> "SwitchingKind":
        return cls(SwitchingName(name), Direction.FORWARD)

    @classmethod
    def inverse_of(cls, name) -> "SwitchingKind":
        return cls(SwitchingName(name), Direction.INVERSE)

    @property
    def pattern(self) -> SwitchingPattern:
        return PATTERNS[self.name]

    def inverted(self) -> "SwitchingKind":
        flipped = Direction.INVERSE if self.direction is Direction.FORWARD else Direction.FORWARD
        return SwitchingKind(self.name, flipped)

    def __str__(self) -> str:
        return self.name.value if self.direction is Direction.FORWARD else f"{self.name.value}^-1"


@dataclass(frozen=True)
class SwitchingSite:
    """A switching kind plus the point carrying each layout label (label i at index i-1)."""

    kind: SwitchingKind
    labeled_points: Tuple[int, ...]

    def inverted(self) -> "SwitchingSite":
        return SwitchingSite(self.kind.inverted(), self.labeled_points)

    def point(self, label: int) -> int:
        return self.labeled_points[label - 1]


@dataclass(frozen=True)
class DoubleCountReport:
    """Both sides of the double-counting identity for one kind and class pair."""

    kind: SwitchingName
    key_high: ClassKey
    key_low: ClassKey
    high_size: int
    low_size: int
    forward_total: int
    inverse_total: int
    predicted_ratio: Optional[float] = None

    @property
    def holds(self) -> bool:
        return self.forward_total == self.inverse_total

    @property
    def exact_ratio(self) -> Optional[Fraction]:
        """|C_high| / |C_low|, None when the lower class is empty."""
        if self.low_size == 0:
            return None
        return Fraction(self.high_size, self.low_size)


def _pairs_to_points(pairs: Sequence[Tuple[int, int]], points: Sequence[int]) -> List[Tuple[int, int]]:
    return [(points[x - 1], points[y - 1]) for x, y in pairs]


def _census_drop_matches(before: DefectCensus, after: DefectCensus, delta: Tuple[int, int, int]) -> bool:
    return (
        (before.b0 - after.b0, before.b1 - after.b1, before.b2 - after.b2) == delta
        and before.t1 == after.t1
        and before.t2 == after.t2
        and before.i_dl == after.i_dl
    )


def _paths_hold(state: Pairing, paths, points: Sequence[int]) -> bool:
    for labels, path_type in paths:
        a, b, c, d = (points[label - 1] for label in labels)
        if two_path_type(state, a, b, c, d) != path_type:
            return False
    return True


def _valid_between(
    pattern: SwitchingPattern,
    before: Pairing,
    after: Pairing,
    points: Sequence[int],
    before_census: Optional[DefectCensus] = None,
    after_census: Optional[DefectCensus] = None,
) -> bool:
    if not _paths_hold(before, pattern.before_paths, points):
        return False
    if not _paths_hold(after, pattern.after_paths, points):
        return False
    before_census = before_census or defect_census(before)
    after_census = after_census or defect_census(after)
    return _census_drop_matches(before_census, after_census, pattern.delta)


def _layout_holds(pattern: SwitchingPattern, P: Pairing, points: Sequence[int]) -> bool:
    """Points distinct, groups on one vertex each, distinct groups on distinct vertices, sides right."""
    if len(set(points)) != len(points):
        return False
    vertices = []
    for group in pattern.vertex_groups():
        group_vertices = {P.vertex_of[points[label - 1]] for label in group}
        if len(group_vertices) != 1:
            return False
        vertices.append(group_vertices.pop())
    if len(set(vertices)) != len(vertices):
        return False
    return all(
        P.is_left_point(points[label - 1]) == (label in pattern.left)
        for label in range(1, pattern.size + 1)
    )


def _switched(P: Pairing, site: SwitchingSite) -> Pairing:
    """The other state of the site, without validity checks beyond pair presence."""
    pattern = site.kind.pattern
    points = site.labeled_points
    removed, added = pattern.before, pattern.after
    if site.kind.direction is Direction.INVERSE:
        removed, added = added, removed
    try:
        return P.replace(_pairs_to_points(removed, points), _pairs_to_points(added, points))
    except ValidationError as exc:
        raise InvalidSiteError(f"{site.kind} does not apply: {exc}") from exc


def is_valid_site(P: Pairing, site: SwitchingSite) -> bool:
    """Whether `site` is a valid site of its kind in P."""
    pattern = site.kind.pattern
    points = site.labeled_points
    if len(points) != pattern.size or not _layout_holds(pattern, P, points):
        return False
    try:
        other = _switched(P, site)
    except InvalidSiteError:
        return False
    if site.kind.direction is Direction.FORWARD:
        return _valid_between(pattern, P, other, points)
    return _valid_between(pattern, other, P, points)


def _required_pairs(kind: SwitchingKind) -> Tuple[Tuple[int, int], ...]:
    pattern = kind.pattern
    return pattern.before if kind.direction is Direction.FORWARD else pattern.after


def _label_assignments(P: Pairing, kind: SwitchingKind) -> Iterator[Tuple[int, ...]]:
    """
    All labelings whose required pairs are pairs of P and whose layout holds.

    Labels are bound pair by pair; a label whose vertex group is already placed
    only tries points of that vertex.
    """
    pattern = kind.pattern
    required = _required_pairs(kind)
    group_of = pattern.group_of()
    size = pattern.size
    points: List[int] = [-1] * (size + 1)
    group_vertex: Dict[int, int] = {}
    used = set()

    def fits(label: int, point: int) -> bool:
        if point in used:
            return False
        if P.is_left_point(point) != (label in pattern.left):
            return False
        vertex = P.vertex_of[point]
        group = group_of[label]
        if group in group_vertex:
            return group_vertex[group] == vertex
        return vertex not in group_vertex.values()

    def bind(label: int, point: int) -> bool:
        """Assign; returns True when the label opened its group."""
        group = group_of[label]
        opened = group not in group_vertex
        if opened:
            group_vertex[group] = P.vertex_of[point]
        points[label] = point
        used.add(point)
        return opened

    def unbind(label: int, opened: bool) -> None:
        used.discard(points[label])
        if opened:
            del group_vertex[group_of[label]]
        points[label] = -1

    def candidates(label: int) -> Iterable[int]:
        group = group_of[label]
        if group in group_vertex:
            return P.points_of(group_vertex[group])
        return range(P.M)

    def walk(index: int) -> Iterator[Tuple[int, ...]]:
        if index == len(required):
            yield tuple(points[1:])
            return
        x, y = required[index]
        if points[x] >= 0 and points[y] >= 0:
            if P.mate[points[x]] == points[y]:
                yield from walk(index + 1)
            return
        if points[y] >= 0:
            x, y = y, x
        if points[x] >= 0:
            partner = P.mate[points[x]]
            if fits(y, partner):
                opened = bind(y, partner)
                yield from walk(index + 1)
                unbind(y, opened)
            return
        for point in candidates(x):
            if not fits(x, point):
                continue
            opened_x = bind(x, point)
            partner = P.mate[point]
            if fits(y, partner):
                opened_y = bind(y, partner)
                yield from walk(index + 1)
                unbind(y, opened_y)
            unbind(x, opened_x)

    yield from walk(0)


def iter_sites(
    P: Pairing, kind: SwitchingKind, census: Optional[DefectCensus] = None
) -> Iterator[SwitchingSite]:
    """
    Enumerate every valid labeled site of `kind` in P.

    Args:
        P: Pairing to search
        kind: Switching kind and direction
        census: defect_census(P), when the caller already has it

    Yields:
        SwitchingSite objects, one per valid labeling
    """
    pattern = kind.pattern
    census = census or defect_census(P)
    for points in _label_assignments(P, kind):
        site = SwitchingSite(kind, points)
        try:
            other = _switched(P, site)
        except InvalidSiteError:
            continue
        if kind.direction is Direction.FORWARD:
            valid = _valid_between(pattern, P, other, points, before_census=census)
        else:
            valid = _valid_between(pattern, other, P, points, after_census=census)
        if valid:
            yield site


def count_sites(P: Pairing, kind: SwitchingKind, census: Optional[DefectCensus] = None) -> int:
    return sum(1 for _ in iter_sites(P, kind, census))


def find_sites(P: Pairing, kind: SwitchingKind) -> Tuple[int, List[SwitchingSite]]:
    """All valid sites of `kind` in P, with their number."""
    sites = list(iter_sites(P, kind))
    return len(sites), sites


def apply(P: Pairing, site: SwitchingSite) -> Pairing:
    """
    Perform the switching at `site`.

    Raises:
        InvalidSiteError: If the site is not valid for P
    """
    if not is_valid_site(P, site):
        raise InvalidSiteError(f"{site.kind} site {site.labeled_points} is not valid here")
    return _switched(P, site)


def _low_key(name: SwitchingName, key_high: ClassKey) -> ClassKey:
    d0, d1, d2 = PATTERNS[name].delta
    return key_high.shifted(-d0, -d1, -d2)


def _site_totals(
    ds: DegreeSequence,
    bip: Bipartition,
    names: Sequence[SwitchingName],
    settings: Optional[Settings] = None,
    progress: bool = False,
) -> Tuple[Dict[ClassKey, int], Dict[SwitchingName, Dict[str, Dict[ClassKey, int]]]]:
    """Class sizes and, per kind, forward and inverse site totals keyed by class."""
    sizes: Dict[ClassKey, int] = defaultdict(int)
    totals = {
        name: {"forward": defaultdict(int), "inverse": defaultdict(int)} for name in names
    }
    pairings: List[Pairing] = []
    enumerate_pairings(ds, bip, pairings.append, settings)
    for P in tqdm(pairings, desc="pairings", disable=not progress):
        census = defect_census(P)
        key = ClassKey.of(census)
        sizes[key] += 1
        for name in names:
            totals[name]["forward"][key] += count_sites(P, SwitchingKind.forward(name), census)
            totals[name]["inverse"][key] += count_sites(P, SwitchingKind.inverse_of(name), census)
    return sizes, totals


def _report(
    ds: DegreeSequence,
    bip: Bipartition,
    name: SwitchingName,
    key_high: ClassKey,
    sizes: Dict[ClassKey, int],
    totals,
) -> DoubleCountReport:
    key_low = _low_key(name, key_high)
    predicted = None
    if key_high != key_low and not key_high.has_higher_defect:
        predicted = predicted_class_ratio(ds, bip, key_high)
    return DoubleCountReport(
        kind=name,
        key_high=key_high,
        key_low=key_low,
        high_size=sizes.get(key_high, 0),
        low_size=sizes.get(key_low, 0),
        forward_total=totals[name]["forward"].get(key_high, 0),
        inverse_total=totals[name]["inverse"].get(key_low, 0),
        predicted_ratio=predicted,
    )


def verify_double_count(
    ds: DegreeSequence,
    bip: Bipartition,
    name: SwitchingName,
    key_high: ClassKey,
    key_low: ClassKey,
    settings: Optional[Settings] = None,
) -> DoubleCountReport:
    """
    Sum forward sites over C_high and inverse sites over C_low, exactly.

    Raises:
        ValidationError: If key_low is not key_high lowered by the kind's delta
        SizeLimitError: If the instance is beyond the enumeration bound
    """
    name = SwitchingName(name)
    if _low_key(name, key_high) != key_low:
        raise ValidationError(
            f"{name.value} moves {key_high.label()} to {_low_key(name, key_high).label()}, "
            f"not {key_low.label()}"
        )
    sizes, totals = _site_totals(ds, bip, [name], settings)
    return _report(ds, bip, name, key_high, sizes, totals)


def verify_all_double_counts(
    ds: DegreeSequence,
    bip: Bipartition,
    names: Optional[Sequence[SwitchingName]] = None,
    settings: Optional[Settings] = None,
    progress: bool = False,
) -> List[DoubleCountReport]:
    """
    Double-count reports for every kind and every class pair it connects.

    One enumeration serves all kinds. A report is produced for each class C_high
    present in the table whose lowered class has nonnegative indices.
    """
    names = [SwitchingName(name) for name in (names or list(SwitchingName))]
    sizes, totals = _site_totals(ds, bip, names, settings, progress)
    reports = []
    for name in names:
        for key_high in sorted(sizes):
            key_low = _low_key(name, key_high)
            if min(key_low.l0, key_low.l1, key_low.l2) < 0:
                continue
            reports.append(_report(ds, bip, name, key_high, sizes, totals))
    logger.info("checked %d double-count identities for %s", len(reports), ds)
    return reports
