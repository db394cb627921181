"""
Point layouts of the ten switchings.

Labels are 1-based and name points. A forward switching replaces the `before`
pairs by the `after` pairs; the inverse does the opposite with the same labels.
Labels listed together in `same_vertex` share a vertex, every other label
(or group) sits at its own vertex, and `left` lists the labels whose vertex
lies in L. `delta` is the drop in (loops, mixed double pairs, pure double pairs)
from the before state to the after state.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Tuple

Path = Tuple[Tuple[int, int, int, int], int]


class SwitchingName(str, Enum):
    L1 = "L1"
    L2 = "L2"
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D4 = "D4"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"


@dataclass(frozen=True)
class SwitchingPattern:
    name: SwitchingName
    before: Tuple[Tuple[int, int], ...]
    after: Tuple[Tuple[int, int], ...]
    same_vertex: Tuple[Tuple[int, ...], ...]
    left: FrozenSet[int]
    before_paths: Tuple[Path, ...]
    after_paths: Tuple[Path, ...]
    delta: Tuple[int, int, int]

    @property
    def size(self) -> int:
        return len({label for pair in self.before for label in pair})

    def vertex_groups(self) -> List[Tuple[int, ...]]:
        """Partition of the labels into groups that share one vertex."""
        grouped = {label for group in self.same_vertex for label in group}
        singles = [(label,) for label in range(1, self.size + 1) if label not in grouped]
        return list(self.same_vertex) + singles

    def group_of(self) -> Dict[int, int]:
        return {label: index for index, group in enumerate(self.vertex_groups()) for label in group}


_L_BEFORE = ((2, 3), (1, 5), (4, 6))
_L_AFTER = ((1, 2), (3, 4), (5, 6))
_D12_BEFORE = ((3, 4), (5, 6), (1, 2), (7, 8))
_D34_SAME = ((1, 3), (2, 4))
_S1_BEFORE = ((1, 2), (3, 4), (5, 6))
_S1_AFTER = ((2, 3), (1, 4), (5, 6))
_S2_BEFORE = ((5, 6), (1, 2), (3, 4))
_S2_AFTER = ((1, 2), (3, 5), (4, 6))
_EXTRA = ((7, 8), (9, 10))
_EXTRA_PATH: Path = ((7, 8, 9, 10), 1)

PATTERNS: Dict[SwitchingName, SwitchingPattern] = {
    SwitchingName.L1: SwitchingPattern(
        SwitchingName.L1, _L_BEFORE, _L_AFTER, ((2, 3),), frozenset(),
        (), (((1, 2, 3, 4), 1),), (1, 0, 0),
    ),
    SwitchingName.L2: SwitchingPattern(
        SwitchingName.L2, _L_BEFORE, _L_AFTER, ((2, 3),), frozenset({1, 4}),
        (), (((1, 2, 3, 4), 3),), (1, 0, 0),
    ),
    SwitchingName.D1: SwitchingPattern(
        SwitchingName.D1, _D12_BEFORE, ((1, 3), (5, 7), (2, 4), (6, 8)),
        ((3, 5), (4, 6)), frozenset({3, 5}),
        (), (((1, 3, 5, 7), 4), ((2, 4, 6, 8), 1)), (0, 1, 0),
    ),
    SwitchingName.D2: SwitchingPattern(
        SwitchingName.D2, _D12_BEFORE, ((1, 4), (6, 7), (2, 3), (5, 8)),
        ((3, 5), (4, 6)), frozenset({1, 3, 5, 7}),
        (), (((1, 4, 6, 7), 3), ((2, 3, 5, 8), 4)), (0, 1, 0),
    ),
    SwitchingName.D3: SwitchingPattern(
        SwitchingName.D3, ((1, 2), (3, 4), (5, 6), (7, 8)), ((1, 5), (2, 6), (3, 7), (4, 8)),
        _D34_SAME, frozenset(),
        (), (((5, 1, 3, 7), 1), ((6, 2, 4, 8), 1)), (0, 0, 1),
    ),
    SwitchingName.D4: SwitchingPattern(
        SwitchingName.D4,
        ((1, 2), (3, 4), (5, 6), (7, 8), (9, 10), (11, 12)),
        ((6, 10), (8, 12), (1, 5), (3, 9), (2, 11), (4, 7)),
        _D34_SAME, frozenset({5, 7, 9, 11}),
        (), (((5, 1, 3, 9), 3), ((11, 2, 4, 7), 3)), (0, 0, 1),
    ),
    SwitchingName.S1: SwitchingPattern(
        SwitchingName.S1, _S1_BEFORE, _S1_AFTER, ((4, 5),), frozenset({1}),
        (((3, 4, 5, 6), 1),), (((1, 4, 5, 6), 2),), (0, 0, 0),
    ),
    SwitchingName.S2: SwitchingPattern(
        SwitchingName.S2, _S2_BEFORE, _S2_AFTER, ((2, 3),), frozenset({1, 4}),
        (((1, 2, 3, 4), 3),), (((1, 2, 3, 5), 2),), (0, 0, 0),
    ),
    SwitchingName.S3: SwitchingPattern(
        SwitchingName.S3, _S1_BEFORE + _EXTRA, _S1_AFTER + _EXTRA, ((4, 5), (8, 9)), frozenset({1}),
        (((3, 4, 5, 6), 1), _EXTRA_PATH), (((1, 4, 5, 6), 2), _EXTRA_PATH), (0, 0, 0),
    ),
    SwitchingName.S4: SwitchingPattern(
        SwitchingName.S4, _S2_BEFORE + _EXTRA, _S2_AFTER + _EXTRA, ((2, 3), (8, 9)), frozenset({1, 4}),
        (((1, 2, 3, 4), 3), _EXTRA_PATH), (((1, 2, 3, 5), 2), _EXTRA_PATH), (0, 0, 0),
    ),
}
