"""
Degree sequences, bipartitions, moments and the mu-parameters.

All quantities that enter exponents are exact rationals; floats appear only
when a formula is finally evaluated.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Tuple, Union

from src.utils.errors import InfeasibleError
from src.utils.validators import (
    DegreeValidator,
    SubgraphValidator,
    SubsetValidator,
    ValidationError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegreeSequence:
    """Degree vector d_1..d_n with cached totals."""

    degrees: Tuple[int, ...]

    def __post_init__(self):
        degrees = tuple(self.degrees)
        is_valid, error = DegreeValidator.validate_degrees(degrees)
        if not is_valid:
            raise ValidationError(error)
        object.__setattr__(self, "degrees", degrees)

    @classmethod
    def regular(cls, n: int, d: int) -> "DegreeSequence":
        return cls(tuple([d] * n))

    @property
    def n(self) -> int:
        return len(self.degrees)

    @cached_property
    def M(self) -> int:
        return sum(self.degrees)

    @cached_property
    def M2(self) -> int:
        return sum(d * (d - 1) for d in self.degrees)

    @cached_property
    def d_max(self) -> int:
        return max(self.degrees, default=0)

    @property
    def is_regular(self) -> bool:
        return len(set(self.degrees)) <= 1

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, index: int) -> int:
        return self.degrees[index]

    def __str__(self) -> str:
        return ",".join(str(d) for d in self.degrees)


@dataclass(frozen=True)
class Bipartition:
    """Vertex bipartition (L, R) of [n]; L must be independent in every B-graph."""

    n: int
    left: Tuple[int, ...] = ()
    right: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        is_valid, error = SubsetValidator.validate_subset(self.left, self.n)
        if not is_valid:
            raise ValidationError(error)
        left = tuple(sorted(self.left))
        members = set(left)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", tuple(i for i in range(self.n) if i not in members))

    @classmethod
    def empty(cls, n: int) -> "Bipartition":
        return cls(n=n, left=())

    @classmethod
    def from_left(cls, n: int, left: Iterable[int]) -> "Bipartition":
        return cls(n=n, left=tuple(left))

    @cached_property
    def left_set(self) -> frozenset:
        return frozenset(self.left)

    def is_left(self, vertex: int) -> bool:
        return vertex in self.left_set


@dataclass(frozen=True)
class Moments:
    """First and second factorial moments M_1(d,S), M_2(d,S) of a subset."""

    m1: int
    m2: int

    def __add__(self, other: "Moments") -> "Moments":
        return Moments(self.m1 + other.m1, self.m2 + other.m2)


@dataclass(frozen=True)
class MuParameters:
    """Exponent parameters of the B-graph formula: P(simple) ~ exp(-mu0-mu1-mu2)."""

    mu0: Fraction
    mu1: Fraction
    mu2: Fraction
    t: int

    @property
    def total(self) -> Fraction:
        return self.mu0 + self.mu1 + self.mu2


@dataclass(frozen=True)
class InducedSubgraphSpec:
    """A graph H prescribed on the vertex subset S (0-based vertex ids)."""

    S: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        subset = tuple(sorted(self.S))
        if len(set(subset)) != len(subset):
            raise ValidationError("Duplicate vertex in S")
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        is_valid, error = SubgraphValidator.validate_edges(subset, edges)
        if not is_valid:
            raise ValidationError(error)
        object.__setattr__(self, "S", subset)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def empty(cls, S: Iterable[int]) -> "InducedSubgraphSpec":
        return cls(S=tuple(S), edges=())

    @property
    def s(self) -> int:
        return len(self.S)

    @cached_property
    def k(self) -> Tuple[int, ...]:
        """Degrees of H, aligned with S."""
        position = {v: i for i, v in enumerate(self.S)}
        degrees = [0] * len(self.S)
        for u, v in self.edges:
            degrees[position[u]] += 1
            degrees[position[v]] += 1
        return tuple(degrees)

    @property
    def h(self) -> int:
        return 2 * len(self.edges)

    def bipartition(self, n: int) -> Bipartition:
        """The bipartition (S, [n] minus S) used for the residual B-graph."""
        return Bipartition.from_left(n, self.S)


class FeasibilityStatus(str, Enum):
    FEASIBLE = "feasible"
    ODD_TOTAL = "odd_total"
    ODD_PURE_COUNT = "odd_pure_count"
    M1_DEFICIT = "m1_deficit"


@dataclass(frozen=True)
class Infeasible:
    """Residual degrees that admit no B-graph, so the induced probability is 0."""

    reason: str


def moments(ds: DegreeSequence, subset: Iterable[int]) -> Moments:
    """
    Compute M_1 and M_2 of a vertex subset.

    Args:
        ds: Degree sequence
        subset: 0-based vertex indices

    Returns:
        Moments(sum of d_i, sum of d_i(d_i - 1))

    Raises:
        ValidationError: If an index is out of range
    """
    subset = list(subset)
    for i in subset:
        if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < ds.n:
            raise ValidationError(f"Vertex index {i!r} out of range for n={ds.n}")
    m1 = sum(ds.degrees[i] for i in subset)
    m2 = sum(ds.degrees[i] * (ds.degrees[i] - 1) for i in subset)
    return Moments(m1, m2)


def feasibility(ds: DegreeSequence, bip: Bipartition) -> FeasibilityStatus:
    """
    Classify an instance by the conditions under which restricted pairings exist.

    A deficit is reported before parity. Since M and M_1(R) - M_1(L) always have
    the same parity, odd instances are ODD_TOTAL when L is empty and
    ODD_PURE_COUNT otherwise.
    """
    left = moments(ds, bip.left)
    right = moments(ds, bip.right)
    if right.m1 < left.m1:
        return FeasibilityStatus.M1_DEFICIT
    if (right.m1 - left.m1) % 2:
        return FeasibilityStatus.ODD_PURE_COUNT if bip.left else FeasibilityStatus.ODD_TOTAL
    return FeasibilityStatus.FEASIBLE


def mu_parameters(ds: DegreeSequence, bip: Bipartition) -> MuParameters:
    """
    Exact mu0, mu1, mu2 and the pure-pair count t.

    Args:
        ds: Degree sequence
        bip: Bipartition (L, R)

    Returns:
        MuParameters with mu2 == mu0 ** 2 exactly. When M_1(R) = 0 there are no
        pairs at all, so mu0, mu1, mu2 and t are all 0 and P(simple) is 1.

    Raises:
        InfeasibleError: If M_1(R) < M_1(L) or M_1(R) - M_1(L) is odd. This is
            checked first, so L-points with no R-points raise rather than give 0.
    """
    left = moments(ds, bip.left)
    right = moments(ds, bip.right)
    if right.m1 < left.m1:
        raise InfeasibleError(
            f"M1(R)={right.m1} is smaller than M1(L)={left.m1}", FeasibilityStatus.M1_DEFICIT
        )
    diff = right.m1 - left.m1
    if diff % 2:
        raise InfeasibleError(
            f"M1(R)-M1(L)={diff} is odd", FeasibilityStatus.ODD_PURE_COUNT
        )
    if right.m1 == 0:
        zero = Fraction(0)
        return MuParameters(zero, zero, zero, 0)
    scale = 2 * right.m1 * right.m1
    mu0 = Fraction(diff * right.m2, scale)
    mu1 = Fraction(right.m2 * left.m2, scale)
    return MuParameters(mu0=mu0, mu1=mu1, mu2=mu0 * mu0, t=diff // 2)


def mu_single(ds: DegreeSequence) -> Fraction:
    """mu(d) = M_2 / (2M), with mu = 0 for the empty graph."""
    if ds.M == 0:
        return Fraction(0)
    return Fraction(ds.M2, 2 * ds.M)


def residual(
    ds: DegreeSequence, spec: InducedSubgraphSpec
) -> Union[DegreeSequence, Infeasible]:
    """
    Degrees left over once H is placed on S.

    Returns:
        d' with d'_i = d_i - k_i on S, or Infeasible when some d'_i < 0 or the
        vertices outside S cannot absorb the residual degree of S
    """
    is_valid, error = SubsetValidator.validate_subset(spec.S, ds.n)
    if not is_valid:
        raise ValidationError(error)
    degrees = list(ds.degrees)
    for vertex, k in zip(spec.S, spec.k):
        degrees[vertex] -= k
        if degrees[vertex] < 0:
            return Infeasible(f"negative residual degree at vertex {vertex + 1}")
    reduced = DegreeSequence(tuple(degrees))
    bip = spec.bipartition(ds.n)
    if moments(reduced, bip.right).m1 < moments(reduced, bip.left).m1:
        return Infeasible("M1(d', [n] minus S) < M1(d', S)")
    logger.debug("residual degrees %s", reduced)
    return reduced
