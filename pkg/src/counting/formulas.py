"""
Closed-form counts and probabilities for graphs and B-graphs with given degrees.

Every asymptotic formula returns a FormulaOutput: the value in log space, the
exponent terms that were used (exact rationals) and the relative-error scale the
formula carries. Factorial prefactors are exact while M is small and go through
log-gamma beyond the configured threshold.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Optional, Tuple

from scipy.special import xlogy

from src.models.degseq import (
    Bipartition,
    DegreeSequence,
    FeasibilityStatus,
    Infeasible,
    InducedSubgraphSpec,
    feasibility,
    moments,
    mu_parameters,
    mu_single,
    residual,
)
from src.utils.errors import OutOfRangeError
from src.utils.log_space import LogValue, log_prefactor
from src.utils.settings import Settings
from src.utils.validators import ValidationError

if TYPE_CHECKING:
    from src.counting.exactcount import ClassKey

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormulaOutput:
    """Formula value with the exponent terms used and its error scale."""

    point: LogValue
    exponent_terms: Dict[str, Fraction] = field(default_factory=dict)
    error_hint: float = 0.0
    flags: Tuple[str, ...] = ()
    variants: Dict[str, LogValue] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return self.point.value

    @property
    def log_value(self) -> float:
        return self.point.log_value


def u_pairings(m: int) -> int:
    """
    Number of perfect matchings on m points, m! / (2^(m/2) (m/2)!).

    Raises:
        ValidationError: If m is negative or odd
    """
    if m < 0 or m % 2:
        raise ValidationError(f"U(m) needs an even nonnegative m, got {m}")
    return math.prod(range(1, m, 2))


def falling_factorial(x: int, k: int) -> int:
    """[x]_k = x(x-1)...(x-k+1); 1 for k = 0 and 0 for k > x."""
    return math.perm(x, k)


def _perm_or_zero(x: int, k: int) -> int:
    if x < 0 or k < 0:
        return 0
    return math.perm(x, k)


def _u_or_zero(m: int) -> int:
    if m < 0:
        return 0
    return u_pairings(m)


def count_restricted_pairings(ds: DegreeSequence, bip: Bipartition) -> int:
    """
    Size of M(L, R, d): [M_1(R)]_{M_1(L)} * U(M_1(R) - M_1(L)).

    Returns:
        The exact count, 0 for infeasible instances
    """
    if feasibility(ds, bip) is not FeasibilityStatus.FEASIBLE:
        return 0
    m1l = moments(ds, bip.left).m1
    m1r = moments(ds, bip.right).m1
    return falling_factorial(m1r, m1l) * u_pairings(m1r - m1l)


def error_scale(ds: DegreeSequence) -> float:
    """The relative-error scale d_max^4 / M (0 for the empty sequence)."""
    if ds.M == 0:
        return 0.0
    return ds.d_max ** 4 / ds.M


def _exact(total_points: int, settings: Settings) -> bool:
    return total_points <= settings.exact_threshold


def _bgraph_log_prefactor(ds: DegreeSequence, m1r: int, t: int, exact: bool) -> float:
    """log of M_1(R)! / (2^t t! prod d_i!)."""
    return log_prefactor([m1r], [t, *ds.degrees], pow2=-t, exact=exact)


def g_asymptotic(ds: DegreeSequence, settings: Optional[Settings] = None) -> FormulaOutput:
    """
    Asymptotic number of graphs with degree sequence ds.

    M!/(2^(M/2) (M/2)! prod d_i!) * exp(-mu - mu^2).

    Args:
        ds: Degree sequence
        settings: Thresholds (read from the environment when omitted)

    Returns:
        FormulaOutput; a zero value flagged `odd_total` when M is odd
    """
    settings = settings or Settings.from_env()
    hint = error_scale(ds)
    if ds.M % 2:
        return FormulaOutput(LogValue.zero(), {}, hint, ("odd_total",))
    mu = mu_single(ds)
    terms = {"mu": mu, "mu_squared": mu * mu}
    log_value = _bgraph_log_prefactor(ds, ds.M, ds.M // 2, _exact(ds.M, settings))
    log_value -= float(mu + mu * mu)
    return FormulaOutput(LogValue.from_log(log_value), terms, hint)


def g_bgraph_asymptotic(
    ds: DegreeSequence, bip: Bipartition, settings: Optional[Settings] = None
) -> FormulaOutput:
    """
    Asymptotic number of B-graphs with degree sequence ds and L independent.

    M_1(R)! exp(-mu0 - mu1 - mu2) / (2^t t! prod d_i!).

    Returns:
        FormulaOutput; a zero value flagged with the feasibility status when
        the instance is infeasible
    """
    settings = settings or Settings.from_env()
    hint = error_scale(ds)
    status = feasibility(ds, bip)
    if status is not FeasibilityStatus.FEASIBLE:
        return FormulaOutput(LogValue.zero(), {}, hint, (status.value,))
    mus = mu_parameters(ds, bip)
    terms = {"mu0": mus.mu0, "mu1": mus.mu1, "mu2": mus.mu2}
    m1r = moments(ds, bip.right).m1
    log_value = _bgraph_log_prefactor(ds, m1r, mus.t, _exact(ds.M, settings))
    log_value -= float(mus.mu0 + mus.mu1 + mus.mu2)
    return FormulaOutput(LogValue.from_log(log_value), terms, hint)


def _product_falling(degrees, ks) -> int:
    product = 1
    for d, k in zip(degrees, ks):
        product *= falling_factorial(d, k)
    return product


def induced_probability_asymptotic(
    ds: DegreeSequence,
    spec: InducedSubgraphSpec,
    settings: Optional[Settings] = None,
    route: str = "auto",
) -> FormulaOutput:
    """
    Asymptotic probability that a random graph with degrees ds induces H on S.

    Args:
        ds: Degree sequence
        spec: Prescribed subgraph H on S
        settings: Thresholds
        route: "auto" sends regular sequences to induced_probability_regular,
            "general" always uses the general formula, "regular" forces the
            regular one

    Returns:
        FormulaOutput; exactly zero when the residual degrees are infeasible
    """
    settings = settings or Settings.from_env()
    if route not in ("auto", "general", "regular"):
        raise ValidationError(f"Unknown route {route!r}")
    if route == "regular" or (route == "auto" and ds.d_max > 0 and ds.is_regular):
        if not ds.is_regular:
            raise ValidationError("The regular route needs a regular degree sequence")
        return induced_probability_regular(ds.n, ds.d_max, spec, settings)

    hint = error_scale(ds)
    if ds.M % 2:
        return FormulaOutput(LogValue.zero(), {}, hint, ("odd_total",))
    reduced = residual(ds, spec)
    if isinstance(reduced, Infeasible):
        return FormulaOutput(LogValue.zero(), {}, hint, ("infeasible_residual",))

    bip = spec.bipartition(ds.n)
    mus = mu_parameters(reduced, bip)
    mu = mu_single(ds)
    terms = {
        "mu0_residual": mus.mu0,
        "mu1_residual": mus.mu1,
        "mu2_residual": mus.mu2,
        "mu": mu,
        "mu_squared": mu * mu,
    }
    exponent = -(mus.mu0 + mus.mu1 + mus.mu2) + mu + mu * mu
    m1_rest = moments(reduced, bip.right).m1
    m1_s = moments(reduced, bip.left).m1
    ks = _product_falling([ds.degrees[v] for v in spec.S], spec.k)
    log_value = log_prefactor(
        [m1_rest, ds.M // 2],
        [(m1_rest - m1_s) // 2, ds.M],
        pow2=m1_s + spec.h // 2,
        num_extra=ks,
        exact=_exact(ds.M, settings),
    )
    log_value += float(exponent)
    return FormulaOutput(
        LogValue.from_log(log_value), terms, error_scale(reduced) + hint, ("general",)
    )


def induced_probability_regular(
    n: int, d: int, spec: InducedSubgraphSpec, settings: Optional[Settings] = None
) -> FormulaOutput:
    """
    Induced-subgraph probability in a random d-regular graph on n vertices.

    The main value is the factorial form; the `stirling` variant replaces the
    factorial ratio by (dn/e)^(-h/2) (1-s/n)^(dn-ds) / (1-2s/n+h/dn)^((dn-2ds+h)/2).

    Raises:
        ValidationError: If dn is odd
    """
    settings = settings or Settings.from_env()
    if d <= 0 or n <= 0:
        raise ValidationError(f"The regular formula needs d, n > 0, got d={d}, n={n}")
    ds = DegreeSequence.regular(n, d)
    if ds.M % 2:
        raise ValidationError(f"d*n = {ds.M} must be even")
    hint = error_scale(ds)
    reduced = residual(ds, spec)
    if isinstance(reduced, Infeasible):
        return FormulaOutput(LogValue.zero(), {}, hint, ("infeasible_residual", "regular"))

    s, h, dn = spec.s, spec.h, d * n
    mus = mu_parameters(reduced, spec.bipartition(n))
    terms = {
        "mu0_residual": mus.mu0,
        "mu1_residual": mus.mu1,
        "mu2_residual": mus.mu2,
        "mu_plus_mu_squared": Fraction(d * d - 1, 4),
    }
    exponent = float(-(mus.mu0 + mus.mu1 + mus.mu2) + Fraction(d * d - 1, 4))
    ks = _product_falling([d] * s, spec.k)
    log_value = log_prefactor(
        [dn - d * s, dn // 2],
        [(dn - 2 * d * s + h) // 2, dn],
        pow2=d * s - h // 2,
        num_extra=ks,
        exact=_exact(dn, settings),
    )
    log_value += exponent

    remaining = dn - 2 * d * s + h
    stirling = -(h / 2) * (math.log(dn) - 1.0)
    stirling += float(xlogy(dn - d * s, 1.0 - s / n))
    stirling -= float(xlogy(remaining / 2, remaining / dn))
    stirling += math.log(ks) + exponent
    return FormulaOutput(
        LogValue.from_log(log_value),
        terms,
        error_scale(reduced) + hint,
        ("regular",),
        {"stirling": LogValue.from_log(stirling)},
    )


def induced_probability_simplified(
    n: int, d: int, spec: InducedSubgraphSpec, settings: Optional[Settings] = None
) -> FormulaOutput:
    """
    Leading-order induced probability (dn)^(-h/2) prod [d]_{k_i}.

    The value is flagged `outside_regime` when (d^3 + s^2 d + d^2 s)/n exceeds the
    configured warning level.
    """
    settings = settings or Settings.from_env()
    s = spec.s
    hint = (d ** 3 + s * s * d + d * d * s) / n
    flags = ("outside_regime",) if hint > settings.regime_warn else ()
    if flags:
        logger.warning("simplified induced probability used outside its regime (hint %.3g)", hint)
    ks = _product_falling([d] * s, spec.k)
    if ks == 0:
        return FormulaOutput(LogValue.zero(), {}, hint, flags + ("infeasible_residual",))
    log_value = math.log(ks) - (spec.h / 2) * math.log(d * n)
    return FormulaOutput(LogValue.from_log(log_value), {}, hint, flags)


def independent_set_exponent(d: int, delta: Fraction) -> Fraction:
    """f(d, delta) = -delta (d-1)(delta d - 2 + delta) / (4 (1-delta)^2)."""
    return -delta * (d - 1) * (delta * d - 2 + delta) / (4 * (1 - delta) ** 2)


def independent_set_probability(
    n: int, d: int, s: int, settings: Optional[Settings] = None
) -> FormulaOutput:
    """
    Probability that a fixed s-set is independent in a random d-regular graph.

    Args:
        n: Number of vertices
        d: Degree
        s: Size of the set, 0 <= s < n/2
        settings: Thresholds

    Returns:
        FormulaOutput with the factorial form as its point and the Stirling form
        under variants["stirling"] (flagged when d(n - 2s) is small)

    Raises:
        ValidationError: If dn is odd or s is negative
        OutOfRangeError: If s >= n/2
    """
    settings = settings or Settings.from_env()
    if (d * n) % 2:
        raise ValidationError(f"d*n = {d * n} must be even")
    if s < 0:
        raise ValidationError(f"Set size must be nonnegative, got {s}")
    if 2 * s >= n:
        raise OutOfRangeError(f"Set size {s} must be below n/2 = {n / 2}")

    dn = d * n
    delta = Fraction(s, n)
    f = independent_set_exponent(d, delta)
    log_value = log_prefactor(
        [dn - d * s, dn // 2],
        [(dn - 2 * d * s) // 2, dn],
        pow2=d * s,
        exact=_exact(dn, settings),
    )
    log_value += float(f)

    one_minus, one_minus_two = 1.0 - float(delta), 1.0 - 2.0 * float(delta)
    stirling = 0.5 * math.log(one_minus / one_minus_two)
    stirling += dn * (float(xlogy(one_minus, one_minus)) - float(xlogy(one_minus_two / 2, one_minus_two)))
    stirling += float(f)

    flags: Tuple[str, ...] = ()
    if d * (n - 2 * s) < settings.stirling_min:
        flags = ("stirling_unreliable",)
    hint = d ** 3 / n if n else 0.0
    return FormulaOutput(
        LogValue.from_log(log_value), {"f": f}, hint, flags, {"stirling": LogValue.from_log(stirling)}
    )


def expected_defect_counts(ds: DegreeSequence, bip: Bipartition) -> Dict[str, Fraction]:
    """
    Exact expectations over a uniform restricted pairing.

    b0 is the expected number of loops. b1, b2 (t1, t2) count unordered sets of two
    (three) parallel mixed or pure pairs; they equal the census means whenever no
    vertex pair can carry more than two (three) pairs.

    Returns:
        Mapping with keys b0, b1, b2, t1, t2; all zero for infeasible instances
    """
    total = count_restricted_pairings(ds, bip)
    keys = ("b0", "b1", "b2", "t1", "t2")
    if total == 0:
        return {key: Fraction(0) for key in keys}
    m1l = moments(ds, bip.left).m1
    m1r = moments(ds, bip.right).m1
    free = m1r - m1l
    left = [ds.degrees[i] for i in bip.left]
    right = [ds.degrees[i] for i in bip.right]

    loops = sum(math.comb(d, 2) for d in right)
    mixed_doubles = 2 * sum(math.comb(d, 2) for d in left) * sum(math.comb(d, 2) for d in right)
    mixed_triples = 6 * sum(math.comb(d, 3) for d in left) * sum(math.comb(d, 3) for d in right)
    pair2 = [math.comb(d, 2) for d in right]
    pair3 = [math.comb(d, 3) for d in right]
    pure_doubles = 2 * (sum(pair2) ** 2 - sum(c * c for c in pair2)) // 2
    pure_triples = 6 * (sum(pair3) ** 2 - sum(c * c for c in pair3)) // 2

    return {
        "b0": Fraction(loops * _perm_or_zero(m1r - 2, m1l) * _u_or_zero(free - 2), total),
        "b1": Fraction(mixed_doubles * _perm_or_zero(m1r - 2, m1l - 2) * _u_or_zero(free), total),
        "b2": Fraction(pure_doubles * _perm_or_zero(m1r - 4, m1l) * _u_or_zero(free - 4), total),
        "t1": Fraction(mixed_triples * _perm_or_zero(m1r - 3, m1l - 3) * _u_or_zero(free), total),
        "t2": Fraction(pure_triples * _perm_or_zero(m1r - 6, m1l) * _u_or_zero(free - 6), total),
    }


def predicted_class_ratio(
    ds: DegreeSequence, bip: Bipartition, key: "ClassKey"
) -> Optional[float]:
    """
    Asymptotic |C_key| / |C_key'| where key' removes one defect of the first nonzero kind.

    Returns:
        mu0/l0, mu1/l1 or mu2/l2, or None for the defect-free key
    """
    mus = mu_parameters(ds, bip)
    for count, mu in ((key.l0, mus.mu0), (key.l1, mus.mu1), (key.l2, mus.mu2)):
        if count:
            return float(mu / count)
    return None
