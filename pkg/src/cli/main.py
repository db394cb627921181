"""
Command-line front end.

Every subcommand writes one record per computed quantity, as JSON lines by default
or as CSV with --csv. Records always carry the same fields (RECORD_FIELDS).

Exit codes:
    0  success
    1  usage error, malformed input or any other failure
    2  infeasible instance or empty model
"""

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, TextIO

import numpy as np
from tqdm import tqdm

from src.cache.exact_cache import ExactResultCache
from src.counting.exactcount import (
    ClassKey,
    exact_bgraph_count,
    exact_class_table,
    exact_graph_count,
    exact_induced_probability,
    exact_p_simple,
)
from src.counting.formulas import (
    FormulaOutput,
    error_scale,
    expected_defect_counts,
    g_asymptotic,
    g_bgraph_asymptotic,
    independent_set_probability,
    induced_probability_asymptotic,
    induced_probability_simplified,
)
from src.models.degseq import (
    Bipartition,
    DegreeSequence,
    FeasibilityStatus,
    InducedSubgraphSpec,
    feasibility,
    mu_parameters,
)
from src.models.pairing import DEFECT_FIELDS, defect_census, sample_restricted
from src.processors.instance_parser import InstanceSpec, parse_instance
from src.sampling.montecarlo import (
    Estimate,
    chunk_rng,
    estimate_class_conditional,
    estimate_defect_means,
    estimate_p_simple,
)
from src.switching.patterns import SwitchingName
from src.switching.switchings import verify_all_double_counts
from src.utils.errors import BGraphError, InfeasibleError, UndefinedModelError
from src.utils.log_space import LogValue
from src.utils.settings import Settings
from src.utils.work_estimator import WorkEstimator, get_work_warning_message

logger = logging.getLogger(__name__)

RECORD_FIELDS = ("instance", "quantity", "value", "log_value", "stderr", "error_hint", "seed", "trials")
LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class UsageError(BGraphError):
    """Command line could not be parsed."""
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def encode_value(value: Any) -> Any:
    """
    Map a result onto JSON: ints stay ints, rationals become "p/q", non-finite floats null.
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    return str(value)


def _log_of(value: Any) -> Optional[float]:
    if isinstance(value, (int, Fraction, float)) and not isinstance(value, bool) and value > 0:
        return LogValue.from_number(value).log_value
    return None


class ReportWriter:
    """Emit records as JSON lines or CSV rows."""

    def __init__(self, stream: TextIO, as_csv: bool = False):
        self.stream = stream
        self._csv = csv.DictWriter(stream, fieldnames=RECORD_FIELDS, lineterminator="\n") if as_csv else None
        self._header_written = False

    def emit(
        self,
        instance: str,
        quantity: str,
        value: Any,
        log_value: Optional[float] = None,
        stderr: Optional[float] = None,
        error_hint: Optional[float] = None,
        seed: Optional[int] = None,
        trials: Optional[int] = None,
    ) -> Dict[str, Any]:
        if log_value is None:
            log_value = _log_of(value)
        record = {
            "instance": instance,
            "quantity": quantity,
            "value": encode_value(value),
            "log_value": encode_value(log_value),
            "stderr": encode_value(stderr),
            "error_hint": encode_value(error_hint),
            "seed": seed,
            "trials": trials,
        }
        if self._csv is None:
            self.stream.write(json.dumps(record) + "\n")
        else:
            if not self._header_written:
                self._csv.writeheader()
                self._header_written = True
            self._csv.writerow(
                {k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in record.items()}
            )
        self.stream.flush()
        return record

    def emit_formula(self, instance: str, quantity: str, output: FormulaOutput) -> None:
        """One record for the point value and one per variant."""
        for flag in output.flags:
            if flag in ("outside_regime", "stirling_unreliable"):
                logger.warning("%s for %s: %s", quantity, instance, flag)
        self.emit(
            instance,
            quantity,
            output.value,
            None if output.point.is_zero else output.log_value,
            error_hint=output.error_hint,
        )
        for name, variant in sorted(output.variants.items()):
            self.emit(
                instance,
                f"{quantity}_{name}",
                variant.value,
                None if variant.is_zero else variant.log_value,
                error_hint=output.error_hint,
            )

    def emit_estimate(self, instance: str, quantity: str, estimate: Estimate) -> None:
        self.emit(
            instance,
            quantity,
            estimate.mean,
            stderr=estimate.stderr,
            seed=estimate.seed,
            trials=estimate.trials,
        )


def instance_label(ds: DegreeSequence, bip: Bipartition, spec: Optional[InducedSubgraphSpec] = None) -> str:
    """Short 1-based description of an instance, e.g. "3^10 S=1,2 h=1"."""
    label = f"{ds.d_max}^{ds.n}" if ds.n > 1 and ds.is_regular else str(ds)
    if bip.left:
        label += " L=" + ",".join(str(v + 1) for v in bip.left)
    if spec is not None:
        label += " S=" + ",".join(str(v + 1) for v in spec.S) + f" h={spec.h}"
    return label


def _require_feasible(ds: DegreeSequence, bip: Bipartition) -> None:
    status = feasibility(ds, bip)
    if status is not FeasibilityStatus.FEASIBLE:
        raise InfeasibleError(f"{instance_label(ds, bip)} is infeasible: {status.value}", status)


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    seed = int(np.random.SeedSequence().entropy)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _open_cache(args: argparse.Namespace, settings: Settings) -> Optional[ExactResultCache]:
    if args.no_cache or not settings.enable_cache:
        return None
    return ExactResultCache(settings.cache_directory)


def _cached(
    cache: Optional[ExactResultCache],
    quantity: str,
    ds: DegreeSequence,
    bip: Bipartition,
    extra: str,
    compute: Callable[[], Any],
) -> Any:
    if cache is None:
        return compute()
    key = cache.generate_cache_key(quantity, ds.degrees, bip.left, extra)
    value = cache.get(key)
    if value is not None:
        logger.debug("cache hit for %s on %s", quantity, ds)
        return value
    value = compute()
    cache.put(key, value, {"quantity": quantity, "degrees": str(ds), "extra": extra})
    return value


def _warn_enumeration(ds: DegreeSequence, bip: Bipartition, settings: Settings) -> None:
    message = get_work_warning_message(WorkEstimator.pairing_count(ds, bip), settings.work_warn)
    if message:
        logger.warning(message)


def _parse(args: argparse.Namespace):
    return parse_instance(InstanceSpec(args.degrees, args.left, args.subgraph))


def _subgraph_key(spec: InducedSubgraphSpec) -> str:
    return f"S={spec.S};E={spec.edges}"


def cmd_formula(args: argparse.Namespace, settings: Settings, writer: ReportWriter) -> None:
    ds, bip, spec = _parse(args)
    label = instance_label(ds, bip, spec)
    if args.independent_set_size is not None:
        if not ds.is_regular or ds.d_max == 0:
            raise UsageError("--independent-set-size needs a regular degree sequence with d > 0")
        output = independent_set_probability(ds.n, ds.d_max, args.independent_set_size, settings)
        writer.emit_formula(f"{label} s={args.independent_set_size}", "independent_set", output)
        return
    if spec is not None:
        if bip.left:
            raise UsageError("--left cannot be combined with --subgraph; S plays the role of L")
        writer.emit_formula(label, "induced", induced_probability_asymptotic(ds, spec, settings))
        if args.simplified:
            if not ds.is_regular or ds.d_max == 0:
                raise UsageError("--simplified needs a regular degree sequence with d > 0")
            output = induced_probability_simplified(ds.n, ds.d_max, spec, settings)
            writer.emit_formula(label, "induced_simplified", output)
        return

    _require_feasible(ds, bip)
    if bip.left:
        writer.emit_formula(label, "g_bgraph", g_bgraph_asymptotic(ds, bip, settings))
    else:
        writer.emit_formula(label, "g", g_asymptotic(ds, settings))
    mus = mu_parameters(ds, bip)
    writer.emit(label, "mu", {"mu0": mus.mu0, "mu1": mus.mu1, "mu2": mus.mu2, "t": mus.t}, error_hint=error_scale(ds))


def cmd_exact(args: argparse.Namespace, settings: Settings, writer: ReportWriter) -> None:
    ds, bip, spec = _parse(args)
    _require_feasible(ds, bip)
    label = instance_label(ds, bip, spec)
    cache = _open_cache(args, settings)

    if args.class_table:
        _warn_enumeration(ds, bip, settings)
        table = exact_class_table(ds, bip, settings)
        writer.emit(label, "class_table", {"total": table.total, "classes": table.as_dict()})
    elif args.p_simple:
        _warn_enumeration(ds, bip, settings)
        value = _cached(cache, "p_simple", ds, bip, "", lambda: exact_p_simple(ds, bip, settings))
        writer.emit(label, "p_simple", value)
    elif args.expectations:
        writer.emit(label, "expected_defects", expected_defect_counts(ds, bip))
    elif spec is not None:
        value = _cached(
            cache, "induced", ds, bip, _subgraph_key(spec),
            lambda: exact_induced_probability(ds, spec, settings),
        )
        writer.emit(label, "induced", value)
    elif bip.left:
        value = _cached(cache, "g_bgraph", ds, bip, "", lambda: exact_bgraph_count(ds, bip, settings))
        writer.emit(label, "g_bgraph", value)
    else:
        value = _cached(cache, "g", ds, bip, "", lambda: exact_graph_count(ds, settings))
        writer.emit(label, "g", value)


def cmd_sample(args: argparse.Namespace, settings: Settings, writer: ReportWriter) -> None:
    ds, bip, _ = _parse(args)
    _require_feasible(ds, bip)
    label = instance_label(ds, bip)
    seed = _resolve_seed(args.seed)
    for index in range(args.count):
        P = sample_restricted(ds, bip, chunk_rng(seed, index))
        census = defect_census(P)
        writer.emit(
            label,
            "pairing",
            {"index": index, "pairing": P.to_text(), "census": census.as_dict(), "simple": census.is_clean},
            seed=seed,
            trials=1,
        )


def cmd_estimate(args: argparse.Namespace, settings: Settings, writer: ReportWriter) -> None:
    ds, bip, _ = _parse(args)
    _require_feasible(ds, bip)
    label = instance_label(ds, bip)
    seed = _resolve_seed(args.seed)
    if args.workers:
        settings = dataclasses.replace(settings, workers=args.workers)

    if args.quantity == "p-simple":
        estimate = estimate_p_simple(ds, bip, args.trials, seed, settings, args.progress)
        writer.emit_estimate(label, "p_simple", estimate)
        writer.emit(label, "p_simple_predicted", estimate.predicted, error_hint=error_scale(ds))
    elif args.quantity == "defects":
        report = estimate_defect_means(ds, bip, args.trials, seed, settings, args.progress)
        for name in DEFECT_FIELDS:
            estimate = report.estimates[name]
            writer.emit_estimate(label, f"mean_{name}", estimate)
            writer.emit(label, f"expected_{name}", report.exact_expectations.get(name))
            if estimate.predicted is not None:
                writer.emit(label, f"mu{name[1]}", estimate.predicted)
        for name, scale in report.scales.items():
            writer.emit(label, f"scale_{name}", scale)
    else:
        report = estimate_class_conditional(ds, bip, args.key, args.trials, seed, settings, args.progress)
        prefix = f"{label} {args.key.label()}"
        writer.emit(prefix, "class_hits", report.hits, seed=seed, trials=args.trials)
        for i, estimate in sorted(report.a.items()):
            writer.emit_estimate(prefix, f"a{i}", estimate)
        for i, estimate in sorted(report.b.items()):
            writer.emit_estimate(prefix, f"b{i}", estimate)
            writer.emit(prefix, f"b{i}_over_a{i}_squared", report.b_ratio(i), seed=seed, trials=report.hits)
        for name, value in sorted(report.predicted.items()):
            writer.emit(prefix, f"predicted_{name}", value)
        writer.emit(prefix, "identity_violations", report.identity_violations, seed=seed, trials=report.hits)


def cmd_verify_switchings(args: argparse.Namespace, settings: Settings, writer: ReportWriter) -> None:
    ds, bip, _ = _parse(args)
    _require_feasible(ds, bip)
    label = instance_label(ds, bip)
    _warn_enumeration(ds, bip, settings)
    reports = verify_all_double_counts(ds, bip, args.kinds, settings, args.progress)
    for report in reports:
        if not report.holds:
            logger.error(
                "%s double count fails on %s -> %s: %d != %d",
                report.kind.value, report.key_high.label(), report.key_low.label(),
                report.forward_total, report.inverse_total,
            )
        writer.emit(
            label,
            f"double_count_{report.kind.value}",
            {
                "high": report.key_high.label(),
                "low": report.key_low.label(),
                "high_size": report.high_size,
                "low_size": report.low_size,
                "forward_total": report.forward_total,
                "inverse_total": report.inverse_total,
                "holds": report.holds,
                "exact_ratio": report.exact_ratio,
                "predicted_ratio": report.predicted_ratio,
            },
        )


def _relative_error(approx: float, exact) -> Optional[float]:
    return abs(approx - float(exact)) / float(exact) if exact else None


def cmd_sweep(args: argparse.Namespace, settings: Settings, writer: ReportWriter) -> None:
    cache = _open_cache(args, settings)
    seed = _resolve_seed(args.seed) if args.trials else None
    grid = [(n, d) for n in args.n_values for d in args.d_values]
    for n, d in tqdm(grid, desc="sweep", disable=not args.progress):
        if (n * d) % 2 or d >= n or d < 1:
            logger.info("skipping n=%d d=%d", n, d)
            continue
        ds = DegreeSequence.regular(n, d)
        empty = Bipartition.empty(n)
        label = instance_label(ds, empty)
        with_exact = ds.M <= settings.max_graph_points

        asymptotic = g_asymptotic(ds, settings)
        writer.emit_formula(label, "g_asymptotic", asymptotic)
        if with_exact:
            exact = _cached(cache, "g", ds, empty, "", lambda: exact_graph_count(ds, settings))
            writer.emit(label, "g_exact", exact)
            writer.emit(label, "g_relative_error", _relative_error(asymptotic.value, exact))

        for s in args.s_values:
            if s < 0 or 2 * s >= n:
                continue
            point = f"{label} s={s}"
            formula = independent_set_probability(n, d, s, settings)
            writer.emit_formula(point, "independent_set_formula", formula)
            if with_exact:
                spec = InducedSubgraphSpec.empty(range(s))
                exact = _cached(
                    cache, "induced", ds, empty, _subgraph_key(spec),
                    lambda: exact_induced_probability(ds, spec, settings),
                )
                writer.emit(point, "independent_set_exact", exact)
                writer.emit(point, "independent_set_relative_error", _relative_error(formula.value, exact))

        if args.trials:
            estimate = estimate_p_simple(ds, empty, args.trials, seed, settings)
            writer.emit_estimate(label, "p_simple_mc", estimate)
            writer.emit(label, "p_simple_formula", math.exp(-(d * d - 1) / 4), error_hint=error_scale(ds))


def _int_list(text: str) -> List[int]:
    try:
        return [int(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}")


def _kind_list(text: str) -> List[SwitchingName]:
    kinds = []
    for token in text.split(","):
        try:
            kinds.append(SwitchingName(token.strip().upper()))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown switching {token!r}; choose from {', '.join(k.value for k in SwitchingName)}"
            )
    return kinds


def _class_key(text: str) -> ClassKey:
    higher = text.endswith("+")
    values = _int_list(text.rstrip("+"))
    if len(values) != 3 or min(values) < 0:
        raise argparse.ArgumentTypeError(f"expected l0,l1,l2 (optionally with a trailing +), got {text!r}")
    return ClassKey(*values, has_higher_defect=higher)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per subcommand."""
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--csv", action="store_true", help="Emit CSV instead of JSON lines")
    output.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    output.add_argument("--progress", action="store_true", help="Show progress bars")

    instance = argparse.ArgumentParser(add_help=False)
    instance.add_argument("--degrees", required=True, help='Degree spec, e.g. "3,3,2,1" or "3^100"')
    instance.add_argument("--left", default="none", help='1-based L vertices, e.g. "1,4", or "none"')

    parser = _ArgumentParser(prog="bgraph", description="Induced-subgraph probabilities in random graphs with given degrees")
    subparsers = parser.add_subparsers(dest="command", required=True)

    formula = subparsers.add_parser("formula", parents=[output, instance], help="Asymptotic formulas")
    formula.add_argument("--subgraph", help="H file: header `S: i1 ... is`, then `u v` per line")
    formula.add_argument("--independent-set-size", type=int, help="Probability that {1..s} is independent")
    formula.add_argument("--simplified", action="store_true", help="Also emit the leading-order form")
    formula.set_defaults(handler=cmd_formula)

    exact = subparsers.add_parser("exact", parents=[output, instance], help="Exhaustive oracles")
    exact.add_argument("--subgraph", help="H file for an exact induced probability")
    group = exact.add_mutually_exclusive_group()
    group.add_argument("--class-table", action="store_true", help="Sizes of every defect class")
    group.add_argument("--p-simple", action="store_true", help="Exact P(simple)")
    group.add_argument("--expectations", action="store_true", help="Exact expected defect counts")
    exact.add_argument("--no-cache", action="store_true", help="Bypass the exact-result cache")
    exact.set_defaults(handler=cmd_exact)

    sample = subparsers.add_parser("sample", parents=[output, instance], help="Random restricted pairings")
    sample.add_argument("--count", type=int, default=1)
    sample.add_argument("--seed", type=int)
    sample.set_defaults(handler=cmd_sample, subgraph=None)

    estimate = subparsers.add_parser("estimate", parents=[output, instance], help="Monte Carlo estimates")
    estimate.add_argument("quantity", choices=["p-simple", "defects", "class"])
    estimate.add_argument("--trials", type=int, default=10_000)
    estimate.add_argument("--seed", type=int)
    estimate.add_argument("--workers", type=int, help="Process-pool size (overrides BGRAPH_WORKERS)")
    estimate.add_argument("--key", type=_class_key, default=ClassKey(), help='Class for "class", e.g. "0,0,0"')
    estimate.set_defaults(handler=cmd_estimate, subgraph=None)

    verify = subparsers.add_parser("verify-switchings", parents=[output, instance], help="Double-count identities")
    verify.add_argument("--kinds", type=_kind_list, help='Comma list such as "L1,D2"; default all')
    verify.set_defaults(handler=cmd_verify_switchings, subgraph=None)

    sweep = subparsers.add_parser("sweep", parents=[output], help="Formula vs exact over a regular grid")
    sweep.add_argument("--n-values", type=_int_list, default=[8, 10, 12, 14])
    sweep.add_argument("--d-values", type=_int_list, default=[3])
    sweep.add_argument("--s-values", type=_int_list, default=[2, 3])
    sweep.add_argument("--trials", type=int, default=0, help="Also estimate P(simple) with this many trials")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--no-cache", action="store_true", help="Bypass the exact-result cache")
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def _configure_logging(verbose: bool, level: str) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level, logging.WARNING),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        Process exit code
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = Settings.from_env()
    _configure_logging(args.verbose, settings.log_level)
    writer = ReportWriter(sys.stdout, args.csv)
    try:
        args.handler(args, settings, writer)
    except (InfeasibleError, UndefinedModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
