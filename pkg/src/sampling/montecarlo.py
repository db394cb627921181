"""
Monte Carlo estimators over uniform restricted pairings.

Trials are cut into fixed-size chunks; chunk k draws from the substream
SeedSequence(seed, spawn_key=(k,)), so results depend only on (seed, trials,
instance) and never on the number of workers. Chunk accumulators hold exact
integer sums and are merged in chunk order.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from src.counting.exactcount import ClassKey
from src.counting.formulas import expected_defect_counts
from src.models.degseq import Bipartition, DegreeSequence, moments, mu_parameters
from src.models.pairing import (
    DEFECT_FIELDS,
    defect_census_batch,
    pairing_from_row,
    sample_pair_batch,
    two_path_census,
)
from src.utils.errors import InsufficientDataError
from src.utils.settings import Settings
from src.utils.validators import ValidationError

logger = logging.getLogger(__name__)

PATH_TYPES = (1, 2, 3, 4)


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its normal-approximation standard error."""

    mean: float
    stderr: float
    trials: int
    seed: int
    predicted: Optional[float] = None

    @classmethod
    def from_sums(cls, total: int, squares: int, count: int, seed: int, predicted=None) -> "Estimate":
        """
        Build an estimate from exact sums.

        Args:
            total: Sum of the sample values
            squares: Sum of their squares
            count: Number of samples (> 0)
            seed: Seed of the run
            predicted: Value the mean is compared against

        Returns:
            Estimate whose stderr is the sample standard deviation over sqrt(count)
        """
        mean = total / count
        if count < 2:
            return cls(mean, 0.0, count, seed, predicted)
        variance = max(squares - total * total / count, 0.0) / (count - 1)
        return cls(mean, math.sqrt(variance / count), count, seed, predicted)


@dataclass
class DefectMeansReport:
    estimates: Dict[str, Estimate]
    exact_expectations: Dict[str, float]
    scales: Dict[str, float]


@dataclass
class ClassConditionalReport:
    """Conditional 2-path statistics on one defect class, by rejection."""

    key: ClassKey
    hits: int
    trials: int
    a: Dict[int, Estimate]
    b: Dict[int, Estimate]
    predicted: Dict[str, float] = field(default_factory=dict)
    identity_violations: int = 0

    def b_ratio(self, path_type: int) -> float:
        """b_i / a_i^2 from the estimates."""
        mean = self.a[path_type].mean
        return self.b[path_type].mean / (mean * mean) if mean else float("nan")


def chunk_plan(trials: int, chunk_trials: int) -> List[Tuple[int, int]]:
    """(chunk index, chunk size) pairs covering `trials`."""
    if trials < 1:
        raise ValidationError(f"trials must be positive, got {trials}")
    plan = []
    start = 0
    index = 0
    while start < trials:
        size = min(chunk_trials, trials - start)
        plan.append((index, size))
        start += size
        index += 1
    return plan


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _defect_chunk(args) -> Dict[str, Tuple[int, int]]:
    """Per-chunk sums and sums of squares of every census field plus is_simple."""
    degrees, left, seed, index, size = args
    ds = DegreeSequence(degrees)
    bip = Bipartition.from_left(len(degrees), left)
    pairs = sample_pair_batch(ds, bip, chunk_rng(seed, index), size)
    census = defect_census_batch(ds, bip, pairs)
    simple = np.ones(size, dtype=np.int64)
    for name in DEFECT_FIELDS:
        simple &= (census[name] == 0).astype(np.int64)
    census["simple"] = simple
    return {name: (int(values.sum()), int((values * values).sum())) for name, values in census.items()}


def _class_chunk(args) -> Dict[str, object]:
    """Per-chunk 2-path sums over the pairings that land in the requested class."""
    degrees, left, seed, index, size, key_fields, m2_right, m2_left = args
    ds = DegreeSequence(degrees)
    bip = Bipartition.from_left(len(degrees), left)
    pairs = sample_pair_batch(ds, bip, chunk_rng(seed, index), size)
    census = defect_census_batch(ds, bip, pairs)
    l0, l1, l2, higher = key_fields
    mask = (census["b0"] == l0) & (census["b1"] == l1) & (census["b2"] == l2)
    has_higher = (census["t1"] > 0) | (census["t2"] > 0) | (census["i_dl"] > 0)
    mask &= has_higher if higher else ~has_higher
    sums = {f"a{i}": [0, 0, 0] for i in PATH_TYPES}
    violations = 0
    hits = 0
    for row in pairs[mask]:
        paths = two_path_census(pairing_from_row(ds, bip, row), with_disjoint=False)
        hits += 1
        for i in PATH_TYPES:
            value = paths.a(i)
            sums[f"a{i}"][0] += value
            sums[f"a{i}"][1] += value * value
            sums[f"a{i}"][2] += value ** 4
        if key_fields == (0, 0, 0, False):
            if paths.a1 + 2 * paths.a2 + paths.a3 != m2_right or paths.a4 != m2_left:
                violations += 1
    return {"hits": hits, "sums": sums, "violations": violations}


def _run_chunks(
    worker: Callable,
    payloads: List[tuple],
    workers: int,
    progress: bool,
) -> List:
    """Run chunk payloads, returning results in payload order."""
    if workers <= 1 or len(payloads) == 1:
        return [worker(p) for p in tqdm(payloads, desc="chunks", disable=not progress)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(worker, payloads), total=len(payloads), desc="chunks", disable=not progress))


def _defect_sums(
    ds: DegreeSequence,
    bip: Bipartition,
    trials: int,
    seed: int,
    settings: Settings,
    progress: bool,
) -> Dict[str, Tuple[int, int]]:
    plan = chunk_plan(trials, settings.chunk_trials)
    payloads = [(ds.degrees, bip.left, seed, index, size) for index, size in plan]
    logger.debug("running %d trials in %d chunks (seed %d)", trials, len(plan), seed)
    merged: Dict[str, List[int]] = {}
    for result in _run_chunks(_defect_chunk, payloads, settings.workers, progress):
        for name, (total, squares) in result.items():
            entry = merged.setdefault(name, [0, 0])
            entry[0] += total
            entry[1] += squares
    return {name: (total, squares) for name, (total, squares) in merged.items()}


def estimate_p_simple(
    ds: DegreeSequence,
    bip: Bipartition,
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    progress: bool = False,
) -> Estimate:
    """
    Fraction of uniform restricted pairings that are simple.

    Args:
        ds: Degree sequence
        bip: Bipartition (L, R)
        trials: Number of sampled pairings
        seed: Root seed of the run
        settings: Chunk size and worker count
        progress: Show a tqdm bar over chunks

    Returns:
        Estimate with `predicted` = exp(-mu0 - mu1 - mu2)

    Raises:
        InfeasibleError: If the instance has no restricted pairing
    """
    settings = settings or Settings.from_env()
    sums = _defect_sums(ds, bip, trials, seed, settings, progress)
    predicted = math.exp(-float(mu_parameters(ds, bip).total))
    total, squares = sums["simple"]
    return Estimate.from_sums(total, squares, trials, seed, predicted)


def estimate_defect_means(
    ds: DegreeSequence,
    bip: Bipartition,
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    progress: bool = False,
) -> DefectMeansReport:
    """
    Sample means of B0, B1, B2, T1, T2 and I.

    B0..B2 are compared with mu0..mu2. The report also carries the exact finite-size
    expectations and the d_max^4/M and d_max^3/M scales of the higher defects.
    """
    settings = settings or Settings.from_env()
    sums = _defect_sums(ds, bip, trials, seed, settings, progress)
    mus = mu_parameters(ds, bip)
    predicted = {"b0": float(mus.mu0), "b1": float(mus.mu1), "b2": float(mus.mu2)}
    estimates = {
        name: Estimate.from_sums(*sums[name], trials, seed, predicted.get(name))
        for name in DEFECT_FIELDS
    }
    exact = {name: float(value) for name, value in expected_defect_counts(ds, bip).items()}
    scales = {
        "t": ds.d_max ** 4 / ds.M if ds.M else 0.0,
        "i_dl": ds.d_max ** 3 / ds.M if ds.M else 0.0,
    }
    return DefectMeansReport(estimates, exact, scales)


def _two_path_predictions(ds: DegreeSequence, bip: Bipartition) -> Dict[str, float]:
    """Leading-order a1 or a3 on C_{0,0,0}, whichever regime applies."""
    left = moments(ds, bip.left)
    right = moments(ds, bip.right)
    if right.m1 == 0:
        return {}
    if 4 * left.m1 <= ds.M:
        return {"a1": (right.m1 - left.m1) ** 2 * right.m2 / right.m1 ** 2}
    return {"a3": left.m1 ** 2 * right.m2 / right.m1 ** 2}


def estimate_class_conditional(
    ds: DegreeSequence,
    bip: Bipartition,
    key: ClassKey,
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    progress: bool = False,
) -> ClassConditionalReport:
    """
    Conditional means of A_i and A_i^2 on C_key, by rejection.

    On the defect-free class every kept sample is also checked against the exact
    identities A1 + 2A2 + A3 = M_2(R) and A4 = M_2(L); failures are counted in
    `identity_violations`.

    Raises:
        InsufficientDataError: If fewer than two samples land in the class
    """
    settings = settings or Settings.from_env()
    m2_right = moments(ds, bip.right).m2
    m2_left = moments(ds, bip.left).m2
    key_fields = (key.l0, key.l1, key.l2, key.has_higher_defect)
    plan = chunk_plan(trials, settings.chunk_trials)
    payloads = [
        (ds.degrees, bip.left, seed, index, size, key_fields, m2_right, m2_left)
        for index, size in plan
    ]
    hits = 0
    violations = 0
    sums = {i: [0, 0, 0] for i in PATH_TYPES}
    for result in _run_chunks(_class_chunk, payloads, settings.workers, progress):
        hits += result["hits"]
        violations += result["violations"]
        for i in PATH_TYPES:
            for moment in range(3):
                sums[i][moment] += result["sums"][f"a{i}"][moment]
    if hits < 2:
        raise InsufficientDataError(f"{key.label()} was hit {hits} times in {trials} trials")
    if violations:
        logger.warning("2-path identity failed on %d defect-free samples", violations)

    a = {i: Estimate.from_sums(sums[i][0], sums[i][1], hits, seed) for i in PATH_TYPES}
    b = {i: Estimate.from_sums(sums[i][1], sums[i][2], hits, seed) for i in (1, 3)}
    return ClassConditionalReport(
        key=key,
        hits=hits,
        trials=trials,
        a=a,
        b=b,
        predicted=_two_path_predictions(ds, bip),
        identity_violations=violations,
    )
