"""Shared fixtures: import path, instance batteries and the `slow` marker."""

import sys
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Dict, List, Tuple

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.models.degseq import (  # noqa: E402
    Bipartition,
    DegreeSequence,
    FeasibilityStatus,
    feasibility,
    moments,
)
from src.switching.patterns import SwitchingName  # noqa: E402
from src.utils.settings import Settings  # noqa: E402

Instance = Tuple[DegreeSequence, Bipartition]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical checks on large instances")


def _left_choices(n: int) -> List[Tuple[int, ...]]:
    choices = [(), (0,), (n - 1,)]
    if n >= 3:
        choices.append((0, 1))
    return choices


def generate_battery(max_points: int, max_right_points: int, max_n: int = 5) -> List[Instance]:
    """Feasible instances with n <= max_n, degrees 1..3, M <= max_points."""
    battery = []
    seen = set()
    for n in range(2, max_n + 1):
        for degrees in combinations_with_replacement((3, 2, 1), n):
            ds = DegreeSequence(degrees)
            if ds.M > max_points:
                continue
            for left in _left_choices(n):
                bip = Bipartition.from_left(n, left)
                key = (ds.degrees, bip.left)
                if key in seen:
                    continue
                seen.add(key)
                if feasibility(ds, bip) is not FeasibilityStatus.FEASIBLE:
                    continue
                if moments(ds, bip.right).m1 > max_right_points:
                    continue
                battery.append((ds, bip))
    return battery


BATTERY = generate_battery(max_points=10, max_right_points=12)

# The smallest instances on which each switching kind has valid sites, as (degrees, L).
SITE_INSTANCES = {
    SwitchingName.L1: ((2, 1, 1, 1, 1), ()),
    SwitchingName.L2: ((2, 1, 1, 1, 1), (1, 2)),
    SwitchingName.D1: ((2, 2, 1, 1, 1, 1), (0,)),
    SwitchingName.D2: ((2, 2, 1, 1, 1, 1), (0, 2, 3)),
    SwitchingName.D3: ((2, 2, 1, 1, 1, 1), ()),
    SwitchingName.D4: ((2, 2, 1, 1, 1, 1, 1, 1, 1, 1), (2, 3, 4, 5)),
    SwitchingName.S1: ((1, 1, 1, 2, 1), (0,)),
    SwitchingName.S2: ((1, 2, 1, 1, 1), (0, 2)),
    SwitchingName.S3: ((1, 1, 1, 2, 1, 1, 2, 1), (0,)),
    SwitchingName.S4: ((1, 2, 1, 1, 1, 1, 2, 1), (0, 2)),
}


def _site_variants(degrees: Tuple[int, ...], left: Tuple[int, ...]) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """The instance, its reversed labeling and, when small, a copy with an extra R-R edge."""
    n = len(degrees)
    variants = [(degrees, left), (tuple(reversed(degrees)), tuple(sorted(n - 1 - v for v in left)))]
    if sum(degrees) <= 8:
        variants.append((degrees + (1, 1), left))
    return variants


def generate_switching_battery() -> Dict[SwitchingName, List[Instance]]:
    """Per kind, instances that are guaranteed to carry sites of that kind."""
    return {
        name: [
            (DegreeSequence(d), Bipartition.from_left(len(d), l))
            for d, l in _site_variants(degrees, left)
        ]
        for name, (degrees, left) in SITE_INSTANCES.items()
    }


SWITCHING_BATTERY = generate_switching_battery()


def instance_id(instance: Instance) -> str:
    ds, bip = instance
    return f"{ds}|L={','.join(map(str, bip.left)) or '-'}"


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def tiny():
    """The running example: degrees (1,1,2) with L = {first vertex}."""
    return DegreeSequence((1, 1, 2)), Bipartition.from_left(3, [0])


@pytest.fixture
def isolated_cache(tmp_path, monkeypatch):
    """Point the exact-result cache at a fresh directory."""
    cache_dir = tmp_path / "cache"
    monkeypatch.setenv("CACHE_DIRECTORY", str(cache_dir))
    return cache_dir
