import numpy as np
import pytest
from conftest import BATTERY, instance_id
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from src.counting.exactcount import enumerate_pairings
from src.counting.formulas import count_restricted_pairings
from src.models.degseq import Bipartition, DegreeSequence, moments
from src.models.pairing import (
    DefectCensus,
    Pairing,
    defect_census,
    defect_census_batch,
    is_simple,
    pairing_from_row,
    project,
    sample_pair_batch,
    sample_restricted,
    two_path_census,
    two_path_type,
)
from src.utils.errors import InfeasibleError
from src.utils.validators import ParseError, ValidationError


def tiny_pairings():
    """The three restricted pairings of (1,1,2) with L = {vertex 0}; points 0 | 1 | 2 3."""
    ds, bip = DegreeSequence((1, 1, 2)), Bipartition.from_left(3, [0])
    path_a = Pairing.from_pairs(ds, bip, [(0, 2), (1, 3)])
    path_b = Pairing.from_pairs(ds, bip, [(0, 3), (1, 2)])
    loop = Pairing.from_pairs(ds, bip, [(0, 1), (2, 3)])
    return path_a, path_b, loop


class TestPairing:
    def test_rejects_pair_inside_left(self):
        ds, bip = DegreeSequence((1, 1)), Bipartition.from_left(2, [0, 1])
        with pytest.raises(ValidationError):
            Pairing.from_pairs(ds, bip, [(0, 1)])

    def test_rejects_non_involution(self):
        with pytest.raises(ValidationError):
            Pairing((1, 1), (), (1, 1))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValidationError):
            Pairing((2, 2), (), (1, 0))

    def test_layout(self):
        P = tiny_pairings()[0]
        assert P.offsets == (0, 1, 2, 4)
        assert P.vertex_of == (0, 1, 2, 2)
        assert list(P.points_of(2)) == [2, 3]
        assert P.is_left_point(0) and not P.is_left_point(1)

    def test_multiplicity(self):
        path_a, _, loop = tiny_pairings()
        assert path_a.edge_multiplicity(0, 2) == 1
        assert loop.has_loop(2) and not path_a.has_loop(2)

    def test_replace(self):
        path_a, path_b, _ = tiny_pairings()
        assert path_a.replace([(0, 2), (1, 3)], [(0, 3), (1, 2)]) == path_b

    def test_replace_missing_pair(self):
        path_a, _, _ = tiny_pairings()
        with pytest.raises(ValidationError):
            path_a.replace([(0, 3)], [(0, 3)])

    def test_text_format(self):
        P = tiny_pairings()[2]
        text = P.to_text()
        assert text == "1 1 2; 1 0 3 2; 1"
        assert Pairing.from_text(text) == P

    def test_text_without_left(self):
        P = Pairing((2, 2), (), (2, 3, 0, 1))
        assert P.to_text() == "2 2; 2 3 0 1"
        assert Pairing.from_text(P.to_text()) == P

    def test_text_errors(self):
        with pytest.raises(ParseError):
            Pairing.from_text("1 1")
        with pytest.raises(ParseError):
            Pairing.from_text("1 1; 1 x")


class TestSampler:
    def test_deterministic(self):
        ds, bip = DegreeSequence.regular(20, 3), Bipartition.from_left(20, [0, 5])
        first = sample_restricted(ds, bip, np.random.default_rng(11))
        second = sample_restricted(ds, bip, np.random.default_rng(11))
        assert first == second

    def test_restricted(self):
        ds, bip = DegreeSequence.regular(30, 4), Bipartition.from_left(30, range(8))
        P = sample_restricted(ds, bip, np.random.default_rng(3))
        assert all(not (P.is_left_point(p) and P.is_left_point(q)) for p, q in P.pairs())

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            sample_restricted(DegreeSequence((3, 1, 1)), Bipartition.from_left(3, [0]), np.random.default_rng(0))

    def test_uniform_over_small_space(self):
        ds, bip = DegreeSequence((2, 1, 2, 1)), Bipartition.from_left(4, [0])
        support = []
        enumerate_pairings(ds, bip, lambda P: support.append(P.mate))
        index = {mate: i for i, mate in enumerate(support)}
        counts = np.zeros(len(support))
        rng = np.random.default_rng(2024)
        for _ in range(6000):
            counts[index[sample_restricted(ds, bip, rng).mate]] += 1
        assert chisquare(counts).pvalue > 1e-4

    def test_batch_rows_are_restricted_pairings(self):
        ds, bip = DegreeSequence((3, 2, 2, 2, 1)), Bipartition.from_left(5, [1])
        pairs = sample_pair_batch(ds, bip, np.random.default_rng(5), 50)
        assert pairs.shape == (50, ds.M // 2, 2)
        for row in pairs:
            pairing_from_row(ds, bip, row)

    def test_batch_census_matches_scalar(self):
        ds, bip = DegreeSequence((4, 3, 3, 2, 2, 2)), Bipartition.from_left(6, [3])
        pairs = sample_pair_batch(ds, bip, np.random.default_rng(9), 200)
        batch = defect_census_batch(ds, bip, pairs)
        for i, row in enumerate(pairs):
            census = defect_census(pairing_from_row(ds, bip, row))
            assert {name: int(values[i]) for name, values in batch.items()} == census.as_dict()


UNIFORMITY_BATTERY = [inst for inst in BATTERY if 2 <= count_restricted_pairings(*inst) <= 24]

# Family-wise level 1e-3 over the whole battery.
UNIFORMITY_LEVEL = 1e-3 / max(len(UNIFORMITY_BATTERY), 1)


def support_index(ds, bip):
    support = []
    enumerate_pairings(ds, bip, lambda P: support.append(P.mate))
    return {mate: i for i, mate in enumerate(support)}


@pytest.mark.slow
@pytest.mark.parametrize("instance", UNIFORMITY_BATTERY, ids=instance_id)
class TestUniformityOnBattery:
    SCALAR_TRIALS = 20_000
    BATCH_TRIALS = 100_000

    def test_scalar_sampler(self, instance):
        ds, bip = instance
        index = support_index(ds, bip)
        assert len(index) == count_restricted_pairings(ds, bip)
        counts = np.zeros(len(index))
        rng = np.random.default_rng(7)
        for _ in range(self.SCALAR_TRIALS):
            counts[index[sample_restricted(ds, bip, rng).mate]] += 1
        assert chisquare(counts).pvalue > UNIFORMITY_LEVEL

    def test_batch_sampler(self, instance):
        ds, bip = instance
        index = support_index(ds, bip)
        pairs = sample_pair_batch(ds, bip, np.random.default_rng(11), self.BATCH_TRIALS)
        rows = np.arange(self.BATCH_TRIALS)[:, None]
        mates = np.empty((self.BATCH_TRIALS, ds.M), dtype=np.int64)
        mates[rows, pairs[:, :, 0]] = pairs[:, :, 1]
        mates[rows, pairs[:, :, 1]] = pairs[:, :, 0]
        uniques, found = np.unique(mates, axis=0, return_counts=True)
        counts = np.zeros(len(index))
        for row, count in zip(uniques, found):
            counts[index[tuple(row.tolist())]] = count
        assert chisquare(counts).pvalue > UNIFORMITY_LEVEL


class TestDefects:
    def test_loop_pairing(self):
        assert defect_census(tiny_pairings()[2]) == DefectCensus(b0=1)

    def test_pure_double_pair(self):
        P = Pairing((2, 2), (), (2, 3, 0, 1))
        assert defect_census(P) == DefectCensus(b2=1)
        assert not is_simple(P)

    def test_degree_one_matching(self):
        P = Pairing((1, 1, 1, 1), (), (3, 2, 1, 0))
        assert defect_census(P).is_clean
        assert is_simple(P)

    def test_triple_and_double_loop(self):
        ds, bip = DegreeSequence((3, 3, 4)), Bipartition.empty(3)
        P = Pairing.from_pairs(ds, bip, [(0, 3), (1, 4), (2, 5), (6, 7), (8, 9)])
        census = defect_census(P)
        assert census.t2 == 1
        assert census.b0 == 2 and census.i_dl == 1
        assert census.has_higher_defect

    def test_mixed_double_pair(self):
        ds, bip = DegreeSequence((2, 2, 2)), Bipartition.from_left(3, [0])
        P = Pairing.from_pairs(ds, bip, [(0, 2), (1, 3), (4, 5)])
        assert defect_census(P) == DefectCensus(b0=1, b1=1)

    def test_simple_iff_clean(self):
        assert [is_simple(P) for P in tiny_pairings()] == [True, True, False]


class TestProjection:
    def test_paths(self):
        for P in tiny_pairings()[:2]:
            graph = project(P)
            assert sorted(tuple(sorted(e)) for e in graph.edges()) == [(0, 2), (1, 2)]

    def test_loop(self):
        graph = project(tiny_pairings()[2])
        assert sorted(tuple(sorted(e)) for e in graph.edges()) == [(0, 1), (2, 2)]

    def test_empty(self):
        graph = project(Pairing((), (), ()))
        assert graph.number_of_nodes() == 0


class TestTwoPaths:
    def test_path_pairing(self):
        census = two_path_census(tiny_pairings()[0])
        assert (census.a1, census.a2, census.a3, census.a4) == (0, 1, 0, 0)

    def test_reverse_of_type_two_has_no_type(self):
        path_a = tiny_pairings()[0]
        # 0 -> 2 -> 1 is type 2, 1 -> 2 -> 0 ends in L
        assert two_path_type(path_a, 0, 2, 3, 1) == 2
        assert two_path_type(path_a, 1, 3, 2, 0) is None

    def test_degree_one_vertices(self):
        census = two_path_census(Pairing((1, 1, 1, 1), (), (3, 2, 1, 0)))
        assert (census.a1, census.a2, census.a3, census.a4) == (0, 0, 0, 0)

    def test_cycle_counts(self):
        # a 4-cycle: every vertex is the middle of 2 directed type-1 paths
        ds, bip = DegreeSequence.regular(4, 2), Bipartition.empty(4)
        P = Pairing.from_pairs(ds, bip, [(1, 2), (3, 4), (5, 6), (7, 0)])
        census = two_path_census(P)
        assert census.a1 == 8
        assert census.x1 == 0

    def test_identities_on_simple_pairings(self):
        ds, bip = DegreeSequence((3, 3, 2, 2, 2)), Bipartition.from_left(5, [2])
        left_m2 = moments(ds, bip.left).m2
        right_m2 = moments(ds, bip.right).m2

        def check(P):
            if not is_simple(P):
                return
            census = two_path_census(P, with_disjoint=False)
            assert census.a1 + 2 * census.a2 + census.a3 == right_m2
            assert census.a4 == left_m2
            assert census.x1 is None

        enumerate_pairings(ds, bip, check)

    @hypothesis_settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_disjoint_counts_by_brute_force(self, seed):
        from src.models.pairing import simple_two_paths

        ds, bip = DegreeSequence((3, 3, 2, 2, 2, 2)), Bipartition.from_left(6, [4, 5])
        P = sample_restricted(ds, bip, np.random.default_rng(seed))
        paths = simple_two_paths(P)
        census = two_path_census(P)
        signatures = ((1, 1), (3, 3), (1, 2), (1, 3), (2, 3))
        for index, (j, h) in enumerate(signatures, start=1):
            brute = sum(1 for p in paths[j] for q in paths[h] if not set(p) & set(q))
            assert getattr(census, f"x{index}") == brute
