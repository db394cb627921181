import math
from fractions import Fraction

import pytest
from conftest import BATTERY, instance_id

from src.counting.exactcount import (
    ClassKey,
    ClassTable,
    enumerate_pairings,
    exact_bgraph_count,
    exact_class_table,
    exact_graph_count,
    exact_induced_probability,
    exact_p_simple,
)
from src.counting.formulas import count_restricted_pairings
from src.models.degseq import Bipartition, DegreeSequence, InducedSubgraphSpec
from src.models.pairing import defect_census, is_simple
from src.utils.errors import SizeLimitError, UndefinedModelError
from src.utils.settings import Settings


class TestGraphCount:
    @pytest.mark.parametrize(
        "degrees, expected",
        [((3, 3, 3, 3), 1), ((2, 2, 2, 2), 3), ((1, 1), 1), ((1, 1, 1), 0), ((0, 0), 1), ((2, 2, 2), 1)],
    )
    def test_small_sequences(self, degrees, expected):
        assert exact_graph_count(DegreeSequence(degrees)) == expected

    @pytest.mark.parametrize(
        "n, expected",
        [(6, 70), (8, 19355), (10, 11180820), (12, 11555272575), (14, 19506631814670)],
    )
    def test_labeled_cubic_graphs(self, n, expected):
        assert exact_graph_count(DegreeSequence.regular(n, 3)) == expected

    def test_perfect_matchings(self):
        assert exact_graph_count(DegreeSequence.regular(8, 1)) == 105

    def test_non_graphical(self):
        assert exact_graph_count(DegreeSequence((3, 3, 1, 1))) == 0

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            exact_graph_count(DegreeSequence.regular(20, 3), Settings(max_graph_points=48))


class TestBGraphCount:
    def test_running_example(self, tiny):
        assert exact_bgraph_count(*tiny) == 1

    def test_without_left_matches_graph_count(self):
        ds = DegreeSequence((3, 3, 2, 2, 2))
        assert exact_bgraph_count(ds, Bipartition.empty(5)) == exact_graph_count(ds)

    def test_left_vertex_with_single_partner(self):
        assert exact_bgraph_count(DegreeSequence((2, 2)), Bipartition.from_left(2, [0])) == 0

    def test_independent_pair_in_cycle(self):
        # of the three labeled 4-cycles, exactly the one without edge {1,2} keeps {1,2} independent
        assert exact_bgraph_count(DegreeSequence.regular(4, 2), Bipartition.from_left(4, [0, 1])) == 1

    def test_fiber_identity(self):
        for ds, bip in BATTERY:
            table = exact_class_table(ds, bip)
            fiber = math.prod(math.factorial(d) for d in ds.degrees)
            assert table[ClassKey()] == exact_bgraph_count(ds, bip) * fiber, instance_id((ds, bip))


class TestInducedProbability:
    def test_complete_graph(self):
        edges = tuple((i, j) for i in range(4) for j in range(i + 1, 4))
        spec = InducedSubgraphSpec(tuple(range(4)), edges)
        assert exact_induced_probability(DegreeSequence.regular(4, 3), spec) == 1

    def test_edge_in_cycle(self):
        spec = InducedSubgraphSpec((0, 1), ((0, 1),))
        assert exact_induced_probability(DegreeSequence.regular(4, 2), spec) == Fraction(2, 3)

    def test_non_edge_in_cycle(self):
        spec = InducedSubgraphSpec.empty((0, 1))
        assert exact_induced_probability(DegreeSequence.regular(4, 2), spec) == Fraction(1, 3)

    def test_edge_probability_by_symmetry(self):
        spec = InducedSubgraphSpec((0, 1), ((0, 1),))
        assert exact_induced_probability(DegreeSequence.regular(10, 3), spec) == Fraction(1, 3)

    def test_impossible_subgraph(self):
        spec = InducedSubgraphSpec((0, 1, 2), ((0, 1), (1, 2), (0, 2)))
        assert exact_induced_probability(DegreeSequence((1, 1, 1, 1)), spec) == 0

    def test_empty_model(self):
        with pytest.raises(UndefinedModelError):
            exact_induced_probability(DegreeSequence((1, 1, 1)), InducedSubgraphSpec.empty((0,)))


class TestEnumeration:
    def test_running_example(self, tiny):
        seen = []
        assert enumerate_pairings(*tiny, seen.append) == 3
        assert len(set(P.mate for P in seen)) == 3

    def test_single_mixed_pair(self):
        seen = []
        enumerate_pairings(DegreeSequence((1, 1)), Bipartition.from_left(2, [0]), seen.append)
        assert len(seen) == 1

    def test_infeasible_visits_nothing(self):
        seen = []
        enumerate_pairings(DegreeSequence((1, 2)), Bipartition.from_left(2, [0]), seen.append)
        assert seen == []

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            enumerate_pairings(DegreeSequence.regular(6, 3), Bipartition.empty(6), lambda P: None, Settings(max_enum_points=16))

    def test_counts_match_battery(self):
        assert len(BATTERY) >= 50
        for ds, bip in BATTERY:
            mates = set()
            total = enumerate_pairings(ds, bip, lambda P: mates.add(P.mate))
            assert total == len(mates) == count_restricted_pairings(ds, bip), instance_id((ds, bip))


class TestClassTable:
    def test_running_example(self, tiny):
        table = exact_class_table(*tiny)
        assert table.as_dict() == {"C(0,0,0)": 2, "C(1,0,0)": 1}
        assert table.total == 3

    def test_two_vertices_of_degree_two(self):
        table = exact_class_table(DegreeSequence((2, 2)), Bipartition.empty(2))
        assert table[ClassKey(0, 0, 1)] == 2
        assert table[ClassKey(2, 0, 0)] == 1
        assert table.total == 3

    def test_partition_of_battery(self):
        for ds, bip in BATTERY:
            table = exact_class_table(ds, bip)
            assert sum(table.counts.values()) == table.total == count_restricted_pairings(ds, bip)
            assert table.higher_defect_total == sum(
                count for key, count in table.counts.items() if key.has_higher_defect
            )

    def test_label(self):
        assert ClassKey(1, 0, 2).label() == "C(1,0,2)"
        assert ClassKey(0, 0, 0, True).label() == "C(0,0,0)+"
        assert ClassKey(1, 1, 1).shifted(-1, 0, 0) == ClassKey(0, 1, 1)

    def test_missing_key_is_zero(self):
        assert ClassTable({}, 0)[ClassKey(3, 0, 0)] == 0


class TestPSimple:
    def test_running_example(self, tiny):
        assert exact_p_simple(*tiny) == Fraction(2, 3)

    def test_degree_one_vertices(self):
        assert exact_p_simple(DegreeSequence.regular(6, 1), Bipartition.empty(6)) == 1

    def test_no_simple_pairing(self):
        assert exact_p_simple(DegreeSequence((2, 2)), Bipartition.empty(2)) == 0

    def test_empty_model(self):
        with pytest.raises(UndefinedModelError):
            exact_p_simple(DegreeSequence((1, 2)), Bipartition.from_left(2, [0]))

    def test_matches_simple_pairings(self):
        for ds, bip in BATTERY[:20]:
            simple = []
            total = enumerate_pairings(ds, bip, lambda P: simple.append(is_simple(P)))
            assert exact_p_simple(ds, bip) == Fraction(sum(simple), total)

    def test_census_is_clean_exactly_when_simple(self):
        for ds, bip in BATTERY:
            enumerate_pairings(ds, bip, lambda P: _check_clean(P))


def _check_clean(P):
    assert defect_census(P).is_clean == is_simple(P)
