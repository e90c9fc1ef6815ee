import pytest
from hypothesis import given

import oracles
from conftest import make_system, systems, systems_with_selection
from ioselect.matching import (
    EDGE_EK,
    EDGE_EU,
    EDGE_EUU,
    EDGE_EX,
    EDGE_EY,
    EDGE_EYY,
    BipEdge,
    NoPerfectMatching,
    build_bipartite,
    cycle_cover_check,
    dump_matching,
    extract_io,
    hall_indices,
    hall_witness,
    has_perfect_matching,
    min_cost_perfect_matching,
    state_pattern_has_pm,
)
from ioselect.system_model import (
    COST_SCALE,
    ModelError,
    Selection,
    restrict,
)

U = COST_SCALE


class TestBuild:
    def test_demo_edges(self, demo):
        g = build_bipartite(demo)
        assert (g.n, g.m, g.p, g.size) == (4, 3, 2, 9)
        ex = [(e.left, e.right) for e in g.edges if e.cls == EDGE_EX]
        eu = [(e.left, e.right) for e in g.edges if e.cls == EDGE_EU]
        ey = [(e.left, e.right) for e in g.edges if e.cls == EDGE_EY]
        ek = [(e.left, e.right) for e in g.edges if e.cls == EDGE_EK]
        assert ex == [(0, 0), (0, 1), (1, 1), (2, 0), (2, 1), (2, 3), (3, 3)]
        assert eu == [(0, 4), (0, 6), (1, 5), (1, 6), (2, 4), (2, 5), (3, 6)]
        assert ey == [(7, 2), (8, 0)]
        assert ek == [(4 + i, 7 + j) for i in range(3) for j in range(2)]
        assert [(e.left, e.right) for e in g.edges if e.cls == EDGE_EUU] == [
            (4, 4),
            (5, 5),
            (6, 6),
        ]
        assert [(e.left, e.right) for e in g.edges if e.cls == EDGE_EYY] == [
            (7, 7),
            (8, 8),
        ]
        # unit costs: every feedback edge costs 2, everything else 0
        for e in g.edges:
            assert e.cost == (2 * U if e.cls == EDGE_EK else 0)

    def test_feedback_costs(self):
        system = make_system(
            1, 2, 2, [(1, 1)], [(1, 1)], [(1, 1)], cost_u=["3", "5"], cost_y=["7", "11"]
        )
        g = build_bipartite(system)
        ek = {(e.left, e.right): e.cost for e in g.edges if e.cls == EDGE_EK}
        assert ek == {
            (1, 3): 10 * U,
            (1, 4): 14 * U,
            (2, 3): 12 * U,
            (2, 4): 16 * U,
        }

    def test_left_adjacency_and_names(self, demo):
        g = build_bipartite(demo)
        assert g.left_name(0) == "x1'"
        assert g.left_name(4) == "u1'"
        assert g.right_name(7) == "y1"
        for v, idxs in enumerate(g.left_adj):
            for i in idxs:
                assert g.edges[i].left == v


class TestPerfectMatching:
    def test_demo_has_pm(self, demo):
        assert has_perfect_matching(build_bipartite(demo))

    def test_isolated_state_has_none(self):
        system = make_system(2, 0, 0, [(1, 1)], [], [])
        assert not has_perfect_matching(build_bipartite(system))

    @given(systems_with_selection())
    def test_matches_cycle_criterion(self, pair):
        """Perfect matching iff disjoint cycles span all states."""
        system, sel = pair
        assert cycle_cover_check(system, sel) == oracles.spanning_disjoint_cycles(
            system, sel
        )

    @given(systems())
    def test_size_matches_reference(self, system):
        g = build_bipartite(system)
        pairs = [(e.left, e.right) for e in g.edges]
        match_l = [-1] * g.size
        match_r = [-1] * g.size
        from ioselect.matching import _adjacency, _hopcroft_karp

        got = _hopcroft_karp(g.size, _adjacency(g), match_l, match_r)
        assert got == oracles.matching_size(g.size, g.size, pairs)


class TestHallWitness:
    def test_isolated_state(self):
        system = make_system(2, 0, 0, [(1, 1)], [], [])
        g = build_bipartite(system)
        assert hall_indices(g) == ((1,), ())
        assert hall_witness(g) == (("x2'",), ())

    def test_raises_when_perfect(self, demo):
        with pytest.raises(ModelError, match="no Hall witness"):
            hall_indices(build_bipartite(demo))

    @given(systems(max_n=5))
    def test_witness_is_deficient_neighborhood(self, system):
        g = build_bipartite(system)
        if has_perfect_matching(g):
            return
        left, right = hall_indices(g)
        assert len(left) > len(right)
        neighborhood = set()
        for l in left:
            for i in g.left_adj[l]:
                neighborhood.add(g.edges[i].right)
        assert neighborhood == set(right)


class TestMinCost:
    def test_demo(self, demo):
        matching = min_cost_perfect_matching(build_bipartite(demo))
        assert matching.perfect
        assert matching.total_cost == 2 * U
        by_left = {e.left: e for e in matching.edges}
        assert by_left[2].cls == EDGE_EU and by_left[2].right == 4  # x3' -> u1
        assert by_left[4].cls == EDGE_EK and by_left[4].right == 7  # u1' -> y1
        assert by_left[7].cls == EDGE_EY and by_left[7].right == 2  # y1' -> x3
        for v in (0, 1, 3):
            assert by_left[v].cls == EDGE_EX and by_left[v].right == v
        assert by_left[5].cls == EDGE_EUU and by_left[6].cls == EDGE_EUU
        assert by_left[8].cls == EDGE_EYY
        sel, cost = extract_io(matching)
        assert sel == Selection.of([0], [0])
        assert cost == 2 * U

    def test_forced_chain(self):
        # only cycle is u1 -> x1 -> x2 -> y1 -> u1
        system = make_system(
            2, 1, 1, [(2, 1)], [(1, 1)], [(1, 2)], cost_u=["0"], cost_y=["0"]
        )
        matching = min_cost_perfect_matching(build_bipartite(system))
        assert {(e.left, e.right, e.cls) for e in matching.edges} == {
            (0, 2, EDGE_EU),
            (1, 0, EDGE_EX),
            (2, 3, EDGE_EK),
            (3, 1, EDGE_EY),
        }
        sel, cost = extract_io(matching)
        assert sel == Selection.of([0], [0])
        assert cost == 0

    def test_prefers_fewer_feedback_edges_at_equal_cost(self):
        # zero costs: the self-loop family and the feedback cycle both cost
        # 0, but the former uses no feedback edge
        system = make_system(
            1, 1, 1, [(1, 1)], [(1, 1)], [(1, 1)], cost_u=["0"], cost_y=["0"]
        )
        matching = min_cost_perfect_matching(build_bipartite(system))
        assert all(e.cls != EDGE_EK for e in matching.edges)
        sel, cost = extract_io(matching)
        assert sel == Selection.of([], [])
        assert cost == 0

    def test_prefers_low_input_index_at_equal_cost(self):
        system = make_system(
            1, 2, 1, [], [(1, 1), (1, 2)], [(1, 1)], cost_u=["1", "1"], cost_y=["1"]
        )
        sel, cost = extract_io(min_cost_perfect_matching(build_bipartite(system)))
        assert sel == Selection.of([0], [0])
        assert cost == 2 * U

    def test_prefers_low_output_index_at_equal_cost(self):
        system = make_system(
            1, 1, 2, [], [(1, 1)], [(1, 1), (2, 1)], cost_u=["1"], cost_y=["1", "1"]
        )
        sel, cost = extract_io(min_cost_perfect_matching(build_bipartite(system)))
        assert sel == Selection.of([0], [0])

    def test_cost_beats_tie_break(self):
        # u2 is strictly cheaper, so the index preference must lose
        system = make_system(
            1, 2, 1, [], [(1, 1), (1, 2)], [(1, 1)], cost_u=["3", "1"], cost_y=["0"]
        )
        sel, cost = extract_io(min_cost_perfect_matching(build_bipartite(system)))
        assert sel == Selection.of([1], [0])
        assert cost == 1 * U

    def test_raises_with_hall_witness(self):
        system = make_system(2, 0, 0, [(1, 1)], [], [])
        with pytest.raises(NoPerfectMatching) as exc:
            min_cost_perfect_matching(build_bipartite(system))
        assert exc.value.left_labels == ("x2'",)
        assert exc.value.right_labels == ()
        assert "x2'" in str(exc.value)

    @given(systems())
    def test_optimal_cost(self, system):
        """Minimum matching cost equals the cheapest spanning cycle family."""
        g = build_bipartite(system)
        ref = oracles.min_cycle_family_cost(system)
        if ref is None:
            assert not has_perfect_matching(g)
            with pytest.raises(NoPerfectMatching):
                min_cost_perfect_matching(g)
            return
        matching = min_cost_perfect_matching(g)
        assert matching.total_cost == ref
        sel, cost = extract_io(matching)
        assert cost == ref
        # the extracted selection really does admit a spanning cycle family
        assert oracles.spanning_disjoint_cycles(system, sel)

    def test_extract_requires_perfect(self):
        from ioselect.matching import Matching

        with pytest.raises(ModelError, match="perfect"):
            extract_io(Matching(1, 0, 0, (), perfect=False))


class TestStatePattern:
    def test_demo_states_alone_insufficient(self, demo):
        assert not state_pattern_has_pm(demo)

    def test_cycle(self):
        system = make_system(3, 1, 1, [(2, 1), (3, 2), (1, 3)], [(1, 1)], [(1, 1)])
        assert state_pattern_has_pm(system)

    def test_diagonal(self):
        system = make_system(2, 1, 1, [(1, 1), (2, 2)], [(1, 1)], [(1, 1)])
        assert state_pattern_has_pm(system)

    @given(systems())
    def test_equivalent_to_empty_selection(self, system):
        assert state_pattern_has_pm(system) == oracles.spanning_disjoint_cycles(
            system, Selection.of([], [])
        )


class TestDump:
    def test_demo(self, demo):
        matching = min_cost_perfect_matching(build_bipartite(demo))
        assert dump_matching(matching) == (
            "x1' x1 EX 0\n"
            "x2' x2 EX 0\n"
            "x3' u1 EU 0\n"
            "x4' x4 EX 0\n"
            "u1' y1 EK 2\n"
            "u2' u2 EUU 0\n"
            "u3' u3 EUU 0\n"
            "y1' x3 EY 0\n"
            "y2' y2 EYY 0\n"
        )

    def test_empty(self):
        from ioselect.matching import Matching

        assert dump_matching(Matching(0, 0, 0, (), perfect=True)) == ""
