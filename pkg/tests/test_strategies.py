"""Strategies, best response, and the match runner."""

import pytest

from cspgame.catalog import catalog_entry, gen_draw_game, gen_star, gen_wheel
from cspgame.model import (
    DRAW,
    Graph,
    Instance,
    Move,
    Outcome,
    Player,
    RulesError,
)
from cspgame.solver import solve_value
from cspgame.strategies import (
    APrioriStrategy,
    Automaton,
    GreedyStrategy,
    OptimalStrategy,
    PlyCapExceeded,
    RandomStrategy,
    StolenStrategy,
    Strategy,
    best_response,
    make_strategy,
    run_match,
)


def star(rays_with_customers):
    return gen_star(rays_with_customers)


class TestGreedy:
    def test_nearest_leaf_first(self):
        # rays of length 1 and 3, customers at the leaves: go short first
        inst = star([(1, (1,)), (3, (3,))])
        g = GreedyStrategy()
        g.init(inst, Player.I)
        assert g.propose() == Move.step(0, 1)

    def test_equidistant_lowest_id(self):
        # two rays of length 2, both leaf customers at distance 2
        inst = star([(2, (2,)), (2, (2,))])
        g = GreedyStrategy()
        g.init(inst, Player.I)
        mv = g.propose()
        assert mv == Move.step(0, 1)   # toward customer 2, the lowest id

    def test_no_reachable_customer(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        inst = Instance(g, frozenset({3}), (0,), (0,), passing_allowed=True)
        s = GreedyStrategy()
        s.init(inst, Player.I)
        assert s.propose() == Move("pass")

    def test_target_persists_until_gone(self):
        inst = star([(2, (2,)), (3, (3,))])
        g = GreedyStrategy()
        g.init(inst, Player.I)
        assert g.propose() == Move.step(0, 1)
        g.observe(Move.step(0, 1))      # own move
        g.observe(Move.step(0, 1))      # opponent follows
        assert g.propose() == Move.step(0, 2)   # still heading to customer 2


class TestAPriori:
    def test_permutation_required(self):
        inst = star([(1, (1,)), (1, (1,))])
        s = APrioriStrategy([1])
        with pytest.raises(RulesError):
            s.init(inst, Player.I)

    def test_heads_to_priority_even_if_farther(self):
        inst = star([(1, (1,)), (3, (3,))])   # customers at 1 and 4
        s = APrioriStrategy([4, 1])
        s.init(inst, Player.I)
        assert s.propose() == Move.step(0, 2)   # toward the far leaf

    def test_retargets_when_priority_captured(self):
        inst = star([(1, (1,)), (2, (2,))])   # customers 1 and 3
        s = APrioriStrategy([3, 1])
        s.init(inst, Player.II)
        s.observe(Move.step(0, 2))   # I moves toward 3
        assert s.propose() == Move.step(0, 2)
        s.observe(Move.step(0, 2))   # own move (co-location)
        s.observe(Move.step(0, 3))   # I captures 3
        assert s.propose() == Move.step(0, 0)   # now heads back for 1


class TestStolen:
    def test_first_two_moves_fixed(self):
        inst = star([(2, (2,)), (2, (2,))])
        s = StolenStrategy(GreedyStrategy())
        s.init(inst, Player.I)
        assert s.propose() == Move.step(0, 1)
        s.observe(Move.step(0, 1))
        s.observe(Move.step(0, 3))
        assert s.propose() == Move.step(0, 0)

    def test_four_cycle_two_customers_never_loses(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        inst = Instance(g, frozenset({1, 3}), (0,), (0,))
        rec = run_match(inst, StolenStrategy(GreedyStrategy()), GreedyStrategy())
        assert rec.outcome.is_draw or rec.outcome.margin >= 0
        assert rec.flags == []

    def test_requires_returnable_neighbor(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2), (2, 0)], directed=True)
        inst = Instance(g, frozenset({2}), (0,), (0,))
        s = StolenStrategy(GreedyStrategy())
        with pytest.raises(RulesError):
            s.init(inst, Player.I)

    def test_role_must_be_first_player(self):
        inst = star([(1, (1,)), (1, (1,))])
        with pytest.raises(RulesError):
            StolenStrategy(GreedyStrategy()).init(inst, Player.II)


class TestOptimal:
    def test_wheel5_exact(self):
        inst = gen_wheel(5)
        rec = run_match(inst, OptimalStrategy(), OptimalStrategy())
        assert rec.outcome == Outcome.ended(-3)

    def test_optimal_never_below_value_vs_greedy(self):
        for name in ("wheel5", "zugzwang", "star-three-rays"):
            inst = catalog_entry(name).instance
            v = solve_value(inst)
            key = inst.outcome_key
            rec = run_match(inst, OptimalStrategy(), GreedyStrategy())
            assert key(rec.outcome) >= key(v)
            rec = run_match(inst, GreedyStrategy(), OptimalStrategy())
            assert key(rec.outcome) <= key(v)


class _AwayFromCustomers(Strategy):
    """Always steps toward vertex 0; never chases anything."""

    kind = "away"

    def _decide(self, s):
        v = s.mover_pieces()[0]
        nbrs = self.inst.graph.adjacency[v]
        return Move.step(0, min(nbrs))

    def propose(self):
        return self._decide(self.state)

    def automaton(self):
        return Automaton(None, lambda s, key: (self._decide(s), None))


class TestBestResponse:
    def test_vs_optimal_equals_value(self):
        inst = gen_wheel(5)
        v = solve_value(inst)
        assert best_response(inst, OptimalStrategy(), Player.I) == v
        assert best_response(inst, OptimalStrategy(), Player.II) == v

    def test_unopposed_sweep(self):
        # fixed player never moves toward customers: the free player takes
        # everything
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        inst = Instance(g, frozenset({2, 3}), (1,), (1,))
        out = best_response(inst, _AwayFromCustomers(), Player.II)
        assert out == Outcome.ended(2)
        out = best_response(inst, _AwayFromCustomers(), Player.I)
        assert out == Outcome.ended(-2)

    def test_random_not_supported(self):
        inst = gen_wheel(3)
        with pytest.raises(RulesError):
            best_response(inst, RandomStrategy(1), Player.I)


class TestRunMatch:
    def test_single_customer_one_ply(self):
        g = Graph.from_edges(2, [(0, 1)])
        inst = Instance(g, frozenset({1}), (0,), (0,))
        rec = run_match(inst, GreedyStrategy(), GreedyStrategy())
        assert rec.outcome == Outcome.ended(1)
        assert len(rec.moves) == 1 and rec.reason == "ended"

    def test_draw_game_repetition(self):
        inst = gen_draw_game()
        rec = run_match(inst, OptimalStrategy(), OptimalStrategy())
        assert rec.outcome == DRAW and rec.reason == "repetition_draw"

    def test_greedy_on_leaf_star_matches_value(self):
        inst = star([(2, (2,)), (3, (3,)), (1, (1,))])
        rec = run_match(inst, GreedyStrategy(), GreedyStrategy())
        assert inst.outcome_key(rec.outcome) == inst.outcome_key(solve_value(inst))

    def test_margin_equals_signed_delta_sum(self):
        inst = gen_wheel(5)
        rec = run_match(inst, OptimalStrategy(), GreedyStrategy())
        assert rec.reason == "ended"
        assert rec.outcome.margin == sum(rec.deltas)

    def test_ply_cap_exceeded(self):
        inst = gen_draw_game()
        with pytest.raises(PlyCapExceeded):
            run_match(inst, OptimalStrategy(), OptimalStrategy(), ply_cap=2)

    def test_terminal_at_start(self):
        g = Graph.from_edges(2, [(0, 1)])
        inst = Instance(g, frozenset(), (0,), (0,))
        rec = run_match(inst, GreedyStrategy(), GreedyStrategy())
        assert rec.outcome == Outcome.ended(0) and rec.moves == []

    def test_legality_enforced_across_catalog(self):
        for name in ("wheel5", "zugzwang", "draw-game", "trailing-tree"):
            inst = catalog_entry(name).instance
            for si, sii in ((GreedyStrategy(), RandomStrategy(5)),
                            (RandomStrategy(6), GreedyStrategy())):
                rec = run_match(inst, si, sii)   # raises on any illegal move
                assert rec.reason in ("ended", "repetition_draw")


class TestKindStrings:
    @pytest.mark.parametrize("spec,cls", [
        ("greedy", GreedyStrategy),
        ("random:7", RandomStrategy),
        ("optimal", OptimalStrategy),
        ("stolen:greedy", StolenStrategy),
        ("apriori:1,2", APrioriStrategy),
    ])
    def test_parse(self, spec, cls):
        assert isinstance(make_strategy(spec), cls)

    def test_nested_stolen(self):
        s = make_strategy("stolen:random:3")
        assert isinstance(s, StolenStrategy)
        assert isinstance(s.inner, RandomStrategy)

    @pytest.mark.parametrize("bad", ["nope", "apriori", "random:x", "stolen:"])
    def test_rejects(self, bad):
        with pytest.raises((RulesError, ValueError)):
            make_strategy(bad)

    def test_deterministic_replay(self):
        inst = gen_wheel(5)
        a = run_match(inst, make_strategy("random:9"), make_strategy("greedy"))
        b = run_match(inst, make_strategy("random:9"), make_strategy("greedy"))
        assert a.moves == b.moves and a.outcome == b.outcome
