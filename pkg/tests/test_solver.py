"""Exact solver: examples, attractors, oracle agreement, reversal."""

import pytest

from cspgame.catalog import gen_draw_game, gen_random, gen_wheel, gen_zugzwang
from cspgame.model import (
    DRAW,
    GameState,
    Graph,
    Instance,
    Move,
    Outcome,
    Player,
    apply_move,
    legal_moves,
    terminal_status,
)
from cspgame.solver import (
    BudgetExceeded,
    best_move,
    force_set,
    oracle_value,
    solve,
    solve_value,
)


def simple(edges, n, customers, start=0, directed=False, passing=False,
           draw_rank="below_tie"):
    g = Graph.from_edges(n, edges, directed=directed)
    return Instance(g, frozenset(customers), (start,), (start,),
                    passing_allowed=passing, draw_rank=draw_rank)


class TestSolveExamples:
    def test_adjacent_customer(self):
        inst = simple([(0, 1)], 2, {1})
        assert solve(inst).value == Outcome.ended(1)

    def test_zero_customers(self):
        inst = simple([(0, 1)], 2, set())
        res = solve(inst)
        assert res.value == Outcome.ended(0)
        assert res.policy == {}   # immediately terminal, no moves needed

    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_wheel_margin(self, n):
        assert solve_value(gen_wheel(n)) == Outcome.ended(2 - n)

    def test_draw_game(self):
        assert solve_value(gen_draw_game()).is_draw

    def test_budget_exceeded_with_stats(self):
        with pytest.raises(BudgetExceeded) as exc:
            solve(gen_wheel(7), budget=10)
        assert exc.value.stats.states_visited >= 10

    def test_too_many_customers_rejected(self):
        edges = [(i, i + 1) for i in range(70)]
        inst = simple(edges, 71, set(range(1, 67)))
        with pytest.raises(Exception):
            solve(inst)


class TestBestMove:
    def test_wheel_tie_break_lowest_rim(self):
        inst = gen_wheel(5)
        mv, out = best_move(inst, inst.initial_state())
        assert mv == Move.step(0, 1)
        assert out == Outcome.ended(-3)

    def test_winning_capture_taken(self):
        inst = simple([(0, 1)], 2, {1})
        mv, out = best_move(inst, inst.initial_state())
        assert mv == Move.step(0, 1) and out == Outcome.ended(1)

    def test_zugzwang_reflects_loss(self):
        inst = gen_zugzwang()
        mv, out = best_move(inst, inst.initial_state())
        key = inst.outcome_key
        assert key(out) <= key(Outcome.ended(-1))

    def test_terminal_rejected(self):
        inst = simple([(0, 1)], 2, set())
        with pytest.raises(Exception):
            best_move(inst, inst.initial_state())


class TestForceSet:
    def test_empty_layer(self):
        inst = simple([(0, 1)], 2, {1})
        assert force_set(inst, [], Outcome.ended(0), {}) == set()

    def test_shift_rule(self):
        # every move of the I-state captures; successor valued Ended(+2)
        # makes the state forced for t = Ended(+3)
        inst = simple([(0, 1)], 2, {1})
        exits = {}
        for turn in (Player.I, Player.II):
            for pi in ((0,), (1,)):
                for pii in ((0,), (1,)):
                    exits[GameState(turn, pi, pii, frozenset())] = Outcome.ended(2)
        fs = force_set(inst, [1], Outcome.ended(3), exits)
        s = GameState(Player.I, (0,), (0,), frozenset({1}))
        assert s in fs

    @staticmethod
    def _full_layer(inst, layer):
        """All placements of the layer plus exit values from anchored
        solves (independent of force_set)."""
        from itertools import combinations_with_replacement as cwr

        n = inst.graph.vertex_count
        states = [GameState(t, pi, pii, frozenset(layer))
                  for t in (Player.I, Player.II)
                  for pi in cwr(range(n), inst.h)
                  for pii in cwr(range(n), inst.k)]
        exits = {}
        for s in states:
            if terminal_status(inst, s):
                continue
            for mv in legal_moves(inst, s):
                nxt, delta = apply_move(inst, s, mv)
                if delta and nxt not in exits:
                    exits[nxt] = solve_value(inst, initial=nxt)
        return states, exits

    def test_matches_anchored_values(self):
        inst = gen_wheel(3)
        key = inst.outcome_key
        layer = frozenset({2, 3})
        states, exits = self._full_layer(inst, layer)
        for t in (DRAW, Outcome.ended(-2), Outcome.ended(0), Outcome.ended(2)):
            fs = force_set(inst, layer, t, exits)
            for s in states:
                if terminal_status(inst, s):
                    continue
                v = solve_value(inst, initial=s)
                assert (s in fs) == (key(v) >= key(t)), (s, t, v)

    def test_rim_chain_membership_by_unique_play(self):
        # with both pieces on the rim every vertex has out-degree one, so
        # membership is decided by the single possible play
        inst = gen_wheel(3)
        key = inst.outcome_key
        layer = frozenset({2, 3})
        states, exits = self._full_layer(inst, layer)
        rim = set(range(1, 4))

        def unique_play(s):
            margin, seen = 0, {(s.turn, s.pieces_i, s.pieces_ii, s.remaining)}
            while not terminal_status(inst, s):
                mv = legal_moves(inst, s)[0]
                mover = s.turn
                s, delta = apply_move(inst, s, mv)
                margin += delta if mover is Player.I else -delta
                snap = (s.turn, s.pieces_i, s.pieces_ii, s.remaining)
                if delta:
                    seen.clear()
                if snap in seen:
                    return DRAW
                seen.add(snap)
            return Outcome.ended(margin)

        for t in (Outcome.ended(-1), Outcome.ended(0), Outcome.ended(1)):
            fs = force_set(inst, layer, t, exits)
            for s in states:
                if terminal_status(inst, s):
                    continue
                if not (set(s.pieces_i) <= rim and set(s.pieces_ii) <= rim):
                    continue
                assert (s in fs) == (key(unique_play(s)) >= key(t)), (s, t)

    def test_threshold_monotonicity(self):
        inst = gen_wheel(3)
        layer = frozenset({1, 2, 3})
        states, exits = self._full_layer(inst, layer)
        outs = [Outcome.ended(m) for m in range(-3, 4)] + [DRAW]
        outs.sort(key=inst.outcome_key)
        prev = None
        for t in outs:
            fs = force_set(inst, layer, t, exits)
            if prev is not None:
                assert fs <= prev
            prev = fs


class TestOracle:
    def test_single_vertex_no_customers(self):
        g = Graph(vertex_count=1, directed=False, adjacency=((),))
        inst = Instance(g, frozenset(), (0,), (0,))
        assert oracle_value(inst) == Outcome.ended(0)

    def test_wheel3(self):
        assert oracle_value(gen_wheel(3)) == Outcome.ended(-1)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_solver_on_randoms(self, seed):
        fam = ["tree", "star", "bipartite", "general"][seed % 4]
        inst = gen_random(fam, 4 + seed, 1 + seed % 4, seed)
        assert oracle_value(inst) == solve_value(inst)

    def test_matches_on_passing_instance(self):
        inst = simple([(0, 1), (1, 2)], 3, {2}, passing=True)
        assert oracle_value(inst) == solve_value(inst)

    def test_team_play_two_pieces(self):
        # CSP(2,1): player I moves one of two interchangeable pieces, but
        # the lone defender still races one end home: a 1-1 tie
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        inst = Instance(g, frozenset({0, 4}), (2, 2), (2,))
        v = solve_value(inst)
        assert v == oracle_value(inst)
        assert v == Outcome.ended(0)

    def test_team_play_three_customers(self):
        # with a third customer in the middle the extra piece tells
        g = Graph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)])
        inst = Instance(g, frozenset({0, 4, 6}), (2, 2), (2,))
        assert solve_value(inst) == oracle_value(inst)


def mirrored(inst):
    swapped = Instance(inst.graph, inst.customers, inst.starts_ii,
                       inst.starts_i, inst.passing_allowed, inst.draw_rank)
    initial = GameState(Player.II, tuple(sorted(inst.starts_ii)),
                        tuple(sorted(inst.starts_i)), inst.customers)
    return swapped, initial


def reversed_outcome(o):
    return o if o.is_draw else Outcome.ended(-o.margin)


class TestZeroSumReversal:
    @pytest.mark.parametrize("seed", range(10))
    def test_equals_tie_exact(self, seed):
        fam = ["tree", "bipartite", "general"][seed % 3]
        base = gen_random(fam, 5 + seed % 5, 1 + seed % 3, seed)
        inst = Instance(base.graph, base.customers, base.starts_i,
                        base.starts_ii, base.passing_allowed, "equals_tie")
        v = solve_value(inst)
        swapped, initial = mirrored(inst)
        vm = solve_value(swapped, initial=initial)
        assert inst.outcome_key(vm) == -inst.outcome_key(v)

    @pytest.mark.parametrize("seed", range(10))
    def test_below_tie_up_to_draw_tie_adjacency(self, seed):
        # below_tie is not symmetric under margin negation: Draw sits
        # between Ended(-1) and Ended(0), so a role swap may legitimately
        # exchange Draw and Ended(0); everything else must reverse exactly
        fam = ["tree", "bipartite", "general"][seed % 3]
        inst = gen_random(fam, 5 + seed % 5, 1 + seed % 3, seed + 100)
        v = solve_value(inst)
        swapped, initial = mirrored(inst)
        vm = solve_value(swapped, initial=initial)
        boundary = {DRAW, Outcome.ended(0)}
        assert vm == reversed_outcome(v) or (v in boundary and vm in boundary)


class TestPolicy:
    @pytest.mark.parametrize("name", ["wheel5", "zugzwang", "draw-game"])
    def test_policy_replay_reproduces_value(self, name):
        from cspgame.catalog import catalog_entry
        from cspgame.strategies import OptimalStrategy, run_match

        inst = catalog_entry(name).instance
        res = solve(inst)
        rec = run_match(inst, OptimalStrategy(), OptimalStrategy())
        assert inst.outcome_key(rec.outcome) == inst.outcome_key(res.value)
        if res.value.is_draw:
            assert rec.reason == "repetition_draw"

    def test_policy_total_on_reachable_nonterminal(self):
        inst = gen_wheel(5)
        res = solve(inst)
        for s in res.values:
            if not terminal_status(inst, s):
                assert s in res.policy
                assert res.policy[s] in legal_moves(inst, s)
