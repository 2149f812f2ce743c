"""Executable policies, a best-response computer, and the match runner.

A strategy sees the instance at init, observes every move played (its own
included), and proposes a legal move when asked. The match runner mirrors
the draw semantics operationally: a position repeated since the last
capture terminates the game as a repetition draw.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .model import (
    DRAW,
    GameState,
    Instance,
    IllegalMoveError,
    Move,
    NULL_MOVE,
    Outcome,
    PASS_MOVE,
    Player,
    RulesError,
    apply_move,
    distances_to,
    legal_moves,
    terminal_status,
    vertices_reaching,
)
from .solver import DEFAULT_BUDGET, BudgetExceeded, SolveStats, _cached_solve


class PlyCapExceeded(RuntimeError):
    """The runner hit its ply cap without termination or repetition;
    repetition is bounded by per-layer position counts, so this flags a
    runner or strategy bug rather than a long game."""


@dataclass
class MatchRecord:
    moves: list[tuple[Player, Move]]
    deltas: list[int]                # signed: +1 capture by I, -1 by II
    outcome: Outcome
    reason: str                      # "ended" | "repetition_draw"
    flags: list[str] = field(default_factory=list)


@dataclass
class Automaton:
    """Finite-state view of a deterministic strategy: a pure transition
    from (state to move in, internal key) to (move, next key). Lets the
    best-response search treat the fixed player's behavior as edges."""

    start_key: object
    step: Callable[[GameState, object], tuple[Move, object]]


class Strategy:
    kind = "strategy"

    def init(self, inst: Instance, role: Player) -> None:
        self.inst = inst
        self.role = Player(role)
        self.state = inst.initial_state()
        self.history: list[Move] = []
        self.flags: list[str] = []
        self._setup()

    def _setup(self) -> None:
        pass

    def observe(self, move: Move) -> None:
        mover = self.state.turn
        self.state, delta = apply_move(self.inst, self.state, move)
        self.history.append(move)
        self._after(move, delta, mover)

    def _after(self, move: Move, delta: int, mover: Player) -> None:
        pass

    def propose(self) -> Move:
        raise NotImplementedError

    def automaton(self) -> Optional[Automaton]:
        return None


def _fallback_move(inst: Instance, s: GameState) -> Move:
    """No customer reachable: pass when allowed, forced null when stuck,
    otherwise the smallest step."""
    moves = legal_moves(inst, s)
    if inst.passing_allowed:
        return PASS_MOVE
    if moves == [NULL_MOVE]:
        return NULL_MOVE
    return moves[0]


def _step_toward(inst: Instance, s: GameState, target: int) -> Move:
    """Move the piece nearest to `target` one step along a shortest path;
    ties break to the lowest piece index, then the lowest next vertex."""
    dist = distances_to(inst.graph, target)
    pieces = s.mover_pieces()
    best_idx, best_d = None, None
    for idx, v in enumerate(pieces):
        d = dist[v]
        if d >= 0 and (best_d is None or d < best_d):
            best_idx, best_d = idx, d
    if best_idx is None:
        return _fallback_move(inst, s)
    v = pieces[best_idx]
    nxt = min(w for w in inst.graph.adjacency[v] if dist[w] == best_d - 1)
    return Move.step(best_idx, nxt)


def _nearest_customer(inst: Instance, s: GameState) -> Optional[int]:
    """Nearest remaining customer from any mover piece; ties break to the
    lowest customer vertex id. None when nothing is reachable."""
    best_v, best_d = None, None
    pieces = s.mover_pieces()
    for c in sorted(s.remaining):
        dist = distances_to(inst.graph, c)
        d = min((dist[v] for v in pieces if dist[v] >= 0), default=None)
        if d is not None and (best_d is None or d < best_d):
            best_v, best_d = c, d
    return best_v


def _greedy_decide(inst: Instance, s: GameState,
                   target: Optional[int]) -> tuple[Move, Optional[int]]:
    if target is None or target not in s.remaining:
        target = _nearest_customer(inst, s)
    if target is None:
        return _fallback_move(inst, s), None
    return _step_toward(inst, s, target), target


class GreedyStrategy(Strategy):
    """Retargets the nearest remaining customer whenever the previous
    target is gone or reached, then walks a shortest path toward it. On
    stars with leaf customers this is the pick-the-nearest-free-customer
    strategy; per-turn retargeting is its natural completion elsewhere."""

    kind = "greedy"

    def _setup(self):
        self.target: Optional[int] = None

    def propose(self) -> Move:
        move, self.target = _greedy_decide(self.inst, self.state, self.target)
        return move

    def automaton(self) -> Automaton:
        inst = self.inst
        return Automaton(None, lambda s, key: _greedy_decide(inst, s, key))


class APrioriStrategy(Strategy):
    """Always heads for the highest-priority remaining customer."""

    kind = "apriori"

    def __init__(self, priority):
        self.priority = tuple(priority)

    def _setup(self):
        if set(self.priority) != set(self.inst.customers) or \
                len(self.priority) != len(self.inst.customers):
            raise RulesError("priority must be a permutation of the customers")

    def _decide(self, s: GameState) -> Move:
        pieces = s.mover_pieces()
        for c in self.priority:
            if c not in s.remaining:
                continue
            dist = distances_to(self.inst.graph, c)
            if any(dist[v] >= 0 for v in pieces):
                return _step_toward(self.inst, s, c)
        return _fallback_move(self.inst, s)

    def propose(self) -> Move:
        return self._decide(self.state)

    def automaton(self) -> Automaton:
        return Automaton(None, lambda s, key: (self._decide(s), None))


class RandomStrategy(Strategy):
    """Uniform legal move from a seeded generator; replay-reproducible."""

    kind = "random"

    def __init__(self, seed: int):
        self.seed = seed

    def _setup(self):
        self.rng = random.Random(self.seed)

    def propose(self) -> Move:
        return self.rng.choice(legal_moves(self.inst, self.state))


class OptimalStrategy(Strategy):
    """Plays the exact solver's policy; solves once at init."""

    kind = "optimal"

    def __init__(self, budget: int = DEFAULT_BUDGET):
        self.budget = budget

    def _setup(self):
        self.result = _cached_solve(self.inst, self.inst.initial_state(), self.budget)

    def propose(self) -> Move:
        return self.result.policy[self.state]

    def automaton(self) -> Automaton:
        policy = self.result.policy
        return Automaton(None, lambda s, key: (policy[s], None))


class StolenStrategy(Strategy):
    """First-player strategy built from a second-player strategy: waste
    two moves (out to a returnable neighbor and back), then answer the
    opponent's one-move-lagged sequence with the inner strategy's replies,
    bookkept against a phantom game. If the lagged move is ever illegal
    for the phantom (impossible on same-start undirected instances), falls
    back to greedy and flags the match rather than failing silently."""

    kind = "stolen"

    def __init__(self, inner: Strategy):
        self.inner = inner

    def _setup(self):
        inst, role = self.inst, self.role
        if role is not Player.I:
            raise RulesError("steal_strategy plays player I")
        if inst.h != 1 or inst.k != 1:
            raise RulesError("steal_strategy needs one piece per side")
        if inst.starts_i != inst.starts_ii:
            raise RulesError("steal_strategy needs a common start vertex")
        start = inst.starts_i[0]
        returnable = [w for w in inst.graph.adjacency[start]
                      if start in inst.graph.adjacency[w]]
        if not returnable:
            raise RulesError("start has no neighbor allowing a return")
        self.start = start
        self.first_step = min(returnable)
        self.my_moves = 0
        self.pending: deque[Move] = deque()
        self.phantom = inst.initial_state()
        self.inner.init(inst, Player.II)
        self.fallback: Optional[GreedyStrategy] = None

    def _after(self, move, delta, mover):
        if mover is Player.II:
            self.pending.append(move)
        if self.fallback is not None:
            self.fallback.observe(move)

    def _start_fallback(self) -> None:
        self.flags.append("stolen_fallback")
        self.fallback = GreedyStrategy()
        self.fallback.init(self.inst, self.role)
        for mv in self.history:
            self.fallback.observe(mv)

    def propose(self) -> Move:
        if self.fallback is not None:
            return self.fallback.propose()
        n = self.my_moves
        self.my_moves += 1
        if n == 0:
            return Move.step(0, self.first_step)
        if n == 1:
            return Move.step(0, self.start)
        lagged = self.pending.popleft()
        try:
            self.phantom, _ = apply_move(self.inst, self.phantom, lagged)
        except IllegalMoveError:
            self._start_fallback()
            return self.fallback.propose()
        self.inner.observe(lagged)
        reply = self.inner.propose()
        self.phantom, _ = apply_move(self.inst, self.phantom, reply)
        self.inner.observe(reply)
        return reply


def greedy_strategy() -> Strategy:
    return GreedyStrategy()


def apriori_strategy(priority) -> Strategy:
    return APrioriStrategy(priority)


def random_strategy(seed: int) -> Strategy:
    return RandomStrategy(seed)


def optimal_strategy(budget: int = DEFAULT_BUDGET) -> Strategy:
    return OptimalStrategy(budget)


def steal_strategy(inner: Strategy) -> Strategy:
    return StolenStrategy(inner)


def make_strategy(kind: str, budget: int = DEFAULT_BUDGET) -> Strategy:
    """Build a strategy from its CLI/service name:
    greedy | apriori:<v1,v2,...> | random:<seed> | optimal | stolen:<kind>."""
    head, _, rest = kind.partition(":")
    if head == "greedy":
        return GreedyStrategy()
    if head == "apriori":
        if not rest:
            raise RulesError("apriori needs a priority list, e.g. apriori:4,1,2")
        return APrioriStrategy(int(v) for v in rest.split(","))
    if head == "random":
        if not rest:
            raise RulesError("random needs a seed, e.g. random:7")
        return RandomStrategy(int(rest))
    if head == "optimal":
        return OptimalStrategy(budget)
    if head == "stolen":
        if not rest:
            raise RulesError("stolen needs an inner kind, e.g. stolen:greedy")
        return StolenStrategy(make_strategy(rest, budget))
    raise RulesError(f"unknown strategy kind {kind!r}")


# ---------------------------------------------------------------------------
# match runner


def default_ply_cap(inst: Instance) -> int:
    n = inst.graph.vertex_count
    per_layer = 2 * (n ** inst.h) * (n ** inst.k)
    return 4 * (len(inst.customers) + 1) * per_layer + 16


def run_match(inst: Instance, strat_i: Strategy, strat_ii: Strategy,
              ply_cap: Optional[int] = None) -> MatchRecord:
    """Alternating play from the initial state. The seen-set of positions
    clears on every capture; revisiting one declares a repetition draw."""
    state = inst.initial_state()
    if terminal_status(inst, state):
        return MatchRecord([], [], Outcome.ended(0), "ended")
    strat_i.init(inst, Player.I)
    strat_ii.init(inst, Player.II)
    cap = default_ply_cap(inst) if ply_cap is None else ply_cap
    seen = {(state.turn, state.pieces_i, state.pieces_ii, state.remaining)}
    moves: list[tuple[Player, Move]] = []
    deltas: list[int] = []
    margin = 0
    outcome = reason = None
    for _ in range(cap):
        mover = state.turn
        strat = strat_i if mover is Player.I else strat_ii
        mv = strat.propose()
        if mv not in legal_moves(inst, state):
            raise IllegalMoveError(f"{strat.kind} proposed illegal {mv!r}")
        state, delta = apply_move(inst, state, mv)
        signed = delta if mover is Player.I else -delta
        margin += signed
        moves.append((mover, mv))
        deltas.append(signed)
        strat_i.observe(mv)
        strat_ii.observe(mv)
        if delta:
            seen.clear()
        snap = (state.turn, state.pieces_i, state.pieces_ii, state.remaining)
        if terminal_status(inst, state):
            outcome, reason = Outcome.ended(margin), "ended"
            break
        if snap in seen:
            outcome, reason = DRAW, "repetition_draw"
            break
        seen.add(snap)
    if outcome is None:
        raise PlyCapExceeded(f"no termination within {cap} plies")
    flags = list(strat_i.flags) + list(strat_ii.flags)
    return MatchRecord(moves, deltas, outcome, reason, flags)


# ---------------------------------------------------------------------------
# exact best response against a fixed deterministic strategy


def best_response(inst: Instance, fixed: Strategy, fixed_role: Player,
                  budget: int = DEFAULT_BUDGET) -> Outcome:
    """Exact best outcome the free player can reach against `fixed`, under
    the runner's repetition-draw semantics.

    The fixed player's moves are determined, so this is single-agent
    search over (game state, fixed strategy key, accumulated margin)
    nodes; cycles are draws, terminal nodes end at their margin. Within a
    capture-free window the fixed key is constant, so node-level cycles
    coincide with the runner's position repetitions.
    """
    fixed_role = Player(fixed_role)
    fixed.init(inst, fixed_role)
    aut = fixed.automaton()
    if aut is None:
        raise RulesError(f"{fixed.kind} does not expose a deterministic automaton")
    kd = inst.draw_key()
    free_is_i = fixed_role is Player.II

    reach_cache: dict[frozenset, frozenset] = {}

    def is_terminal(s: GameState) -> bool:
        if not s.remaining:
            return True
        r = reach_cache.get(s.remaining)
        if r is None:
            r = vertices_reaching(inst.graph, s.remaining)
            reach_cache[s.remaining] = r
        return not any(v in r for v in s.pieces_i + s.pieces_ii)

    root = (inst.initial_state(), aut.start_key, 0)
    index = {root: 0}
    nodes = [root]
    out_edges: list[list[int]] = []
    term_value: list[Optional[int]] = []
    queue = deque([0])
    while queue:
        nid = queue.popleft()
        s, key, margin = nodes[nid]
        while len(out_edges) <= nid:
            out_edges.append([])
            term_value.append(None)
        if is_terminal(s):
            term_value[nid] = 2 * margin
            continue
        if s.turn is fixed_role:
            mv, nkey = aut.step(s, key)
            succs = [(mv, nkey)]
        else:
            succs = [(mv, key) for mv in legal_moves(inst, s)]
        es = []
        for mv, nkey in succs:
            s2, delta = apply_move(inst, s, mv)
            m2 = margin + (delta if s.turn is Player.I else -delta)
            node = (s2, nkey, m2)
            tid = index.get(node)
            if tid is None:
                tid = len(nodes)
                if tid >= budget:
                    raise BudgetExceeded(
                        f"best-response nodes exceed budget {budget}",
                        SolveStats(states_visited=tid))
                index[node] = tid
                nodes.append(node)
                queue.append(tid)
            es.append(tid)
        out_edges[nid] = es

    n_nodes = len(nodes)
    rev: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, es in enumerate(out_edges):
        for v in set(es):
            rev[v].append(u)
    free_node = [nodes[i][0].turn is not fixed_role for i in range(n_nodes)]
    nonterm = [i for i in range(n_nodes) if term_value[i] is None]
    deg = [len(set(out_edges[i])) for i in range(n_nodes)]

    def reach_into(good_term) -> set[int]:
        """Nodes from which the free player forces reaching a good
        terminal (fixed nodes have one edge, so they are forced)."""
        inset = {i for i in range(n_nodes)
                 if term_value[i] is not None and good_term(term_value[i])}
        cnt = {i: deg[i] for i in nonterm}
        dq = deque(inset)
        while dq:
            v = dq.popleft()
            for u in rev[v]:
                if u in inset or term_value[u] is not None:
                    continue
                if free_node[u]:
                    inset.add(u)
                    dq.append(u)
                else:
                    cnt[u] -= 1
                    if cnt[u] == 0:
                        inset.add(u)
                        dq.append(u)
        return inset

    def avoid(bad_term) -> set[int]:
        """Nodes from which the free player avoids every bad terminal
        (cycling forever is allowed)."""
        alive = set(nonterm) | {i for i in range(n_nodes)
                                if term_value[i] is not None and not bad_term(term_value[i])}
        good = {}
        dq = deque()
        for i in nonterm:
            ok = [t for t in set(out_edges[i])
                  if term_value[t] is None or not bad_term(term_value[t])]
            good[i] = len(ok)
            if free_node[i]:
                if good[i] == 0:
                    dq.append(i)
            else:
                if good[i] < deg[i]:
                    dq.append(i)
        while dq:
            v = dq.popleft()
            if v not in alive:
                continue
            alive.discard(v)
            for u in rev[v]:
                if u not in alive or term_value[u] is not None:
                    continue
                if free_node[u]:
                    good[u] -= 1
                    if good[u] == 0:
                        dq.append(u)
                else:
                    dq.append(u)
        return alive

    thresholds = sorted({v for v in term_value if v is not None} | {kd})
    best: Optional[int] = None
    if free_is_i:
        for x in thresholds:
            forced = reach_into(lambda t: t >= x) if x > kd else avoid(lambda t: t < x)
            if 0 in forced:
                best = x
    else:
        for x in reversed(thresholds):
            forced = reach_into(lambda t: t <= x) if x < kd else avoid(lambda t: t > x)
            if 0 in forced:
                best = x
    if best is None:
        raise AssertionError("best-response found no forced threshold")
    if best != kd:
        return Outcome.ended(best // 2)
    if inst.draw_rank == "equals_tie":
        ender = reach_into(lambda t: t >= 0) if free_is_i else reach_into(lambda t: t <= 0)
        if 0 in ender:
            return Outcome.ended(0)
    return DRAW
