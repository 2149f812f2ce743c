"""Exact game-value solver.

Captures strictly shrink the remaining-customer set, so states group into
layers keyed by that set, partially ordered by inclusion. Layers are
solved smallest-first; within one layer the non-capturing moves form a
possibly cyclic two-player game whose exits (captures into already-solved
layers, and terminal states) have known values. Each layer is solved by
threshold decomposition: for every threshold t in the outcome order,
compute the set of states from which player I forces an outcome >= t.
Thresholds above Draw are reachability attractors (I must make the game
end favorably, a least fixpoint); thresholds at or below Draw are safety
attractors (I only has to avoid unfavorable endings, a greatest
fixpoint). A state's value is the largest threshold it is forced for.

State values are relative: they ignore captures made before reaching the
state. A capture edge therefore compares shift(value(successor), +/-1)
against the threshold, where an unending future stays a draw no matter
the interim score.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Optional

from .model import (
    DRAW,
    GameState,
    Instance,
    Move,
    Outcome,
    Player,
    RulesError,
    shift_outcome,
    validate_instance,
    vertices_reaching,
)

DEFAULT_BUDGET = 10**7
MAX_CUSTOMERS = 64


class BudgetExceeded(RuntimeError):
    """Raised when the reachable state space exceeds the given budget.

    The solver exists to certify exact claims; a truncated answer is
    worthless for that, so this is an error rather than an approximation.
    """

    def __init__(self, message: str, stats: "SolveStats"):
        super().__init__(message)
        self.stats = stats


@dataclass
class SolveStats:
    states_visited: int = 0
    layers_solved: int = 0
    elapsed: float = 0.0


@dataclass
class SolveResult:
    """Value of the initial state (player I's perspective), an optimal
    move for every reachable non-terminal state, and solve statistics."""

    value: Outcome
    policy: dict[GameState, Move]
    stats: SolveStats
    values: dict[GameState, Outcome] = field(default_factory=dict)


# packed state: (turn_bit, pieces_i tuple, pieces_ii tuple, remaining mask)


def _pack(inst: Instance, s: GameState, bit_of: dict[int, int]) -> tuple:
    mask = 0
    for c in s.remaining:
        mask |= bit_of[c]
    return (0 if s.turn is Player.I else 1, s.pieces_i, s.pieces_ii, mask)


def _unpack(key: tuple, cust_list: list[int]) -> GameState:
    turn, pi, pii, mask = key
    remaining = frozenset(cust_list[i] for i in range(len(cust_list)) if mask >> i & 1)
    return GameState(Player.I if turn == 0 else Player.II, pi, pii, remaining)


class _Engine:
    """Single solve run; owns its tables exclusively."""

    def __init__(self, inst: Instance, budget: int):
        probs = validate_instance(inst)
        if probs:
            raise RulesError("invalid instance: " + "; ".join(probs))
        if len(inst.customers) > MAX_CUSTOMERS:
            raise RulesError(
                f"solver supports at most {MAX_CUSTOMERS} customers, got {len(inst.customers)}")
        self.inst = inst
        self.budget = budget
        self.cust_list = sorted(inst.customers)
        self.bit_of = {v: 1 << i for i, v in enumerate(self.cust_list)}
        self.adj = inst.graph.adjacency
        self.kd = inst.draw_key()
        self._reach_cache: dict[int, frozenset[int]] = {}
        self.stats = SolveStats()

    # -- transitions ------------------------------------------------------

    def _succs(self, key: tuple) -> list[tuple[tuple, int]]:
        """Successors in legal-move order as (key, shift); shift is the
        signed margin change (+1 capture by I, -1 capture by II)."""
        turn, pi, pii, mask = key
        pieces = pi if turn == 0 else pii
        out = []
        nxt_turn = 1 - turn
        for idx in range(len(pieces)):
            v = pieces[idx]
            rest = pieces[:idx] + pieces[idx + 1:]
            for w in self.adj[v]:
                newp = tuple(sorted(rest + (w,)))
                bit = self.bit_of.get(w, 0) & mask
                nmask = mask & ~bit
                shift = (1 if turn == 0 else -1) if bit else 0
                if turn == 0:
                    out.append(((nxt_turn, newp, pii, nmask), shift))
                else:
                    out.append(((nxt_turn, pi, newp, nmask), shift))
        if self.inst.passing_allowed or not out:
            out.append(((nxt_turn, pi, pii, mask), 0))
        return out

    def _reach(self, mask: int) -> frozenset[int]:
        r = self._reach_cache.get(mask)
        if r is None:
            targets = [self.cust_list[i] for i in range(len(self.cust_list)) if mask >> i & 1]
            r = vertices_reaching(self.inst.graph, targets)
            self._reach_cache[mask] = r
        return r

    def _is_terminal(self, key: tuple) -> bool:
        mask = key[3]
        if mask == 0:
            return True
        reach = self._reach(mask)
        return not any(v in reach for v in key[1] + key[2])

    # -- enumeration ------------------------------------------------------

    def enumerate_from(self, initial: tuple) -> None:
        index: dict[tuple, int] = {initial: 0}
        keys = [initial]
        edges: list[Optional[list[tuple[int, int]]]] = []
        terminal: list[bool] = []
        queue = deque([0])
        while queue:
            sid = queue.popleft()
            key = keys[sid]
            while len(terminal) <= sid:
                terminal.append(False)
                edges.append(None)
            if self._is_terminal(key):
                terminal[sid] = True
                edges[sid] = []
                continue
            es = []
            for skey, shift in self._succs(key):
                tid = index.get(skey)
                if tid is None:
                    tid = len(keys)
                    if tid >= self.budget:
                        self.stats.states_visited = tid
                        raise BudgetExceeded(
                            f"reachable states exceed budget {self.budget}", self.stats)
                    index[skey] = tid
                    keys.append(skey)
                    queue.append(tid)
                es.append((tid, shift))
            edges[sid] = es
        self.index = index
        self.keys = keys
        self.edges = edges
        self.terminal = terminal
        self.stats.states_visited = len(keys)

    # -- per-layer fixpoints ----------------------------------------------

    def _reach_fixpoint(self, members, ex_cands, inl, rev, x):
        """Least fixpoint: in-layer states from which I forces an ending
        with key >= x. Returns {id: entry_rank}."""
        turnbit = self.turnbit
        rank: dict[int, int] = {}
        cnt: dict[int, int] = {}
        dq = deque()
        seq = 0
        for s in members:
            if turnbit[s] == 0:
                if any(c >= x for c in ex_cands[s]):
                    rank[s] = seq
                    seq += 1
                    dq.append(s)
            else:
                if any(c < x for c in ex_cands[s]):
                    cnt[s] = -1
                else:
                    n = len(inl[s])
                    if n == 0:
                        rank[s] = seq
                        seq += 1
                        dq.append(s)
                    else:
                        cnt[s] = n
        while dq:
            s = dq.popleft()
            for p in rev.get(s, ()):
                if p in rank:
                    continue
                if turnbit[p] == 0:
                    rank[p] = seq
                    seq += 1
                    dq.append(p)
                else:
                    c = cnt[p]
                    if c > 0:
                        c -= 1
                        cnt[p] = c
                        if c == 0:
                            rank[p] = seq
                            seq += 1
                            dq.append(p)
        return rank

    def _safety_fixpoint(self, members, ex_cands, inl, rev, x, removal_rank):
        """Greatest fixpoint: in-layer states from which I avoids every
        ending with key < x (an unending play is fine). Returns the
        surviving set; records first-ever removal ranks for the policy."""
        turnbit = self.turnbit
        alive = set(members)
        good_ex = {}
        alive_in = {}
        dq = deque()
        for s in members:
            if turnbit[s] == 0:
                good_ex[s] = any(c >= x for c in ex_cands[s])
                alive_in[s] = len(inl[s])
                if not good_ex[s] and alive_in[s] == 0:
                    dq.append(s)
            else:
                if any(c < x for c in ex_cands[s]):
                    dq.append(s)
        while dq:
            s = dq.popleft()
            if s not in alive:
                continue
            alive.discard(s)
            removal_rank.setdefault(s, self._removal_seq)
            self._removal_seq += 1
            for p in rev.get(s, ()):
                if p not in alive:
                    continue
                if turnbit[p] == 1:
                    dq.append(p)
                else:
                    alive_in[p] -= 1
                    if alive_in[p] == 0 and not good_ex[p]:
                        dq.append(p)
        return alive

    # -- main solve ---------------------------------------------------------

    def solve_values(self) -> None:
        t0 = time.monotonic()
        n_states = len(self.keys)
        self.turnbit = [k[0] for k in self.keys]
        self.value_key: list[Optional[int]] = [None] * n_states
        self.value_isdraw: list[bool] = [False] * n_states
        self.rank_w: dict[int, int] = {}
        self.removal_rank: dict[int, int] = {}
        self._removal_seq = 0
        kd = self.kd

        layers: dict[int, list[int]] = {}
        for sid, key in enumerate(self.keys):
            layers.setdefault(key[3], []).append(sid)

        for mask in sorted(layers, key=lambda m: (bin(m).count("1"), m)):
            ids = layers[mask]
            members = []
            for s in ids:
                if self.terminal[s]:
                    self.value_key[s] = 0
                    self.value_isdraw[s] = False
                else:
                    members.append(s)
            if not members:
                self.stats.layers_solved += 1
                continue

            equals_tie = self.inst.draw_rank == "equals_tie"
            ex_cands: dict[int, list[int]] = {}
            end_cands: dict[int, list[int]] = {}
            inl: dict[int, list[int]] = {}
            rev: dict[int, list[int]] = {}
            for s in members:
                exs, ends, ins = [], [], []
                seen_in = set()
                for tid, shift in self.edges[s]:
                    if shift != 0 or self.terminal[tid]:
                        if self.value_isdraw[tid]:
                            exs.append(kd)
                            # a capture into a draw-valued future never
                            # counts as ending the game
                            ends.append(kd - 1)
                        else:
                            c = self.value_key[tid] + 2 * shift
                            exs.append(c)
                            ends.append(c)
                    elif tid not in seen_in:
                        seen_in.add(tid)
                        ins.append(tid)
                        rev.setdefault(tid, []).append(s)
                ex_cands[s] = exs
                if equals_tie:
                    end_cands[s] = ends
                inl[s] = ins

            thresholds = sorted(set(c for cs in ex_cands.values() for c in cs) | {kd})
            for x in thresholds:
                if x > kd:
                    ranked = self._reach_fixpoint(members, ex_cands, inl, rev, x)
                    for s, r in ranked.items():
                        self.value_key[s] = x
                        self.rank_w[s] = r
                else:
                    for s in self._safety_fixpoint(members, ex_cands, inl, rev, x,
                                                   self.removal_rank):
                        self.value_key[s] = x

            if equals_tie:
                # Draw and Ended(0) share key 0; a state reports Ended(0)
                # only if I can force the game to actually end that well.
                ranked0 = self._reach_fixpoint(members, end_cands, inl, rev, kd)
                for s in members:
                    if self.value_key[s] == kd:
                        if s in ranked0:
                            self.rank_w[s] = ranked0[s]
                        else:
                            self.value_isdraw[s] = True
            else:
                for s in members:
                    if self.value_key[s] == kd:
                        self.value_isdraw[s] = True
            self.stats.layers_solved += 1

        self.stats.elapsed = time.monotonic() - t0

    def outcome_of(self, sid: int) -> Outcome:
        if self.value_isdraw[sid]:
            return DRAW
        return Outcome.ended(self.value_key[sid] // 2)

    # -- policy -------------------------------------------------------------

    def _moves_of(self, key: tuple) -> list[Move]:
        turn, pi, pii, _ = key
        pieces = pi if turn == 0 else pii
        moves = []
        for idx in range(len(pieces)):
            for w in self.adj[pieces[idx]]:
                moves.append(Move.step(idx, w))
        if self.inst.passing_allowed:
            moves.append(Move("pass"))
        elif not moves:
            moves.append(Move("null"))
        return moves

    def best_move_of(self, sid: int) -> Move:
        """Deterministic optimal move: smallest (piece, target) among the
        value-attaining moves that also make progress when the value
        requires the game to end."""
        key = self.keys[sid]
        x = self.value_key[sid]
        mover_is_i = self.turnbit[sid] == 0
        kd = self.kd
        cands = []
        for move, (tid, shift) in zip(self._moves_of(key), self.edges[sid]):
            fixed = shift != 0 or self.terminal[tid]
            if fixed:
                ck = kd if self.value_isdraw[tid] else self.value_key[tid] + 2 * shift
            else:
                ck = self.value_key[tid]
            cands.append((move, ck, tid, fixed))
        best = max(c[1] for c in cands) if mover_is_i else min(c[1] for c in cands)
        if best != x:
            raise AssertionError(
                f"solver inconsistency: state value {x} but best move candidate {best}")

        needs_progress = (
            (mover_is_i and not self.value_isdraw[sid] and x >= kd and sid in self.rank_w)
            if x >= kd else (not mover_is_i and sid in self.removal_rank))
        choices = []
        for move, ck, tid, fixed in cands:
            if ck != x:
                continue
            if needs_progress and not fixed:
                if mover_is_i:
                    if self.rank_w.get(tid, 1 << 60) >= self.rank_w[sid]:
                        continue
                else:
                    if self.removal_rank.get(tid, 1 << 60) >= self.removal_rank[sid]:
                        continue
            choices.append(move)
        if not choices:
            raise AssertionError("no progress-consistent optimal move found")
        return min(choices, key=lambda m: (m.kind != "step", m.piece, m.target))


def _run_engine(inst: Instance, budget: int,
                initial: Optional[GameState]) -> tuple[_Engine, int]:
    eng = _Engine(inst, budget)
    init_state = inst.initial_state() if initial is None else initial
    init_key = _pack(inst, init_state, eng.bit_of)
    eng.enumerate_from(init_key)
    eng.solve_values()
    return eng, eng.index[init_key]


def solve(inst: Instance, budget: int = DEFAULT_BUDGET,
          initial: Optional[GameState] = None) -> SolveResult:
    """Solve every state reachable from the initial state.

    Raises BudgetExceeded when the reachable state count passes `budget`.
    """
    eng, root = _run_engine(inst, budget, initial)
    values: dict[GameState, Outcome] = {}
    policy: dict[GameState, Move] = {}
    for sid, key in enumerate(eng.keys):
        gs = _unpack(key, eng.cust_list)
        values[gs] = eng.outcome_of(sid)
        if not eng.terminal[sid]:
            policy[gs] = eng.best_move_of(sid)
    return SolveResult(value=eng.outcome_of(root), policy=policy,
                       stats=eng.stats, values=values)


def solve_value(inst: Instance, budget: int = DEFAULT_BUDGET,
                initial: Optional[GameState] = None) -> Outcome:
    """solve() without policy/value-table extraction; same engine."""
    eng, root = _run_engine(inst, budget, initial)
    return eng.outcome_of(root)


@lru_cache(maxsize=16)
def _cached_solve(inst: Instance, initial: GameState, budget: int) -> SolveResult:
    return solve(inst, budget, initial)


def best_move(inst: Instance, s: GameState, budget: int = DEFAULT_BUDGET) -> tuple[Move, Outcome]:
    """An optimal move at s and the outcome optimal play yields from s."""
    from .model import terminal_status

    if terminal_status(inst, s):
        raise RulesError("state is terminal; no move to choose")
    res = _cached_solve(inst, s, budget)
    return res.policy[s], res.values[s]


def force_set(inst: Instance, layer_remaining: Iterable[int], t: Outcome,
              exit_values: Mapping[GameState, Outcome]) -> set[GameState]:
    """In-layer non-terminal states from which player I forces >= t.

    The layer is the full placement space (every turn and piece multiset)
    for the given remaining set. `exit_values` must give the value of
    every capture successor; shifts are applied here. Thresholds above
    Draw run the reachability attractor, the rest the safety attractor.
    """
    eng = _Engine(inst, budget=DEFAULT_BUDGET)
    mask = 0
    for v in layer_remaining:
        if v not in eng.bit_of:
            raise RulesError(f"{v} is not a customer vertex")
        mask |= eng.bit_of[v]
    n = inst.graph.vertex_count

    keys = []
    for turn in (0, 1):
        for pi in combinations_with_replacement(range(n), inst.h):
            for pii in combinations_with_replacement(range(n), inst.k):
                keys.append((turn, pi, pii, mask))
    index = {k: i for i, k in enumerate(keys)}
    eng.keys = keys
    eng.turnbit = [k[0] for k in keys]
    eng.terminal = [eng._is_terminal(k) for k in keys]
    eng.value_isdraw = [False] * len(keys)
    eng.value_key = [0 if term else None for term, _ in zip(eng.terminal, keys)]
    eng._removal_seq = 0

    x = inst.outcome_key(t)
    kd = eng.kd
    members = [i for i in range(len(keys)) if not eng.terminal[i]]
    ex_cands: dict[int, list[int]] = {}
    inl: dict[int, list[int]] = {}
    rev: dict[int, list[int]] = {}
    for s in members:
        exs, ins = [], []
        seen_in = set()
        for skey, shift in eng._succs(keys[s]):
            if shift != 0:
                gs = _unpack(skey, eng.cust_list)
                try:
                    val = exit_values[gs]
                except KeyError:
                    raise RulesError(f"exit_values missing capture successor {gs}")
                shifted = shift_outcome(val, shift)
                exs.append(kd if shifted.is_draw else 2 * shifted.margin)
            else:
                tid = index[skey]
                if eng.terminal[tid]:
                    exs.append(0)
                elif tid not in seen_in:
                    seen_in.add(tid)
                    ins.append(tid)
                    rev.setdefault(tid, []).append(s)
        ex_cands[s] = exs
        inl[s] = ins

    if x > kd:
        hit = set(eng._reach_fixpoint(members, ex_cands, inl, rev, x))
    else:
        hit = eng._safety_fixpoint(members, ex_cands, inl, rev, x, {})
    return {_unpack(keys[s], eng.cust_list) for s in hit}


# ---------------------------------------------------------------------------
# independent oracle: monolithic attractor over margin-augmented states


def oracle_value(inst: Instance, budget: int = 10**6) -> Outcome:
    """Game value by a structurally different method, used in tests.

    Enumerates the full reachable graph over (state, accumulated margin)
    nodes with no layering and no shift arithmetic, then runs one global
    attractor fixpoint per threshold; the value is the largest forced
    threshold.
    """
    probs = validate_instance(inst)
    if probs:
        raise RulesError("invalid instance: " + "; ".join(probs))
    adj = inst.graph.adjacency
    customers = inst.customers
    kd = inst.draw_key()
    passing = inst.passing_allowed

    def succs(node):
        turn, pi, pii, rem, margin = node
        pieces = pi if turn == 0 else pii
        out = []
        for idx in range(len(pieces)):
            rest = pieces[:idx] + pieces[idx + 1:]
            for w in adj[pieces[idx]]:
                newp = tuple(sorted(rest + (w,)))
                if w in rem:
                    nrem = rem - {w}
                    nmargin = margin + (1 if turn == 0 else -1)
                else:
                    nrem, nmargin = rem, margin
                if turn == 0:
                    out.append((1, newp, pii, nrem, nmargin))
                else:
                    out.append((0, pi, newp, nrem, nmargin))
        if passing or not out:
            out.append((1 - turn, pi, pii, rem, margin))
        return out

    reach_cache: dict[frozenset, frozenset] = {}

    def is_terminal(node):
        rem = node[3]
        if not rem:
            return True
        r = reach_cache.get(rem)
        if r is None:
            r = vertices_reaching(inst.graph, rem)
            reach_cache[rem] = r
        return not any(v in r for v in node[1] + node[2])

    s0 = inst.initial_state()
    root = (0, s0.pieces_i, s0.pieces_ii, s0.remaining, 0)
    index = {root: 0}
    nodes = [root]
    out_edges: list[list[int]] = []
    term_value: list[Optional[int]] = []
    queue = deque([0])
    while queue:
        nid = queue.popleft()
        node = nodes[nid]
        while len(out_edges) <= nid:
            out_edges.append([])
            term_value.append(None)
        if is_terminal(node):
            term_value[nid] = 2 * node[4]
            continue
        es = []
        for sn in succs(node):
            tid = index.get(sn)
            if tid is None:
                tid = len(nodes)
                if tid >= budget:
                    raise BudgetExceeded(
                        f"oracle nodes exceed budget {budget}",
                        SolveStats(states_visited=tid))
                index[sn] = tid
                nodes.append(sn)
                queue.append(tid)
            es.append(tid)
        out_edges[nid] = es

    n_nodes = len(nodes)
    rev: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, es in enumerate(out_edges):
        for v in set(es):
            rev[v].append(u)
    nonterm = [i for i in range(n_nodes) if term_value[i] is None]
    turnbit = [nodes[i][0] for i in range(n_nodes)]
    deg = [len(set(out_edges[i])) for i in range(n_nodes)]

    def reach_force(x: int) -> set[int]:
        # least fixpoint into terminals with value >= x
        won = {i for i in range(n_nodes) if term_value[i] is not None and term_value[i] >= x}
        cnt = {i: deg[i] for i in nonterm}
        dq = deque(won)
        inset = set(won)
        while dq:
            v = dq.popleft()
            for u in rev[v]:
                if u in inset or term_value[u] is not None:
                    continue
                if turnbit[u] == 0:
                    inset.add(u)
                    dq.append(u)
                else:
                    cnt[u] -= 1
                    if cnt[u] == 0:
                        inset.add(u)
                        dq.append(u)
        return inset

    def safe_force(x: int) -> set[int]:
        # greatest fixpoint avoiding terminals with value < x
        alive = set(nonterm) | {i for i in range(n_nodes)
                                if term_value[i] is not None and term_value[i] >= x}
        good = {i: len([t for t in set(out_edges[i]) if
                        term_value[t] is None or term_value[t] >= x])
                for i in nonterm}
        dq = deque()
        for i in nonterm:
            bad = any(term_value[t] is not None and term_value[t] < x
                      for t in out_edges[i])
            if turnbit[i] == 1 and bad:
                dq.append(i)
            elif turnbit[i] == 0 and good[i] == 0:
                dq.append(i)
        while dq:
            v = dq.popleft()
            if v not in alive:
                continue
            alive.discard(v)
            for u in rev[v]:
                if u not in alive or term_value[u] is not None:
                    continue
                if turnbit[u] == 1:
                    dq.append(u)
                else:
                    good[u] -= 1
                    if good[u] == 0:
                        dq.append(u)
        return alive

    def forces_ge(x: int) -> set[int]:
        return reach_force(x) if x > kd else safe_force(x)

    thresholds = sorted({v for v in term_value if v is not None} | {kd})
    best: Optional[int] = None
    for x in thresholds:
        if 0 in forces_ge(x):
            best = x
    if best is None:
        raise AssertionError("oracle found no forced threshold")
    if best != kd:
        return Outcome.ended(best // 2)
    if inst.draw_rank == "equals_tie" and 0 in reach_force(kd):
        return Outcome.ended(0)
    return DRAW
