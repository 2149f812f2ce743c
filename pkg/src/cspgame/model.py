"""Core rules of the Competing Salesmen Problem (CSP).

Two players alternate moving one of their pieces along graph edges.
Arriving on a vertex that still holds a customer captures it (the vertex
stays traversable). The game ends when no customer is left or no piece of
either player can reach one; the higher capture count wins. A play that
never ends is a draw, which is ranked differently from a tie (equal
scores at the end of a finished game).

Everything here is an immutable value; operations are pure functions.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Optional, Sequence


class Player(str, Enum):
    I = "I"
    II = "II"

    @property
    def other(self) -> "Player":
        return Player.II if self is Player.I else Player.I


DRAW_RANKS = ("below_tie", "below_all", "equals_tie")


class RulesError(ValueError):
    """Invalid instance, state, or move handed to a rules operation."""


class IllegalMoveError(RulesError):
    """Move not legal in the given state."""


@dataclass(frozen=True)
class Graph:
    """Finite (di)graph with canonical adjacency lists.

    Neighbor lists are sorted ascending and duplicate-free; undirected
    graphs store both directions. Vertex ids run 0..vertex_count-1.
    """

    vertex_count: int
    directed: bool
    adjacency: tuple[tuple[int, ...], ...]
    labels: Optional[tuple[str, ...]] = None

    @staticmethod
    def from_edges(vertex_count: int, edges: Iterable[tuple[int, int]],
                   directed: bool = False,
                   labels: Optional[Sequence[str]] = None) -> "Graph":
        adj: list[set[int]] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise RulesError(f"edge ({u},{v}) out of range")
            if u == v:
                raise RulesError(f"self-loop at {u}")
            adj[u].add(v)
            if not directed:
                adj[v].add(u)
        return Graph(
            vertex_count=vertex_count,
            directed=directed,
            adjacency=tuple(tuple(sorted(s)) for s in adj),
            labels=tuple(labels) if labels is not None else None,
        )

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def edges(self) -> list[tuple[int, int]]:
        """Directed graphs: all arcs. Undirected: each edge once, u < v."""
        out = []
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if self.directed or u < v:
                    out.append((u, v))
        return out

    def violations(self) -> list[str]:
        probs = []
        if self.vertex_count < 1:
            probs.append("vertex_count must be positive")
        if len(self.adjacency) != self.vertex_count:
            probs.append("adjacency length mismatch")
        for u, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                probs.append(f"neighbor list of {u} not sorted/duplicate-free")
            for v in nbrs:
                if not (0 <= v < self.vertex_count):
                    probs.append(f"neighbor {v} of {u} out of range")
                elif v == u:
                    probs.append(f"self-loop at {u}")
                elif not self.directed and u not in self.adjacency[v]:
                    probs.append(f"asymmetry: {u} lists {v} but not vice versa")
        if self.labels is not None and len(self.labels) != self.vertex_count:
            probs.append("labels length mismatch")
        return probs

    def reverse_adjacency(self) -> tuple[tuple[int, ...], ...]:
        if not self.directed:
            return self.adjacency
        rev: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                rev[v].append(u)
        return tuple(tuple(sorted(r)) for r in rev)


@dataclass(frozen=True)
class Instance:
    """A playable CSP problem: graph, customers, starts, and rule flags."""

    graph: Graph
    customers: frozenset[int]
    starts_i: tuple[int, ...]
    starts_ii: tuple[int, ...]
    passing_allowed: bool = False
    draw_rank: str = "below_tie"

    def __post_init__(self):
        object.__setattr__(self, "customers", frozenset(self.customers))
        object.__setattr__(self, "starts_i", tuple(self.starts_i))
        object.__setattr__(self, "starts_ii", tuple(self.starts_ii))

    @property
    def h(self) -> int:
        return len(self.starts_i)

    @property
    def k(self) -> int:
        return len(self.starts_ii)

    def initial_state(self) -> "GameState":
        return GameState(
            turn=Player.I,
            pieces_i=tuple(sorted(self.starts_i)),
            pieces_ii=tuple(sorted(self.starts_ii)),
            remaining=self.customers,
        )

    def outcome_key(self, o: "Outcome") -> int:
        """Total-order key, player I maximizing. Ended(m) maps to 2m."""
        return outcome_key(o, self.draw_rank, len(self.customers))

    def draw_key(self) -> int:
        return outcome_key(DRAW, self.draw_rank, len(self.customers))


@dataclass(frozen=True)
class GameState:
    """Whose turn, where the pieces are, which customers are left.

    Piece lists are kept sorted: pieces of one side are interchangeable,
    so sorting collapses permutations into one canonical state.
    """

    turn: Player
    pieces_i: tuple[int, ...]
    pieces_ii: tuple[int, ...]
    remaining: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "turn", Player(self.turn))
        object.__setattr__(self, "pieces_i", tuple(sorted(self.pieces_i)))
        object.__setattr__(self, "pieces_ii", tuple(sorted(self.pieces_ii)))
        object.__setattr__(self, "remaining", frozenset(self.remaining))

    def mover_pieces(self) -> tuple[int, ...]:
        return self.pieces_i if self.turn is Player.I else self.pieces_ii


STEP = "step"
PASS = "pass"
FORCED_NULL = "null"


@dataclass(frozen=True, order=True)
class Move:
    """Step(piece, target), Pass, or the forced null move.

    ForcedNull exists so a player with no step and no pass still "moves":
    it keeps every play total on directed dead ends.
    """

    kind: str
    piece: int = -1
    target: int = -1

    @staticmethod
    def step(piece: int, target: int) -> "Move":
        return Move(STEP, piece, target)

    def __repr__(self):
        if self.kind == STEP:
            return f"Step({self.piece},{self.target})"
        return "Pass" if self.kind == PASS else "ForcedNull"


PASS_MOVE = Move(PASS)
NULL_MOVE = Move(FORCED_NULL)


@dataclass(frozen=True)
class Outcome:
    """Draw (the game never ends) or Ended(margin = I's score − II's)."""

    is_draw: bool
    margin: int = 0

    @staticmethod
    def ended(margin: int) -> "Outcome":
        return Outcome(False, margin)

    def __repr__(self):
        return "Draw" if self.is_draw else f"Ended({self.margin:+d})"


DRAW = Outcome(True)


def outcome_key(o: Outcome, draw_rank: str = "below_tie",
                customer_count: int = 0) -> int:
    """Order key: Ended(m) -> 2m; Draw's slot depends on draw_rank."""
    if not o.is_draw:
        return 2 * o.margin
    if draw_rank == "below_tie":
        return -1
    if draw_rank == "equals_tie":
        return 0
    if draw_rank == "below_all":
        return -2 * customer_count - 2
    raise RulesError(f"unknown draw_rank {draw_rank!r}")


def shift_outcome(o: Outcome, d: int) -> Outcome:
    """Add d to an ended margin; a game that never ends stays a draw."""
    return o if o.is_draw else Outcome.ended(o.margin + d)


def parse_outcome(text: str) -> Outcome:
    text = text.strip()
    if text == "Draw":
        return DRAW
    if text.startswith("Ended(") and text.endswith(")"):
        return Outcome.ended(int(text[6:-1]))
    raise ValueError(f"not an outcome: {text!r}")


# ---------------------------------------------------------------------------
# rules operations


def validate_instance(inst: Instance) -> list[str]:
    """Return every invariant violation; an empty list means ok."""
    probs = list(inst.graph.violations())
    n = inst.graph.vertex_count
    for c in inst.customers:
        if not (0 <= c < n):
            probs.append(f"customer {c} out of range")
    for name, starts in (("starts_i", inst.starts_i), ("starts_ii", inst.starts_ii)):
        if len(starts) < 1:
            probs.append(f"{name} empty")
        for s in starts:
            if not (0 <= s < n):
                probs.append(f"{name} vertex {s} out of range")
            elif s in inst.customers:
                probs.append(f"start in V_C: {s}")
    if inst.draw_rank not in DRAW_RANKS:
        probs.append(f"unknown draw_rank {inst.draw_rank!r}")
    return probs


def legal_moves(inst: Instance, s: GameState) -> list[Move]:
    """All steps for the mover in (piece, target) order, plus Pass when
    allowed; exactly [ForcedNull] when there is no step and no pass."""
    moves = []
    for i, v in enumerate(s.mover_pieces()):
        for w in inst.graph.adjacency[v]:
            moves.append(Move.step(i, w))
    if inst.passing_allowed:
        moves.append(PASS_MOVE)
    elif not moves:
        moves.append(NULL_MOVE)
    return moves


def apply_move(inst: Instance, s: GameState, m: Move) -> tuple[GameState, int]:
    """Apply a legal move; returns (next state, capture delta for the mover).

    Moving onto a vertex occupied by the opponent is legal; a captured
    customer vertex stays traversable but yields no further score.
    """
    pieces = s.mover_pieces()
    if m.kind == STEP:
        if not (0 <= m.piece < len(pieces)):
            raise IllegalMoveError(f"piece index {m.piece} out of range")
        src = pieces[m.piece]
        if m.target not in inst.graph.adjacency[src]:
            raise IllegalMoveError(f"{m.target} not adjacent to {src}")
        new_pieces = tuple(sorted(pieces[: m.piece] + (m.target,) + pieces[m.piece + 1:]))
        delta = 1 if m.target in s.remaining else 0
        remaining = s.remaining - {m.target} if delta else s.remaining
    elif m.kind == PASS:
        if not inst.passing_allowed:
            raise IllegalMoveError("passing not allowed")
        new_pieces, delta, remaining = pieces, 0, s.remaining
    elif m.kind == FORCED_NULL:
        if inst.passing_allowed or any(inst.graph.adjacency[v] for v in pieces):
            raise IllegalMoveError("forced null only when no step exists")
        new_pieces, delta, remaining = pieces, 0, s.remaining
    else:
        raise IllegalMoveError(f"unknown move kind {m.kind!r}")

    if s.turn is Player.I:
        nxt = GameState(Player.II, new_pieces, s.pieces_ii, remaining)
    else:
        nxt = GameState(Player.I, s.pieces_i, new_pieces, remaining)
    return nxt, delta


def vertices_reaching(graph: Graph, targets: Iterable[int]) -> frozenset[int]:
    """Vertices with a directed path (possibly empty) to any target."""
    rev = graph.reverse_adjacency()
    seen = set(targets)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in rev[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return frozenset(seen)


def terminal_status(inst: Instance, s: GameState) -> bool:
    """True iff the game is over: nothing left, or no piece of either
    player has a path to a remaining customer (all vertices traversable)."""
    if not s.remaining:
        return True
    reach = vertices_reaching(inst.graph, s.remaining)
    return not any(v in reach for v in s.pieces_i + s.pieces_ii)


@lru_cache(maxsize=4096)
def _distances_from(graph: Graph, source: int) -> tuple[int, ...]:
    dist = [-1] * graph.vertex_count
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.adjacency[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return tuple(dist)


def shortest_distance(inst_or_graph, frm: int, to: int) -> Optional[int]:
    """Edge count of a shortest directed path, or None if unreachable."""
    graph = inst_or_graph.graph if isinstance(inst_or_graph, Instance) else inst_or_graph
    if not (0 <= frm < graph.vertex_count and 0 <= to < graph.vertex_count):
        raise RulesError("vertex out of range")
    d = _distances_from(graph, frm)[to]
    return None if d < 0 else d


@lru_cache(maxsize=4096)
def distances_to(graph: Graph, target: int) -> tuple[int, ...]:
    """Directed distance from every vertex to `target` (-1 = unreachable)."""
    rev = graph.reverse_adjacency()
    dist = [-1] * graph.vertex_count
    dist[target] = 0
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for u in rev[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return tuple(dist)


def two_coloring(graph: Graph) -> Optional[list[int]]:
    """Proper 2-coloring (ignoring edge direction), or None if none exists."""
    und: list[set[int]] = [set() for _ in range(graph.vertex_count)]
    for u, nbrs in enumerate(graph.adjacency):
        for v in nbrs:
            und[u].add(v)
            und[v].add(u)
    color = [-1] * graph.vertex_count
    for root in range(graph.vertex_count):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in und[v]:
                if color[w] < 0:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return None
    return color


# ---------------------------------------------------------------------------
# instance files

_FORMAT_VERSION = 1


def instance_to_dict(inst: Instance) -> dict:
    d = {
        "version": _FORMAT_VERSION,
        "directed": inst.graph.directed,
        "vertices": inst.graph.vertex_count,
        "edges": [list(e) for e in inst.graph.edges()],
        "customers": sorted(inst.customers),
        "starts_i": list(inst.starts_i),
        "starts_ii": list(inst.starts_ii),
        "passing_allowed": inst.passing_allowed,
        "draw_rank": inst.draw_rank,
    }
    if inst.graph.labels is not None:
        d["labels"] = list(inst.graph.labels)
    return d


def instance_from_dict(d: dict) -> Instance:
    if d.get("version") != _FORMAT_VERSION:
        raise RulesError(f"unsupported instance file version {d.get('version')!r}")
    required = ["directed", "vertices", "edges", "customers",
                "starts_i", "starts_ii", "passing_allowed", "draw_rank"]
    missing = [k for k in required if k not in d]
    if missing:
        raise RulesError(f"missing fields: {', '.join(missing)}")
    graph = Graph.from_edges(
        d["vertices"],
        [(int(u), int(v)) for u, v in d["edges"]],
        directed=bool(d["directed"]),
        labels=d.get("labels"),
    )
    inst = Instance(
        graph=graph,
        customers=frozenset(int(c) for c in d["customers"]),
        starts_i=tuple(int(v) for v in d["starts_i"]),
        starts_ii=tuple(int(v) for v in d["starts_ii"]),
        passing_allowed=bool(d["passing_allowed"]),
        draw_rank=d["draw_rank"],
    )
    probs = validate_instance(inst)
    if probs:
        raise RulesError("invalid instance: " + "; ".join(probs))
    return inst


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(instance_to_dict(inst), f, indent=1)
        f.write("\n")


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as f:
        return instance_from_dict(json.load(f))
