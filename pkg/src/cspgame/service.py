"""HTTP+JSON play service: session creation, move submission, engine
replies, and exact per-move analysis for the web arena.

Sessions are server-held with a one-hour idle expiry; every mutation of a
session is serialized by its own lock. The engine plays the exact
solver's policy whenever the reachable state space fits the budget and
falls back to greedy (flagged "heuristic") otherwise; analysis is
all-or-nothing exact.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .catalog import catalog, catalog_entry
from .model import (
    DRAW,
    GameState,
    Instance,
    Move,
    Outcome,
    Player,
    RulesError,
    apply_move,
    instance_from_dict,
    instance_to_dict,
    legal_moves,
    terminal_status,
)
from .solver import DEFAULT_BUDGET, BudgetExceeded, MAX_CUSTOMERS, SolveResult, solve
from .strategies import _greedy_decide

IDLE_EXPIRY = 3600.0

MODES = ("human_vs_engine", "human_vs_human", "engine_vs_engine")


@dataclass
class Session:
    sid: str
    inst: Instance
    mode: str
    human_role: Optional[Player]
    state: GameState
    scores: dict
    history: list = field(default_factory=list)
    seen: set = field(default_factory=set)
    finished: bool = False
    outcome: Optional[Outcome] = None
    reason: Optional[str] = None
    solved: Optional[SolveResult] = None
    exact: bool = False
    heuristic_moves: int = 0
    greedy_targets: dict = field(default_factory=dict)
    analysis_budget: int = DEFAULT_BUDGET
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)

    def engine_plays(self, role: Player) -> bool:
        if self.mode == "engine_vs_engine":
            return True
        if self.mode == "human_vs_human":
            return False
        return role is not self.human_role


def _move_to_json(m: Move) -> dict:
    if m.kind == "step":
        return {"piece": m.piece, "target": m.target}
    return {"pass": True} if m.kind == "pass" else {"null": True}


def _move_from_json(payload: dict) -> Move:
    if payload.get("pass") is True:
        return Move("pass")
    if payload.get("null") is True:
        return Move("null")
    if "piece" in payload and "target" in payload:
        try:
            return Move.step(int(payload["piece"]), int(payload["target"]))
        except (TypeError, ValueError):
            pass
    raise HTTPException(422, "move must be {\"piece\":int,\"target\":int}, "
                             "{\"pass\":true} or {\"null\":true}")


def create_app(budget: Optional[int] = None) -> FastAPI:
    default = budget if budget is not None else DEFAULT_BUDGET
    app = FastAPI(title="competing-salesmen play service")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    @app.exception_handler(HTTPException)
    async def _http_err(request: Request, exc: HTTPException):
        return JSONResponse(status_code=exc.status_code,
                            content={"error": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def _val_err(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    def _expire() -> None:
        now = time.monotonic()
        with store_lock:
            for sid in [s for s, sess in sessions.items()
                        if now - sess.last_access > IDLE_EXPIRY]:
                del sessions[sid]

    def _get(sid: str) -> Session:
        _expire()
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, f"no session {sid}")
        sess.last_access = time.monotonic()
        return sess

    def _snap(state: GameState):
        return (state.turn, state.pieces_i, state.pieces_ii, state.remaining)

    def _apply(sess: Session, mv: Move) -> None:
        mover = sess.state.turn
        sess.state, delta = apply_move(sess.inst, sess.state, mv)
        if delta:
            if mover is Player.I:
                sess.scores["i"] += 1
            else:
                sess.scores["ii"] += 1
            sess.seen.clear()
        sess.history.append({"player": mover.value, "move": _move_to_json(mv),
                             "delta": delta})
        snap = _snap(sess.state)
        if terminal_status(sess.inst, sess.state):
            sess.finished = True
            sess.outcome = Outcome.ended(sess.scores["i"] - sess.scores["ii"])
            sess.reason = "ended"
        elif snap in sess.seen:
            sess.finished = True
            sess.outcome = DRAW
            sess.reason = "repetition_draw"
        else:
            sess.seen.add(snap)

    def _engine_move(sess: Session) -> Move:
        if sess.exact:
            return sess.solved.policy[sess.state]
        role = sess.state.turn
        mv, target = _greedy_decide(sess.inst, sess.state,
                                    sess.greedy_targets.get(role))
        sess.greedy_targets[role] = target
        sess.heuristic_moves += 1
        return mv

    def _advance(sess: Session) -> None:
        """Run engine turns and forced null moves until a human decision
        is pending or the game is over."""
        while not sess.finished:
            role = sess.state.turn
            if sess.engine_plays(role):
                _apply(sess, _engine_move(sess))
                continue
            moves = legal_moves(sess.inst, sess.state)
            if moves == [Move("null")]:
                _apply(sess, Move("null"))
                continue
            break

    def _view(sess: Session) -> dict:
        s = sess.state
        return {
            "session": sess.sid,
            "mode": sess.mode,
            "human_role": sess.human_role.value if sess.human_role else None,
            "instance": instance_to_dict(sess.inst),
            "state": {"turn": s.turn.value, "pieces_i": list(s.pieces_i),
                      "pieces_ii": list(s.pieces_ii),
                      "remaining": sorted(s.remaining)},
            "scores": dict(sess.scores),
            "legal_moves": [_move_to_json(m) for m in legal_moves(sess.inst, s)]
                           if not sess.finished else [],
            "finished": sess.finished,
            "outcome": repr(sess.outcome) if sess.outcome else None,
            "reason": sess.reason,
            "history": list(sess.history),
            "engine": {"exact": sess.exact,
                       "heuristic_moves": sess.heuristic_moves},
        }

    @app.get("/catalog")
    def get_catalog():
        return [{"name": e.name, "params": e.params,
                 "certificate": e.certificate, "provenance": e.provenance,
                 "vertices": e.instance.graph.vertex_count,
                 "customers": len(e.instance.customers)}
                for e in catalog()]

    @app.post("/games")
    def create_game(payload: dict = Body(...)):
        chosen = payload.get("instance")
        if isinstance(chosen, str):
            try:
                inst = catalog_entry(chosen).instance
            except KeyError:
                raise HTTPException(400, f"unknown catalog instance {chosen!r}")
        elif isinstance(chosen, dict):
            try:
                inst = instance_from_dict(chosen)
            except (RulesError, KeyError, TypeError) as e:
                raise HTTPException(400, str(e))
        else:
            raise HTTPException(400, "instance must be a catalog name or an "
                                     "inline instance object")
        mode = payload.get("mode", "human_vs_engine")
        if mode not in MODES:
            raise HTTPException(400, f"mode must be one of {MODES}")
        role = None
        if mode == "human_vs_engine":
            r = payload.get("human_role", "I")
            if r not in ("I", "II"):
                raise HTTPException(400, "human_role must be 'I' or 'II'")
            role = Player(r)
        a_budget = int(payload.get("budget", default))
        sess = Session(
            sid=uuid.uuid4().hex,
            inst=inst,
            mode=mode,
            human_role=role,
            state=inst.initial_state(),
            scores={"i": 0, "ii": 0},
            analysis_budget=a_budget,
        )
        sess.seen.add(_snap(sess.state))
        if len(inst.customers) <= MAX_CUSTOMERS:
            try:
                sess.solved = solve(inst, a_budget)
                sess.exact = True
            except BudgetExceeded:
                sess.exact = False
        if payload.get("require_exact") and not sess.exact:
            raise HTTPException(413, "state space exceeds the analysis budget")
        if terminal_status(inst, sess.state):
            sess.finished = True
            sess.outcome = Outcome.ended(0)
            sess.reason = "ended"
        with sess.lock:
            _advance(sess)
        with store_lock:
            sessions[sess.sid] = sess
        return _view(sess)

    @app.get("/games/{sid}")
    def get_game(sid: str):
        sess = _get(sid)
        with sess.lock:
            return _view(sess)

    @app.post("/games/{sid}/moves")
    def post_move(sid: str, payload: dict = Body(...)):
        sess = _get(sid)
        mv = _move_from_json(payload)
        with sess.lock:
            if sess.finished:
                raise HTTPException(409, "game is over")
            role = sess.state.turn
            if sess.engine_plays(role):
                raise HTTPException(409, "not your turn")
            if mv not in legal_moves(sess.inst, sess.state):
                raise HTTPException(422, "illegal move")
            _apply(sess, mv)
            _advance(sess)
            return _view(sess)

    @app.get("/games/{sid}/analysis")
    def get_analysis(sid: str):
        sess = _get(sid)
        with sess.lock:
            if sess.finished or terminal_status(sess.inst, sess.state):
                value = repr(sess.outcome) if sess.outcome else \
                    repr(Outcome.ended(sess.scores["i"] - sess.scores["ii"]))
                return {"available": True, "exact": True, "moves": [],
                        "state_value": value}
            if not sess.exact:
                return JSONResponse(status_code=413,
                                    content={"available": False})
            res = sess.solved
            out = []
            for mv in legal_moves(sess.inst, sess.state):
                nxt, delta = apply_move(sess.inst, sess.state, mv)
                shift = delta if sess.state.turn is Player.I else -delta
                val = res.values[nxt]
                val = val if val.is_draw else Outcome.ended(val.margin + shift)
                out.append({"move": _move_to_json(mv), "value": repr(val)})
            return {"available": True, "exact": True,
                    "state_value": repr(res.values[sess.state]),
                    "moves": out}

    return app
