"""The local JSON-over-HTTP service behind the interactive UI.

Stateless apart from the in-process session store.  Structures travel in the
structure JSON format, provenance labels included, so a client can render
them without re-deriving anything.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import families, forests, formulas, game
from .sessions import IllegalMove, Session, SessionFinished
from .structures import Structure, structure_from_json, structure_to_json

LIBRARY = [
    {
        "id": "marked-leaf-board",
        "title": "One existential round on the depth-1 pair",
        "forest": "(E)",
        "a": "tauplus:A:+:p=E:m=1",
        "b": "tauplus:B:+:p=E:m=1",
    },
    {
        "id": "figure-1",
        "title": "The two-round board on the depth-2 pair",
        "forest": "(E (E) (E))",
        "a": "tauplus:A:+:p=EE:m=1",
        "b": "tauplus:B:+:p=EE:m=1",
    },
    {
        "id": "digraph-two-rounds",
        "title": "Two rounds on the reduced digraphs",
        "forest": "(E (A) (A))",
        "a": "tau:A:+:p=EA:m=1",
        "b": "tau:B:+:p=EA:m=1",
    },
    {
        "id": "ordered-one-round",
        "title": "One universal round on the ordered pair",
        "forest": "(A)",
        "a": "ordered_tauplus:A:+:p=E:m=1",
        "b": "ordered_tauplus:B:+:p=E:m=1",
    },
    {
        "id": "ordered-digraph",
        "title": "One round on the ordered digraphs",
        "forest": "(E)",
        "a": "ordered_tau:A:+:p=E:m=1",
        "b": "ordered_tau:B:+:p=E:m=1",
    },
    {
        "id": "refined-pair",
        "title": "The word-equal, shape-different boards",
        "forest": "(E (A) (E))",
        "a": "refined_tauplus:A:+:t=(E (A) (E)):m=1",
        "b": "refined_tauplus:B:+:t=(E (A) (E)):m=1",
    },
    {
        "id": "refined-digraph",
        "title": "The word-equal boards, reduced to digraphs",
        "forest": "(E (A) (E))",
        "a": "refined_tau:A:+:t=(E (A) (E)):m=1",
        "b": "refined_tau:B:+:t=(E (A) (E)):m=1",
    },
]


class SolveRequest(BaseModel):
    forest: str
    a: dict
    b: dict
    budget: int = game.DEFAULT_BUDGET


class EmbedRequest(BaseModel):
    s1: str
    s2: str


class SessionRequest(BaseModel):
    human_side: str = "spoiler"
    library: Optional[str] = None
    forest: Optional[str] = None
    a: Optional[dict] = None
    b: Optional[dict] = None
    budget: int = 1_000_000


class MoveRequest(BaseModel):
    type: str
    tree: Optional[int] = None
    element: Optional[int] = None
    child: Optional[int] = None


def _parse_forest(text: str) -> forests.Forest:
    try:
        return forests.forest_from_sexp(text)
    except ValueError as e:
        raise HTTPException(400, f"bad forest: {e}")


def _parse_structure(doc: dict) -> Structure:
    try:
        return structure_from_json(doc)
    except (ValueError, KeyError, TypeError) as e:
        raise HTTPException(400, f"bad structure: {e}")


def create_app() -> FastAPI:
    app = FastAPI(title="qslab", version="0.1.0")
    sessions: dict[str, Session] = {}
    lock = threading.Lock()

    @app.post("/solve")
    def post_solve(req: SolveRequest):
        board = _parse_forest(req.forest)
        a = _parse_structure(req.a)
        b = _parse_structure(req.b)
        try:
            out = game.solve(board, a, b, budget=req.budget)
        except game.BudgetExceeded as e:
            raise HTTPException(422, str(e))
        except game.GameError as e:
            raise HTTPException(400, str(e))
        return {"winner": out.winner, "positions": out.positions, "certificate": out.certificate}

    @app.post("/embed")
    def post_embed(req: EmbedRequest):
        witness = forests.embed(_parse_forest(req.s1), _parse_forest(req.s2))
        return {"present": witness is not None,
                "witness": None if witness is None else {str(k): v for k, v in witness.items()}}

    @app.post("/distinguish")
    def post_distinguish(req: SolveRequest):
        board = _parse_forest(req.forest)
        a = _parse_structure(req.a)
        b = _parse_structure(req.b)
        try:
            phi = game.synthesize_distinguisher(board, a, b, budget=req.budget)
        except game.BudgetExceeded as e:
            raise HTTPException(422, str(e))
        except game.GameError as e:
            raise HTTPException(400, str(e))
        return {"formula": formulas.formula_to_sexp(phi)}

    @app.get("/library")
    def get_library():
        out = []
        for entry in LIBRARY:
            a = families.build(families.parse_family_spec(entry["a"]))
            b = families.build(families.parse_family_spec(entry["b"]))
            out.append(
                {
                    **entry,
                    "a_structure": structure_to_json(a),
                    "b_structure": structure_to_json(b),
                }
            )
        return {"boards": out}

    def _get_session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"no session {sid}")
        return s

    @app.post("/sessions", status_code=201)
    def post_session(req: SessionRequest):
        if req.library is not None:
            entry = next((e for e in LIBRARY if e["id"] == req.library), None)
            if entry is None:
                raise HTTPException(400, f"unknown library board {req.library!r}")
            board = _parse_forest(entry["forest"])
            a = families.build(families.parse_family_spec(entry["a"]))
            b = families.build(families.parse_family_spec(entry["b"]))
        else:
            if not (req.forest and req.a and req.b):
                raise HTTPException(400, "need a library id or forest, a and b")
            board = _parse_forest(req.forest)
            a = _parse_structure(req.a)
            b = _parse_structure(req.b)
        try:
            session = Session(board, a, b, req.human_side, budget=req.budget)
        except ValueError as e:
            raise HTTPException(400, str(e))
        with lock:
            sessions[session.id] = session
        return _session_payload(session, board, a, b)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        s = _get_session(sid)
        with lock:
            return _session_payload(s, s.forest, s.a, s.b)

    @app.post("/sessions/{sid}/move")
    def post_move(sid: str, move: MoveRequest):
        s = _get_session(sid)
        with lock:
            try:
                s.apply({k: v for k, v in move.model_dump().items() if v is not None})
            except IllegalMove as e:
                raise HTTPException(409, str(e))
            except SessionFinished as e:
                raise HTTPException(409, str(e))
            return _session_payload(s, s.forest, s.a, s.b)

    @app.post("/sessions/{sid}/engine-move")
    def post_engine_move(sid: str):
        s = _get_session(sid)
        with lock:
            try:
                move = s.engine_move()
            except (IllegalMove, SessionFinished) as e:
                raise HTTPException(409, str(e))
            except game.BudgetExceeded as e:
                raise HTTPException(422, str(e))
            payload = _session_payload(s, s.forest, s.a, s.b)
            payload["engine_move"] = move
            return payload

    @app.post("/sessions/{sid}/undo")
    def post_undo(sid: str):
        s = _get_session(sid)
        with lock:
            try:
                s.undo()
            except IllegalMove as e:
                raise HTTPException(409, str(e))
            return _session_payload(s, s.forest, s.a, s.b)

    return app


def _session_payload(session: Session, board: forests.Forest, a: Structure, b: Structure):
    doc = session.snapshot()
    doc["forest"] = forests.forest_to_sexp(board)
    doc["forest_nodes"] = {
        "labels": list(board.labels),
        "children": [list(kids) for kids in board.children],
        "roots": list(board.roots),
    }
    doc["a"] = structure_to_json(a)
    doc["b"] = structure_to_json(b)
    return doc
