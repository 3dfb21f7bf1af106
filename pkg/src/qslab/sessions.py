"""Step-wise game sessions for interactive play.

A session walks the token game move by move: choose a tree, pick an element,
answer it, move the token.  The engine side plays certificate-optimal moves
(a winning move when one exists, otherwise the move that maximises the depth
of resistance, ties broken by element index).  Undo restores the exact prior
state; branching falls out of undoing and playing a different move.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .forests import Forest
from .game import DUPLICATOR, SPOILER, GameSolver, position_value
from .prefixes import EXISTS
from .structures import Structure, partial_iso


class IllegalMove(ValueError):
    pass


class SessionFinished(ValueError):
    pass


@dataclass
class Snapshot:
    phase: str  # choose-tree | spoiler-pick | duplicator-pick | move-token | done
    token: Optional[int]
    picks_a: tuple[int, ...]
    picks_b: tuple[int, ...]
    pending: Optional[int]  # the spoiler's pick awaiting an answer
    winner: Optional[str]
    loss_reason: Optional[str]


class Session:
    """One play of the game on (forest, a, b); one side driven by the engine."""

    _ids = itertools.count(1)

    def __init__(
        self,
        forest: Forest,
        a: Structure,
        b: Structure,
        human_side: str,
        budget: int = 1_000_000,
    ):
        if human_side not in (SPOILER, DUPLICATOR):
            raise ValueError("human side must be spoiler or duplicator")
        if forest.is_empty:
            raise ValueError("sessions need a non-empty game forest")
        self.id = str(next(self._ids))
        self.forest = forest
        self.human_side = human_side
        self.solver = GameSolver(forest, a, b, budget=budget)
        self.a = a
        self.b = b
        self.history: list[Snapshot] = []
        winner = None
        reason = None
        phase = "choose-tree"
        if not partial_iso(a, (), b, ()):
            winner, reason, phase = SPOILER, "the constants alone violate the check", "done"
        self.state = Snapshot(phase, None, (), (), None, winner, reason)

    # -- inspection ------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.state.phase == "done"

    def to_move(self) -> str:
        if self.state.phase in ("choose-tree", "spoiler-pick", "move-token"):
            return SPOILER
        if self.state.phase == "duplicator-pick":
            return DUPLICATOR
        raise SessionFinished("the game is over")

    def _spoiler_picks_left(self) -> bool:
        assert self.state.token is not None
        return self.forest.labels[self.state.token] == EXISTS

    def legal_moves(self) -> list[dict]:
        s = self.state
        if s.phase == "done":
            return []
        if s.phase == "choose-tree":
            return [{"type": "choose-tree", "tree": r} for r in self.forest.roots]
        if s.phase == "spoiler-pick":
            n = self.a.size if self._spoiler_picks_left() else self.b.size
            return [{"type": "pick", "element": e} for e in range(n)]
        if s.phase == "duplicator-pick":
            n = self.b.size if self._spoiler_picks_left() else self.a.size
            return [{"type": "pick", "element": e} for e in range(n)]
        return [
            {"type": "move-token", "child": w} for w in self.forest.children[s.token]
        ]

    # -- making moves ------------------------------------------------------

    def apply(self, move: dict) -> None:
        if self.finished:
            raise SessionFinished("the game is over")
        s = self.state
        kind = move.get("type")
        self.history.append(s)
        try:
            if kind == "choose-tree":
                if s.phase != "choose-tree" or move.get("tree") not in self.forest.roots:
                    raise IllegalMove("expected a tree choice")
                self.state = Snapshot(
                    "spoiler-pick", move["tree"], s.picks_a, s.picks_b, None, None, None
                )
            elif kind == "pick":
                self._apply_pick(move)
            elif kind == "move-token":
                if s.phase != "move-token":
                    raise IllegalMove("no token move expected now")
                child = move.get("child")
                if child not in self.forest.children[s.token]:
                    raise IllegalMove(f"{child} is not a child of the token node")
                self.state = Snapshot(
                    "spoiler-pick", child, s.picks_a, s.picks_b, None, None, None
                )
            else:
                raise IllegalMove(f"unknown move type {kind!r}")
        except IllegalMove:
            self.history.pop()
            raise

    def _apply_pick(self, move: dict) -> None:
        s = self.state
        e = move.get("element")
        if s.phase not in ("spoiler-pick", "duplicator-pick"):
            raise IllegalMove("no pick expected now")
        left = self._spoiler_picks_left()
        if s.phase == "spoiler-pick":
            n = self.a.size if left else self.b.size
            if not isinstance(e, int) or not 0 <= e < n:
                raise IllegalMove("pick out of range")
            self.state = Snapshot(
                "duplicator-pick", s.token, s.picks_a, s.picks_b, e, None, None
            )
            return
        if s.phase != "duplicator-pick":
            raise IllegalMove("no pick expected now")
        n = self.b.size if left else self.a.size
        if not isinstance(e, int) or not 0 <= e < n:
            raise IllegalMove("pick out of range")
        assert s.pending is not None
        c, d = (s.pending, e) if left else (e, s.pending)
        xs = self.a.constant_tuple() + s.picks_a
        ys = self.b.constant_tuple() + s.picks_b
        picks_a, picks_b = s.picks_a + (c,), s.picks_b + (d,)
        if not self.solver.extend_ok(xs, ys, c, d):
            self.state = Snapshot(
                "done", s.token, picks_a, picks_b, None, SPOILER,
                self._violation(xs + (c,), ys + (d,)),
            )
            return
        if not self.forest.children[s.token]:
            self.state = Snapshot("done", s.token, picks_a, picks_b, None, DUPLICATOR, None)
            return
        self.state = Snapshot("move-token", s.token, picks_a, picks_b, None, None, None)

    def _violation(self, xs: tuple[int, ...], ys: tuple[int, ...]) -> str:
        """A literal the final pair breaks, for display."""
        from .game import _constant_literal  # reuse the search over literals
        from .formulas import formula_to_sexp
        from .structures import expand_with_tuple

        names = [f"y{i + 1}" for i in range(len(xs) - len(self.a.constant_tuple()))]
        ea = expand_with_tuple(self.a, xs[len(self.a.constant_tuple()) :], names)
        eb = expand_with_tuple(self.b, ys[len(self.b.constant_tuple()) :], names)
        return formula_to_sexp(_constant_literal(ea, eb))

    def undo(self) -> None:
        if not self.history:
            raise IllegalMove("nothing to undo")
        self.state = self.history.pop()

    # -- the engine --------------------------------------------------------

    def engine_move(self) -> dict:
        """Compute and apply one move for the engine side."""
        if self.finished:
            raise SessionFinished("the game is over")
        mover = self.to_move()
        if mover == self.human_side:
            raise IllegalMove("it is the human's turn")
        move = self._best_move()
        self.apply(move)
        return move

    def _best_move(self) -> dict:
        s = self.state
        xs = self.a.constant_tuple() + s.picks_a
        ys = self.b.constant_tuple() + s.picks_b
        if s.phase == "choose-tree":
            ranked = []
            for r in self.forest.roots:
                wins, depth = position_value(self.solver, r, xs, ys)
                ranked.append((not wins, depth if wins else -depth, r))
            ranked.sort()
            return {"type": "choose-tree", "tree": ranked[0][2]}
        if s.phase == "move-token":
            best = None
            for w in self.forest.children[s.token]:
                wins, depth = position_value(self.solver, w, xs, ys)
                key = (not wins, depth if wins else -depth, w)
                if best is None or key < best[0]:
                    best = (key, w)
            return {"type": "move-token", "child": best[1]}
        left = self._spoiler_picks_left()
        if s.phase == "spoiler-pick":
            own_n = self.a.size if left else self.b.size
            best = None
            for pick in range(own_n):
                worst = self._answered_value(pick, left, xs, ys, spoiler_view=True)
                key = (not worst[0], worst[1] if worst[0] else -worst[1], pick)
                if best is None or key < best[0]:
                    best = (key, pick)
            return {"type": "pick", "element": best[1]}
        # duplicator answering s.pending
        reply_n = self.b.size if left else self.a.size
        best = None
        for reply in range(reply_n):
            c, d = (s.pending, reply) if left else (reply, s.pending)
            val = self._line_value(c, d, xs, ys)
            key = (val[0], -val[1] if not val[0] else val[1], reply)
            if best is None or key < best[0]:
                best = (key, reply)
        return {"type": "pick", "element": best[1]}

    def _answered_value(self, pick, left, xs, ys, spoiler_view):
        """Value after the duplicator's best answer to `pick`."""
        reply_n = self.b.size if left else self.a.size
        worst = None
        for reply in range(reply_n):
            c, d = (pick, reply) if left else (reply, pick)
            val = self._line_value(c, d, xs, ys)
            if worst is None or (val[0], -val[1]) < (worst[0], -worst[1]):
                worst = val
        return worst

    def _line_value(self, c, d, xs, ys) -> tuple[bool, int]:
        """(spoiler wins, remaining length) after the pair (c, d)."""
        if not self.solver.extend_ok(xs, ys, c, d):
            return (True, 0)
        kids = self.forest.children[self.state.token]
        if not kids:
            return (False, 0)
        sub = [position_value(self.solver, w, xs + (c,), ys + (d,)) for w in kids]
        wins = [v for v in sub if v[0]]
        if wins:
            return (True, min(v[1] for v in wins))
        return (False, max(v[1] for v in sub))

    # -- serialization -----------------------------------------------------

    def snapshot(self) -> dict:
        s = self.state
        return {
            "id": self.id,
            "phase": s.phase,
            "token": s.token,
            "picks": [[a, b] for a, b in zip(s.picks_a, s.picks_b)],
            "winner": s.winner,
            "loss_reason": s.loss_reason,
            "human_side": self.human_side,
            "to_move": None if self.finished else self.to_move(),
            "legal_moves": self.legal_moves(),
            "can_undo": bool(self.history),
        }
