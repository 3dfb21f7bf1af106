"""The token game on a labeled forest between two structures.

The spoiler places a token on the root of a tree of his choice.  While the
token sits on an E node he picks in the left structure, on an A node in the
right one; the duplicator answers in the other structure; then the spoiler
moves the token to a child.  After every round the picked tuples, prefixed
by the constant interpretations, must form a partial isomorphism or the
spoiler wins on the spot; if the token leaves a leaf with the check intact
the duplicator has survived that play.

The solver is an exhaustive memoized minimax over raw positions (token node
plus both picked tuples; no canonicalisation by automorphism).  Every verdict
is backed by a replayable certificate: a move tree for the spoiler, a
response table for the duplicator.  A configurable budget bounds the number
of memoized positions; exceeding it raises, it never degrades to a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .forests import Forest, perfect_binary, union
from .formulas import (
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    NegAtom,
    Neq,
    conj,
    disj,
    formula_to_sexp,
)
from .prefixes import EXISTS
from .structures import Structure, partial_iso

SPOILER = "spoiler"
DUPLICATOR = "duplicator"

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    """The solver hit its position budget before reaching a verdict."""


class GameError(ValueError):
    pass


@dataclass(frozen=True)
class GameOutcome:
    winner: str
    certificate: dict
    positions: int  # memoized positions the verdict needed


class _Side:
    """Bitmask views of one structure, tuned for the incremental check."""

    def __init__(self, s: Structure):
        self.structure = s
        self.n = s.size
        self.consts = s.constant_tuple()
        self.unary: list[int] = []
        self.binary: list[list[int]] = []
        self.other: list[tuple[str, int]] = []
        for name, ar in s.signature.relations:
            if ar == 1:
                mask = 0
                for (x,) in s.rel(name):
                    mask |= 1 << x
                self.unary.append(mask)
            elif ar == 2:
                out = [0] * s.size
                for x, y in s.rel(name):
                    out[x] |= 1 << y
                self.binary.append(out)
            else:
                self.other.append((name, ar))


class GameSolver:
    def __init__(
        self,
        forest: Forest,
        a: Structure,
        b: Structure,
        abar: tuple[int, ...] = (),
        bbar: tuple[int, ...] = (),
        budget: int = DEFAULT_BUDGET,
    ):
        if a.signature != b.signature:
            raise GameError("game structures must share a signature")
        if len(abar) != len(bbar):
            raise GameError("initial tuples must have equal length")
        self.forest = forest
        self.a = _Side(a)
        self.b = _Side(b)
        self.abar = tuple(abar)
        self.bbar = tuple(bbar)
        self.budget = budget
        self.memo: dict[tuple[int, tuple[int, ...], tuple[int, ...]], bool] = {}
        self.round0_ok = partial_iso(a, self.abar, b, self.bbar)

    # -- the incremental partial-isomorphism check -------------------------

    def extend_ok(self, xs: tuple[int, ...], ys: tuple[int, ...], c: int, d: int) -> bool:
        """May (c, d) extend the correspondence xs -> ys?

        xs/ys already include the constant interpretations and the initial
        tuples, so only constraints touching the new pair need checking.
        """
        a, b = self.a, self.b
        for x, y in zip(xs, ys):
            if (x == c) != (y == d):
                return False
        for ua, ub in zip(a.unary, b.unary):
            if (ua >> c & 1) != (ub >> d & 1):
                return False
        for ra, rb in zip(a.binary, b.binary):
            if (ra[c] >> c & 1) != (rb[d] >> d & 1):
                return False
            for x, y in zip(xs, ys):
                if (ra[x] >> c & 1) != (rb[y] >> d & 1):
                    return False
                if (ra[c] >> x & 1) != (rb[d] >> y & 1):
                    return False
        if a.other:
            xs2, ys2 = xs + (c,), ys + (d,)
            new = len(xs2) - 1
            for name, ar in a.other:
                ra = self.a.structure.rel(name)
                rb = self.b.structure.rel(name)
                for idx in product(range(len(xs2)), repeat=ar):
                    if new not in idx:
                        continue
                    if (tuple(xs2[i] for i in idx) in ra) != (tuple(ys2[i] for i in idx) in rb):
                        return False
        return True

    def _base_tuples(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.a.consts + self.abar, self.b.consts + self.bbar

    # -- minimax ------------------------------------------------------------

    def spoiler_wins_from(self, node: int, xs: tuple[int, ...], ys: tuple[int, ...]) -> bool:
        key = (node, xs, ys)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if len(self.memo) >= self.budget:
            raise BudgetExceeded(f"exceeded {self.budget} memoized positions")
        self.memo[key] = False  # provisional; cycles are impossible (token descends)
        kids = self.forest.children[node]
        exists_node = self.forest.labels[node] == EXISTS
        na, nb = (self.a.n, self.b.n)

        def line_won(xs2, ys2) -> bool:
            # picks survived the check; the spoiler must still win below
            return bool(kids) and any(self.spoiler_wins_from(w, xs2, ys2) for w in kids)

        if exists_node:
            result = False
            for c in range(na):
                good = True
                for d in range(nb):
                    if self.extend_ok(xs, ys, c, d) and not line_won(xs + (c,), ys + (d,)):
                        good = False
                        break
                if good:
                    result = True
                    break
        else:
            result = False
            for d in range(nb):
                good = True
                for c in range(na):
                    if self.extend_ok(xs, ys, c, d) and not line_won(xs + (c,), ys + (d,)):
                        good = False
                        break
                if good:
                    result = True
                    break
        self.memo[key] = result
        return result

    def solve(self) -> GameOutcome:
        if not self.round0_ok:
            cert = {"kind": "spoiler", "reason": "initial tuples are not a partial isomorphism"}
            return GameOutcome(SPOILER, cert, 0)
        xs, ys = self._base_tuples()
        winning_roots = [r for r in self.forest.roots if self.spoiler_wins_from(r, xs, ys)]
        if winning_roots:
            root = winning_roots[0]
            cert = {"kind": "spoiler", "tree": root, "play": self._spoiler_cert(root, xs, ys)}
            return GameOutcome(SPOILER, cert, len(self.memo))
        cert = {
            "kind": "duplicator",
            "trees": {str(r): self._duplicator_cert(r, xs, ys) for r in self.forest.roots},
        }
        return GameOutcome(DUPLICATOR, cert, len(self.memo))

    # -- certificates ---------------------------------------------------------

    def _spoiler_cert(self, node: int, xs, ys) -> dict:
        kids = self.forest.children[node]
        exists_node = self.forest.labels[node] == EXISTS
        own_n = self.a.n if exists_node else self.b.n
        reply_n = self.b.n if exists_node else self.a.n

        for pick in range(own_n):
            replies: dict[str, dict] = {}
            good = True
            for other in range(reply_n):
                c, d = (pick, other) if exists_node else (other, pick)
                if not self.extend_ok(xs, ys, c, d):
                    replies[str(other)] = {"outcome": "check-failed"}
                    continue
                if not kids:
                    good = False
                    break
                w = next(
                    (w for w in kids if self.spoiler_wins_from(w, xs + (c,), ys + (d,))), None
                )
                if w is None:
                    good = False
                    break
                replies[str(other)] = {
                    "outcome": "descend",
                    "child": w,
                    "play": self._spoiler_cert(w, xs + (c,), ys + (d,)),
                }
            if good:
                return {"node": node, "pick": pick, "replies": replies}
        raise AssertionError("no winning spoiler move at a spoiler-won position")

    def _duplicator_cert(self, node: int, xs, ys) -> dict:
        kids = self.forest.children[node]
        exists_node = self.forest.labels[node] == EXISTS
        spoiler_n = self.a.n if exists_node else self.b.n
        reply_n = self.b.n if exists_node else self.a.n

        responses: dict[str, dict] = {}
        for pick in range(spoiler_n):
            found = None
            for other in range(reply_n):
                c, d = (pick, other) if exists_node else (other, pick)
                if not self.extend_ok(xs, ys, c, d):
                    continue
                if not kids or all(
                    not self.spoiler_wins_from(w, xs + (c,), ys + (d,)) for w in kids
                ):
                    found = (other, c, d)
                    break
            if found is None:
                raise AssertionError("no duplicator reply at a duplicator-won position")
            other, c, d = found
            entry: dict = {"reply": other}
            if kids:
                entry["children"] = {
                    str(w): self._duplicator_cert(w, xs + (c,), ys + (d,)) for w in kids
                }
            responses[str(pick)] = entry
        return {"node": node, "responses": responses}


def solve(
    forest: Forest,
    a: Structure,
    b: Structure,
    abar: tuple[int, ...] = (),
    bbar: tuple[int, ...] = (),
    budget: int = DEFAULT_BUDGET,
) -> GameOutcome:
    """Exact winner of the token game, with a replayable certificate."""
    return GameSolver(forest, a, b, abar, bbar, budget).solve()


def classic_ef(n: int, a: Structure, b: Structure, budget: int = DEFAULT_BUDGET) -> GameOutcome:
    """The standard n-round back-and-forth game: the token game on the pair
    of depth-(n-1) perfect binary trees."""
    if n < 1:
        raise GameError("the round count must be >= 1")
    board = union([perfect_binary("E", n), perfect_binary("A", n)])
    return solve(board, a, b, budget=budget)


# -- certificate replay --------------------------------------------------------


def verify_certificate(
    forest: Forest,
    a: Structure,
    b: Structure,
    outcome: GameOutcome,
    abar: tuple[int, ...] = (),
    bbar: tuple[int, ...] = (),
) -> bool:
    """Replay a certificate against every opponent line."""
    solver = GameSolver(forest, a, b, abar, bbar)
    xs, ys = solver._base_tuples()
    cert = outcome.certificate
    if outcome.winner == SPOILER:
        if not solver.round0_ok:
            return True
        if "play" not in cert:
            return False
        return _replay_spoiler(solver, cert["play"], xs, ys)
    if not solver.round0_ok:
        return False
    trees = cert["trees"]
    return all(
        str(r) in trees and _replay_duplicator(solver, trees[str(r)], xs, ys)
        for r in forest.roots
    )


def _replay_spoiler(solver: GameSolver, play: dict, xs, ys) -> bool:
    node = play["node"]
    pick = play["pick"]
    kids = solver.forest.children[node]
    exists_node = solver.forest.labels[node] == EXISTS
    reply_n = solver.b.n if exists_node else solver.a.n
    for other in range(reply_n):
        c, d = (pick, other) if exists_node else (other, pick)
        if not solver.extend_ok(xs, ys, c, d):
            continue  # the spoiler won this line outright
        entry = play["replies"].get(str(other))
        if not entry or entry.get("outcome") != "descend":
            return False
        if entry["child"] not in kids:
            return False
        if not _replay_spoiler(solver, entry["play"], xs + (c,), ys + (d,)):
            return False
    return True


def _replay_duplicator(solver: GameSolver, table: dict, xs, ys) -> bool:
    node = table["node"]
    kids = solver.forest.children[node]
    exists_node = solver.forest.labels[node] == EXISTS
    spoiler_n = solver.a.n if exists_node else solver.b.n
    for pick in range(spoiler_n):
        entry = table["responses"].get(str(pick))
        if entry is None:
            return False
        other = entry["reply"]
        c, d = (pick, other) if exists_node else (other, pick)
        if not solver.extend_ok(xs, ys, c, d):
            return False
        for w in kids:
            sub = entry.get("children", {}).get(str(w))
            if sub is None or not _replay_duplicator(solver, sub, xs + (c,), ys + (d,)):
                return False
    return True


# -- distinguishing sentence synthesis ------------------------------------------


def synthesize_distinguisher(
    forest: Forest, a: Structure, b: Structure, budget: int = DEFAULT_BUDGET
) -> Formula:
    """From a spoiler win on the empty position, build a sentence that holds
    on `a`, fails on `b`, and whose quantifier structure embeds in the board.

    The recursion follows the winning move tree.  At an E node the spoiler's
    pick becomes an existential witness and the conjunction ranges over all
    duplicator replies; at an A node dually.  Lines that die in the check
    contribute the violated literal, oriented so the left structure satisfies
    it.  Sibling conjuncts are deduplicated syntactically.
    """
    solver = GameSolver(forest, a, b, budget=budget)
    if not solver.round0_ok:
        return _constant_literal(a, b)
    xs, ys = solver._base_tuples()
    root = next((r for r in forest.roots if solver.spoiler_wins_from(r, xs, ys)), None)
    if root is None:
        raise GameError("synthesis requires a spoiler-won game")

    terms = list(a.signature.constants) + [f"y{i + 1}" for i in range(forest.height() + 1)]

    def violated_literal(xs2, ys2) -> Formula:
        k = len(xs2) - 1
        new = terms[k]
        for i in range(k):
            if (xs2[i] == xs2[k]) != (ys2[i] == ys2[k]):
                same_on_a = xs2[i] == xs2[k]
                return Eq(terms[i], new) if same_on_a else Neq(terms[i], new)
        for name, ar in a.signature.relations:
            ra, rb = a.rel(name), b.rel(name)
            for idx in product(range(k + 1), repeat=ar):
                if k not in idx:
                    continue
                in_a = tuple(xs2[i] for i in idx) in ra
                in_b = tuple(ys2[i] for i in idx) in rb
                if in_a != in_b:
                    args = tuple(terms[i] for i in idx)
                    return Atom(name, args) if in_a else NegAtom(name, args)
        raise AssertionError("extension failed but no violated literal found")

    def dedup(parts: list[Formula]) -> list[Formula]:
        seen: set[str] = set()
        out: list[Formula] = []
        for p in parts:
            key = formula_to_sexp(p)
            if key not in seen:
                seen.add(key)
                out.append(p)
        return out

    def synth(node: int, xs2, ys2) -> Formula:
        kids = solver.forest.children[node]
        exists_node = solver.forest.labels[node] == EXISTS
        own_n = solver.a.n if exists_node else solver.b.n
        reply_n = solver.b.n if exists_node else solver.a.n
        var = terms[len(xs2)]

        pick = next(
            p
            for p in range(own_n)
            if all(
                not solver.extend_ok(xs2, ys2, *((p, o) if exists_node else (o, p)))
                or (
                    bool(kids)
                    and any(
                        solver.spoiler_wins_from(
                            w,
                            xs2 + ((p,) if exists_node else (o,)),
                            ys2 + ((o,) if exists_node else (p,)),
                        )
                        for w in kids
                    )
                )
                for o in range(reply_n)
            )
        )
        parts: list[Formula] = []
        for other in range(reply_n):
            c, d = (pick, other) if exists_node else (other, pick)
            nxs, nys = xs2 + (c,), ys2 + (d,)
            if not solver.extend_ok(xs2, ys2, c, d):
                lit = violated_literal(nxs, nys)
                parts.append(lit if exists_node else _flip_orientation(lit))
                continue
            w = next(w for w in kids if solver.spoiler_wins_from(w, nxs, nys))
            parts.append(synth(w, nxs, nys))
        parts = dedup(parts)
        if exists_node:
            return Exists(var, conj(parts))
        return Forall(var, disj(parts))

    return synth(root, xs, ys)


def _constant_literal(a: Structure, b: Structure) -> Formula:
    """A quantifier-free sentence over constants that a satisfies and b does
    not; exists whenever the constants alone fail the correspondence check."""
    names = a.signature.constants
    xs, ys = a.constant_tuple(), b.constant_tuple()
    for i in range(len(xs)):
        for j in range(len(xs)):
            if (xs[i] == xs[j]) != (ys[i] == ys[j]):
                same_on_a = xs[i] == xs[j]
                return Eq(names[i], names[j]) if same_on_a else Neq(names[i], names[j])
    for name, ar in a.signature.relations:
        ra, rb = a.rel(name), b.rel(name)
        for idx in product(range(len(xs)), repeat=ar):
            in_a = tuple(xs[i] for i in idx) in ra
            in_b = tuple(ys[i] for i in idx) in rb
            if in_a != in_b:
                args = tuple(names[i] for i in idx)
                return Atom(name, args) if in_a else NegAtom(name, args)
    raise AssertionError("constants correspond after all")


def _flip_orientation(lit: Formula) -> Formula:
    """At A nodes the recursion needs literals the left structure satisfies
    under the duplicator's candidate value; the violated literal is computed
    left-true already, so orientation is shared.  Kept as a seam for clarity."""
    return lit


# -- value function with resistance depth ----------------------------------------


def position_value(
    solver: GameSolver, node: int, xs: tuple[int, ...], ys: tuple[int, ...]
) -> tuple[bool, int]:
    """(spoiler wins, rounds the game lasts under optimal play).

    Winners prefer shorter games, losers longer ones; ties break toward the
    smallest element index.  Used by the interactive engine for its
    longest-resistance heuristic.
    """
    kids = solver.forest.children[node]
    exists_node = solver.forest.labels[node] == EXISTS
    own_n, reply_n = (
        (solver.a.n, solver.b.n) if exists_node else (solver.b.n, solver.a.n)
    )

    best: Optional[tuple[bool, int]] = None
    for pick in range(own_n):
        worst: Optional[tuple[bool, int]] = None
        for other in range(reply_n):
            c, d = (pick, other) if exists_node else (other, pick)
            if not solver.extend_ok(xs, ys, c, d):
                line = (True, 1)
            elif not kids:
                line = (False, 1)
            else:
                sub = [position_value(solver, w, xs + (c,), ys + (d,)) for w in kids]
                wins = [v for v in sub if v[0]]
                line = (
                    (True, 1 + min(v[1] for v in wins))
                    if wins
                    else (False, 1 + max(v[1] for v in sub))
                )
            # the duplicator prefers lines she wins, then longer ones
            if worst is None or _prefer(line, worst, mover_is_spoiler=False):
                worst = line
        assert worst is not None
        if best is None or _prefer(worst, best, mover_is_spoiler=True):
            best = worst
    assert best is not None
    return best


def _prefer(x: tuple[bool, int], y: tuple[bool, int], mover_is_spoiler: bool) -> bool:
    """Does outcome x beat outcome y from the mover's point of view?"""
    xw = x[0] if mover_is_spoiler else not x[0]
    yw = y[0] if mover_is_spoiler else not y[0]
    if xw != yw:
        return xw
    if xw:
        return x[1] < y[1]
    return x[1] > y[1]
