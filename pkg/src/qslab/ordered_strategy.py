"""The scripted duplicator for games on ordered colored trees.

The ordered families are built so that order gives the spoiler almost no
leverage: sibling rows are long runs of isomorphic blocks, paired into
2-tuples, with the single distinguishing block parked in the middle of a row
of length 2^(m+2)+1 facing a row of length 2^(m+1).  The duplicator answers
a pick by walking the pick's root path and playing a colored-linear-order
game on every sibling row along the way: copies near a known landmark are
answered by the copy at the same offset, and picks far from every landmark
are answered by the midpoint, keeping the distinguishing block inside the
longer of the two unresolved gaps.  Inside the chosen 2-tuple she takes the
member of the same kind as the spoiler's, and descends.

The strategy is a pure function of the play history, so the response table
it induces can be enumerated and replayed against every spoiler line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .forests import Forest
from .structures import Structure

Pair = tuple[int, int]


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    """One sibling row: the same-color children of a node, in order,
    regrouped into 2-tuples with an optional middle singleton."""

    nodes: tuple[int, ...]
    tuples: tuple[tuple[int, ...], ...]
    special: Optional[int]  # index of the singleton 2-tuple, if any

    @classmethod
    def from_nodes(cls, nodes: Sequence[int]) -> "Row":
        nodes = tuple(nodes)
        n = len(nodes)
        if n % 2 == 0:
            tuples = tuple((nodes[i], nodes[i + 1]) for i in range(0, n, 2))
            return cls(nodes, tuples, None)
        mid = n // 2  # 0-based position of the singleton element
        tuples = []
        for i in range(0, mid, 2):
            tuples.append((nodes[i], nodes[i + 1]))
        special = len(tuples)
        tuples.append((nodes[mid],))
        for i in range(mid + 1, n, 2):
            tuples.append((nodes[i], nodes[i + 1]))
        return cls(nodes, tuple(tuples), special)

    def tuple_of(self, node: int) -> int:
        for t, members in enumerate(self.tuples):
            if node in members:
                return t
        raise StrategyError(f"node {node} not in row")


class TreeView:
    """Tree shape, order, and provenance kinds of one ordered structure."""

    def __init__(self, s: Structure):
        if s.order is None:
            raise StrategyError("scripted play needs ordered structures")
        self.structure = s
        root = s.constants.get("r")
        if root is None or "root" not in s.labels[root]:
            raise StrategyError("scripted play needs structures built by the ordered family")
        self.root = root
        self.father: dict[int, int] = {}
        self.color: dict[int, str] = {}
        for col in ("R", "B"):
            for f, c in s.rel(col):
                self.father[c] = f
                self.color[c] = col
        leq = s.rel(s.order)
        position = {
            x: sum(1 for z in range(s.size) if (z, x) in leq) - 1 for x in range(s.size)
        }
        self.position = position
        self._shapes: dict[int, tuple] = {}
        kids: dict[tuple[int, str], list[int]] = {}
        for c, f in self.father.items():
            kids.setdefault((f, self.color[c]), []).append(c)
        self.rows = {
            key: Row.from_nodes(sorted(nodes, key=lambda v: position[v]))
            for key, nodes in kids.items()
        }
        self.marked = {t[0] for t in s.rel("U")}

    def path(self, v: int) -> list[int]:
        out = [v]
        while out[-1] != self.root:
            out.append(self.father[out[-1]])
        return list(reversed(out))

    def kind(self, v: int) -> tuple:
        """What the duplicator tries to match inside a 2-tuple: the block
        tag for junctions, the mark for leaves."""
        label = self.structure.labels[v]
        if "junction" in label:
            head = label.split("/")[-1].split(".")[0]
            return ("block", head)
        return ("leaf", v in self.marked)

    def shape(self, v: int):
        """Color-and-mark isomorphism type of the subtree at v (child order
        forgotten); equal shapes admit a perfect mimic."""
        cached = self._shapes.get(v)
        if cached is None:
            kids = sorted(
                (self.color[c], self.shape(c))
                for c, f in self.father.items()
                if f == v
            )
            cached = (v in self.marked, tuple(kids))
            self._shapes[v] = cached
        return cached

    def row_shape(self, v: int, color: str):
        row = self.rows.get((v, color))
        if row is None:
            return None
        return tuple(sorted(self.shape(w) for w in row.nodes))


def _enclosing(anchors: list[Pair], t: int) -> tuple[Pair, Pair]:
    """Tightest anchor pair around t by the pick-side (first) coordinate."""
    lo, hi = None, None
    for pair in anchors:
        if pair[0] <= t and (lo is None or pair[0] > lo[0]):
            lo = pair
        if pair[0] >= t and (hi is None or pair[0] < hi[0]):
            hi = pair
    assert lo is not None and hi is not None
    return lo, hi


def _reply_tuple(
    anchors: list[Pair],
    t_pick: int,
    special_mine: Optional[int],
) -> int:
    """The colored-linear-order reply on one row pair.

    Anchors are (pick side, reply side) 2-tuple index pairs, virtual ends
    included.  A pick on a row without the distinguishing singleton is
    copied from the nearer anchor.  A pick on the singleton's row is copied
    when it sits within half the opposite gap of an anchor, and otherwise
    answered by the midpoint, oriented so the singleton stays inside the
    longer unresolved gap.
    """
    lo, hi = _enclosing(anchors, t_pick)
    if lo[0] == t_pick:
        return lo[1]
    if hi[0] == t_pick:
        return hi[1]
    offset = t_pick - lo[0]
    tail = hi[0] - t_pick
    if special_mine is None:
        if offset <= tail:
            return lo[1] + offset
        return hi[1] - tail
    gap_other = hi[1] - lo[1]
    if 2 * offset <= gap_other:
        return lo[1] + offset
    if 2 * tail <= gap_other:
        return hi[1] - tail
    half = gap_other // 2
    if t_pick <= special_mine <= hi[0]:
        return lo[1] + half
    return hi[1] - half


class ScriptedDuplicator:
    """Replies for the game on (left, right) ordered structures.

    The left structure is the one carrying the distinguishing middle blocks
    (the A side of the family).  `reply` is a pure function of the history
    of (left, right) picked pairs and the new pick.
    """

    def __init__(self, left: Structure, right: Structure):
        self.left = TreeView(left)
        self.right = TreeView(right)

    def reply(self, history: Sequence[Pair], pick: int, pick_in_left: bool) -> int:
        me = self.left if pick_in_left else self.right
        other = self.right if pick_in_left else self.left
        mine = [h[0] if pick_in_left else h[1] for h in history]
        theirs = [h[1] if pick_in_left else h[0] for h in history]
        if pick in mine:
            return theirs[mine.index(pick)]
        if pick == me.root:
            return other.root

        path = me.path(pick)[1:]  # drop the root
        u_me, u_other = me.root, other.root
        for depth, node in enumerate(path, start=1):
            color = me.color[node]
            row_me = me.rows.get((u_me, color))
            row_other = other.rows.get((u_other, color))
            if row_me is None or row_other is None:
                raise StrategyError("pick descends where the reply side has no row")
            anchors = self._anchors(history, depth, u_me, u_other, row_me, row_other, pick_in_left)
            t_pick = row_me.tuple_of(node)
            t_reply = _reply_tuple(anchors, t_pick, row_me.special)
            members = row_other.tuples[t_reply]
            slot = min(row_me.tuples[t_pick].index(node), len(members) - 1)
            u_me, u_other = node, self._pick_member(
                me, other, node, members, slot, path[depth] if depth < len(path) else None
            )
        return u_other

    @staticmethod
    def _pick_member(
        me: TreeView,
        other: TreeView,
        node: int,
        members: tuple[int, ...],
        slot: int,
        next_node: Optional[int],
    ) -> int:
        """Choose the block inside the reply 2-tuple.

        A shape-identical block allows a perfect mimic of everything below;
        failing that, a block whose row along the pick's next edge color is
        shape-identical keeps the mimic alive one more level; then the local
        kind, then the slot position."""
        exact = [w for w in members if other.shape(w) == me.shape(node)]
        if exact:
            return members[slot] if members[slot] in exact else exact[0]
        if next_node is not None:
            color = me.color[next_node]
            want_row = me.row_shape(node, color)
            ahead = [w for w in members if other.row_shape(w, color) == want_row]
            if ahead:
                return members[slot] if members[slot] in ahead else ahead[0]
        want = me.kind(node)
        kinds = [w for w in members if other.kind(w) == want]
        if kinds:
            return members[slot] if members[slot] in kinds else kinds[0]
        return members[slot]

    def _anchors(
        self,
        history: Sequence[Pair],
        depth: int,
        u_me: int,
        u_other: int,
        row_me: Row,
        row_other: Row,
        pick_in_left: bool,
    ) -> list[Pair]:
        """Anchor pairs (pick-side index, reply-side index) for one row
        pair: the virtual ends plus every earlier pick whose path runs
        through the same corresponding nodes."""
        me = self.left if pick_in_left else self.right
        other = self.right if pick_in_left else self.left
        anchors: list[Pair] = [(-1, -1), (len(row_me.tuples), len(row_other.tuples))]
        for a, b in history:
            x, y = (a, b) if pick_in_left else (b, a)
            # x lives in `me`, y in `other`
            px, py = me.path(x), other.path(y)
            if len(px) <= depth or len(py) <= depth:
                continue
            if px[depth - 1] != u_me or py[depth - 1] != u_other:
                continue
            if px[depth] not in row_me.nodes or py[depth] not in row_other.nodes:
                continue
            pair = (row_me.tuple_of(px[depth]), row_other.tuple_of(py[depth]))
            if pair not in anchors:
                anchors.append(pair)
        return anchors


def scripted_table(forest: Forest, left: Structure, right: Structure) -> dict:
    """The scripted duplicator as an explicit response table over every
    reachable position, in the solver's certificate format."""
    from .prefixes import EXISTS

    dup = ScriptedDuplicator(left, right)

    def table(node: int, history: list[Pair]) -> dict:
        exists_node = forest.labels[node] == EXISTS
        spoiler_n = left.size if exists_node else right.size
        responses = {}
        for pick in range(spoiler_n):
            ans = dup.reply(history, pick, pick_in_left=exists_node)
            c, d = (pick, ans) if exists_node else (ans, pick)
            entry: dict = {"reply": ans}
            kids = forest.children[node]
            if kids:
                entry["children"] = {
                    str(w): table(w, history + [(c, d)]) for w in kids
                }
            responses[str(pick)] = entry
        return {"node": node, "responses": responses}

    return {
        "kind": "duplicator",
        "trees": {str(r): table(r, []) for r in forest.roots},
    }


def order_preserving(left: Structure, right: Structure, pairs: Sequence[Pair]) -> bool:
    """The picked tuples respect both linear orders in both directions."""
    lo = left.rel(left.order)
    ro = right.rel(right.order)
    for a1, b1 in pairs:
        for a2, b2 in pairs:
            if (((a1, a2) in lo)) != (((b1, b2) in ro)):
                return False
    return True
