"""Generators for the separating structure families.

All families are finite colored trees over the signature <U, R, B, r>: R and
B are the two edge colors (stored father-to-child), U marks some leaves, r
names the root.  The digraph families re-encode those trees over a single
edge relation; the ordered families additionally carry a linear order.

Family names used in CLI spec strings and the service catalog:

    tauplus          colored trees from a prefix
    tau              their digraph reduction
    ordered_tauplus  ordered colored trees from a prefix
    ordered_tau      their digraph reduction (order kept)
    refined_tauplus  colored trees from an irreducible tree
    refined_tau      their digraph reduction

A spec string looks like ``tauplus:A:+:p=EA:m=2`` or
``refined_tauplus:B:+:t=(E (A) (E)):m=1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .forests import Forest, forest_from_sexp, forest_to_sexp, is_irreducible
from .prefixes import EXISTS, check_prefix
from .structures import (
    Hooked,
    ORDER_REL,
    Signature,
    Structure,
    join_at,
    point_expand,
    reduct,
)

HOOK = "e"
TAU_PLUS = Signature(relations=(("R", 2), ("B", 2), ("U", 1)), constants=("r",))
TAU_PLUS_0 = Signature(relations=(("R", 2), ("B", 2)), constants=("r",))
TAU = Signature(relations=(("E", 2),), constants=())
TAU_ORD = Signature(relations=(("E", 2), (ORDER_REL, 2)), constants=())


class FamilyError(ValueError):
    pass


class ProvenanceError(FamilyError):
    """Raised when a reduction input was not produced by these builders."""


@dataclass(frozen=True)
class FamilySpec:
    family: str
    side: str  # "A" or "B"
    positive: bool  # "+" builds the family as defined, "-" swaps edge colors
    seed: Union[str, Forest]  # prefix or irreducible tree
    m: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FamilyError(f"unknown family {self.family!r}")
        if self.side not in ("A", "B"):
            raise FamilyError("side must be A or B")
        if self.m < 1:
            raise FamilyError("m must be >= 1")
        if self.family.startswith("refined"):
            if not isinstance(self.seed, Forest):
                raise FamilyError("refined families take a tree seed")
            if len(self.seed.roots) != 1 or not is_irreducible(self.seed):
                raise FamilyError("refined families need a single irreducible tree")
        else:
            if not isinstance(self.seed, str) or not self.seed:
                raise FamilyError("prefix families take a non-empty prefix seed")
            check_prefix(self.seed)

    def to_text(self) -> str:
        seed = (
            f"t={forest_to_sexp(self.seed)}"
            if isinstance(self.seed, Forest)
            else f"p={self.seed}"
        )
        return f"{self.family}:{self.side}:{'+' if self.positive else '-'}:{seed}:m={self.m}"


def parse_family_spec(text: str) -> FamilySpec:
    parts = text.split(":", 3)
    if len(parts) != 4:
        raise FamilyError(f"malformed family spec {text!r}")
    family, side, pol, rest = parts
    if pol not in ("+", "-"):
        raise FamilyError("polarity must be + or -")
    m_at = rest.rfind(":m=")
    if m_at < 0:
        raise FamilyError("family spec must end in :m=<count>")
    seed_text, m_text = rest[:m_at], rest[m_at + 3 :]
    seed: Union[str, Forest]
    if seed_text.startswith("p="):
        seed = seed_text[2:]
    elif seed_text.startswith("t="):
        seed = forest_from_sexp(seed_text[2:])
    else:
        raise FamilyError("seed must be p=<prefix> or t=<tree sexp>")
    return FamilySpec(family, side, pol == "+", seed, int(m_text))


# -- elementary pieces ---------------------------------------------------------


def hook_point() -> Hooked:
    """The one-point structure whose single element is the hook."""
    sig = Signature(relations=(), constants=(HOOK,))
    return Hooked(Structure(sig, 1, {}, {HOOK: 0}, labels=("pt",)), HOOK)


def base_tree(leaves: int, black: frozenset[int], tag: str) -> Structure:
    """A depth-1 red tree: root 0, leaves 1..leaves; `black` gives 1-based
    leaf positions carrying the mark."""
    rel_r = frozenset((0, i) for i in range(1, leaves + 1))
    rel_u = frozenset((i,) for i in black)
    labels = (f"{tag}.root",) + tuple(
        f"{tag}.leaf{i}" + ("*" if i in black else "") for i in range(1, leaves + 1)
    )
    return Structure(
        TAU_PLUS, leaves + 1, {"R": rel_r, "B": frozenset(), "U": rel_u}, {"r": 0}, labels
    )


def swap_colors(s: Structure) -> Structure:
    """Exchange the two edge colors everywhere."""
    rels = dict(s.relations)
    rels["R"], rels["B"] = s.rel("B"), s.rel("R")
    return Structure(s.signature, s.size, rels, dict(s.constants), s.labels, s.order)


def invert_marks(s: Structure) -> Structure:
    """Complement the mark on leaves (elements with no children)."""
    children_of = set()
    for rel in ("R", "B"):
        children_of.update(t[0] for t in s.rel(rel))
    leaves = frozenset((x,) for x in range(s.size) if x not in children_of)
    rels = dict(s.relations)
    rels["U"] = frozenset(leaves - s.rel("U"))
    return Structure(s.signature, s.size, rels, dict(s.constants), s.labels, s.order)


def rename_constant(s: Structure, old: str, new: str) -> Structure:
    consts = dict(s.constants)
    value = consts.pop(old)
    consts[new] = value
    sig = Signature(
        s.signature.relations,
        tuple(c for c in s.signature.constants if c != old) + (new,),
    )
    return Structure(sig, s.size, dict(s.relations), consts, s.labels, s.order)


def joined_pair(q: str, m: int, left: str, right: str, builder) -> Hooked:
    """Two prefix structures glued at their roots: the left side built
    positively for q, the right side with all colors swapped.  The shared
    root becomes the hook."""
    a = builder(q, m, left)
    b = swap_colors(builder(q, m, right))
    joined = join_at(a, a.constants["r"], b, b.constants["r"])
    tag = f"D{left}{right}"
    labels = tuple(
        f"{tag}.junction" if i == joined.constants["r"] else f"{tag}.{lab}"
        for i, lab in enumerate(joined.labels)
    )
    return Hooked(rename_constant(joined.relabel(labels), "r", HOOK), HOOK)


def _host(leaves: int, tag: str) -> Structure:
    return reduct(base_tree(leaves, frozenset(), tag), TAU_PLUS_0)


def _expand_host(leaves: int, assignment: dict[int, Hooked], tag: str) -> Structure:
    """Point-expand a depth-1 red host: the root by the one-point structure,
    leaf i by assignment[i]."""
    host = _host(leaves, tag)
    gimel = {0: hook_point()}
    gimel.update({i: assignment[i] for i in range(1, leaves + 1)})
    expanded, _ = point_expand(host, gimel)
    return expanded


# -- the prefix family ----------------------------------------------------------


def build_prefix_structure(p: str, m: int, side: str) -> Structure:
    """The positive colored tree for prefix p at width m, side A or B."""
    check_prefix(p)
    if not p or side not in ("A", "B"):
        raise FamilyError("need a non-empty prefix and side A or B")
    if m < 1:
        raise FamilyError("m must be >= 1")
    tag = f"{side}[{p}]"
    if len(p) == 1:
        if p == EXISTS:
            if side == "A":
                return base_tree(2 * m + 1, frozenset({2 * m + 1}), tag)
            return base_tree(2 * m, frozenset(), tag)
        if side == "A":
            return base_tree(2 * m, frozenset(range(1, 2 * m + 1)), tag)
        return base_tree(2 * m + 1, frozenset(range(1, 2 * m + 1)), tag)

    q = p[1:]
    pair = lambda lt, rt: joined_pair(q, m, lt, rt, build_prefix_structure)
    if p[0] == EXISTS:
        if side == "A":
            # one special all-A pair, then m mixed pairs of each chirality
            assignment = {1: pair("A", "A")}
            for i in range(m):
                assignment[2 + i] = pair("A", "B")
                assignment[2 + m + i] = pair("B", "A")
            return _expand_host(2 * m + 1, assignment, tag)
        assignment = {}
        for i in range(m):
            assignment[1 + i] = pair("A", "B")
            assignment[1 + m + i] = pair("B", "A")
        return _expand_host(2 * m, assignment, tag)
    # universal head: sides trade hosts, and the special pair degrades to all-B
    if side == "A":
        assignment = {}
        for i in range(m):
            assignment[1 + i] = pair("A", "B")
            assignment[1 + m + i] = pair("B", "A")
        return _expand_host(2 * m, assignment, tag)
    assignment = {1: pair("B", "B")}
    for i in range(m):
        assignment[2 + i] = pair("A", "B")
        assignment[2 + m + i] = pair("B", "A")
    return _expand_host(2 * m + 1, assignment, tag)


# -- the refined (tree-seeded) family --------------------------------------------


def _tree_children(t: Forest) -> list[Forest]:
    root = t.roots[0]
    return [t.subtree(w) for w in t.children[root]]


def build_tree_structure(t: Forest, m: int, side: str) -> Structure:
    """The positive colored tree for an irreducible tree seed.

    Each child subtree contributes one piece to every junction component:
    the positive piece for a child labeled differently from the root, the
    color-swapped piece for an equally labeled child (whose test must run
    over the other edge color to stay independent of its siblings).  The
    distinguished component takes the faithful piece in every slot; the pool
    has one component per child with exactly that slot degraded to its
    B-side piece.  An existential root puts the distinguished component on
    the A side, a universal root puts the all-degraded component on the B
    side.
    """
    if len(t.roots) != 1:
        raise FamilyError("tree seed must be a single tree")
    if not is_irreducible(t):
        raise FamilyError("tree seed must be irreducible")
    if side not in ("A", "B") or m < 1:
        raise FamilyError("side must be A or B and m >= 1")

    root_label = t.labels[t.roots[0]]
    kids = _tree_children(t)
    tag = f"{side}[{forest_to_sexp(t)}]"

    if not kids:
        # single node: the width-1 base case of the matching quantifier
        if root_label == EXISTS:
            if side == "A":
                return base_tree(m + 1, frozenset({m + 1}), tag)
            return base_tree(m, frozenset(), tag)
        if side == "A":
            return base_tree(m, frozenset(range(1, m + 1)), tag)
        return base_tree(m + 1, frozenset(range(1, m + 1)), tag)

    k = len(kids)
    same = {i for i, sub in enumerate(kids) if sub.labels[sub.roots[0]] == root_label}

    def piece(i: int, which: str) -> Structure:
        s = build_tree_structure(kids[i], m, which)
        return swap_colors(s) if i in same else s

    def component(pattern: tuple[str, ...]) -> Hooked:
        pieces = [piece(i, pattern[i]) for i in range(k)]
        joined = pieces[0]
        for extra in pieces[1:]:
            joined = join_at(joined, joined.constants["r"], extra, extra.constants["r"])
        ctag = f"C({','.join(pattern)})"
        labels = tuple(
            f"{ctag}.junction" if e == joined.constants["r"] else f"{ctag}.{lab}"
            for e, lab in enumerate(joined.labels)
        )
        return Hooked(rename_constant(joined.relabel(labels), "r", HOOK), HOOK)

    all_good = component(("A",) * k)
    all_bad = component(("B",) * k)
    one_bad = [
        component(tuple("B" if i == s else "A" for i in range(k))) for s in range(k)
    ]
    one_good = [
        component(tuple("A" if i == s else "B" for i in range(k))) for s in range(k)
    ]

    if root_label == EXISTS:
        special = all_good if side == "A" else None
        pool = one_bad
    else:
        special = all_bad if side == "B" else None
        pool = one_good

    count = k * m + (1 if special is not None else 0)
    assignment: dict[int, Hooked] = {}
    pos = 1
    if special is not None:
        assignment[pos] = special
        pos += 1
    for comp in pool:
        for _ in range(m):
            assignment[pos] = comp
            pos += 1
    if pos != count + 1:
        raise AssertionError("leaf assignment does not fill the host")
    return _expand_host(count, assignment, tag)


# -- the ordered family -----------------------------------------------------------


def _ordered_base(p: str, m: int, side: str, tag: str) -> tuple[Structure, list[int]]:
    wide = 2 ** (m + 2) + 1
    narrow = 2 ** (m + 1)
    marked_at = 2 ** (m + 1) + 1
    if p == EXISTS:
        if side == "A":
            s = base_tree(wide, frozenset({marked_at}), tag)
        else:
            s = base_tree(narrow, frozenset(), tag)
    else:
        if side == "A":
            s = base_tree(narrow, frozenset(range(1, narrow + 1)), tag)
        else:
            s = base_tree(wide, frozenset(range(1, wide + 1)) - {marked_at}, tag)
    return s, list(range(s.size))


def _ordered_pair(q: str, m: int, left: str, right: str) -> tuple[Hooked, list[int]]:
    """Ordered join: the color-swapped right half comes first in the order,
    the junction (shared root) first of all."""
    a, order_a = _build_ordered(q, m, left)
    b0, order_b = _build_ordered(q, m, right)
    b = swap_colors(b0)
    ra, rb = a.constants["r"], b.constants["r"]
    joined = join_at(a, ra, b, rb)

    def b_map(e: int) -> int:
        return ra if e == rb else a.size + e - (1 if e > rb else 0)

    order = [ra] + [b_map(e) for e in order_b if e != rb] + [e for e in order_a if e != ra]
    tag = f"D{left}{right}"
    labels = tuple(
        f"{tag}.junction" if i == joined.constants["r"] else f"{tag}.{lab}"
        for i, lab in enumerate(joined.labels)
    )
    return Hooked(rename_constant(joined.relabel(labels), "r", HOOK), HOOK), order


def _build_ordered(p: str, m: int, side: str) -> tuple[Structure, list[int]]:
    tag = f"{side}>[{p}]"
    if len(p) == 1:
        return _ordered_base(p, m, side, tag)

    q = p[1:]
    wide = 2 ** (m + 2) + 1
    narrow = 2 ** (m + 1)
    special_at = 2 ** (m + 1) + 1

    def mixed(i: int) -> tuple[Hooked, list[int]]:
        return _ordered_pair(q, m, "A", "B") if i % 2 == 1 else _ordered_pair(q, m, "B", "A")

    if p[0] == EXISTS:
        special = _ordered_pair(q, m, "A", "A") if side == "A" else None
    else:
        # hosts trade places for a universal head; the B side gets the all-B pair
        special = _ordered_pair(q, m, "B", "B") if side == "B" else None

    if special is not None:
        leaves = wide
        blocks = {}
        for i in range(1, leaves + 1):
            if i == special_at:
                blocks[i] = special
            elif i < special_at:
                blocks[i] = mixed(i)
            else:
                blocks[i] = mixed(i - special_at)
    else:
        leaves = narrow
        blocks = {i: mixed(i) for i in range(1, leaves + 1)}

    host = _host(leaves, tag)
    gimel = {0: hook_point()}
    gimel.update({i: blocks[i][0] for i in range(1, leaves + 1)})
    expanded, g = point_expand(host, gimel)

    # block offsets: component copies were laid out in host element order
    order: list[int] = [g[0]]
    offset = 1  # the root's one-point block
    for i in range(1, leaves + 1):
        comp = blocks[i][0].structure
        order.extend(offset + e for e in blocks[i][1])
        offset += comp.size
    return expanded, order


def build_ordered_structure(p: str, m: int, side: str) -> Structure:
    """The positive ordered colored tree for prefix p at width m."""
    check_prefix(p)
    if not p or side not in ("A", "B") or m < 1:
        raise FamilyError("need a non-empty prefix, side A or B, m >= 1")
    s, order = _build_ordered(p, m, side)
    return _attach_order(s, order)


def _attach_order(s: Structure, order: list[int]) -> Structure:
    if sorted(order) != list(range(s.size)):
        raise AssertionError("order list must enumerate the universe")
    position = {e: i for i, e in enumerate(order)}
    pairs = frozenset(
        (x, y) for x in range(s.size) for y in range(s.size) if position[x] <= position[y]
    )
    sig = Signature(s.signature.relations + ((ORDER_REL, 2),), s.signature.constants)
    rels = dict(s.relations)
    rels[ORDER_REL] = pairs
    return Structure(sig, s.size, rels, dict(s.constants), s.labels, order=ORDER_REL)


# -- reduction to a single edge relation ------------------------------------------


def _tree_edges(s: Structure) -> dict[int, tuple[int, str]]:
    """child -> (father, color) from the R/B interpretation; validates that
    the colored edges form a tree rooted at r."""
    root = s.constants.get("r")
    if root is None:
        raise ProvenanceError("reduction input must interpret the root constant r")
    father: dict[int, tuple[int, str]] = {}
    for color in ("R", "B"):
        for f, c in s.rel(color):
            if c in father or c == root:
                raise ProvenanceError("edge colors do not form a tree")
            father[c] = (f, color)
    if len(father) != s.size - 1:
        raise ProvenanceError("edge colors do not form a tree")
    return father


def _leaf_quantifier(label: str) -> str:
    """The quantifier of the depth-1 tree a leaf belongs to, read off the
    seed recorded in its provenance label (the innermost [..] segment)."""
    at = label.rfind("[")
    end = label.find("]", at)
    if at < 0 or end < 0:
        raise ProvenanceError(f"label {label!r} carries no seed tag")
    for ch in label[at + 1 : end]:
        if ch in ("E", "A"):
            return ch
    raise ProvenanceError(f"label {label!r} carries no quantifier seed")


def _depth_map(s: Structure, father: dict[int, tuple[int, str]]) -> dict[int, int]:
    depth: dict[int, int] = {s.constants["r"]: 0}

    def d(v: int) -> int:
        if v not in depth:
            depth[v] = d(father[v][0]) + 1
        return depth[v]

    for v in range(s.size):
        d(v)
    return depth


def reduce_to_tau(s: Structure) -> Structure:
    """Re-encode a colored tree as a digraph over the single relation E.

    Red edges become forward arcs and blue edges backward arcs.  A mark is
    encoded by the depth of its leaf: a depth-1 leaf gets a self-loop; a
    depth-2 leaf gets a self-loop when its edge is red and is joined both
    ways to its junction when its edge is blue; a deeper leaf gets a single
    arc to its grandfather.  The grandfather arc neither hides the leaf's own
    edge color nor introduces stray loops, which is what keeps both truth
    directions of the digraph sentences intact.  The root is removed, and at
    height >= 2 each of its children (the junction points) keeps a self-loop
    in its place.  A linear order, when present, is restricted to the
    surviving elements.
    """
    if "r" not in s.constants or "root" not in s.labels[s.constants["r"]]:
        raise ProvenanceError("reduction requires a structure built by this module")
    father = _tree_edges(s)
    depth = _depth_map(s, father)
    height = max(depth.values())
    root = s.constants["r"]
    blacks = {t[0] for t in s.rel("U")}

    arcs: set[tuple[int, int]] = set()
    for f, c in s.rel("R"):
        arcs.add((f, c))
    for f, c in s.rel("B"):
        arcs.add((c, f))
    for b in blacks:
        fb, color = father[b]
        if depth[b] >= 3:
            if color == "R":
                arcs.add((b, fb))
            else:
                arcs.add((fb, b))
                if _leaf_quantifier(s.labels[b]) == "E":
                    arcs.add((b, father[fb][0]))
        elif depth[b] == 2:
            if color == "R":
                arcs.add((b, b))
            else:
                arcs.add((b, fb))
                arcs.add((fb, b))
        else:
            arcs.add((b, b))
    if height >= 2:
        for child, (f, _) in father.items():
            if f == root:
                arcs.add((child, child))

    keep = [x for x in range(s.size) if x != root]
    index = {x: i for i, x in enumerate(keep)}
    new_arcs = frozenset((index[x], index[y]) for x, y in arcs if x != root and y != root)
    labels = tuple(s.labels[x] for x in keep)

    if s.order is not None:
        pairs = frozenset(
            (index[x], index[y]) for x, y in s.rel(s.order) if x != root and y != root
        )
        return Structure(
            TAU_ORD,
            len(keep),
            {"E": new_arcs, ORDER_REL: pairs},
            {},
            labels,
            order=ORDER_REL,
        )
    return Structure(TAU, len(keep), {"E": new_arcs}, {}, labels)


# -- spec dispatch ------------------------------------------------------------------

FAMILIES = (
    "tauplus",
    "tau",
    "ordered_tauplus",
    "ordered_tau",
    "refined_tauplus",
    "refined_tau",
)


def build(spec: FamilySpec) -> Structure:
    if spec.family in ("tauplus", "tau"):
        s = build_prefix_structure(spec.seed, spec.m, spec.side)
    elif spec.family in ("ordered_tauplus", "ordered_tau"):
        s = build_ordered_structure(spec.seed, spec.m, spec.side)
    else:
        s = build_tree_structure(spec.seed, spec.m, spec.side)
    if not spec.positive:
        s = swap_colors(s)
    if spec.family in ("tau", "ordered_tau", "refined_tau"):
        s = reduce_to_tau(s)
    return s
