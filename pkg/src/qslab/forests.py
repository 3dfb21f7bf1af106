"""Labeled forests: disjoint unions of rooted trees with E/A node labels.

The forest is the combinatorial skeleton everything else hangs off: game
boards, quantifier shapes of formulas, and the canonical forest built from a
set of words.  Nodes are dense integers; each tree is rooted, children are
ordered, and every node carries one of the two quantifier labels.

External format: s-expressions.  A tree is ``(E child*)`` or ``(A child*)``
and a forest is a whitespace-separated sequence of trees; the empty forest is
the empty string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .prefixes import ALPHABET, check_prefix, downward_closure


class ForestSyntaxError(ValueError):
    """Raised on malformed s-expression input, with a character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Forest:
    """An immutable E/A-labeled forest.

    labels[i] is the label of node i; children[i] the ordered child list;
    roots the ordered list of tree roots.  Construction validates treeness:
    one father per node, no cycles, children lists duplicate-free.
    """

    labels: tuple[str, ...]
    children: tuple[tuple[int, ...], ...]
    roots: tuple[int, ...]
    _fathers: tuple[Optional[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if len(self.children) != n:
            raise ValueError("labels and children must have equal length")
        for lab in self.labels:
            if lab not in ALPHABET:
                raise ValueError(f"invalid node label {lab!r}")
        fathers: list[Optional[int]] = [None] * n
        for v, kids in enumerate(self.children):
            if len(set(kids)) != len(kids):
                raise ValueError(f"duplicate child under node {v}")
            for w in kids:
                if not 0 <= w < n:
                    raise ValueError(f"child index {w} out of range")
                if fathers[w] is not None:
                    raise ValueError(f"node {w} has two fathers")
                fathers[w] = v
        rootset = {v for v in range(n) if fathers[v] is None}
        if set(self.roots) != rootset or len(self.roots) != len(rootset):
            raise ValueError("roots must list exactly the fatherless nodes")
        # Reachability from the roots rules out cycles among non-root nodes.
        seen: set[int] = set()
        stack = list(self.roots)
        while stack:
            v = stack.pop()
            seen.add(v)
            stack.extend(self.children[v])
        if len(seen) != n:
            raise ValueError("forest contains nodes unreachable from any root")
        object.__setattr__(self, "_fathers", tuple(fathers))

    # -- basic shape ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def is_empty(self) -> bool:
        return not self.labels

    def father(self, v: int) -> Optional[int]:
        return self._fathers[v]

    def height_of(self, v: int) -> int:
        kids = self.children[v]
        return 1 + max((self.height_of(w) for w in kids), default=-1) if kids else 0

    def height(self) -> int:
        return max((self.height_of(r) for r in self.roots), default=0)

    def rank(self) -> int:
        """Height plus one on non-empty forests, zero on the empty forest."""
        return 0 if self.is_empty else self.height() + 1

    def descendants(self, v: int) -> list[int]:
        """Strict descendants of v in preorder."""
        out: list[int] = []
        stack = list(reversed(self.children[v]))
        while stack:
            w = stack.pop()
            out.append(w)
            stack.extend(reversed(self.children[w]))
        return out

    def subtree_nodes(self, v: int) -> list[int]:
        return [v] + self.descendants(v)

    def subtree(self, v: int) -> "Forest":
        """The maximal subtree rooted at v, as a standalone one-tree forest."""
        nodes = self.subtree_nodes(v)
        index = {u: i for i, u in enumerate(nodes)}
        return Forest(
            labels=tuple(self.labels[u] for u in nodes),
            children=tuple(tuple(index[w] for w in self.children[u]) for u in nodes),
            roots=(0,),
        )

    def trees(self) -> list["Forest"]:
        return [self.subtree(r) for r in self.roots]

    # -- words ----------------------------------------------------------

    def maximal_path_words(self) -> set[str]:
        """Label words of all root-to-leaf paths."""
        words: set[str] = set()

        def walk(v: int, acc: str) -> None:
            acc += self.labels[v]
            if not self.children[v]:
                words.add(acc)
            for w in self.children[v]:
                walk(w, acc)

        for r in self.roots:
            walk(r, "")
        return words

    def reads_word(self, p: str) -> bool:
        """Is p readable off this forest, i.e. a subsequence of a path word?

        Every directed path extends to a root-to-leaf path whose word
        contains the original word as a subsequence, so matching against
        root-to-leaf paths is complete.  The empty word is readable iff the
        forest has at least one node.
        """
        check_prefix(p)
        if self.is_empty:
            return False
        if not p:
            return True

        memo: dict[tuple[int, int], bool] = {}

        def match(v: int, i: int) -> bool:
            key = (v, i)
            if key in memo:
                return memo[key]
            j = i + 1 if self.labels[v] == p[i] else i
            if j == len(p):
                res = True
            else:
                res = any(match(w, j) for w in self.children[v])
            memo[key] = res
            return res

        return any(match(r, 0) for r in self.roots)

    def words_up_to(self, max_len: int) -> set[str]:
        """All readable words of length <= max_len."""
        if self.is_empty:
            return set()
        closure = downward_closure(self.maximal_path_words())
        return {w for w in closure if len(w) <= max_len}

    def words_subset(self, other: "Forest") -> bool:
        """Is every word readable here also readable off `other`?

        Sound and complete via maximal path words: readable word sets are
        subsequence-closed and generated by the maximal path words.
        """
        return all(other.reads_word(w) for w in self.maximal_path_words())


# -- construction helpers ------------------------------------------------


def empty_forest() -> Forest:
    return Forest(labels=(), children=(), roots=())


def union(forests: Iterable[Forest]) -> Forest:
    """Disjoint union, tree order preserved."""
    labels: list[str] = []
    children: list[tuple[int, ...]] = []
    roots: list[int] = []
    for f in forests:
        off = len(labels)
        labels.extend(f.labels)
        children.extend(tuple(w + off for w in kids) for kids in f.children)
        roots.extend(r + off for r in f.roots)
    return Forest(tuple(labels), tuple(children), tuple(roots))


def tree_over(label: str, below: Forest) -> Forest:
    """A single tree: a new `label` root with an arc to every root of `below`."""
    n = len(below)
    labels = below.labels + (label,)
    children = below.children + (below.roots,)
    return Forest(labels, children, roots=(n,))


def single_node(label: str) -> Forest:
    return tree_over(label, empty_forest())


def path_tree(word: str) -> Forest:
    """The degenerate tree reading exactly `word` on its unique maximal path."""
    check_prefix(word)
    f = empty_forest()
    for letter in reversed(word):
        f = tree_over(letter, f)
    return f


def perfect_binary(label: str, n: int) -> Forest:
    """The height-(n-1) perfect binary tree rooted with `label`.

    Every inner node has exactly one E child and one A child (E first), and
    all leaves sit at the same depth.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return single_node(label)
    below = union([perfect_binary("E", n - 1), perfect_binary("A", n - 1)])
    return tree_over(label, below)


def forest_of(words: Iterable[str]) -> Forest:
    """The canonical maximal forest whose readable words are the downward
    closure of `words`.

    Words are split by first letter; each group contributes one tree whose
    root carries that letter over the forest of the tails.  Empty words
    contribute nothing.
    """
    ws = {check_prefix(w) for w in words}
    ws.discard("")
    if not ws:
        return empty_forest()
    parts: list[Forest] = []
    for letter in ALPHABET:
        tails = {w[1:] for w in ws if w[0] == letter}
        if tails:
            parts.append(tree_over(letter, forest_of(tails)))
    return union(parts)


# -- s-expression io ------------------------------------------------------


def forest_to_sexp(f: Forest) -> str:
    def tree(v: int) -> str:
        kids = " ".join(tree(w) for w in f.children[v])
        return f"({f.labels[v]} {kids})" if kids else f"({f.labels[v]})"

    return " ".join(tree(r) for r in f.roots)


def forest_from_sexp(text: str) -> Forest:
    pos = 0
    n = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_tree() -> Forest:
        nonlocal pos
        if text[pos] != "(":
            raise ForestSyntaxError("expected '('", pos)
        pos += 1
        skip_ws()
        if pos >= n or text[pos] not in ALPHABET:
            raise ForestSyntaxError("expected node label E or A", pos)
        label = text[pos]
        pos += 1
        kids: list[Forest] = []
        while True:
            skip_ws()
            if pos >= n:
                raise ForestSyntaxError("unclosed '('", pos)
            if text[pos] == ")":
                pos += 1
                return tree_over(label, union(kids))
            kids.append(parse_tree())

    trees: list[Forest] = []
    skip_ws()
    while pos < n:
        trees.append(parse_tree())
        skip_ws()
    return union(trees)


# -- embedding ------------------------------------------------------------


def embed(s1: Forest, s2: Forest) -> Optional[dict[int, int]]:
    """A label-preserving node map sending arcs to nontrivial directed paths,
    or None when no such map exists.

    The map need not be injective.  A node x may map to u when labels agree
    and every child of x maps to some strict descendant of u; memoized over
    (x, u) pairs.  The returned witness is the leftmost-first one: candidates
    are scanned in node order, so reruns reproduce it exactly.
    """
    if s1.is_empty:
        return {}
    if s2.is_empty:
        return None

    n2 = len(s2)

    @lru_cache(maxsize=None)
    def can(x: int, u: int) -> bool:
        if s1.labels[x] != s2.labels[u]:
            return False
        desc = s2.descendants(u)
        return all(any(can(y, v) for v in desc) for y in s1.children[x])

    def assign(x: int, u: int, out: dict[int, int]) -> None:
        out[x] = u
        desc = s2.descendants(u)
        for y in s1.children[x]:
            v = next(v for v in desc if can(y, v))
            assign(y, v, out)

    witness: dict[int, int] = {}
    for r in s1.roots:
        u = next((u for u in range(n2) if can(r, u)), None)
        if u is None:
            return None
        assign(r, u, witness)
    return witness


def embeds(s1: Forest, s2: Forest) -> bool:
    return embed(s1, s2) is not None


def is_irreducible(t: Forest) -> bool:
    """A single tree where no child subtree of any node embeds in a sibling."""
    if len(t.roots) != 1:
        raise ValueError("irreducibility is defined for single trees")
    for v in range(len(t)):
        kids = t.children[v]
        subs = [t.subtree(w) for w in kids]
        for i in range(len(subs)):
            for j in range(len(subs)):
                if i != j and embeds(subs[i], subs[j]):
                    return False
    return True


def minimal_nonembeddable_subtree(s1: Forest, s2: Forest) -> Forest:
    """The smallest subtree of s1 that does not embed in s2.

    Requires that s1 itself does not embed in s2.  Among subtrees T of s1
    with T not embeddable in s2 but every proper subtree of T embeddable,
    ties break by node count and then by leftmost root position.  The result
    is always irreducible: were two sibling subtrees comparable, the larger
    would absorb the smaller's embedding obligations, contradicting
    minimality; this is asserted rather than trusted.
    """
    if embeds(s1, s2):
        raise ValueError("s1 embeds in s2; no nonembeddable subtree exists")
    candidates: list[tuple[int, int, Forest]] = []
    for v in range(len(s1)):
        t = s1.subtree(v)
        if embeds(t, s2):
            continue
        if all(embeds(t.subtree(w), s2) for w in range(len(t)) if w != t.roots[0]):
            candidates.append((len(t), v, t))
    _, _, best = min(candidates, key=lambda c: (c[0], c[1]))
    if not is_irreducible(best):
        raise AssertionError("minimal nonembeddable subtree is not irreducible")
    return best
