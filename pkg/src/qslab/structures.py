"""Finite relational structures with constants.

Universe elements are dense integers 0..n-1.  Relation interpretations are
sets of tuples, constants map to elements.  Structures are immutable after
construction and carry an optional provenance label per element; labels have
no semantics and exist for debugging, the interactive UI, and for the digraph
reduction that needs to know how a structure was built.

A relation named in ``order`` is validated as a linear order.  The reflexive
closure is applied on ingestion: totality forces x <= x, so a stored order is
always reflexive, transitive, antisymmetric and total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

ORDER_REL = "<="


class SignatureError(ValueError):
    """Symbol clashes, unknown symbols, arity violations."""


class StructureError(ValueError):
    """Ill-formed interpretations: stray elements, missing constants."""


@dataclass(frozen=True)
class Signature:
    """Relation and constant symbols.  Stored sorted, so signatures compare
    as symbol sets and all construction paths agree."""

    relations: tuple[tuple[str, int], ...]
    constants: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(sorted(self.relations)))
        object.__setattr__(self, "constants", tuple(sorted(self.constants)))
        names = [name for name, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate symbol among {names}")
        for name, arity in self.relations:
            if arity < 1:
                raise SignatureError(f"relation {name} has arity {arity} < 1")

    @property
    def relation_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def arity(self, name: str) -> int:
        for rel, ar in self.relations:
            if rel == name:
                return ar
        raise SignatureError(f"unknown relation {name!r}")

    def restrict(self, relations: Iterable[str], constants: Iterable[str]) -> "Signature":
        rels = set(relations)
        cons = set(constants)
        unknown = (rels - set(self.relation_names)) | (cons - set(self.constants))
        if unknown:
            raise SignatureError(f"symbols {sorted(unknown)} not in signature")
        return Signature(
            relations=tuple((n, a) for n, a in self.relations if n in rels),
            constants=tuple(c for c in self.constants if c in cons),
        )


@dataclass(frozen=True)
class Structure:
    signature: Signature
    size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    constants: Mapping[str, int]
    labels: tuple[str, ...] = ()
    order: Optional[str] = None

    def __post_init__(self):
        rels = {name: frozenset(map(tuple, tuples)) for name, tuples in self.relations.items()}
        if set(rels) != set(self.signature.relation_names):
            raise StructureError("relation interpretations must match the signature exactly")
        for name, tuples in rels.items():
            ar = self.signature.arity(name)
            for t in tuples:
                if len(t) != ar:
                    raise StructureError(f"tuple {t} has wrong arity for {name}")
                if not all(0 <= x < self.size for x in t):
                    raise StructureError(f"tuple {t} leaves the universe of size {self.size}")
        if set(self.constants) != set(self.signature.constants):
            raise StructureError("every constant must be interpreted")
        for c, x in self.constants.items():
            if not 0 <= x < self.size:
                raise StructureError(f"constant {c} interpreted outside the universe")
        labels = self.labels if self.labels else tuple(str(i) for i in range(self.size))
        if len(labels) != self.size:
            raise StructureError("labels must cover the universe")
        if self.order is not None:
            if self.order not in self.signature.relation_names or self.signature.arity(self.order) != 2:
                raise StructureError(f"order relation {self.order!r} must be a binary relation symbol")
            rels[self.order] = frozenset(rels[self.order]) | frozenset((x, x) for x in range(self.size))
            _validate_linear_order(rels[self.order], self.size)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", dict(self.constants))
        object.__setattr__(self, "labels", labels)

    # -- queries ---------------------------------------------------------

    def rel(self, name: str) -> frozenset[tuple[int, ...]]:
        try:
            return self.relations[name]
        except KeyError:
            raise SignatureError(f"unknown relation {name!r}") from None

    def holds(self, name: str, args: Sequence[int]) -> bool:
        return tuple(args) in self.rel(name)

    def constant_tuple(self) -> tuple[int, ...]:
        """Interpretations of all constants, in signature order."""
        return tuple(self.constants[c] for c in self.signature.constants)

    def relabel(self, labels: Sequence[str]) -> "Structure":
        return replace(self, labels=tuple(labels))


def _validate_linear_order(pairs: frozenset[tuple[int, ...]], n: int) -> None:
    leq = lambda x, y: (x, y) in pairs
    for x in range(n):
        for y in range(n):
            if not (leq(x, y) or leq(y, x)):
                raise StructureError(f"order not total on ({x},{y})")
            if leq(x, y) and leq(y, x) and x != y:
                raise StructureError(f"order not antisymmetric on ({x},{y})")
            for z in range(n):
                if leq(x, y) and leq(y, z) and not leq(x, z):
                    raise StructureError(f"order not transitive on ({x},{y},{z})")


def linear_order(n: int) -> Structure:
    """The n-element linear order, over signature <(<=)>."""
    sig = Signature(relations=((ORDER_REL, 2),), constants=())
    pairs = frozenset((x, y) for x in range(n) for y in range(n) if x <= y)
    return Structure(sig, n, {ORDER_REL: pairs}, {}, order=ORDER_REL)


# -- partial isomorphism and isomorphism ----------------------------------


def partial_iso(a: Structure, abar: Sequence[int], b: Structure, bbar: Sequence[int]) -> bool:
    """Do the constant interpretations followed by abar/bbar correspond?

    Checks every relation (equality included) on every index tuple over the
    combined tuples, and positional alignment with each constant.
    """
    if a.signature != b.signature:
        raise SignatureError("partial_iso requires a shared signature")
    if len(abar) != len(bbar):
        raise ValueError("tuples must have equal length")
    xs = a.constant_tuple() + tuple(abar)
    ys = b.constant_tuple() + tuple(bbar)
    k = len(xs)
    for i in range(k):
        for j in range(k):
            if (xs[i] == xs[j]) != (ys[i] == ys[j]):
                return False
    for c in a.signature.constants:
        for i in range(k):
            if (xs[i] == a.constants[c]) != (ys[i] == b.constants[c]):
                return False
    for name, ar in a.signature.relations:
        ra, rb = a.rel(name), b.rel(name)
        for idx in product(range(k), repeat=ar):
            if (tuple(xs[i] for i in idx) in ra) != (tuple(ys[i] for i in idx) in rb):
                return False
    return True


DEFAULT_ISO_BOUND = 64


def isomorphic(a: Structure, b: Structure, max_size: int = DEFAULT_ISO_BOUND) -> bool:
    """Backtracking isomorphism test for desk-scale structures."""
    if a.signature != b.signature:
        raise SignatureError("isomorphic requires a shared signature")
    if a.size != b.size:
        return False
    if a.size > max_size:
        raise ValueError(f"structure size {a.size} exceeds the bound {max_size}")

    inv_a = [_element_invariant(a, x) for x in range(a.size)]
    inv_b = [_element_invariant(b, x) for x in range(b.size)]
    if sorted(inv_a) != sorted(inv_b):
        return False

    fwd: dict[int, int] = {}
    used: set[int] = set()
    binary = [(n, a.rel(n), b.rel(n)) for n, ar in a.signature.relations if ar == 2]
    other = [(n, ar, a.rel(n), b.rel(n)) for n, ar in a.signature.relations if ar != 2]

    def consistent(x: int, y: int) -> bool:
        if inv_a[x] != inv_b[y]:
            return False
        for c in a.signature.constants:
            if (a.constants[c] == x) != (b.constants[c] == y):
                return False
        for _, ra, rb in binary:
            for u, v in fwd.items():
                if ((x, u) in ra) != ((y, v) in rb) or ((u, x) in ra) != ((v, y) in rb):
                    return False
            if ((x, x) in ra) != ((y, y) in rb):
                return False
        return True

    def full_check() -> bool:
        for _, ar, ra, rb in other:
            for t in product(range(a.size), repeat=ar):
                if (t in ra) != (tuple(fwd[i] for i in t) in rb):
                    return False
        return True

    def extend(x: int) -> bool:
        if x == a.size:
            return full_check()
        for y in range(b.size):
            if y in used or not consistent(x, y):
                continue
            fwd[x] = y
            used.add(y)
            if extend(x + 1):
                return True
            del fwd[x]
            used.discard(y)
        return False

    return extend(0)


def _element_invariant(s: Structure, x: int):
    """A cheap isomorphism-invariant fingerprint used to prune the search."""
    parts = []
    for name, ar in s.signature.relations:
        r = s.rel(name)
        if ar == 1:
            parts.append(((x,) in r,))
        elif ar == 2:
            parts.append((sum(1 for t in r if t[0] == x), sum(1 for t in r if t[1] == x), (x, x) in r))
        else:
            parts.append((sum(1 for t in r if x in t),))
    parts.append(tuple(s.constants[c] == x for c in s.signature.constants))
    return tuple(parts)


# -- reducts and expansions ------------------------------------------------


def reduct(a: Structure, sub: Signature) -> Structure:
    """Forget the symbols outside `sub`."""
    if a.signature.restrict(sub.relation_names, sub.constants) != sub:
        raise SignatureError("reduct signature must be a sub-signature")
    return Structure(
        signature=sub,
        size=a.size,
        relations={n: a.rel(n) for n in sub.relation_names},
        constants={c: a.constants[c] for c in sub.constants},
        labels=a.labels,
        order=a.order if a.order in sub.relation_names else None,
    )


def expand_with_tuple(a: Structure, abar: Sequence[int], names: Sequence[str]) -> Structure:
    """Interpret fresh constant names at the elements of abar."""
    if len(abar) != len(names):
        raise ValueError("one name per element")
    for c in names:
        if c in a.signature.constants or c in a.signature.relation_names:
            raise SignatureError(f"symbol {c!r} already in signature")
    sig = Signature(a.signature.relations, a.signature.constants + tuple(names))
    consts = dict(a.constants)
    consts.update(zip(names, abar))
    return Structure(sig, a.size, dict(a.relations), consts, a.labels, a.order)


# -- combinators ------------------------------------------------------------


@dataclass(frozen=True)
class Hooked:
    """A structure with one designated hook constant."""

    structure: Structure
    hook: str

    def __post_init__(self):
        if self.hook not in self.structure.signature.constants:
            raise SignatureError(f"hook constant {self.hook!r} missing from signature")

    @property
    def hook_element(self) -> int:
        return self.structure.constants[self.hook]


def point_expand(host: Structure, gimel: Mapping[int, Hooked]) -> tuple[Structure, dict[int, int]]:
    """Substitute every host element by its own copy of gimel(element),
    gluing at the hook.

    The result's signature is the union of the host signature and the
    component signatures minus all hooks.  Host relations are copied onto the
    hook elements, component relations are unioned, host constants move to
    the hooks of their images.  Non-hook component constants would be
    interpreted ambiguously as soon as anything is copied, so any collision
    between component constants, or with a host symbol, is rejected.

    Returns the expansion together with g, the map from each host element to
    the hook element of its component copy.  Fresh identifiers concatenate
    component blocks in host element order.
    """
    if set(gimel) != set(range(host.size)):
        raise ValueError("gimel must be total on the host universe")

    rel_arities: dict[str, int] = {n: a for n, a in host.signature.relations}
    out_constants: set[str] = set(host.signature.constants)
    for h in gimel.values():
        for n, a in h.structure.signature.relations:
            if n in out_constants:
                raise SignatureError(f"symbol {n!r} is a relation and a constant")
            if rel_arities.setdefault(n, a) != a:
                raise SignatureError(f"relation {n!r} used with two arities")
        for c in h.structure.signature.constants:
            if c == h.hook:
                continue
            if c in out_constants or c in rel_arities:
                raise SignatureError(f"constant {c!r} clashes across components")
            out_constants.add(c)

    offsets: dict[int, int] = {}
    g: dict[int, int] = {}
    labels: list[str] = []
    total = 0
    for x in range(host.size):
        comp = gimel[x].structure
        offsets[x] = total
        g[x] = total + gimel[x].hook_element
        labels.extend(f"{host.labels[x]}/{lab}" for lab in comp.labels)
        total += comp.size

    rels: dict[str, set[tuple[int, ...]]] = {n: set() for n in rel_arities}
    for x in range(host.size):
        comp = gimel[x].structure
        off = offsets[x]
        for n in comp.signature.relation_names:
            rels[n].update(tuple(e + off for e in t) for t in comp.rel(n))
    for n in host.signature.relation_names:
        rels[n].update(tuple(g[e] for e in t) for t in host.rel(n))

    consts: dict[str, int] = {}
    for x in range(host.size):
        comp = gimel[x].structure
        for c in comp.signature.constants:
            if c != gimel[x].hook:
                consts[c] = comp.constants[c] + offsets[x]
    for c in host.signature.constants:
        consts[c] = g[host.constants[c]]

    sig = Signature(
        relations=tuple(sorted(rel_arities.items())),
        constants=tuple(sorted(consts)),
    )
    expansion = Structure(
        sig, total, {n: frozenset(ts) for n, ts in rels.items()}, consts, tuple(labels)
    )
    return expansion, g


def join_at(a: Structure, x: int, b: Structure, y: int) -> Structure:
    """Glue two structures by identifying a's element x with b's element y.

    Signatures are unioned; relations are unioned; a constant interpreted on
    both sides must agree after the identification.  The identified element
    keeps index x; b's remaining elements follow a's block.
    """
    rel_arities = {n: ar for n, ar in a.signature.relations}
    for n, ar in b.signature.relations:
        if rel_arities.setdefault(n, ar) != ar:
            raise SignatureError(f"relation {n!r} used with two arities")

    def b_map(e: int) -> int:
        return x if e == y else (a.size + e - (1 if e > y else 0))

    rels: dict[str, set[tuple[int, ...]]] = {n: set() for n in rel_arities}
    for n in a.signature.relation_names:
        rels[n].update(a.rel(n))
    for n in b.signature.relation_names:
        rels[n].update(tuple(b_map(e) for e in t) for t in b.rel(n))

    consts: dict[str, int] = dict(a.constants)
    for c, e in b.constants.items():
        e2 = b_map(e)
        if c in consts and consts[c] != e2:
            raise SignatureError(f"constant {c!r} interpreted at two distinct points")
        consts[c] = e2

    labels = list(a.labels) + [lab for e, lab in enumerate(b.labels) if e != y]
    sig = Signature(tuple(sorted(rel_arities.items())), tuple(sorted(consts)))
    order = a.order or b.order
    if a.order and b.order and a.order != b.order:
        raise SignatureError("joined structures disagree on the order relation")
    return Structure(
        sig,
        a.size + b.size - 1,
        {n: frozenset(ts) for n, ts in rels.items()},
        consts,
        tuple(labels),
        order=order,
    )


# -- JSON interchange --------------------------------------------------------


def structure_to_json(s: Structure) -> dict:
    doc = {
        "signature": {
            "relations": [[n, a] for n, a in s.signature.relations],
            "constants": list(s.signature.constants),
        },
        "size": s.size,
        "relations": {n: sorted(map(list, s.rel(n))) for n in s.signature.relation_names},
        "constants": dict(s.constants),
        "labels": list(s.labels),
    }
    if s.order is not None:
        doc["order"] = s.order
    return doc


def structure_from_json(doc: dict) -> Structure:
    sig = Signature(
        relations=tuple((n, int(a)) for n, a in doc["signature"]["relations"]),
        constants=tuple(doc["signature"]["constants"]),
    )
    return Structure(
        signature=sig,
        size=int(doc["size"]),
        relations={n: frozenset(map(tuple, ts)) for n, ts in doc["relations"].items()},
        constants={c: int(e) for c, e in doc["constants"].items()},
        labels=tuple(doc.get("labels") or ()),
        order=doc.get("order"),
    )


def dump_structure(s: Structure) -> str:
    return json.dumps(structure_to_json(s), indent=2, sort_keys=True)


def load_structure(text: str) -> Structure:
    return structure_from_json(json.loads(text))
