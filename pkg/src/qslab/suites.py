"""Batch verification suites: the acceptance grids behind `qslab verify`.

Each suite is a list of named claims evaluated to a boolean verdict.  The
shipped parameter grids are the acceptance contract; `--max-prefix-len`,
`--m` and `--budget` can shrink or grow them for exploration.  Suites are
deterministic: sampling uses fixed seeds, and any spoiler verdict also runs
the distinguisher synthesizer and checks its three postconditions.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

from . import families, forests, formulas, game, ordered_strategy, prefixes
from .forests import Forest, embed, embeds, forest_from_sexp, forest_of
from .formulas import (
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    NegAtom,
    Neq,
    Or,
    evaluate,
    in_quantifier_class,
    quantifier_structure,
    to_tauplus_sentence,
    tree_sentence,
)
from .game import (
    DUPLICATOR,
    SPOILER,
    BudgetExceeded,
    classic_ef,
    solve,
    synthesize_distinguisher,
    verify_certificate,
)
from .structures import Structure, linear_order, partial_iso


@dataclass
class Row:
    claim: str
    params: str
    passed: bool
    seconds: float
    note: str = ""


@dataclass
class SuiteReport:
    suite: str
    rows: list[Row] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def lines(self) -> list[str]:
        out = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'}"]
        for r in self.rows:
            status = "pass" if r.passed else "FAIL"
            note = f"  [{r.note}]" if r.note else ""
            out.append(f"  {status}  {r.claim}  ({r.params})  {r.seconds:.2f}s{note}")
        return out


def _run(report: SuiteReport, claim: str, params: str, check: Callable[[], bool], note: str = ""):
    t0 = time.perf_counter()
    try:
        ok = bool(check())
        extra = note
    except BudgetExceeded as e:
        raise
    except Exception as e:  # a crashed claim is a failed claim, with the reason
        ok = False
        extra = f"{type(e).__name__}: {e}"
    report.rows.append(Row(claim, params, ok, time.perf_counter() - t0, extra))


def _prefix_grid(max_len: int) -> list[str]:
    return [p for n in range(1, max_len + 1) for p in map("".join, product("EA", repeat=n))]


def _spoiler_with_sound_synthesis(board: Forest, a: Structure, b: Structure, budget: int) -> bool:
    out = solve(board, a, b, budget=budget)
    if out.winner != SPOILER:
        return False
    if not verify_certificate(board, a, b, out):
        return False
    phi = synthesize_distinguisher(board, a, b, budget=budget)
    return in_quantifier_class(phi, board) and evaluate(a, phi) and not evaluate(b, phi)


def _duplicator_with_replay(board: Forest, a: Structure, b: Structure, budget: int) -> bool:
    out = solve(board, a, b, budget=budget)
    return out.winner == DUPLICATOR and verify_certificate(board, a, b, out)


# -- the forest-law suite -----------------------------------------------------


def forest_suite(max_len: int = 4, m_max: int = 2, budget: int = 0) -> SuiteReport:
    rep = SuiteReport("forest")
    rng = random.Random(20260809)

    def closure_words_match(ps: set[str]) -> bool:
        f = forest_of(ps)
        want = {w for w in prefixes.downward_closure(ps) if len(w) <= 4}
        return f.words_up_to(4) == want

    def exhaustive_small() -> bool:
        universe = [p for p in prefixes.all_prefixes(2, 1)]
        for mask in range(1 << len(universe)):
            ps = {universe[i] for i in range(len(universe)) if mask >> i & 1}
            if not closure_words_match(ps):
                return False
        return True

    def sampled_large() -> bool:
        universe = [p for p in prefixes.all_prefixes(4, 1)]
        for _ in range(200):
            ps = set(rng.sample(universe, rng.randint(0, 8)))
            if not closure_words_match(ps):
                return False
        return forests.forest_of({""}).is_empty

    _run(rep, "read-off words of the canonical forest equal the closure",
         "all word sets over length <= 2, 200 sampled over length <= 4",
         lambda: exhaustive_small() and sampled_large())

    def random_forest(max_nodes: int) -> Forest:
        f = forests.empty_forest()
        for _ in range(rng.randint(1, max_nodes)):
            trees = f.trees()
            rng.shuffle(trees)
            keep = trees[: rng.randint(0, len(trees))]
            rest = [t for t in trees if t not in keep]
            new = forests.tree_over(rng.choice("EA"), forests.union(keep))
            f = forests.union(rest + [new])
            if len(f) >= max_nodes:
                break
        return f

    def words_to_embedding() -> bool:
        hits = 0
        for _ in range(250):
            s = random_forest(6)
            ps = set(s.maximal_path_words())
            extra = rng.sample([p for p in prefixes.all_prefixes(4, 1)], rng.randint(0, 4))
            ps |= set(extra)
            closure = prefixes.downward_closure(ps)
            if set(s.words_up_to(6)) <= closure:
                hits += 1
                if not embeds(s, forest_of(ps)):
                    return False
        return hits > 100

    _run(rep, "forests whose words lie in a closure embed in its canonical forest",
         "250 sampled forests of <= 6 nodes", words_to_embedding)

    def avoider_law() -> bool:
        for p in _prefix_grid(3):
            pat = prefixes.avoid_pattern(p)
            for q in prefixes.all_prefixes(5):
                if prefixes.in_downward_language(q, pat) == prefixes.is_subsequence(p, q):
                    return False
        return True

    _run(rep, "the avoider pattern denotes exactly the non-superwords",
         "all |p| <= 3 against all |q| <= 5", avoider_law)

    def dual_pattern_law() -> bool:
        swap = {"E": "A", "A": "E", "E*": "A*", "A*": "E*"}
        for p in _prefix_grid(4):
            lhs = prefixes.avoid_pattern(p)
            rhs = [swap[a] for a in prefixes.avoid_pattern(prefixes.dual(p))]
            if lhs != rhs:
                return False
        return True

    _run(rep, "avoider patterns of dual prefixes are atomwise duals", "all |p| <= 4",
         dual_pattern_law)

    def concat_dual_law() -> bool:
        for p in prefixes.all_prefixes(3):
            if prefixes.dual(prefixes.dual(p)) != p:
                return False
            for q in prefixes.all_prefixes(3):
                if prefixes.dual(p + q) != prefixes.dual(p) + prefixes.dual(q):
                    return False
        return True

    _run(rep, "duals are involutive and distribute over concatenation",
         "all |p|,|q| <= 3", concat_dual_law)

    def closure_union_law() -> bool:
        universe = [p for p in prefixes.all_prefixes(4)]
        for _ in range(200):
            p1 = set(rng.sample(universe, rng.randint(0, 6)))
            p2 = set(rng.sample(universe, rng.randint(0, 6)))
            lhs = prefixes.downward_closure(p1 | p2)
            rhs = prefixes.downward_closure(p1) | prefixes.downward_closure(p2)
            if lhs != rhs:
                return False
        return True

    _run(rep, "downward closure distributes over union", "200 sampled pairs",
         closure_union_law)
    return rep


# -- the colored-tree suite ---------------------------------------------------


def tauplus_suite(max_len: int = 3, m_max: int = 2, budget: int = game.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("tauplus")
    for p in _prefix_grid(max_len):
        for m in range(1, m_max + 1):
            a = families.build_prefix_structure(p, m, "A")
            b = families.build_prefix_structure(p, m, "B")
            phi = formulas.prefix_sentence(p)
            _run(rep, "separating sentence true on A and false on B",
                 f"p={p} m={m}", lambda a=a, b=b, phi=phi: evaluate(a, phi) and not evaluate(b, phi))
            _run(rep, "swapped-color sentence tracks swapped-color structures",
                 f"p={p} m={m}",
                 lambda a=a, p=p: evaluate(a, formulas.prefix_sentence(p))
                 == evaluate(families.swap_colors(a), formulas.prefix_sentence(p, neg=True)))
    grid = [(p, m) for p in _prefix_grid(min(2, max_len)) for m in range(1, m_max + 1)]
    if max_len >= 3:
        grid += [(p, 1) for p in map("".join, product("EA", repeat=3))]
    for p, m in grid:
        a = families.build_prefix_structure(p, m, "A")
        b = families.build_prefix_structure(p, m, "B")
        fam = forest_of(prefixes.short_non_superwords(p, m))
        _run(rep, "duplicator survives the avoider-forest game",
             f"p={p} m={m}", lambda f=fam, a=a, b=b: _duplicator_with_replay(f, a, b, budget))
        board = quantifier_structure(formulas.prefix_sentence(p))
        _run(rep, "spoiler wins on the sentence's own shape, with sound synthesis",
             f"p={p} m={m}", lambda f=board, a=a, b=b: _spoiler_with_sound_synthesis(f, a, b, budget))
    return rep


# -- the digraph suite --------------------------------------------------------


def _sentence_sampler(rng: random.Random) -> Formula:
    """A random rank <= 2 sentence over the edge signature."""
    x, y = "v1", "v2"
    atoms = [
        Atom("E", (x, y)), Atom("E", (y, x)), Atom("E", (x, x)), Atom("E", (y, y)),
        Eq(x, y),
    ]

    def literal() -> Formula:
        a = rng.choice(atoms)
        if rng.random() < 0.5:
            if isinstance(a, Atom):
                return NegAtom(a.rel, a.args)
            return Neq(a.left, a.right)
        return a

    def clause() -> Formula:
        lits = [literal() for _ in range(rng.randint(1, 3))]
        return lits[0] if len(lits) == 1 else Or(tuple(lits))

    matrix_parts = [clause() for _ in range(rng.randint(1, 3))]
    matrix = matrix_parts[0] if len(matrix_parts) == 1 else And(tuple(matrix_parts))
    inner = Exists(y, matrix) if rng.random() < 0.5 else Forall(y, matrix)
    return Exists(x, inner) if rng.random() < 0.5 else Forall(x, inner)


def tau_suite(max_len: int = 3, m_max: int = 2, budget: int = game.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("tau")
    for p in _prefix_grid(max_len):
        for m in range(1, m_max + 1):
            a = families.reduce_to_tau(families.build_prefix_structure(p, m, "A"))
            b = families.reduce_to_tau(families.build_prefix_structure(p, m, "B"))
            phi = formulas.digraph_sentence(p)
            _run(rep, "digraph sentence true on A and false on B",
                 f"p={p} m={m}", lambda a=a, b=b, phi=phi: evaluate(a, phi) and not evaluate(b, phi))

    # the two-quantifier watershed instance on the reduced digraphs
    a2 = families.reduce_to_tau(families.build_prefix_structure("EA", 2, "A"))
    b2 = families.reduce_to_tau(families.build_prefix_structure("EA", 2, "B"))
    s1 = quantifier_structure(formulas.prefix_sentence("EA"))
    s2 = forest_of(prefixes.short_non_superwords("EA", 2))
    _run(rep, "spoiler wins the sentence-shape game on the reduced digraphs",
         "p=EA m=2", lambda: _spoiler_with_sound_synthesis(s1, a2, b2, budget))
    _run(rep, "duplicator wins the avoider-shape game on the reduced digraphs",
         "p=EA m=2", lambda: _duplicator_with_replay(s2, a2, b2, budget))

    def qs_preserved() -> bool:
        rng = random.Random(7)
        for _ in range(30):
            z = _sentence_sampler(rng)
            lhs = forests.forest_to_sexp(quantifier_structure(to_tauplus_sentence(z)))
            rhs = forests.forest_to_sexp(quantifier_structure(z))
            if lhs != rhs:
                return False
        return True

    _run(rep, "lifting a digraph sentence preserves its quantifier structure",
         "30 sampled sentences", qs_preserved)

    def roundtrip(p: str, m: int, count: int) -> bool:
        at = families.build_prefix_structure(p, m, "A")
        bt = families.build_prefix_structure(p, m, "B")
        ar = families.reduce_to_tau(at)
        br = families.reduce_to_tau(bt)
        rng = random.Random(0)
        for _ in range(count):
            z = _sentence_sampler(rng)
            xi = to_tauplus_sentence(z)
            if evaluate(ar, z) != evaluate(at, xi):
                return False
            if evaluate(br, z) != evaluate(bt, xi):
                return False
        return True

    _run(rep, "lifted sentences round-trip truth on a depth-3 instance",
         "p=EEA m=1, 20 sampled sentences", lambda: roundtrip("EEA", 1, 20))
    _run(rep, "lifted sentences round-trip truth on the depth-2 instance",
         "p=EA m=2, 20 sampled sentences", lambda: roundtrip("EA", 2, 20),
         note="the depth-2 mark encoding is not atomwise definable; see ledger")

    def pointwise_exact(p: str, m: int) -> bool:
        at = families.build_prefix_structure(p, m, "A")
        ar = families.reduce_to_tau(at)
        root = at.constants["r"]
        back = [x for x in range(at.size) if x != root]
        xi = to_tauplus_sentence(Atom("E", ("u", "v")))
        for i, x in enumerate(back):
            for j, y in enumerate(back):
                if evaluate(at, xi, {"u": x, "v": y}) != ar.holds("E", (i, j)):
                    return False
        return True

    _run(rep, "the edge replacement is pointwise exact on deep structures",
         "p=EEA m=1 and p=AAA m=1",
         lambda: pointwise_exact("EEA", 1) and pointwise_exact("AAA", 1))
    return rep


# -- the ordered suite --------------------------------------------------------


def ordered_suite(max_len: int = 2, m_max: int = 2, budget: int = game.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("ordered")
    grid = [("E", 1), ("A", 1), ("E", 2), ("A", 2)]
    if max_len >= 2:
        grid += [(p, 1) for p in map("".join, product("EA", repeat=2))]
    for p, m in grid:
        a = families.build_ordered_structure(p, m, "A")
        b = families.build_ordered_structure(p, m, "B")
        fam = forest_of(prefixes.short_non_superwords(p, m))
        _run(rep, "duplicator survives the avoider-forest game on ordered builds",
             f"p={p} m={m}", lambda f=fam, a=a, b=b: _duplicator_with_replay(f, a, b, budget))
        _run(rep, "the scripted duplicator replays without loss and preserves order",
             f"p={p} m={m}", lambda f=fam, a=a, b=b: _scripted_ok(f, a, b))
        _run(rep, "block order puts swapped halves first",
             f"p={p} m={m}", lambda a=a, b=b: _block_order_ok(a) and _block_order_ok(b))
    return rep


def _scripted_ok(board: Forest, a: Structure, b: Structure) -> bool:
    dup = ordered_strategy.ScriptedDuplicator(a, b)
    solver = game.GameSolver(board, a, b)
    xs0, ys0 = solver._base_tuples()

    def walk(node: int, history: list, xs, ys) -> bool:
        exists_node = board.labels[node] == "E"
        n = a.size if exists_node else b.size
        for pick in range(n):
            ans = dup.reply(history, pick, pick_in_left=exists_node)
            c, d = (pick, ans) if exists_node else (ans, pick)
            if not solver.extend_ok(xs, ys, c, d):
                return False
            pairs = history + [(c, d)]
            if not ordered_strategy.order_preserving(a, b, pairs):
                return False
            for w in board.children[node]:
                if not walk(w, pairs, xs + (c,), ys + (d,)):
                    return False
        return True

    return all(walk(r, [], xs0, ys0) for r in board.roots)


def _block_order_ok(s: Structure) -> bool:
    view = ordered_strategy.TreeView(s)
    for (father, color), row in view.rows.items():
        if color != "B":
            continue
        reds = view.rows.get((father, "R"))
        if reds is None:
            continue
        blue_max = max(view.position[v] for v in row.nodes)
        red_min = min(view.position[v] for v in reds.nodes)
        if blue_max > red_min:
            return False
    return True


# -- the refined suite --------------------------------------------------------


def refined_suite(max_len: int = 0, m_max: int = 1, budget: int = game.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("refined")
    s1 = forest_from_sexp("(E (A) (E))")
    s2 = forest_from_sexp("(E (E)) (E (A))")
    _run(rep, "the two shapes read the same words", "S1=(E (A) (E)), S2=[(E (E)),(E (A))]",
         lambda: s1.words_subset(s2) and s2.words_subset(s1))
    _run(rep, "yet the tree does not embed in the pair", "same shapes",
         lambda: embed(s1, s2) is None)
    tmin = forests.minimal_nonembeddable_subtree(s1, s2)
    _run(rep, "the minimal nonembeddable subtree is the tree itself, irreducible",
         "same shapes",
         lambda: forests.forest_to_sexp(tmin) == forests.forest_to_sexp(s1)
         and forests.is_irreducible(tmin))
    at = families.build_tree_structure(tmin, 1, "A")
    bt = families.build_tree_structure(tmin, 1, "B")
    phi = tree_sentence(tmin)
    _run(rep, "tree sentence true on A and false on B", "t=(E (A) (E)) m=1",
         lambda: evaluate(at, phi) and not evaluate(bt, phi))
    _run(rep, "the sentence's shape is the seed tree", "t=(E (A) (E))",
         lambda: forests.forest_to_sexp(quantifier_structure(phi)) == forests.forest_to_sexp(s1))
    _run(rep, "duplicator survives the word-equal pair shape", "S2, m=1",
         lambda: _duplicator_with_replay(s2, at, bt, budget))
    _run(rep, "spoiler wins the tree shape, with sound synthesis", "S1, m=1",
         lambda: _spoiler_with_sound_synthesis(s1, at, bt, budget))

    def all_small_trees() -> bool:
        for t in _irreducible_trees(4):
            a = families.build_tree_structure(t, 1, "A")
            b = families.build_tree_structure(t, 1, "B")
            f = tree_sentence(t)
            if not (evaluate(a, f) and not evaluate(b, f)):
                return False
        return True

    _run(rep, "tree sentences separate for every irreducible tree of <= 4 nodes",
         "m=1", all_small_trees)
    return rep


def _irreducible_trees(max_nodes: int) -> list[Forest]:
    by_size: dict[int, list[Forest]] = {1: [forests.single_node("E"), forests.single_node("A")]}
    for n in range(2, max_nodes + 1):
        out = []
        for label in "EA":
            for split in _forest_combos(n - 1, by_size):
                out.append(forests.tree_over(label, split))
        by_size[n] = out
    seen: dict[str, Forest] = {}
    for n, ts in by_size.items():
        for t in ts:
            if forests.is_irreducible(t):
                seen.setdefault(forests.forest_to_sexp(t), t)
    return list(seen.values())


def _forest_combos(total: int, by_size: dict[int, list[Forest]]) -> list[Forest]:
    if total == 0:
        return [forests.empty_forest()]
    out = []
    for first in range(1, total + 1):
        if first not in by_size:
            continue
        for head in by_size[first]:
            for rest in _forest_combos(total - first, by_size):
                out.append(forests.union([head, rest]))
    return out


# -- the classic suite --------------------------------------------------------


def _oracle_classic(n: int, a: Structure, b: Structure) -> str:
    """Independent round-based back-and-forth check: straight recursion on
    the definition, no boards, no memo, no bitmasks."""

    def spoiler_wins(abar: tuple, bbar: tuple, rounds: int) -> bool:
        if not partial_iso(a, abar, b, bbar):
            return True
        if rounds == 0:
            return False
        in_a = any(
            all(spoiler_wins(abar + (c,), bbar + (d,), rounds - 1) for d in range(b.size))
            for c in range(a.size)
        )
        if in_a:
            return True
        return any(
            all(spoiler_wins(abar + (c,), bbar + (d,), rounds - 1) for c in range(a.size))
            for d in range(b.size)
        )

    return SPOILER if spoiler_wins((), (), n) else DUPLICATOR


def classic_suite(max_len: int = 3, m_max: int = 6, budget: int = game.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("classic")
    for k in (1, 2, 3):
        lengths = [2 ** k, 2 ** k + 1, 2 ** k + 3]
        for mm, nn in product(lengths, lengths):
            _run(rep, "long enough orders are indistinguishable",
                 f"k={k} |L1|={mm} |L2|={nn}",
                 lambda k=k, mm=mm, nn=nn: classic_ef(
                     k, linear_order(mm), linear_order(nn), budget=budget
                 ).winner == DUPLICATOR)

    def agrees_with_oracle() -> bool:
        for k in (1, 2, 3):
            for mm in range(1, m_max + 1):
                for nn in range(1, m_max + 1):
                    got = classic_ef(k, linear_order(mm), linear_order(nn), budget=budget)
                    if got.winner != _oracle_classic(k, linear_order(mm), linear_order(nn)):
                        return False
                    if got.winner == SPOILER:
                        board = forests.union(
                            [forests.perfect_binary("E", k), forests.perfect_binary("A", k)]
                        )
                        if not _spoiler_with_sound_synthesis(
                            board, linear_order(mm), linear_order(nn), budget
                        ):
                            return False
        return True

    _run(rep, "the solver agrees with a memo-free oracle, spoiler wins synthesized",
         f"k <= 3, orders up to {m_max}", agrees_with_oracle)
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "forest": forest_suite,
    "tauplus": tauplus_suite,
    "tau": tau_suite,
    "ordered": ordered_suite,
    "refined": refined_suite,
    "classic": classic_suite,
}


def run_suite(name: str, max_prefix_len: Optional[int] = None, m: Optional[int] = None,
              budget: Optional[int] = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    kwargs = {}
    if max_prefix_len is not None:
        kwargs["max_len"] = max_prefix_len
    if m is not None:
        kwargs["m_max"] = m
    if budget is not None:
        kwargs["budget"] = budget
    return SUITES[name](**kwargs)
