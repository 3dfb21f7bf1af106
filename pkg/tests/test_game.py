import random

import pytest

from qslab import families as fam
from qslab.forests import (
    embeds,
    empty_forest,
    forest_from_sexp,
    tree_over,
    union,
)
from qslab.formulas import evaluate, in_quantifier_class, prefix_sentence, quantifier_structure
from qslab.game import (
    BudgetExceeded,
    DUPLICATOR,
    SPOILER,
    classic_ef,
    solve,
    synthesize_distinguisher,
    verify_certificate,
)
from qslab.prefixes import short_non_superwords
from qslab.structures import Hooked, Signature, Structure, linear_order, point_expand
from qslab.forests import forest_of

SIG1 = Signature(relations=(("E", 2),), constants=())


def digraph(n, arcs):
    return Structure(SIG1, n, {"E": frozenset(arcs)}, {})


def sexp(text):
    return forest_from_sexp(text)


A1 = fam.build_prefix_structure("E", 1, "A")
B1 = fam.build_prefix_structure("E", 1, "B")


def test_single_round_examples():
    assert solve(sexp("(E)"), A1, B1).winner == SPOILER
    assert solve(sexp("(A)"), A1, B1).winner == DUPLICATOR
    assert solve(empty_forest(), A1, B1).winner == DUPLICATOR


def test_round_zero_decides_empty_board():
    one = Structure(Signature((), ("c",)), 2, {}, {"c": 0})
    other = Structure(Signature((), ("c",)), 2, {}, {"c": 1})
    assert solve(empty_forest(), one, other).winner == DUPLICATOR
    loop = Structure(Signature((("E", 2),), ("c",)), 1, {"E": {(0, 0)}}, {"c": 0})
    bare = Structure(Signature((("E", 2),), ("c",)), 1, {"E": frozenset()}, {"c": 0})
    assert solve(empty_forest(), loop, bare).winner == SPOILER


def test_initial_tuples():
    black = next(x for (x,) in A1.rel("U"))
    assert solve(empty_forest(), A1, B1, (black,), (1,)).winner == SPOILER
    assert solve(sexp("(A)"), A1, B1, (1,), (1,)).winner == DUPLICATOR


def test_certificates_replay():
    for board in [sexp("(E)"), sexp("(A)"), sexp("(E (E)) (A (E) (A))")]:
        out = solve(board, A1, B1)
        assert verify_certificate(board, A1, B1, out)


def test_certificate_rejects_wrong_winner():
    board = sexp("(E)")
    out = solve(board, A1, B1)
    from qslab.game import GameOutcome

    forged = GameOutcome(DUPLICATOR, {"kind": "duplicator", "trees": {}}, 0)
    assert not verify_certificate(board, A1, B1, forged)


def test_classic_examples():
    assert classic_ef(2, linear_order(4), linear_order(5)).winner == DUPLICATOR
    assert classic_ef(2, linear_order(2), linear_order(4)).winner == SPOILER
    assert classic_ef(1, linear_order(3), linear_order(3)).winner == DUPLICATOR


def test_budget_is_reported_distinctly():
    a = fam.build_prefix_structure("EE", 1, "A")
    b = fam.build_prefix_structure("EE", 1, "B")
    with pytest.raises(BudgetExceeded):
        solve(sexp("(E (E) (E))"), a, b, budget=3)


def test_synthesize_examples():
    phi = synthesize_distinguisher(sexp("(E)"), A1, B1)
    assert in_quantifier_class(phi, sexp("(E)"))
    assert evaluate(A1, phi) and not evaluate(B1, phi)
    with pytest.raises(ValueError):
        synthesize_distinguisher(sexp("(E)"), A1, A1)


def test_synthesize_on_family_boards():
    for p, m in [("E", 1), ("A", 1), ("EA", 1), ("EE", 1)]:
        a = fam.build_prefix_structure(p, m, "A")
        b = fam.build_prefix_structure(p, m, "B")
        board = quantifier_structure(prefix_sentence(p))
        phi = synthesize_distinguisher(board, a, b)
        assert in_quantifier_class(phi, board)
        assert evaluate(a, phi) and not evaluate(b, phi)


def random_forest(rng, max_nodes):
    f = empty_forest()
    while len(f) < max_nodes:
        trees = f.trees()
        rng.shuffle(trees)
        keep = trees[: rng.randint(0, len(trees))]
        rest = [t for t in trees if t not in keep]
        f = union(rest + [tree_over(rng.choice("EA"), union(keep))])
        if rng.random() < 0.4:
            break
    return f


def random_structure(rng, max_n):
    n = rng.randint(1, max_n)
    arcs = {(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n * 2))}
    return digraph(n, arcs)


def test_monotone_in_the_board():
    rng = random.Random(23)
    checked = 0
    while checked < 40:
        s = random_forest(rng, 5)
        s_small = random_forest(rng, 4)
        if s.is_empty or s_small.is_empty or not embeds(s_small, s):
            continue
        a = random_structure(rng, 5)
        b = random_structure(rng, 5)
        if solve(s, a, b).winner == DUPLICATOR:
            assert solve(s_small, a, b).winner == DUPLICATOR
            checked += 1


def test_swapped_color_symmetry():
    for p in ["E", "A", "EE", "EA"]:
        a = fam.build_prefix_structure(p, 1, "A")
        b = fam.build_prefix_structure(p, 1, "B")
        for board in [sexp("(E)"), sexp("(A (E))"), quantifier_structure(prefix_sentence(p))]:
            lhs = solve(board, a, b).winner
            rhs = solve(board, fam.swap_colors(a), fam.swap_colors(b)).winner
            assert lhs == rhs


def hooked_point_family():
    sig = Signature((("E", 2),), ("h",))
    def mk(arcs, n):
        return Hooked(Structure(sig, n, {"E": frozenset(arcs)}, {"h": 0}), "h")
    return mk


def test_join_respects_automorphisms():
    # a two-point symmetric host joined with game-equivalent partners
    host = digraph(2, set())
    mk = hooked_point_family()
    b = mk({(0, 1)}, 3)       # hook -> chain of one arc
    b2 = mk({(0, 1)}, 3)      # an isomorphic partner
    board = sexp("(E (A))")
    assert solve(board, b.structure, b2.structure).winner == DUPLICATOR
    from qslab.structures import join_at

    lhs = join_at(host, 0, b.structure, 0)
    rhs = join_at(host, 1, b2.structure, 0)
    assert solve(board, lhs, rhs).winner == DUPLICATOR


def test_strategy_composition_through_expansion():
    # components that the duplicator survives compose over a shared host
    mk = hooked_point_family()
    comp_a = mk({(0, 1), (1, 0)}, 3)
    comp_b = mk({(0, 2), (2, 0)}, 3)
    board = sexp("(E (A))")
    assert solve(board, comp_a.structure, comp_b.structure).winner == DUPLICATOR
    host = digraph(2, {(0, 1)})
    ea, _ = point_expand(host, {0: comp_a, 1: comp_a})
    eb, _ = point_expand(host, {0: comp_b, 1: comp_b})
    assert solve(board, ea, eb).winner == DUPLICATOR


def test_duplicator_win_transfers_to_sampled_sentences():
    # completeness at desk scale: a duplicator win on the avoider forest
    # means no sampled sentence of that shape separates the pair
    rng = random.Random(4)
    a = fam.build_prefix_structure("EA", 1, "A")
    b = fam.build_prefix_structure("EA", 1, "B")
    board = forest_of(short_non_superwords("EA", 1))
    assert solve(board, a, b).winner == DUPLICATOR
    from qslab.formulas import And, Atom, Exists, Forall, NegAtom, Or

    atoms = ["R", "B"]
    def rand_matrix(v1, v2):
        lits = []
        for _ in range(rng.randint(1, 3)):
            rel = rng.choice(atoms)
            args = (v1, v2) if rng.random() < 0.5 else (v2, v1)
            lit = Atom(rel, args)
            lits.append(lit if rng.random() < 0.5 else NegAtom(rel, args))
        return lits[0] if len(lits) == 1 else Or(tuple(lits))

    for _ in range(60):
        body = rand_matrix("v1", "v2")
        inner = Exists("v2", body) if rng.random() < 0.5 else Forall("v2", body)
        phi = Exists("v1", And((Atom("R", ("r", "v1")), inner)))
        if in_quantifier_class(phi, board) and evaluate(a, phi):
            assert evaluate(b, phi)
