import random
from itertools import product

import pytest

from qslab import families
from qslab.forests import forest_from_sexp, forest_to_sexp, embeds
from qslab.formulas import (
    And,
    Atom,
    EvalError,
    Exists,
    Forall,
    Formula,
    FormulaError,
    FormulaSyntaxError,
    Implies,
    NegAtom,
    Not,
    Or,
    digraph_sentence,
    evaluate,
    formula_from_sexp,
    formula_to_sexp,
    in_quantifier_class,
    is_nnf,
    prefix_sentence,
    quantifier_rank,
    quantifier_structure,
    rooted_digraph_sentence,
    to_nnf,
    to_tauplus_sentence,
    tree_sentence,
)


def test_parse_print_round_trip():
    texts = [
        "(exists x1 (and (R r x1) (U x1)))",
        "(forall x1 (or (not (R r x1)) (U x1) (U x1)))",
        "(exists x2 (and (E x2 x2) (not (= x1 x2))))",
    ]
    for text in texts:
        assert formula_to_sexp(formula_from_sexp(text)) == text


def test_parse_errors():
    with pytest.raises(FormulaSyntaxError):
        formula_from_sexp("(and)")
    with pytest.raises(FormulaSyntaxError):
        formula_from_sexp("(exists x1 (U x1)")
    with pytest.raises(FormulaSyntaxError):
        formula_from_sexp("(U x) garbage")


def test_to_nnf():
    assert to_nnf(Not(Exists("x", Atom("U", ("x",))))) == Forall("x", NegAtom("U", ("x",)))
    assert to_nnf(Implies(Atom("U", ("x",)), Atom("V", ("x",)))) == Or(
        (NegAtom("U", ("x",)), Atom("V", ("x",)))
    )
    assert is_nnf(to_nnf(Not(And((Atom("U", ("x",)), Not(Atom("V", ("x",))))))))


def test_eval_examples():
    a = families.build_prefix_structure("E", 1, "A")
    b = families.build_prefix_structure("E", 1, "B")
    some_black = formula_from_sexp("(exists x (U x))")
    assert not evaluate(b, some_black)
    reachable_black = formula_from_sexp("(exists x (and (R r x) (U x)))")
    assert evaluate(a, reachable_black)
    assert evaluate(a, formula_from_sexp("(forall x (= x x))"))
    with pytest.raises(EvalError):
        evaluate(a, formula_from_sexp("(U y)"))


def test_quantifier_structure():
    assert quantifier_structure(Atom("U", ("x",))).is_empty
    phi = prefix_sentence("EE")
    assert forest_to_sexp(quantifier_structure(phi)) == "(E (E) (E))"
    for n in range(1, 5):
        for p in map("".join, product("EA", repeat=n)):
            shape = quantifier_structure(prefix_sentence(p))
            assert quantifier_rank(prefix_sentence(p)) == len(p)
            assert shape.maximal_path_words() == {p}


def test_in_quantifier_class_transitive():
    phi = prefix_sentence("EA")
    s = quantifier_structure(phi)
    wider = forest_from_sexp("(E (A (A)))")
    assert in_quantifier_class(phi, s)
    assert embeds(s, wider)
    assert in_quantifier_class(phi, wider)


def test_prefix_sentence_base_cases():
    assert formula_to_sexp(prefix_sentence("E")) == (
        "(exists x1 (and (R r x1) (U x1) (U x1)))"
    )
    assert formula_to_sexp(prefix_sentence("A")) == (
        "(forall x1 (or (not (R r x1)) (U x1) (U x1)))"
    )


def test_rooted_digraph_sentence_display():
    want = (
        "(exists x2 (and (E x2 x2)"
        " (exists x1 (and (E x2 x1) (E x1 x2) (E x1 x1)))"
        " (exists x1 (and (E x1 x2) (E x2 x1) (not (E x1 x1))))))"
    )
    assert formula_to_sexp(rooted_digraph_sentence("EE")) == want
    assert "r" in formula_to_sexp(rooted_digraph_sentence("EEE"))
    with pytest.raises(FormulaError):
        rooted_digraph_sentence("")


def test_digraph_sentence_is_rootless_and_shaped():
    for n in (1, 2, 3):
        for p in map("".join, product("EA", repeat=n)):
            phi = digraph_sentence(p)
            assert "r" not in formula_to_sexp(phi).split()
            shape = quantifier_structure(phi)
            assert embeds(shape, forest_from_sexp(_path_sexp(p)))


def _path_sexp(p):
    out = ""
    for letter in reversed(p):
        out = f"({letter} {out})" if out else f"({letter})"
    return out


def test_tree_sentence_matches_prefix_on_single_node():
    t = forest_from_sexp("(E)")
    assert formula_to_sexp(tree_sentence(t)) == formula_to_sexp(prefix_sentence("E"))


def test_tree_sentence_shape_is_seed():
    t = forest_from_sexp("(E (A) (E))")
    phi = tree_sentence(t)
    assert forest_to_sexp(quantifier_structure(phi)) == forest_to_sexp(t)
    with pytest.raises(FormulaError):
        tree_sentence(forest_from_sexp("(E (A) (A))"))


def test_translation_preserves_quantifier_structure():
    rng = random.Random(2)
    from qslab.suites import _sentence_sampler

    for _ in range(40):
        z = _sentence_sampler(rng)
        assert forest_to_sexp(quantifier_structure(to_tauplus_sentence(z))) == forest_to_sexp(
            quantifier_structure(z)
        )


def test_translation_rejects_foreign_relations():
    with pytest.raises(FormulaError):
        to_tauplus_sentence(Atom("R", ("x", "y")))


def test_quantifier_structure_distribution_laws():
    from qslab.formulas import And, Or, Exists, Atom

    phi = prefix_sentence("EA")
    psi = prefix_sentence("AE")
    both = quantifier_structure(And((phi, psi)))
    assert len(both) == len(quantifier_structure(phi)) + len(quantifier_structure(psi))
    assert len(both.roots) == 2
    assert len(quantifier_structure(Or((phi, psi))).roots) == 2
    wrapped = quantifier_structure(Exists("z", And((phi, Atom("U", ("z",))))))
    assert len(wrapped.roots) == 1


def test_family_formulas_round_trip_as_objects():
    for phi in [
        prefix_sentence("EA"),
        prefix_sentence("EA", neg=True),
        rooted_digraph_sentence("EE"),
        digraph_sentence("EEA"),
        tree_sentence(forest_from_sexp("(E (A) (E))")),
    ]:
        assert formula_from_sexp(formula_to_sexp(phi)) == phi
