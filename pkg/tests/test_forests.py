import random
from itertools import product

import pytest

from qslab import forests as fo
from qslab import prefixes as px


def sexp(text):
    return fo.forest_from_sexp(text)


def brute_force_embed(s1: fo.Forest, s2: fo.Forest) -> bool:
    """Independent oracle: try every label-preserving node map."""
    if s1.is_empty:
        return True
    if s2.is_empty:
        return False
    nodes1 = list(range(len(s1)))
    desc = {u: set(s2.descendants(u)) for u in range(len(s2))}
    for image in product(range(len(s2)), repeat=len(nodes1)):
        ok = True
        for v in nodes1:
            if s1.labels[v] != s2.labels[image[v]]:
                ok = False
                break
        if not ok:
            continue
        for v in nodes1:
            for w in s1.children[v]:
                if image[w] not in desc[image[v]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def test_sexp_round_trip():
    for text in ["(E)", "(E (A))", "(E (A) (E))", "(E (E)) (E (A))", ""]:
        f = sexp(text)
        assert fo.forest_to_sexp(sexp(fo.forest_to_sexp(f))) == fo.forest_to_sexp(f)


def test_sexp_errors_carry_positions():
    with pytest.raises(fo.ForestSyntaxError):
        sexp("(E (A)")
    with pytest.raises(fo.ForestSyntaxError):
        sexp("(X)")


def test_rank_and_height():
    assert sexp("(E (A (E)))").rank() == 3
    assert fo.empty_forest().rank() == 0
    assert sexp("(E)").rank() == 1


def test_perfect_binary():
    t = fo.perfect_binary("E", 2)
    assert fo.forest_to_sexp(t) == "(E (E) (A))"
    assert len(fo.perfect_binary("A", 3)) == 7


def test_words():
    f = sexp("(E (A))")
    assert f.reads_word("EA")
    assert f.words_up_to(2) == {"", "E", "A", "EA"}
    assert not fo.empty_forest().reads_word("")
    assert sexp("(E)").reads_word("")


def test_word_subset_equal_pair():
    s1 = sexp("(E (E)) (E (A))")
    s2 = sexp("(E (A) (E))")
    assert s1.words_subset(s2)
    assert s2.words_subset(s1)


def test_forest_of_examples():
    assert fo.forest_of(set()).is_empty
    assert fo.forest_to_sexp(fo.forest_of({"EA", "AE"})) == "(E (A)) (A (E))"
    only_a = fo.forest_of({"", "A"})
    assert fo.forest_to_sexp(only_a) == "(A)"
    assert only_a.words_up_to(4) == {"", "A"}


def test_embed_examples():
    path = sexp("(E (E))")
    tree = sexp("(E (A) (E))")
    w = fo.embed(path, tree)
    # the path's root goes to the tree's root, its leaf to the E child
    assert w == {path.roots[0]: tree.roots[0], 0: 1}
    assert fo.embed(tree, sexp("(E (E)) (E (A))")) is None
    assert fo.embed(tree, tree) == {v: v for v in range(len(tree))}


def test_embed_matches_brute_force():
    rng = random.Random(5)
    shapes = ["(E)", "(A)", "(E (A))", "(A (E) (E))", "(E (A) (E))",
              "(E (E)) (A)", "(A (A (E)))", "(E (E) (E))", "(E (A (A)) )"]
    for _ in range(120):
        s1 = sexp(rng.choice(shapes))
        s2 = sexp(rng.choice(shapes))
        assert (fo.embed(s1, s2) is not None) == brute_force_embed(s1, s2)


def test_embed_monotone_words():
    s1 = sexp("(E (A))")
    s2 = sexp("(E (A) (E (A)))")
    assert fo.embeds(s1, s2)
    assert s1.words_subset(s2)


def test_irreducible():
    assert fo.is_irreducible(sexp("(E (A) (E))"))
    assert not fo.is_irreducible(sexp("(E (A) (A))"))
    assert not fo.is_irreducible(sexp("(E (A) (E (A)))"))


def test_minimal_nonembeddable_subtree():
    s1 = sexp("(E (A) (E))")
    s2 = sexp("(E (E)) (E (A))")
    t = fo.minimal_nonembeddable_subtree(s1, s2)
    assert fo.forest_to_sexp(t) == "(E (A) (E))"
    with pytest.raises(ValueError):
        fo.minimal_nonembeddable_subtree(sexp("(E)"), sexp("(E (A))"))


def test_forest_of_closure_law_small():
    for n in range(1 << 6):
        universe = [p for p in px.all_prefixes(2, 1)]
        ps = {universe[i] for i in range(6) if n >> i & 1}
        f = fo.forest_of(ps)
        assert f.words_up_to(2) == px.downward_closure(ps)


def test_embed_is_reflexive_and_transitive_on_samples():
    rng = random.Random(9)
    shapes = ["(E)", "(E (A))", "(E (A) (E))", "(A (E (A)))", "(E (E)) (A)",
              "(A (A) (E))", "(E (A (E)) (E))"]
    forests = [sexp(s) for s in shapes]
    for f in forests:
        w = fo.embed(f, f)
        assert w is not None
        for v, u in w.items():
            assert f.labels[v] == f.labels[u]
        for v in range(len(f)):
            for child in f.children[v]:
                assert w[child] in f.descendants(w[v])
    for _ in range(80):
        s1, s2, s3 = (rng.choice(forests) for _ in range(3))
        if fo.embeds(s1, s2) and fo.embeds(s2, s3):
            assert fo.embeds(s1, s3)
        if fo.embeds(s1, s2):
            assert s1.words_subset(s2)
