import pytest
from hypothesis import given, strategies as st

from qslab import prefixes as px

words = st.text(alphabet="EA", max_size=6)


def test_dual_examples():
    assert px.dual("EA") == "AE"
    assert px.dual("") == ""
    assert px.dual("EEA") == "AAE"


def test_dual_rejects_bad_letters():
    with pytest.raises(px.PrefixError):
        px.dual("EX")


@given(words)
def test_dual_involution(p):
    assert px.dual(px.dual(p)) == p


@given(words, words)
def test_dual_concat(p, q):
    assert px.dual(p + q) == px.dual(p) + px.dual(q)


def test_subsequence_examples():
    assert px.is_subsequence("EA", "EEA")
    assert not px.is_subsequence("EA", "AE")
    assert px.is_subsequence("", "AAA")


@given(words, words, words)
def test_subsequence_partial_order(p, q, r):
    assert px.is_subsequence(p, p)
    if px.is_subsequence(p, q) and px.is_subsequence(q, r):
        assert px.is_subsequence(p, r)
    if px.is_subsequence(p, q) and px.is_subsequence(q, p):
        assert p == q


def test_avoid_pattern_blocks():
    assert px.avoid_pattern("EE") == ["A*", "E", "A*"]
    assert px.avoid_pattern("EA") == ["A*", "E*"]
    assert px.avoid_pattern("AEE") == ["E*", "A*", "E", "A*"]


def test_avoid_pattern_rejects_empty():
    with pytest.raises(px.PrefixError):
        px.avoid_pattern("")


def test_pattern_text_round_trip():
    pat = px.avoid_pattern("AEE")
    assert px.pattern_from_text(px.pattern_to_text(pat)) == pat


def test_downward_language_examples():
    assert px.in_downward_language("AA", px.avoid_pattern("EA"))
    assert not px.in_downward_language("EA", px.avoid_pattern("EA"))
    assert px.in_downward_language("AEA", px.avoid_pattern("EE"))


def test_downward_language_matches_subsequence_oracle():
    for p in px.all_prefixes(3, 1):
        pat = px.avoid_pattern(p)
        for q in px.all_prefixes(5):
            assert px.in_downward_language(q, pat) == (not px.is_subsequence(p, q))


def test_short_non_superwords_examples():
    assert px.short_non_superwords("E", 1) == {"", "A"}
    assert px.short_non_superwords("EA", 2) == {"", "E", "A", "EE", "AE", "AA"}
    assert px.short_non_superwords("A", 0) == {""}


@given(st.sets(words, max_size=6), st.sets(words, max_size=6))
def test_closure_union(p1, p2):
    lhs = px.downward_closure(p1 | p2)
    assert lhs == px.downward_closure(p1) | px.downward_closure(p2)
