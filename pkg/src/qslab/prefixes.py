"""Quantifier prefixes: words over {E, A} and their subsequence order.

A prefix is a finite word whose letters are the two quantifier symbols,
written ``E`` (exists) and ``A`` (forall) in every external format.  The
module provides the subsequence partial order, duals, the avoider pattern
``avoid_pattern(p)`` (a word over {E, A, E*, A*} read as a regular
expression whose downward-closed language is exactly the set of words that
do *not* contain ``p`` as a subsequence), and the bounded enumeration
``short_non_superwords`` built on top of it.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator

EXISTS = "E"
FORALL = "A"
ALPHABET = (EXISTS, FORALL)

# Atoms of an avoider pattern: a bare letter matches exactly one occurrence,
# a starred letter matches any finite run (possibly empty) of that letter.
STARRED = {"E*": EXISTS, "A*": FORALL}


class PrefixError(ValueError):
    """Raised for words containing letters outside {E, A}."""


def check_prefix(p: str) -> str:
    for ch in p:
        if ch not in ALPHABET:
            raise PrefixError(f"invalid quantifier letter {ch!r} in {p!r}")
    return p


def dual(p: str) -> str:
    """Swap E with A letterwise."""
    check_prefix(p)
    return p.translate(str.maketrans("EA", "AE"))


def is_subsequence(p: str, q: str) -> bool:
    """True iff p can be obtained from q by deleting letters (order kept)."""
    check_prefix(p)
    check_prefix(q)
    it = iter(q)
    return all(ch in it for ch in p)


def all_prefixes(max_len: int, min_len: int = 0) -> Iterator[str]:
    """All words over {E, A} with min_len <= length <= max_len, short first."""
    for n in range(min_len, max_len + 1):
        for letters in product(ALPHABET, repeat=n):
            yield "".join(letters)


def downward_closure(words: Iterable[str]) -> set[str]:
    """All subsequences of the given words (including the words themselves)."""
    out: set[str] = set()
    for w in words:
        check_prefix(w)
        _subsequences_into(w, out)
    return out


def _subsequences_into(w: str, out: set[str]) -> None:
    # Subset enumeration is fine at the word lengths this laboratory uses.
    n = len(w)
    for mask in range(1 << n):
        out.add("".join(w[i] for i in range(n) if mask >> i & 1))


def alternating_blocks(p: str) -> list[tuple[str, int]]:
    """Maximal runs of equal letters, as (letter, run length) pairs."""
    check_prefix(p)
    blocks: list[tuple[str, int]] = []
    for ch in p:
        if blocks and blocks[-1][0] == ch:
            blocks[-1] = (ch, blocks[-1][1] + 1)
        else:
            blocks.append((ch, 1))
    return blocks


def avoid_pattern(p: str) -> list[str]:
    """The avoider pattern of a non-empty prefix p.

    For a homogeneous block s^n the pattern alternates a starred dual letter
    with n-1 bare occurrences of s, starting and ending starred:

        E^n  ->  A* E A* E ... E A*      (2n-1 atoms)
        A^n  ->  E* A E* A ... A E*

    and for a general prefix the block patterns are concatenated.  The
    downward closure of the language this pattern denotes is exactly the set
    of words not containing p as a subsequence (verified exhaustively in the
    test suite against the subsequence oracle).
    """
    check_prefix(p)
    if not p:
        raise PrefixError("avoid_pattern is undefined on the empty prefix")
    atoms: list[str] = []
    for letter, count in alternating_blocks(p):
        star = dual(letter) + "*"
        block = [star]
        for _ in range(count - 1):
            block.append(letter)
            block.append(star)
        atoms.extend(block)
    return atoms


def check_pattern(atoms: Iterable[str]) -> list[str]:
    atoms = list(atoms)
    for a in atoms:
        if a not in ALPHABET and a not in STARRED:
            raise PrefixError(f"invalid pattern atom {a!r}")
    return atoms


def pattern_to_text(atoms: Iterable[str]) -> str:
    return " ".join(check_pattern(atoms))


def pattern_from_text(text: str) -> list[str]:
    return check_pattern(text.split())


def in_downward_language(q: str, atoms: Iterable[str]) -> bool:
    """Is q a subsequence of some word the pattern denotes?

    Greedy left-to-right matching: a starred atom absorbs the maximal run of
    its letter at the cursor, a bare atom consumes one matching letter when
    it can.  Greediness is sound here because absorbing more letters now can
    only move the cursor further right, and every atom's capacity is
    monotone in the remaining suffix.
    """
    check_prefix(q)
    atoms = check_pattern(atoms)
    i = 0
    for a in atoms:
        if a in STARRED:
            letter = STARRED[a]
            while i < len(q) and q[i] == letter:
                i += 1
        else:
            if i < len(q) and q[i] == a:
                i += 1
    return i == len(q)


def short_non_superwords(p: str, m: int) -> set[str]:
    """All words of length <= m that do not contain p as a subsequence.

    This is the bounded slice of the avoider language of p; it is computed
    directly from the subsequence order, which the avoider pattern is proved
    (testwise) to agree with.
    """
    check_prefix(p)
    if not p:
        raise PrefixError("short_non_superwords is undefined on the empty prefix")
    if m < 0:
        raise ValueError("m must be >= 0")
    return {q for q in all_prefixes(m) if not is_subsequence(p, q)}
