"""qslab: a laboratory for quantifier-structure games on finite structures.

The pieces: prefixes and labeled forests (the combinatorial skeleton),
finite relational structures and their combinators, first-order sentences in
negation normal form, generators for the separating structure families, an
exhaustive game solver with replayable certificates, a scripted duplicator
for the ordered families, and a CLI plus local HTTP service tying it all
together.
"""

__version__ = "0.1.0"
