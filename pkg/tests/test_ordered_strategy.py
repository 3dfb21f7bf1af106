import pytest

from qslab import families as fam
from qslab.forests import forest_of
from qslab.game import GameSolver, verify_certificate, GameOutcome, DUPLICATOR
from qslab.ordered_strategy import (
    Row,
    ScriptedDuplicator,
    StrategyError,
    order_preserving,
    scripted_table,
)
from qslab.prefixes import short_non_superwords


def replay_everything(board, a, b):
    dup = ScriptedDuplicator(a, b)
    solver = GameSolver(board, a, b)
    xs0, ys0 = solver._base_tuples()

    def walk(node, history, xs, ys):
        exists_node = board.labels[node] == "E"
        n = a.size if exists_node else b.size
        for pick in range(n):
            ans = dup.reply(history, pick, pick_in_left=exists_node)
            c, d = (pick, ans) if exists_node else (ans, pick)
            assert solver.extend_ok(xs, ys, c, d), (history, pick, ans)
            pairs = history + [(c, d)]
            assert order_preserving(a, b, pairs), (history, pick, ans)
            for w in board.children[node]:
                walk(w, pairs, xs + (c,), ys + (d,))

    for r in board.roots:
        walk(r, [], xs0, ys0)


def test_row_pairing():
    row = Row.from_nodes([10, 11, 12, 13, 14])
    assert row.tuples == ((10, 11), (12,), (13, 14))
    assert row.special == 1
    even = Row.from_nodes([1, 2, 3, 4])
    assert even.special is None
    assert even.tuple_of(3) == 1


@pytest.mark.parametrize(
    "p,m", [("E", 1), ("A", 1), ("E", 2), ("A", 2), ("EA", 1), ("EE", 1), ("AE", 1), ("AA", 1)]
)
def test_scripted_duplicator_never_loses(p, m):
    a = fam.build_ordered_structure(p, m, "A")
    b = fam.build_ordered_structure(p, m, "B")
    board = forest_of(short_non_superwords(p, m))
    replay_everything(board, a, b)


def test_scripted_table_verifies_as_certificate():
    a = fam.build_ordered_structure("E", 2, "A")
    b = fam.build_ordered_structure("E", 2, "B")
    board = forest_of(short_non_superwords("E", 2))
    table = scripted_table(board, a, b)
    outcome = GameOutcome(DUPLICATOR, table, 0)
    assert verify_certificate(board, a, b, outcome)


def test_repeat_picks_answered_consistently():
    a = fam.build_ordered_structure("E", 2, "A")
    b = fam.build_ordered_structure("E", 2, "B")
    dup = ScriptedDuplicator(a, b)
    first = dup.reply([], 3, pick_in_left=False)
    again = dup.reply([(first, 3)], 3, pick_in_left=False)
    assert again == first


def test_rejects_unordered_input():
    a = fam.build_prefix_structure("E", 1, "A")
    with pytest.raises(StrategyError):
        ScriptedDuplicator(a, a)
