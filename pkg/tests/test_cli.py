import json

from qslab.cli import main
from qslab.structures import load_structure


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rosen_f(capsys):
    code, out, _ = run(capsys, "rosen-f", "EE")
    assert code == 0 and out.strip() == "A* E A*"


def test_rosen_f_rejects_bad_input(capsys):
    code, _, err = run(capsys, "rosen-f", "EX")
    assert code == 2 and "invalid" in err


def test_embed_identity(tmp_path, capsys):
    f = tmp_path / "t.sexp"
    f.write_text("(E (A))")
    code, out, _ = run(capsys, "embed", "--s1", str(f), "--s2", str(f))
    assert code == 0
    assert json.loads(out) == {"0": 0, "1": 1}


def test_embed_absent(tmp_path, capsys):
    s1 = tmp_path / "s1.sexp"
    s2 = tmp_path / "s2.sexp"
    s1.write_text("(E (A) (E))")
    s2.write_text("(E (E)) (E (A))")
    code, out, _ = run(capsys, "embed", "--s1", str(s1), "--s2", str(s2))
    assert code == 1 and out.strip() == "absent"


def test_words_and_forest_of(tmp_path, capsys):
    f = tmp_path / "t.sexp"
    f.write_text("(E (A))")
    code, out, _ = run(capsys, "words", "--forest", str(f), "--max-len", "2")
    assert code == 0 and out.split() == ["-", "A", "E", "EA"]
    words = tmp_path / "w.txt"
    words.write_text("-\nA\n")
    code, out, _ = run(capsys, "forest-of", "--words", str(words))
    assert code == 0 and out.strip() == "(A)"


def test_build_eval_solve_distinguish(tmp_path, capsys):
    code, out, _ = run(capsys, "build-structure", "tauplus:A:+:p=E:m=1")
    assert code == 0
    (tmp_path / "a.json").write_text(out)
    a = load_structure(out)
    assert a.size == 4
    code, out, _ = run(capsys, "build-structure", "tauplus:B:+:p=E:m=1")
    (tmp_path / "b.json").write_text(out)

    code, out, _ = run(capsys, "build-formula", "tauplus-prefix", "E")
    assert code == 0
    (tmp_path / "phi.sexp").write_text(out)

    code, out, _ = run(
        capsys, "eval", "--structure", str(tmp_path / "a.json"),
        "--formula", str(tmp_path / "phi.sexp"),
    )
    assert code == 0 and out.strip() == "true"

    (tmp_path / "board.sexp").write_text("(E)")
    code, out, _ = run(
        capsys, "solve", "--forest", str(tmp_path / "board.sexp"),
        "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json"),
        "--certificate", str(tmp_path / "cert.json"),
    )
    assert code == 0 and out.strip() == "spoiler"
    assert json.loads((tmp_path / "cert.json").read_text())["kind"] == "spoiler"

    code, out, _ = run(
        capsys, "distinguish", "--forest", str(tmp_path / "board.sexp"),
        "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json"),
    )
    assert code == 0 and out.startswith("(exists")

    # duplicator-won games cannot be distinguished
    code, _, err = run(
        capsys, "distinguish", "--forest", str(tmp_path / "board.sexp"),
        "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "a.json"),
    )
    assert code == 1


def test_budget_exit_code(tmp_path, capsys):
    for side in "ab":
        code, out, _ = run(capsys, "build-structure", f"tauplus:{side.upper()}:+:p=EE:m=1")
        (tmp_path / f"{side}.json").write_text(out)
    (tmp_path / "board.sexp").write_text("(E (E) (E))")
    code, _, err = run(
        capsys, "solve", "--forest", str(tmp_path / "board.sexp"),
        "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json"),
        "--budget", "2",
    )
    assert code == 3


def test_verify_small_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "forest")
    assert code == 0 and "suite forest: PASS" in out


def test_usage_error(capsys):
    assert main(["no-such-command"]) == 2
