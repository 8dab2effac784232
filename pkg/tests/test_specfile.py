from fractions import Fraction
from importlib import resources

import pytest

from wittkit import Module, QuotientModule, WittAlgebra
from wittkit.io import ParseError, load_spec, parse_spec, serialize

HEAD = "signature = 0, 1, 0\ngenerators = [[1]]\n"


def _corpus():
    d = resources.files("wittkit").joinpath("data/specs")
    return sorted((p for p in d.iterdir() if p.name.endswith(".spec")), key=lambda p: p.name)


def test_minimal_spec():
    s = parse_spec(HEAD)
    assert s.signature == (0, 1, 0) and s.window.gamma_bound == 2
    assert isinstance(s.W, WittAlgebra)
    assert serialize(s) == HEAD + "window.gamma = 2\nwindow.level = 2\nwindow.margin = 1\n"


@pytest.mark.parametrize("text,line,column,fragment", [
    ("signature = 0, 1, 1\ngenerators = [[1, 0], [2, 0]]\n", 2, 13, "degenerate lattice"),
    ("signature = 0, 0, 0\ngenerators = []\n", 1, 12, "must be positive"),
    (HEAD + "signature = 0, 1, 0\n", 3, 1, "duplicate key"),
    (HEAD + "foo = 1\n", 3, 1, "unknown key"),
    (HEAD + "module A = GeneralAb beta=[1]\n", 3, 22, "does not apply"),
    (HEAD + "module A = GradedAb alpha=[0] b=1\n", 3, 11, "(0,0,ell)"),
    (HEAD + "module Q = GeneralAb alpha=[1/2] b=0 quotient\n", 3, 11, "no trivial submodule"),
    ("generators = [[1]]\n", 1, 1, "missing required key"),
    ("signature = 0, 1, 0\ngenerators = [[1], [2]]\n", 2, 13, "1 rows of length 1"),
    (HEAD + "element u in B = v[0; 0]\n", 3, 1, "undefined module"),
    (HEAD + "element u = x[1] t[0] d[2]\n", 3, 13, "derivation index 2"),
])
def test_positioned_errors(text, line, column, fragment):
    with pytest.raises(ParseError) as e:
        parse_spec(text)
    assert (e.value.line, e.value.column) == (line, column)
    assert fragment in e.value.message


def test_comments_and_spacing_are_not_canonical():
    text = "# a comment\nsignature=0,1,0\n\ngenerators = [ [ 2/4 ] ]\nwindow.level=3\nmodule   A = GeneralAb alpha=[ 1/3 ] b= -2\n"
    s = parse_spec(text)
    out = serialize(s)
    assert "# a comment" not in out and "generators = [[1/2]]" in out
    assert "module A = GeneralAb alpha=[1/3] b=-2" in out
    assert serialize(parse_spec(out)) == out


def test_modules_and_elements():
    s = parse_spec(HEAD + "module A = GeneralAb alpha=[1/2] b=2\nmodule Q = GeneralAb alpha=[0] b=0 quotient\n"
                   "element g = x[1] t[1] d[1]\nelement v in A = v[0; 1]\nelement f = 3 x[2] t[1]\n")
    A, Q = s.module("A"), s.module("Q")
    assert type(A) is Module and isinstance(Q, QuotientModule)
    assert s.module("A") is A
    w = A.act(s.element("g"), s.element("v"))
    assert w == Fraction(5, 2) * A.basis((1,), (2,)) + 3 * A.basis((1,), (1,))
    assert s.element("f").terms == {((2,), (1,)): 3}
    with pytest.raises(KeyError):
        s.module("B")


@pytest.mark.parametrize("path", _corpus(), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    text = path.read_text(encoding="utf-8")
    assert serialize(parse_spec(text)) == text
    assert serialize(load_spec(path)) == text


def test_load_spec_reports_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_spec(tmp_path / "absent.spec")
