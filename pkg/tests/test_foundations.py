from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from wittkit import GroupLattice, Signature, Window, lattice_contains, multiindex_compare, pairing
from wittkit.foundations import LatticeError, SignatureError, multiindices, scalar_str


@pytest.mark.parametrize("a,b,expected", [((1, 2), (2, 1), -1), ((0, 0), (0, 0), 0), ((3, 0), (0, 1), 1)])
def test_multiindex_order_examples(a, b, expected):
    assert multiindex_compare(a, b) == expected


def test_multiindex_compare_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        multiindex_compare((1,), (1, 0))


@given(st.integers(0, 3), st.integers(0, 4))
def test_multiindex_window_count(n, L):
    idxs = multiindices(n, L)
    assert len(idxs) == comb(n + L, n)
    assert len(set(idxs)) == len(idxs)
    assert all(multiindex_compare(a, b) < 0 for a, b in zip(idxs, idxs[1:]))


def test_lattice_contains_examples():
    L = GroupLattice([[1, 0], [0, 2]])
    assert lattice_contains(L, (3, 4))
    assert L.coordinates((3, 4)) == (3, 2)
    assert not lattice_contains(L, (0, 1))
    assert lattice_contains(L, (0, 0))


def test_degenerate_lattice_rejected():
    with pytest.raises(LatticeError, match="degenerate lattice"):
        GroupLattice([[1, 0], [2, 0]])


def test_rational_generating_set_is_reduced():
    L = GroupLattice.from_generating_set([[1], [Fraction(2, 3)]])
    assert L.contains([Fraction(1, 3)])
    assert not L.contains([Fraction(1, 6)])


nonsingular = st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda m: m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0)


@given(nonsingular, st.integers(1, 3), st.lists(st.integers(-6, 6), min_size=2, max_size=2))
def test_membership_matches_inverse_matrix(gens, den, w):
    """w is in the lattice iff its coordinates G^{-T} w are integers."""
    rows = [[Fraction(x, den) for x in g] for g in gens]
    L = GroupLattice(rows)
    target = [Fraction(x, 2) for x in w]
    G = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    coords = G.T.inv() * sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in target])
    expected = all(c.is_integer for c in coords)
    assert L.contains(target) == expected
    if expected:
        c = L.coordinates(target)
        assert tuple(int(x) for x in coords) == c
        assert tuple(Fraction(x) for x in L.embed(c)) == tuple(target)


def test_pairing_examples():
    S = Signature(1, 1, 1)
    assert pairing(S, {2: 1, 3: 3}, (1, Fraction(1, 2))) == Fraction(5, 2)
    assert pairing(S, {1: 1}, (7, 9)) == 0
    assert pairing(S, {}, (7, 9)) == 0


def test_signature_needs_positive_ell():
    with pytest.raises(SignatureError, match="positive"):
        Signature(0, 0, 0).validate()
    assert [Signature(1, 1, 1).kind(p) for p in (1, 2, 3)] == ["down", "mixed", "grading"]


def test_window_rejects_negative_bounds():
    with pytest.raises(ValueError):
        Window(-1, 0, 0)
    assert Window(2, 1, 1).enlarged() == Window(3, 2, 0)


def test_scalars_render_as_reduced_rationals():
    assert scalar_str(Fraction(6, 4)) == "3/2"
    assert scalar_str(Fraction(-4, 2)) == "-2"
