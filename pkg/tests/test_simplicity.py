from fractions import Fraction

import pytest

from helpers import HALF, Zd, theorem_simple
from wittkit import Module, ModuleSpec, QuotientModule, Signature, Window
from wittkit.structure import predicted_simple, predicted_structure, simplicity_scan
from wittkit.structure.simplicity import build_graph, generator_keys


def _mod(family, s, **kw):
    S = Signature(*s)
    return Module(ModuleSpec(family, S, Zd(S.dim), **kw).validate())


def test_generic_module_is_simple_on_window():
    M = _mod("GeneralAb", (0, 1, 0), alpha=(HALF,), b=0)
    v = simplicity_scan(M, Window(2, 2, 1))
    assert v.simple and v.nodes > 0


def test_A00_names_the_zero_vector():
    M = _mod("GeneralAb", (0, 1, 0), alpha=(0,), b=0)
    v = simplicity_scan(M, Window(2, 2, 1))
    assert v.kind == "trivial_submodule_found" and v.vector == ((0,), (0,))
    assert predicted_structure(M) == ("trivial_submodule_found", ((0,), (0,)))


def test_trivial_vector_sits_at_minus_alpha():
    M = _mod("GeneralAb", (1, 0, 1), alpha=(1,), b=0)
    v = simplicity_scan(M, Window(2, 2, 1))
    assert v.vector == ((-1,), (0,)) == predicted_structure(M)[1]


def test_graded_b1_has_no_edge_into_v0():
    M = _mod("GradedAb", (0, 0, 2), alpha=(0, 0), b=1)
    zero = ((0, 0), ())
    for g in generator_keys(M, 2, 0):
        for v in M.window_keys(2, 0):
            if v != zero:
                assert zero not in M.act_basis(g, v)
    assert simplicity_scan(M, Window(2, 0, 1)).kind == "proper_submodule_found"


@pytest.mark.parametrize("family,kw,kind", [
    ("GradedAbeta", {"beta": (0, 0)}, "proper_submodule_found"),
    ("GradedBbeta", {"beta": (0, 0)}, "trivial_submodule_found"),
    ("GradedAbeta", {"beta": (HALF, 0)}, "proper_submodule_found"),
])
def test_graded_beta_families(family, kw, kind):
    M = _mod(family, (0, 0, 2), **kw)
    assert simplicity_scan(M, Window(2, 0, 1)).kind == kind == predicted_structure(M)[0]


@pytest.mark.parametrize("b", [0, 1, 3, Fraction(-1, 2)])
@pytest.mark.parametrize("alpha", [(0,), (Fraction(2, 3),), (2,)])
def test_scan_agrees_with_theorem_in_two_mixed_variables(alpha, b):
    M = _mod("GeneralAb", (1, 1, 0), alpha=alpha, b=b)
    expected = theorem_simple(Fraction(alpha[0]).denominator == 1, b, graded=False)
    assert predicted_simple(M) == expected
    assert simplicity_scan(M, Window(2, 2, 1)).simple == expected


def test_quotient_of_A00_is_simple():
    S = Signature(0, 1, 0)
    Q = QuotientModule(ModuleSpec("GeneralAb", S, Zd(1), alpha=(0,), b=0))
    assert simplicity_scan(Q, Window(2, 2, 1)).simple
    assert predicted_structure(Q) == ("simple_on_window", None)


def test_graph_edges_carry_their_generator():
    M = _mod("GeneralAb", (0, 1, 0), alpha=(HALF,), b=2)
    R = build_graph(M, Window(1, 1, 1))
    u, w = next(iter(R.graph.edges))
    assert w in M.act_basis(R.witness(u, w), u)


def test_empty_window_is_rejected():
    M = _mod("GeneralAb", (0, 1, 0), alpha=(HALF,), b=2)
    with pytest.raises(ValueError):
        simplicity_scan(M, Window(-1, 0, 1))
