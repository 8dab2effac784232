import pytest

from helpers import Zd, extension_reference
from wittkit import Signature, Window
from wittkit.structure import nonexistence_probe
from wittkit.structure.nonexistence import (
    ExtensionProblem,
    expected_extension_action,
    quotient_reference,
    solve_extension,
)
from wittkit.structure.simplicity import generator_keys

W = Window(2, 1, 1)


@pytest.mark.parametrize("cand", ["A_beta", "B_beta"])
def test_beta_candidates_are_infeasible_in_one_variable(cand):
    v = nonexistence_probe(cand, (0, 1, 0), Zd(1), W)
    assert v.kind == "infeasible"
    coeffs, rhs = v.system.replay(v.combo)
    assert coeffs == {} and rhs == v.contradiction != 0
    assert v.witness and all("g(h v) - h(g v) - [g,h] v" in text for _, text in v.witness)


def test_quotient_extension_needs_a_down_variable():
    # the derivation bracket leaves no room for l2 >= 1
    assert nonexistence_probe("A00_plus", (0, 1, 0), Zd(1), W).kind == "infeasible"


def test_reindexed_table_matches_closed_form():
    S = Signature(1, 0, 1)
    L = Zd(1)
    Q = quotient_reference(S, L)
    n = 0
    for g in generator_keys(Q, 2, 2):
        for v in [((m,), (j,)) for m in range(-2, 3) for j in range(3)]:
            assert expected_extension_action(Q, g, v) == extension_reference(L, g, v), (g, v)
            n += 1
    assert n > 100


def test_solved_quotient_extension_is_the_reference_table():
    v = solve_extension(ExtensionProblem("A00_plus", (1, 0, 1), Zd(1)), W)
    assert v.feasible and len(v.determined) > 20
    for (_, g, vec, t), val in v.determined.items():
        assert val == extension_reference(Zd(1), g, vec).get(t, 0)


def test_window_too_small():
    with pytest.raises(ValueError, match="window too small"):
        nonexistence_probe("A_beta", (0, 1, 0), Zd(1), Window(0, 0, 1))


def test_problem_validation():
    with pytest.raises(ValueError, match="unknown candidate"):
        ExtensionProblem("C_beta", (0, 1, 0), Zd(1))
    with pytest.raises(ValueError):
        ExtensionProblem("A_beta", (0, 0, 2), Zd(2))
    with pytest.raises(ValueError):
        ExtensionProblem("A_beta", (0, 1, 0), Zd(1), weight_zero="sideways")
    with pytest.raises(ValueError):
        ExtensionProblem("A00_plus", (2, 0, 1), Zd(1), weight_zero="shifted")
    with pytest.raises(ValueError):
        expected_extension_action(quotient_reference((2, 0, 1), Zd(1)), ((0,), (0, 0), 1), ((1,), (0, 0)))
