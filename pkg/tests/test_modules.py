import random
from fractions import Fraction

import pytest

from helpers import HALF, Zd, ab_reference
from wittkit import Module, ModuleSpec, QuotientModule, Signature
from wittkit.modules import (
    ModuleSpecError,
    claims_suite,
    construct_basis_vector,
    eigenspace_dimension,
    module_axiom_residual,
    quotient_weight_multiplicity,
    sample_pairs,
    weight_stage,
)


def _ab(s, alpha, b, family="GeneralAb"):
    S = Signature(*s)
    return Module(ModuleSpec(family, S, Zd(S.dim), alpha=alpha, b=b).validate())


def test_action_example():
    M = _ab((0, 1, 0), (HALF,), 2)
    g = M.W.basis((1,), (1,), 1)
    assert M.act(g, M.basis((0,), (1,))) == Fraction(5, 2) * M.basis((1,), (2,)) + 3 * M.basis((1,), (1,))


@pytest.mark.parametrize("s", [(1, 0, 1), (0, 1, 0), (1, 1, 1), (2, 0, 1)])
@pytest.mark.parametrize("b", [0, 1, Fraction(-1, 3)])
def test_action_matches_closed_form(s, b):
    d = Signature(*s).dim
    alpha = tuple(Fraction(k + 1, 3) for k in range(d))
    M = _ab(s, alpha, b)
    for gk in M.W.window_keys(1, 2):
        for vk in M.window_keys(1, 1):
            assert M.act_basis(gk, vk) == ab_reference(M.sig, M.lattice, alpha, b, gk, vk)


def test_zero_vector_of_A00_is_annihilated():
    M = _ab((1, 1, 1), (0, 0), 0)
    v = M.basis()
    for gk in M.W.window_keys(2, 2):
        assert not M.act(M.W.element({gk: 1}), v)


def test_graded_families_on_negative_weight():
    S = Signature(0, 0, 2)
    beta = (1, 2)
    A = Module(ModuleSpec("GradedAbeta", S, Zd(2), beta=beta).validate())
    B = Module(ModuleSpec("GradedBbeta", S, Zd(2), beta=beta).validate())
    for mu in [(1, 0), (2, -1), (0, 3)]:
        neg = tuple(-m for m in mu)
        for p in (1, 2):
            g = A.W.basis(mu, (), p)
            assert not A.act(g, A.basis(neg))
            assert B.act(g, B.basis(neg)) == -(mu[p - 1] + beta[p - 1]) * B.basis((0, 0))


@pytest.mark.parametrize("family", ["GradedAbeta", "GradedBbeta"])
def test_graded_families_satisfy_the_module_axiom(family):
    S = Signature(0, 0, 2)
    M = Module(ModuleSpec(family, S, Zd(2), beta=(HALF, -1)).validate())
    for g, h, v in sample_pairs(M, 150, 5):
        assert not module_axiom_residual(M, g, h, v)


def test_residual_vanishes_for_equal_arguments():
    M = _ab((1, 1, 1), (HALF, 0), 2)
    rng = random.Random(3)
    for _ in range(20):
        g = M.W.random_element(3, 3, 4, rng=rng)
        assert not module_axiom_residual(M, g, g, M.random_vector(3, 3, 4, rng))


def test_mismatched_operands_are_rejected():
    M = _ab((1, 0, 1), (HALF,), 0)
    N = _ab((0, 1, 0), (HALF,), 0)
    with pytest.raises(ValueError):
        M.act(N.W.derivation(1), M.basis())
    with pytest.raises(ValueError):
        M.act(M.W.derivation(1), N.basis())
    with pytest.raises(ModuleSpecError):
        ModuleSpec("GradedAb", Signature(1, 0, 1), Zd(1), alpha=(0,), b=0).validate()


def test_weight_stage():
    alpha = (HALF, Fraction(1, 3))
    M = _ab((1, 1, 1), alpha, 2)
    mu = (1, -1)
    weight = tuple(a + m for a, m in zip(alpha, mu))
    assert weight_stage(M, M.basis(mu, (0, 0)), weight) == 0
    for idx in [(1, 0), (0, 2), (2, 1)]:
        assert weight_stage(M, M.basis(mu, idx), weight) == sum(idx)
    assert weight_stage(M, M.basis(mu, (0, 0)), (0, 0)) is None


def test_eigenspace_of_generic_module_is_one_dimensional():
    M = _ab((1, 1, 0), (HALF,), 1)
    dim, basis = eigenspace_dimension(M, (HALF,), 1, 2)
    assert dim == 1 and basis == [M.basis((0,), (0, 0))]


def test_quotient_multiplicity_in_one_variable():
    S = Signature(0, 1, 0)
    assert quotient_weight_multiplicity(ModuleSpec("GeneralAb", S, Zd(1), alpha=(0,), b=0)) == 1
    with pytest.raises(ModuleSpecError):
        quotient_weight_multiplicity(ModuleSpec("GeneralAb", S, Zd(1), alpha=(0,), b=1))


def test_quotient_drops_the_trivial_vector():
    S = Signature(0, 1, 0)
    Q = QuotientModule(ModuleSpec("GeneralAb", S, Zd(1), alpha=(0,), b=0))
    assert not Q.basis((0,), (0,))
    assert ((0,), (0,)) not in Q.window_keys(1, 1)
    g = Q.W.basis((1,), (0,), 1)
    assert not Q.act(g, Q.basis((-1,), (0,)))
    A = Module(Q.spec)
    assert A.act(g, A.basis((-1,), (0,))) == -A.basis((0,), (0,))


def test_claims_suite_small_window():
    M = _ab((1, 1, 1), (HALF, Fraction(1, 3)), Fraction(-1, 3))
    reports = claims_suite(M, 2, 2)
    assert len(reports) == 6 and all(r.ok and r.checked for r in reports)


def test_recursion_rebuilds_the_basis():
    M = _ab((1, 1, 1), (HALF, Fraction(1, 3)), 2)
    for idx in [(1, 0), (0, 1), (1, 2)]:
        assert construct_basis_vector(M, (1, 0), idx).matches
    Z = _ab((0, 1, 0), (0,), 2)
    rec = construct_basis_vector(Z, (0,), (3,), route="zero")
    assert rec.scale is not None and rec.scale != 0
    with pytest.raises(ModuleSpecError):
        construct_basis_vector(Z, (0,), (1,))
