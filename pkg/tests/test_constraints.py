import random
from fractions import Fraction

import pytest
import sympy as sp

from helpers import HALF, Zd, ab_reference, bracket_reference
from wittkit.structure.constraints import (
    ConstraintSetup,
    RowInstance,
    check_family,
    constraint_oracle,
    determinant_pair,
    eliminated_row,
    monotonicity_check,
    row_coefficients,
    sigma_forms,
    unknown_label,
    window_sample,
)


def _unit(n, p):
    return tuple(int(k == p - 1) for k in range(n))


class PerturbedModule:
    """A_{alpha,b} on levels <= 1 with a symbol added to every level-zero
    coefficient of an action that lowers the level by one."""

    def __init__(self, S: ConstraintSetup, alpha):
        self.S, self.alpha = S, alpha
        self.sig, self.L = S.sig, S.lattice

    def sym(self, kind, p, q, mu, lam):
        return sp.Symbol(unknown_label((kind, p, q, tuple(mu), tuple(lam))))

    def act(self, g, v) -> dict:
        (s, i, k), (lam, j) = g, v
        out = {key: sp.Rational(c.numerator, c.denominator)
               for key, c in ab_reference(self.sig, self.L, self.alpha, self.S.b, g, v).items()}
        tgt = (tuple(a + b for a, b in zip(s, lam)), (0,) * self.sig.n_t)
        if sum(j) == 1 and not any(i):
            out[tgt] = out.get(tgt, 0) + self.sym("d", j.index(1) + 1, k, s, lam)
        elif sum(i) == 1 and not any(j):
            out[tgt] = out.get(tgt, 0) + self.sym("e", i.index(1) + 1, k, s, lam)
        return out

    def apply(self, terms: dict, vec: dict) -> dict:
        out: dict = {}
        for g, a in terms.items():
            for v, c in vec.items():
                for t, e in self.act(g, v).items():
                    out[t] = out.get(t, 0) + a * c * e
        return out

    def residual(self, g, h, v) -> dict:
        br = {k: sp.Rational(c.numerator, c.denominator)
              for k, c in bracket_reference(self.sig, self.L, g, h).items()}
        out = self.apply(br, {v: 1})
        for t, c in self.apply({g: 1}, self.apply({h: 1}, {v: 1})).items():
            out[t] = out.get(t, 0) - c
        for t, c in self.apply({h: 1}, self.apply({g: 1}, {v: 1})).items():
            out[t] = out.get(t, 0) + c
        return {t: sp.expand(c) for t, c in out.items()}


def _relation(P: PerturbedModule, inst: RowInstance):
    n = P.sig.n_t
    z = (0,) * n
    g = (inst.mu, z, inst.q)
    if inst.family == "level_one":
        h, v = (inst.nu, z, inst.r), (inst.lam, _unit(n, inst.p))
    else:
        h, v = (inst.nu, _unit(n, inst.p), inst.r), (inst.lam, z)
    tgt = (tuple(a + b + c for a, b, c in zip(inst.mu, inst.nu, inst.lam)), z)
    return P.residual(g, h, v).get(tgt, sp.Integer(0))


def _as_expr(P, coeffs):
    return sum(sp.Rational(c.numerator, c.denominator) * P.sym(*u) for u, c in coeffs.items())


SETUPS = [((1, 0, 1), (HALF,), 2), ((1, 0, 1), (Fraction(1, 3),), 0),
          ((1, 1, 0), (Fraction(2, 5),), Fraction(-1, 3)), ((0, 1, 1), (HALF, Fraction(1, 3)), 3)]


@pytest.mark.parametrize("sig,alpha,b", SETUPS)
def test_rows_are_the_bracket_relation(sig, alpha, b):
    S = ConstraintSetup(sig, Zd(len(alpha)), alpha, b)
    P = PerturbedModule(S, alpha)
    rng = random.Random(hash((sig, b)) & 0xFFFF)
    d = len(alpha)
    for _ in range(25):
        c = [tuple(rng.randint(-2, 2) for _ in range(d)) for _ in range(3)]
        inst = RowInstance(rng.choice(["level_one", "mixed"]), rng.randint(1, S.sig.n_t),
                           rng.choice(S.sig.indices), rng.choice(S.sig.indices), *c)
        rel = _relation(P, inst)
        assert rel.subs({s: 0 for s in rel.free_symbols}) == 0
        row = _as_expr(P, row_coefficients(S, inst))
        assert sp.expand(rel - row) == 0 or sp.expand(rel + row) == 0, inst.label()


def test_eliminated_row_closed_form():
    S = ConstraintSetup((1, 0, 1), Zd(1), (Fraction(1, 7),), Fraction(5, 3))
    for mu, nu in [((1,), (2,)), ((-2,), (3,)), ((3,), (1,))]:
        row, _ = eliminated_row(S, 1, 1, 2, mu, nu, (1,))
        L, m, n = S.bar((1,), 2), Fraction(mu[0]), Fraction(nu[0])
        s = (mu[0] + nu[0],)
        assert row == {k: v for k, v in {
            ("d", 1, 1, mu, (1,)): (m + n) * (L + m + S.b * n),
            ("d", 1, 1, s, (1,)): -m * (L + m + n)}.items() if v}


def test_determinant_symbolically():
    b, m, L = sp.symbols("b m L")
    M = sp.Matrix([[2 * m * (L + (1 + b) * m), -m * (L + 2 * m)],
                   [-2 * m * (L + m), m * (L + (2 - b) * m)]])
    assert sp.factor(M.det() - 2 * m ** 4 * b * (1 - b)) == 0
    for bv, mv, lv in [(2, 1, HALF), (Fraction(-1, 3), 2, Fraction(1, 3)), (5, -1, Fraction(3, 4))]:
        S = ConstraintSetup((1, 0, 1), Zd(1), (lv,), bv)
        D = determinant_pair(S, 1, 1, 2, (mv,), (0,))
        assert D.matrix == [[Fraction(x) for x in r] for r in M.subs({b: bv, m: mv, L: lv}).tolist()]
        assert D.determinant == 2 * mv ** 4 * bv * (1 - bv) and D.forced_zero


def test_determinant_example():
    D = determinant_pair(ConstraintSetup((1, 0, 1), Zd(1), (HALF,), 2), 1, 1, 2, (1,), (0,))
    assert D.matrix == [[7, Fraction(-5, 2)], [-3, HALF]] and D.determinant == -4


def test_b1_determinant_vanishes():
    D = determinant_pair(ConstraintSetup((1, 0, 1), Zd(1), (HALF,), 1), 1, 1, 2, (2,), (1,))
    assert D.determinant == 0 and not D.forced_zero


def test_b0_family():
    S = ConstraintSetup((1, 0, 1), Zd(1), (Fraction(1, 3),), 0)
    sample = [inst for _, inst in determinant_pair(S, 1, 1, 2, (1,), (0,)).recipe]
    sample += [inst for _, inst in determinant_pair(S, 1, 1, 2, (2,), (0,)).recipe]
    F = check_family(S, sample, 2)
    assert F.matches and F.report.nullity == 1
    # disjoint samples carry one free scale each
    apart = sample[:6] + [inst for _, inst in determinant_pair(S, 1, 1, 2, (-1,), (0,)).recipe]
    assert check_family(S, apart, 2).report.nullity == 2
    # the family, c = 1: d = mu_r/(lb_r + mu_r), e = -lb_r/(lb_r + mu_r)
    vals = {}
    for u in F.report.unknowns:
        kind, _, _, mu, lam = u
        lb = Fraction(1, 3) + lam[0]
        vals[u] = (mu[0] if kind == "d" else -lb) / (lb + mu[0])
    for inst in sample:
        assert sum(c * vals[u] for u, c in row_coefficients(S, inst).items()) == 0


def test_mu_zero_rows_leave_only_the_normalization():
    S = ConstraintSetup((0, 1, 1), Zd(2), (HALF, Fraction(1, 3)), 2)
    lam = (1, 1)
    sample = [i for i in window_sample(S, 0, lams=[lam])]
    rep = constraint_oracle(S, sample, include_nongeneric=True)
    assert rep.consistent
    for u in rep.unknowns:
        kind, p, q, mu, lm = u
        if kind == "d" or q == S.p_double_prime(lm):
            assert rep.is_forced_zero(u), unknown_label(u)


def test_monotone_under_enlargement():
    S = ConstraintSetup((1, 0, 1), Zd(1), (HALF,), 2)
    samples = [window_sample(S, g, lams=[(0,), (1,)]) for g in (0, 1)]
    ok, dims = monotonicity_check(S, samples)
    assert ok and dims == sorted(dims, reverse=True)


def test_sigma_product_equals_expansion():
    b, L2, Lq, m2, mq = sp.symbols("b L2 Lq m2 mq")
    prod = (L2 + m2) * (Lq - b * mq) * (Lq + (b - 1) * mq) - (Lq + (1 - b) * mq) * (L2 - m2) * (Lq + b * mq)
    assert sp.expand(prod - 2 * (Lq ** 2 * m2 - L2 * Lq * mq + b * (1 - b) * m2 * mq ** 2)) == 0
    S = ConstraintSetup((0, 1, 1), Zd(2), (HALF, Fraction(1, 3)), 3)
    f = sigma_forms(S, 2, (1, 2), (0, 1))
    assert f["product"] == f["expanded"] != f["printed"]


def test_alpha_in_lattice_is_rejected():
    with pytest.raises(ValueError):
        ConstraintSetup((1, 0, 1), Zd(1), (1,), 2)
