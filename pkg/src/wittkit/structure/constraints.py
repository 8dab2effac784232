"""Exact linear constraints on the level-one action of a hypothetical module.

Suppose a module V has a basis v_{mu,0}, v_{mu,1_[p]} near level one on
which the Witt action agrees with A_{alpha,b} up to unknown corrections

    (x^mu d_q) v_{lam,1_[p]}       = ... + (delta_pq + d[p,q; mu; lam]) v_{mu+lam,0}
    (x^mu t^{1_[p]} d_q) v_{lam,0} = ... + (delta_pq b + e[p,q; mu; lam]) v_{mu+lam,0}

Comparing the v_{mu+nu+lam,0} coefficients of the two bracket relations

    [x^mu d_q, x^nu d_r] v_{lam,1_[p]}       ("level_one" rows)
    [x^mu d_q, x^nu t^{1_[p]} d_r] v_{lam,0} ("mixed" rows)

gives homogeneous linear rows in the unknowns d, e.  Writing lb = alpha+lam:

    level_one:  (lb_r + b nu_r) d[p,q; mu; nu+lam] + (lb_q + nu_q + b mu_q) d[p,r; nu; lam]
                - (lb_q + b mu_q) d[p,r; nu; mu+lam] - (lb_r + mu_r + b nu_r) d[p,q; mu; lam]
                - nu_q d[p,r; mu+nu; lam] + mu_r d[p,q; mu+nu; lam] = 0
    mixed:      (lb_r + b nu_r) d[p,q; mu; nu+lam] + (lb_q + nu_q + b mu_q) e[p,r; nu; lam]
                - (lb_q + b mu_q) e[p,r; nu; mu+lam]
                - nu_q e[p,r; mu+nu; lam] + mu_r e[p,q; mu+nu; lam] = 0

The normalization of the basis adds d[p,q; 0; lam] = 0 and
e[p,p''; 0; lam] = 0, where p'' is the first index beyond l1 with
alpha_p'' + lam_p'' != 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from ..foundations import GroupLattice, Signature, add_coords, neg_coords, scalar_str
from ..linalg import LinearSystem, rank
from ..modules import Module, ModuleSpec
from ..sparse import accumulate

FAMILIES = ("level_one", "mixed")


def unknown_label(u) -> str:
    kind, p, q, mu, lam = u
    return f"{kind}[{p},{q}; {','.join(map(str, mu))}; {','.join(map(str, lam))}]"


@dataclass(frozen=True)
class RowInstance:
    family: str
    p: int
    q: int
    r: int
    mu: tuple
    nu: tuple
    lam: tuple

    def label(self) -> str:
        f = lambda c: ",".join(map(str, c))  # noqa: E731
        return (f"{self.family}(p={self.p}, q={self.q}, r={self.r}, "
                f"mu={f(self.mu)}, nu={f(self.nu)}, lam={f(self.lam)})")


class ConstraintSetup:
    """Signature, lattice, alpha and b fixing the coefficients of the rows."""

    def __init__(self, signature, lattice: GroupLattice, alpha, b):
        sig = signature if isinstance(signature, Signature) else Signature(*signature)
        self.M = Module(ModuleSpec("GeneralAb", sig, lattice, alpha=tuple(alpha), b=b))
        self.sig = sig
        self.lattice = lattice
        self.b = Fraction(b)
        if self.M.spec.alpha_in_lattice:
            raise ValueError("the level-one constraints are posed for alpha outside the lattice")

    def c(self, mu, q) -> Fraction:
        """mu_q, zero for q <= l1."""
        return Fraction(self.M.comp(mu, q))

    def bar(self, lam, q) -> Fraction:
        """(alpha + lam)_q."""
        return Fraction(self.M.alpha_comp(q)) + self.c(lam, q)

    def p_double_prime(self, lam) -> int:
        for q in range(self.sig.ell1 + 1, self.sig.ell + 1):
            if self.bar(lam, q):
                return q
        raise ValueError("alpha + lam vanishes")

    @property
    def grading_indices(self) -> range:
        return range(self.sig.ell1 + 1, self.sig.ell + 1)


def row_coefficients(S: ConstraintSetup, inst: RowInstance) -> dict:
    p, q, r, mu, nu, lam = inst.p, inst.q, inst.r, inst.mu, inst.nu, inst.lam
    b = S.b
    lb_r, lb_q = S.bar(lam, r), S.bar(lam, q)
    mu_r, mu_q, nu_r, nu_q = S.c(mu, r), S.c(mu, q), S.c(nu, r), S.c(nu, q)
    s = add_coords(mu, nu)
    out: dict = {}
    accumulate(out, ("d", p, q, mu, add_coords(nu, lam)), lb_r + b * nu_r)
    if inst.family == "level_one":
        accumulate(out, ("d", p, r, nu, lam), lb_q + nu_q + b * mu_q)
        accumulate(out, ("d", p, r, nu, add_coords(mu, lam)), -(lb_q + b * mu_q))
        accumulate(out, ("d", p, q, mu, lam), -(lb_r + mu_r + b * nu_r))
        accumulate(out, ("d", p, r, s, lam), -nu_q)
        accumulate(out, ("d", p, q, s, lam), mu_r)
    elif inst.family == "mixed":
        accumulate(out, ("e", p, r, nu, lam), lb_q + nu_q + b * mu_q)
        accumulate(out, ("e", p, r, nu, add_coords(mu, lam)), -(lb_q + b * mu_q))
        accumulate(out, ("e", p, r, s, lam), -nu_q)
        accumulate(out, ("e", p, q, s, lam), mu_r)
    else:
        raise ValueError(f"unknown row family {inst.family!r}")
    return out


# ---------------------------------------------------------------------------
# genericity


def _never_zero(a: Fraction, c: Fraction) -> bool:
    """a + n c != 0 for every integer n >= 0 (decided exactly)."""
    if c == 0:
        return a != 0
    n = -a / c
    return not (n.denominator == 1 and n >= 0)


def genericity_tags(S: ConstraintSetup, q: int, mu, lam) -> list[str]:
    """Names of the failed genericity conditions for a row with q > l1.

    lambda_generic: (alpha+lam)_s != 0 and lam_s != 0 for every s > l1.
    mu_generic:     mu_s != 0 for every s > l1, and (alpha+lam)_{l1+1} +- mu_{l1+1} != 0.
    no_integer_pole: (lb_q + (b+n) mu_q)(lb_p'' + (n+2) mu_p'') != 0 for all n >= 0.
    """
    if q <= S.sig.ell1:
        return []
    tags = []
    grading = S.grading_indices
    if any(S.bar(lam, s) == 0 or S.c(lam, s) == 0 for s in grading):
        tags.append("lambda_generic")
    first = S.sig.ell1 + 1
    if (any(S.c(mu, s) == 0 for s in grading)
            or S.bar(lam, first) + S.c(mu, first) == 0
            or S.bar(lam, first) - S.c(mu, first) == 0):
        tags.append("mu_generic")
    try:
        p2 = S.p_double_prime(lam)
    except ValueError:
        tags.append("no_integer_pole")
        return tags
    mq, m2 = S.c(mu, q), S.c(mu, p2)
    if not (_never_zero(S.bar(lam, q) + S.b * mq, mq) and _never_zero(S.bar(lam, p2) + 2 * m2, m2)):
        tags.append("no_integer_pole")
    return tags


# ---------------------------------------------------------------------------
# the oracle


@dataclass
class ConstraintReport:
    consistent: bool
    rows_used: int
    excluded: list = field(default_factory=list)
    """(row label, failed tags) for rows left out as non-generic."""
    unknowns: list = field(default_factory=list)
    rank: int = 0
    nullity: int = 0
    forced_zero: list = field(default_factory=list)
    parametrization: dict = field(default_factory=dict)
    """pivot unknown -> {free unknown: coefficient}"""
    nullspace: list = field(default_factory=list)
    system: LinearSystem | None = None

    def is_forced_zero(self, u) -> bool:
        return u in self.forced_zero

    def describe(self, limit: int = 8) -> list[str]:
        lines = [f"rows={self.rows_used} unknowns={len(self.unknowns)} rank={self.rank} nullity={self.nullity}"]
        if self.excluded:
            lines.append(f"excluded {len(self.excluded)} non-generic rows")
        for u in self.forced_zero[:limit]:
            lines.append(f"forced: {unknown_label(u)} = 0")
        for u, expr in list(self.parametrization.items())[:limit]:
            rhs = " + ".join(f"{scalar_str(c)} {unknown_label(f)}" for f, c in expr.items()) or "0"
            lines.append(f"{unknown_label(u)} = {rhs}")
        return lines


def normalization_rows(S: ConstraintSetup, unknowns) -> list[tuple[dict, str]]:
    """d[p,q; 0; lam] = 0 for every such unknown and e[p,p''; 0; lam] = 0."""
    out = []
    for u in sorted(unknowns):
        kind, p, q, mu, lam = u
        if any(mu):
            continue
        if kind == "d":
            out.append(({u: 1}, f"normalization {unknown_label(u)} = 0"))
        elif q == S.p_double_prime(lam):
            out.append(({u: 1}, f"normalization {unknown_label(u)} = 0"))
    return out


def constraint_oracle(S: ConstraintSetup, sample, normalize: bool = True,
                      include_nongeneric: bool = False) -> ConstraintReport:
    """Assemble and row-reduce the rows of ``sample`` (RowInstance objects)."""
    ls = LinearSystem()
    excluded = []
    unknowns: set = set()
    rows = []
    for inst in sample:
        tags = genericity_tags(S, inst.q, inst.mu, inst.lam)
        if tags and not include_nongeneric:
            excluded.append((inst.label(), tags))
            continue
        coeffs = row_coefficients(S, inst)
        rows.append((coeffs, inst.label()))
        unknowns.update(coeffs)
    if normalize:
        rows.extend(normalization_rows(S, unknowns))
    if not rows:
        raise ValueError("degenerate sample: no usable rows")
    for coeffs, label in rows:
        ls.add(coeffs, 0, label=label)
    sol = ls.solve()
    report = ConstraintReport(sol.consistent, len(rows), excluded, sorted(unknowns),
                              sol.rank, len(unknowns) - sol.rank, system=ls)
    if not sol.consistent:
        return report
    report.forced_zero = sorted(v for v, x in sol.values.items() if x == 0)
    report.parametrization = {v: {f: -c for f, c in row.items() if f != v}
                              for v, (row, _) in sorted(sol.pivots.items()) if len(row) > 1}
    report.nullspace = ls.nullspace()
    # unknowns introduced only by normalization rows are already in `unknowns`
    report.nullity = len(unknowns) - sol.rank
    return report


def window_sample(S: ConstraintSetup, gamma_bound: int, families=FAMILIES, ps=None, qs=None,
                  rs=None, lams=None) -> list[RowInstance]:
    """Every row instance with mu, nu in the box and the given indices."""
    ps = ps or range(1, S.sig.n_t + 1)
    qs = qs or S.sig.indices
    rs = rs or S.sig.indices
    box = S.lattice.box(gamma_bound)
    lams = lams or [S.lattice.zero()]
    return [RowInstance(f, p, q, r, mu, nu, lam)
            for f, p, q, r, lam, mu, nu in product(families, ps, qs, rs, lams, box, box)]


# ---------------------------------------------------------------------------
# the level-zero-derivation case (q <= l1): the determinant pair


def _combine(parts) -> dict:
    acc: dict = {}
    for m, coeffs in parts:
        for u, c in coeffs.items():
            accumulate(acc, u, m * c)
    return acc


def eliminated_row(S: ConstraintSetup, p, q, r, mu, nu, lam) -> tuple[dict, list]:
    """For q <= l1: a combination of three raw rows involving only
    d[p,q; mu; lam] and d[p,q; mu+nu; lam], namely

        (mu_r+nu_r)(lb_r + mu_r + b nu_r) d^{mu} - mu_r (lb_r + mu_r + nu_r) d^{mu+nu} = 0.

    Returns the row and its recipe as (multiplier, RowInstance) pairs.
    """
    if q > S.sig.ell1:
        raise ValueError("the elimination needs a down-grading index q <= l1")
    zero = S.lattice.zero()
    s = add_coords(mu, nu)
    mu_r, nu_r = S.c(mu, r), S.c(nu, r)
    recipe = [
        (-(mu_r + nu_r), RowInstance("level_one", p, q, r, mu, nu, lam)),
        (mu_r + nu_r, RowInstance("mixed", p, q, r, mu, nu, lam)),
        (-mu_r, RowInstance("mixed", p, q, r, s, zero, lam)),
    ]
    row = _combine((m, row_coefficients(S, inst)) for m, inst in recipe)
    return row, recipe


@dataclass
class DeterminantReport:
    rows: tuple
    columns: tuple
    matrix: list
    determinant: Fraction
    recipe: list
    forced_zero: bool
    """True when the assembled raw rows force d[p,q; mu; lam] = 0."""

    def describe(self) -> list[str]:
        (a, b_), (c, d) = self.matrix
        return [
            f"columns {unknown_label(self.columns[0])}, {unknown_label(self.columns[1])}",
            f"  [{scalar_str(a)}, {scalar_str(b_)}]",
            f"  [{scalar_str(c)}, {scalar_str(d)}]",
            f"determinant = {scalar_str(self.determinant)}",
            f"forces {unknown_label(self.columns[0])} = 0: {self.forced_zero}",
        ]


def determinant_pair(S: ConstraintSetup, p: int, q: int, r: int, mu, lam) -> DeterminantReport:
    """The eliminated rows at (mu, mu) and (2mu, -mu) and their 2x2 determinant
    in the columns d[p,q; mu; lam], d[p,q; 2mu; lam]."""
    two = add_coords(mu, mu)
    r1, rec1 = eliminated_row(S, p, q, r, mu, mu, lam)
    r2, rec2 = eliminated_row(S, p, q, r, two, neg_coords(mu), lam)
    cols = (("d", p, q, mu, lam), ("d", p, q, two, lam))
    stray = (set(r1) | set(r2)) - set(cols)
    if stray:
        raise ValueError("degenerate sample: eliminated rows involve " +
                         ", ".join(unknown_label(u) for u in sorted(stray)))
    matrix = [[r1.get(c, Fraction(0)) for c in cols], [r2.get(c, Fraction(0)) for c in cols]]
    det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    recipe = rec1 + rec2
    rep = constraint_oracle(S, [inst for _, inst in recipe], normalize=False)
    return DeterminantReport((r1, r2), cols, matrix, det, recipe, rep.is_forced_zero(cols[0]))


def family_values(S: ConstraintSetup, r: int, unknowns) -> dict:
    """The one-parameter family at b = 0 with c = 1:

        d[p,q; mu; lam] = mu_r / (lb_r + mu_r),  e[p,q; mu; lam] = -lb_r / (lb_r + mu_r).
    """
    out = {}
    for u in unknowns:
        kind, _, _, mu, lam = u
        den = S.bar(lam, r) + S.c(mu, r)
        if den == 0:
            raise ValueError(f"the family is undefined at {unknown_label(u)}")
        out[u] = (S.c(mu, r) if kind == "d" else -S.bar(lam, r)) / den
    return out


@dataclass
class FamilyCheck:
    report: ConstraintReport
    expected: dict
    matches: bool
    scale: Fraction | None


def check_family(S: ConstraintSetup, sample, r: int) -> FamilyCheck:
    """Solve the homogeneous sample and compare its solution space with the
    span of the one-parameter family.  Normalization rows are not added: the
    family has e[p,q; 0; lam] = -c, which the normalization only kills for
    q = p''."""
    rep = constraint_oracle(S, sample, normalize=False)
    expected = family_values(S, r, rep.unknowns)
    scale = None
    ok = rep.consistent and rep.nullity == 1 and len(rep.nullspace) == 1
    if ok:
        vec = rep.nullspace[0]
        pivot = next(u for u in rep.unknowns if expected[u])
        scale = vec.get(pivot, Fraction(0)) / expected[pivot]
        ok = scale != 0 and all(vec.get(u, 0) == scale * expected[u] for u in rep.unknowns)
    return FamilyCheck(rep, expected, ok, scale)


# ---------------------------------------------------------------------------
# diagnostics for grading indices q > l1


def sigma_forms(S: ConstraintSetup, q: int, mu, lam) -> dict:
    """sigma(mu) three ways.

    ``product`` is the coefficient that actually arises when the relation at
    -mu is eliminated; ``expanded`` is its polynomial expansion
    2(lb_q^2 mu_p'' - lb_p'' lb_q mu_q + b(1-b) mu_p'' mu_q^2).  ``printed``
    is the expansion with a (b-2) lb_p'' lb_q mu_q term in place of
    -lb_p'' lb_q mu_q; it differs from the other two whenever
    (b-1) lb_p'' lb_q mu_q != 0 and is kept only for comparison.
    """
    p2 = S.p_double_prime(lam)
    b = S.b
    L2, Lq, m2, mq = S.bar(lam, p2), S.bar(lam, q), S.c(mu, p2), S.c(mu, q)
    product_form = ((L2 + m2) * (Lq - b * mq) * (Lq + (b - 1) * mq)
                    - (Lq + (1 - b) * mq) * (L2 - m2) * (Lq + b * mq))
    expanded = 2 * (Lq * Lq * m2 - L2 * Lq * mq + b * (1 - b) * m2 * mq * mq)
    printed = 2 * ((b - 2) * L2 * Lq * mq + Lq * Lq * m2 + b * (1 - b) * m2 * mq * mq)
    return {"product": product_form, "expanded": expanded, "printed": printed}


def sigma(S: ConstraintSetup, q: int, mu, lam) -> Fraction:
    return sigma_forms(S, q, mu, lam)["product"]


def recursion_row(S: ConstraintSetup, p: int, q: int, mu, lam) -> dict:
    """(lb_q + b mu_q)(lb_p'' + 2 mu_p'') d^{mu,mu+lam} - lb_p'' (lb_q + (b+1) mu_q) d^{mu,lam} = 0,
    a consequence of the mixed rows at (mu, 0, lam), (mu, 0, mu+lam) with
    r = p'' and at (mu, mu, lam) with r = q, given the normalization."""
    p2 = S.p_double_prime(lam)
    b = S.b
    L2, Lq, m2, mq = S.bar(lam, p2), S.bar(lam, q), S.c(mu, p2), S.c(mu, q)
    out: dict = {}
    accumulate(out, ("d", p, q, mu, add_coords(mu, lam)), (Lq + b * mq) * (L2 + 2 * m2))
    accumulate(out, ("d", p, q, mu, lam), -L2 * (Lq + (b + 1) * mq))
    return out


def recursion_sources(S: ConstraintSetup, p: int, q: int, mu, lam) -> list[RowInstance]:
    zero = S.lattice.zero()
    p2 = S.p_double_prime(lam)
    return [RowInstance("mixed", p, q, p2, mu, zero, lam),
            RowInstance("mixed", p, q, p2, mu, zero, add_coords(mu, lam)),
            RowInstance("mixed", p, q, q, mu, mu, lam)]


def tau(S: ConstraintSetup, q: int, mu, lam) -> Fraction:
    p2 = S.p_double_prime(lam)
    L2, Lq, m2, mq = S.bar(lam, p2), S.bar(lam, q), S.c(mu, p2), S.c(mu, q)
    return (L2 * L2 - m2 * m2) * (Lq * Lq - (S.b * mq) ** 2)


def delta(S: ConstraintSetup, q: int, mu, lam) -> Fraction | None:
    """Determinant in the columns (d^{mu,lam-mu}, d^{mu,lam}) of the recursion
    relation at lam-mu and the relation obtained after eliminating d^{2mu,.};
    None where a denominator of the second relation vanishes."""
    p2 = S.p_double_prime(lam)
    b = S.b
    L2, Lq, m2, mq = S.bar(lam, p2), S.bar(lam, q), S.c(mu, p2), S.c(mu, q)
    row1 = (-(L2 - m2) * (Lq + b * mq), (Lq + (b - 1) * mq) * (L2 + m2))
    den_a = 2 * L2 * (Lq + (2 * b - 1) * mq) ** 2
    den_b = 2 * (L2 + m2) * (Lq + 2 * b * mq) ** 2
    if den_a == 0 or den_b == 0:
        return None
    row2 = ((L2 - m2) * (L2 + m2) ** 2 * (Lq + (b - 1) * mq) / den_a,
            -L2 * (L2 + 2 * m2) ** 2 * (Lq + b * mq) / den_b)
    return row1[0] * row2[1] - row1[1] * row2[0]


def _good_part(S: ConstraintSetup, q, mu, lam) -> bool:
    if any(t in genericity_tags(S, q, mu, lam) for t in ("mu_generic", "no_integer_pole")):
        return False
    s = sigma(S, q, mu, lam)
    d = delta(S, q, mu, lam)
    return s != 0 and d not in (None, 0)


def find_split(S: ConstraintSetup, q: int, mu, lam, bound: int = 4):
    """Search mu = mu1 + mu2 with mu1, mu2 and mu1 - mu2 generic and
    sigma, Delta nonzero at mu1 and mu2.  Returns (mu1, mu2) or None."""
    for mu1 in S.lattice.box(bound):
        mu2 = add_coords(mu, neg_coords(mu1))
        diff = add_coords(mu1, neg_coords(mu2))
        if "mu_generic" in genericity_tags(S, q, diff, lam) or "no_integer_pole" in genericity_tags(S, q, diff, lam):
            continue
        if _good_part(S, q, mu1, lam) and _good_part(S, q, mu2, lam):
            return mu1, mu2
    return None


def monotonicity_check(S: ConstraintSetup, samples: list) -> tuple[bool, list[int]]:
    """Projected solution-space dimensions on the first sample's unknowns for
    increasing samples; these must never grow."""
    first = constraint_oracle(S, samples[0])
    base = first.unknowns
    dims = []
    prev_rows = None
    ok = True
    for sample in samples:
        rep = constraint_oracle(S, sample)
        vecs = [[v.get(u, Fraction(0)) for u in base] for v in rep.nullspace]
        dims.append(rank(vecs) if vecs else 0)
        if prev_rows is not None:
            for v in rep.nullspace:
                for coeffs, _, _ in prev_rows:
                    if sum(c * v.get(u, 0) for u, c in coeffs.items()) != 0:
                        ok = False
        prev_rows = rep.system.rows
    ok = ok and all(a >= b for a, b in zip(dims, dims[1:]))
    return ok, dims
