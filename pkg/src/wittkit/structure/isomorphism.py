"""Intertwiners between modules on a window.

When the two closed-form parameter sets differ by a lattice element and
share b, the shift v_{mu,i} -> v_{mu+gamma,i} is checked directly.  In every
other case a general weight- and filtration-respecting linear map is posed
with unknown coefficients and the equivariance equations are solved
exactly:

    phi(v_{mu,i}) = sum over level(j) <= level(i) of c[(mu,i), j] v_{mu+gamma, j}

A nonzero map must send v_{mu,i} into the weight space of the same weight,
which fixes gamma; if no such gamma exists the weight sets are disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..foundations import Window, add_coords, level, multiindices, scalar_str
from ..io.expr import basis_label
from ..linalg import LinearSystem, rank
from ..modules import Module
from ..sparse import accumulate
from .simplicity import generator_keys


@dataclass
class IsoVerdict:
    kind: str  # intertwiner_found | ruled_out
    reason: str = ""
    shift: tuple | None = None
    table: dict = field(default_factory=dict)
    """domain basis key -> image as a dict of codomain keys"""
    checked: int = 0
    witness: list = field(default_factory=list)
    """For ruled_out: (multiplier, equation text) pairs summing to 0 = nonzero."""

    @property
    def found(self) -> bool:
        return self.kind == "intertwiner_found"


def weight_shift(A: Module, B: Module) -> tuple | None:
    """Lattice element gamma with alpha_A = alpha_B + gamma, if any."""
    diff = [a - b for a, b in zip(A.spec.alpha, B.spec.alpha)]
    return B.lattice.coordinates(diff)


def _apply_map(table: dict, v: dict) -> dict:
    acc: dict = {}
    for k, c in v.items():
        for t, d in table.get(k, {}).items():
            accumulate(acc, t, c * d)
    return acc


def verify_intertwiner(A: Module, B: Module, table: dict, window: Window) -> tuple[int, tuple | None]:
    """Check phi(g v) = g phi(v) for window generators g and window vectors v
    whose images stay inside the table.  Returns (checks, first failure)."""
    gens = generator_keys(A, window.gamma_bound, window.level_bound)
    checks = 0
    for v in A.window_keys(window.gamma_bound, window.level_bound):
        for g in gens:
            gv = A.act_basis(g, v)
            if any(k not in table for k in gv):
                continue
            lhs = _apply_map(table, gv)
            rhs: dict = {}
            for t, d in table[v].items():
                for k, c in B.act_basis(g, t).items():
                    accumulate(rhs, k, c * d)
            checks += 1
            if lhs != rhs:
                return checks, (g, v)
    return checks, None


def shift_map(A: Module, B: Module, gamma, keys) -> dict:
    return {k: {(add_coords(k[0], gamma), k[1]): Fraction(1)} for k in keys if
            (add_coords(k[0], gamma), k[1]) not in B.killed}


def check_isomorphism(A: Module, B: Module, window: Window = Window(2, 2, 1)) -> IsoVerdict:
    if A.sig != B.sig or A.lattice != B.lattice:
        raise ValueError("modules over different algebras")
    gamma = weight_shift(A, B)
    if gamma is None:
        return IsoVerdict(
            "ruled_out",
            reason="the weights alpha+Gamma of the first module never occur in the second "
                   "(alpha_A - alpha_B is not in the lattice), so every weight-preserving map is zero",
        )
    same_family = A.spec.family == B.spec.family and A.spec.family in ("GeneralAb", "GradedAb")
    if same_family and not A.killed and not B.killed and A.spec.b == B.spec.b:
        big = window.enlarged()
        table = shift_map(A, B, gamma, A.window_keys(big.gamma_bound, big.level_bound))
        checks, fail = verify_intertwiner(A, B, table, window)
        if fail is None:
            return IsoVerdict("intertwiner_found", reason=f"shift by {gamma}", shift=gamma,
                              table=table, checked=checks)
        g, v = fail
        return IsoVerdict("ruled_out", reason=f"shift fails on {basis_label(g)} . {basis_label(v)}",
                          checked=checks)
    return _solve_ansatz(A, B, gamma, window)


def _solve_ansatz(A: Module, B: Module, gamma, window: Window) -> IsoVerdict:
    big = window.enlarged()
    domain = A.window_keys(big.gamma_bound, big.level_bound)
    dom_set = set(domain)
    n_t = A.sig.n_t

    def targets(k):
        mu, idx = k
        tmu = add_coords(mu, gamma)
        return [(tmu, j) for j in multiindices(n_t, level(idx)) if (tmu, j) not in B.killed]

    unknown_targets = {k: targets(k) for k in domain}
    ls = LinearSystem()
    labels = []
    base = next(k for k in A.window_keys(window.gamma_bound, window.level_bound)
                if (add_coords(k[0], gamma), k[1]) in unknown_targets[k])
    lead = (base, (add_coords(base[0], gamma), base[1]))
    ls.add({lead: 1}, 1, label="normalization")
    labels.append(f"c[{basis_label(base)} -> {basis_label(lead[1])}] = 1")

    gens = generator_keys(A, window.gamma_bound, window.level_bound)
    checks = 0
    for v in A.window_keys(window.gamma_bound, window.level_bound):
        for g in gens:
            gv = A.act_basis(g, v)
            if any(k not in dom_set for k in gv):
                continue
            # phi(g v) - g phi(v), coefficient by codomain key
            rows: dict = {}
            for k, c in gv.items():
                for t in unknown_targets[k]:
                    rows.setdefault(t, {})
                    accumulate(rows[t], (k, t), c)
            for t in unknown_targets[v]:
                for w, c in B.act_basis(g, t).items():
                    rows.setdefault(w, {})
                    accumulate(rows[w], (v, t), -c)
            for w, coeffs in rows.items():
                if coeffs:
                    ls.add(coeffs, 0, label=(g, v, w))
                    labels.append(f"coefficient of {basis_label(w)} in phi({basis_label(g)} . {basis_label(v)}) "
                                  f"- {basis_label(g)} . phi({basis_label(v)})")
            checks += 1
        sol = ls.solve()
        if not sol.consistent:
            witness = [(m, labels[i]) for i, m in sorted(sol.witness.items())]
            coeffs, rhs = ls.replay(sol.witness)
            assert not coeffs and rhs != 0
            return IsoVerdict("ruled_out", reason="the equivariance equations are inconsistent "
                              f"({len(witness)} equations combine to 0 = {rhs})",
                              checked=checks, witness=witness)
    sol = ls.solve()
    # particular solution with free coefficients set to zero
    values = {var: rhs for var, (row, rhs) in sol.pivots.items()}
    table: dict = {}
    for k in domain:
        img = {}
        for t in unknown_targets[k]:
            c = values.get((k, t), 0)
            if c:
                img[t] = c
        table[k] = img
    singular = _singular_block(A, B, table, gamma, window)
    if singular is not None:
        return IsoVerdict("ruled_out", reason=f"the solved map is not bijective on the weight block of {singular}",
                          checked=checks, table=table)
    return IsoVerdict("intertwiner_found", reason=f"solved ansatz with {sol.nullity} free coefficients set to 0",
                      shift=gamma, table=table, checked=checks)


def _singular_block(A: Module, B: Module, table: dict, gamma, window: Window):
    """First weight block on which the map fails to look bijective.

    On the span of v_{mu,i} with level(i) <= L the map must be injective and
    its image must contain every codomain vector of weight mu+gamma and
    level <= L-1.  The one-level slack allows for a quotient by a level-zero
    vector, which re-indexes the filtration.
    """
    n_t = A.sig.n_t
    L = window.level_bound
    for mu in A.lattice.box(window.gamma_bound):
        src = [(mu, i) for i in multiindices(n_t, L) if (mu, i) in table]
        if not src:
            continue
        tmu = add_coords(mu, gamma)
        cols = sorted({t for k in src for t in table[k]} |
                      {(tmu, j) for j in multiindices(n_t, L) if (tmu, j) not in B.killed})
        rows = [[table[k].get(t, 0) for t in cols] for k in src]
        r = rank(rows)
        if r != len(src):
            return basis_label((mu, (0,) * n_t))
        need = [(tmu, j) for j in multiindices(n_t, L - 1) if (tmu, j) not in B.killed]
        for t in need:
            e = [int(c == t) for c in cols]
            if rank(rows + [e]) != r:
                return basis_label((mu, (0,) * n_t))
    return None


def derivative_map(A: Module, B: Module, keys) -> dict:
    """The map v'_{nu,j} -> <d, nu> v_{nu,j} + j v_{nu,j-1} from the quotient
    of A_{0,0} to A_{0,1} in a signature with a single mixed variable.

    On weight zero it is the re-indexing v'_{0,j} -> j v_{0,j-1}.
    """
    if A.sig != (0, 1, 0):
        raise ValueError("the derivative map is defined for signature (0,1,0)")
    table = {}
    for mu, (j,) in keys:
        if (mu, (j,)) in A.killed:
            continue
        img: dict = {}
        nu = A.lattice.embed(mu)[0]
        if nu:
            img[(mu, (j,))] = Fraction(nu)
        if j:
            img[(mu, (j - 1,))] = Fraction(j)
        table[(mu, (j,))] = img
    return table


def describe_table(table: dict, limit: int | None = None) -> list[str]:
    out = []
    for k in sorted(table, key=lambda k: (k[0], sum(k[1]), k[1])):
        img = _fmt(table[k])
        out.append(f"{basis_label(k)} -> {img}")
        if limit is not None and len(out) >= limit:
            break
    return out


def _fmt(img: dict) -> str:
    if not img:
        return "0"
    parts = []
    for t in sorted(img, key=lambda t: (t[0], sum(t[1]), t[1])):
        parts.append(f"{scalar_str(img[t])} {basis_label(t)}")
    return " + ".join(parts)


def predicted_isomorphic(A: Module, B: Module) -> bool | None:
    """What the classification says about A and B, or None when it is silent.

    Two closed-form modules of one family are isomorphic exactly when their
    alphas differ by a lattice element and the b agree.  The quotient
    A'_{0,0} is isomorphic to another such quotient, and to A_{beta,1} with
    beta in the lattice only when there is a single mixed variable and
    nothing else.

    With a single derivation there is one more coincidence: the derivation
    itself maps A_{alpha,0} onto A_{alpha,1} equivariantly, and it is
    bijective when alpha is outside the lattice.
    """
    if A.sig != B.sig or A.lattice != B.lattice:
        return False
    fa, fb = A.spec.family, B.spec.family
    if fa != fb or fa not in ("GeneralAb", "GradedAb"):
        return None
    qa, qb = bool(A.killed), bool(B.killed)
    if not qa and not qb:
        if fa == "GradedAb" and A.spec.alpha_in_lattice:
            return None
        if weight_shift(A, B) is None:
            return False
        if A.spec.b == B.spec.b:
            return True
        return A.sig.ell == 1 and not A.spec.alpha_in_lattice and {A.spec.b, B.spec.b} == {0, 1}
    if fa != "GeneralAb":
        return None
    if qa and qb:
        return True
    plain = B if qa else A
    return A.sig == (0, 1, 0) and plain.spec.alpha_in_lattice and plain.spec.b == 1
