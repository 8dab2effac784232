"""Can a given level-zero module be extended to the whole Witt algebra?

Let V be a module with weight basis v_{mu,i} (weights mu in the lattice,
alpha = 0) whose level-zero part V^(0) = span{v_{mu,0}} is a prescribed
module over the graded subalgebra spanned by x^mu d_q, q > l1.  What is
known about the action:

* for nu != 0 and mu+nu != 0 the closed form A_{0,b0} holds, with b0
  matching the candidate at nonzero weights;
* x^mu d_q (q > l1) on v_{nu,0} is the candidate action;
* the bare derivations act on the weight-zero vectors by a rule fixing the
  basis there (``weight_zero``).  "standard" is d_p v_{0,j} = j_p v_{0,j-1_[p]},
  "shifted" is (j+1) v_{0,j-1} for the re-indexed quotient, and "free" leaves
  it unknown; "free" drops the hypothesis that the weight-zero eigenspace is
  one-dimensional, so a feasible verdict under it proves nothing.

Every other coefficient (x^mu t^i d_q) v_{nu,j} -> v_{mu+nu,k} with
level(k) <= level(i) + level(j) is an unknown.  For generator pairs (g, h)
in the window and vectors v in the enlarged window, each coefficient of

    g(h v) - h(g v) - [g, h] v = 0

is a linear equation in the unknowns unless two unknowns multiply.  Those
coefficients are set aside and revisited once earlier rounds have fixed
one of the factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..foundations import (
    GroupLattice,
    Signature,
    Window,
    add_coords,
    entry,
    level,
    lower,
    multiindices,
    scalar_str,
)
from ..io.expr import basis_label
from ..linalg import LinearSystem
from ..modules import Module, ModuleSpec, QuotientModule
from ..sparse import accumulate
from ..witt import WittAlgebra
from .simplicity import generator_keys

CANDIDATES = {
    "A_beta": 0,      # A(beta)
    "B_beta": 1,      # B(beta)
    "A00_plus": 0,    # A'_{0,0} (+) F v_0
    "A01_plus": 1,    # A'_{0,1} (+) F v_0
}
WEIGHT_ZERO_RULES = ("standard", "shifted", "free")

CONST = None


def _add_form(target: dict, form: dict, scale) -> None:
    for k, c in form.items():
        accumulate(target, k, scale * c)


def _is_const(form: dict) -> bool:
    return all(k is CONST for k in form)


def unknown_label(u) -> str:
    _, g, v, t = u
    return f"<{basis_label(t)}|{basis_label(g)} . {basis_label(v)}>"


@dataclass
class ProbeVerdict:
    kind: str  # infeasible | feasible
    candidate: str
    equations: int = 0
    unknowns: int = 0
    rounds: int = 0
    witness: list = field(default_factory=list)
    """(multiplier, equation text) pairs combining to 0 = nonzero."""
    facts: list = field(default_factory=list)
    """Determined unknowns substituted into later rounds, as text."""
    contradiction: Fraction | None = None
    determined: dict = field(default_factory=dict)
    free: list = field(default_factory=list)
    system: LinearSystem | None = None
    combo: dict | None = None

    @property
    def feasible(self) -> bool:
        return self.kind == "feasible"

    def table(self) -> dict:
        """(g, v) -> {target: coefficient} for the determined unknowns."""
        out: dict = {}
        for (_, g, v, t), c in sorted(self.determined.items()):
            if c:
                out.setdefault((g, v), {})[t] = c
            else:
                out.setdefault((g, v), {})
        return out


class ExtensionProblem:
    def __init__(self, candidate: str, signature, lattice: GroupLattice, beta=None,
                 weight_zero: str | None = None, normalize: bool = True):
        if candidate not in CANDIDATES:
            raise ValueError(f"unknown candidate {candidate!r}; expected one of {sorted(CANDIDATES)}")
        sig = signature if isinstance(signature, Signature) else Signature(*signature)
        if sig.n_t < 1 or sig.dim < 1:
            raise ValueError("the extension problem needs l1+l2 >= 1 and l2+l3 >= 1")
        self.candidate = candidate
        self.sig = sig
        self.lattice = lattice
        self.W = WittAlgebra(sig, lattice)
        self.b0 = CANDIDATES[candidate]
        self.beta = tuple(Fraction(x) for x in (beta or (0,) * sig.dim))
        if weight_zero is None:
            weight_zero = "shifted" if candidate in ("A00_plus", "A01_plus") and sig.n_t == 1 else "standard"
        if weight_zero not in WEIGHT_ZERO_RULES:
            raise ValueError(f"weight_zero must be one of {WEIGHT_ZERO_RULES}")
        if weight_zero == "shifted" and sig.n_t != 1:
            raise ValueError("the shifted weight-zero rule needs a single t-variable")
        self.weight_zero = weight_zero
        self.normalize = normalize and candidate in ("A00_plus", "A01_plus") and sig.ell1 >= 1
        self.zero = lattice.zero()
        self._closed = Module(ModuleSpec("GeneralAb", sig, lattice, alpha=(0,) * sig.dim, b=self.b0))

    # known rules -----------------------------------------------------------

    def _comp(self, mu, q) -> Fraction:
        return Fraction(self._closed.comp(mu, q))

    def _beta(self, q) -> Fraction:
        return self.beta[q - self.sig.ell1 - 1] if q > self.sig.ell1 else Fraction(0)

    def level_zero_coefficient(self, mu, nu, q) -> Fraction:
        """Coefficient of v_{mu+nu,0} in (x^mu d_q) v_{nu,0} for q > l1."""
        s = add_coords(mu, nu)
        c = self.candidate
        if c == "A_beta":
            if not any(s):
                return Fraction(0)
            return self._comp(mu, q) + self._beta(q) if not any(nu) else self._comp(nu, q)
        if c == "B_beta":
            if not any(nu):
                return Fraction(0)
            return -(self._comp(mu, q) + self._beta(q)) if not any(s) else self._comp(s, q)
        if not any(nu) or not any(s):
            return Fraction(0)
        return self._comp(nu, q) if c == "A00_plus" else self._comp(s, q)

    def known(self, g, v) -> dict | None:
        mu, i, q = g
        nu, j = v
        s = add_coords(mu, nu)
        if any(nu) and any(s):
            return self._closed.act_basis(g, v)
        if q > self.sig.ell1 and not any(i) and not any(j):
            c = self.level_zero_coefficient(mu, nu, q)
            return {(s, j): c} if c else {}
        if not any(mu) and not any(i) and not any(nu):
            # a bare derivation on a weight-zero vector
            if not any(j):
                return {}
            if self.weight_zero == "free":
                return None
            if q > self.sig.n_t:
                return {}
            jq = entry(j, q)
            if not jq:
                return {}
            coeff = jq + 1 if self.weight_zero == "shifted" else jq
            return {(nu, lower(j, q)): Fraction(coeff)}
        if self.normalize and not any(i) and q <= self.sig.ell1 and not any(nu) and not any(j) and any(mu):
            # rescaling v_0 fixes (x^mu d_1) v_{0,0}; for A'_{0,1} it is mu_l v_{mu,0}
            if q != 1:
                return None
            c = Fraction(1) if self.candidate == "A00_plus" else self._comp(mu, self.sig.ell)
            return {(mu, j): c} if c else {}
        return None

    def targets(self, g, v) -> list:
        mu, i, q = g
        nu, j = v
        s = add_coords(mu, nu)
        top = level(i) + level(j)
        if not any(mu) and not any(i) and not any(nu):
            top -= 1
        return [(s, k) for k in multiindices(self.sig.n_t, top)] if top >= 0 else []

    # symbolic action ---------------------------------------------------------

    def act(self, g, vec: dict, fixed: dict) -> tuple[dict, set]:
        """g applied to a vector with linear-form coefficients; returns the
        image and the set of target keys spoiled by unknown products."""
        out: dict = {}
        spoiled: set = set()
        for w, form in vec.items():
            k = self.known(g, w)
            if k is not None:
                for t, c in k.items():
                    _add_form(out.setdefault(t, {}), form, c)
                continue
            const = _is_const(form)
            for t in self.targets(g, w):
                var = ("u", g, w, t)
                if var in fixed:
                    _add_form(out.setdefault(t, {}), form, fixed[var])
                elif const:
                    accumulate(out.setdefault(t, {}), var, form.get(CONST, 0))
                else:
                    spoiled.add(t)
        return out, spoiled

    def residual(self, g, h, v, fixed: dict) -> tuple[dict, set]:
        base = {v: {CONST: Fraction(1)}}
        hv, s1 = self.act(h, base, fixed)
        ghv, s2 = self.act(g, hv, fixed)
        gv, s3 = self.act(g, base, fixed)
        hgv, s4 = self.act(h, gv, fixed)
        br: dict = {}
        self.W.bracket_basis(g, h, br)
        out: dict = {}
        spoiled = set(s2) | set(s4)
        for t, f in ghv.items():
            _add_form(out.setdefault(t, {}), f, 1)
        for t, f in hgv.items():
            _add_form(out.setdefault(t, {}), f, -1)
        for k, c in br.items():
            img, s5 = self.act(k, base, fixed)
            spoiled |= s5
            for t, f in img.items():
                _add_form(out.setdefault(t, {}), f, -c)
        # s1 and s3 only spoil intermediate keys, whose images are tracked above
        del s1, s3
        return out, spoiled


def _equation_text(g, h, v, t) -> str:
    return (f"coefficient of {basis_label(t)} in g(h v) - h(g v) - [g,h] v "
            f"for g = {basis_label(g)}, h = {basis_label(h)}, v = {basis_label(v)}")


def nonexistence_probe(candidate: str, signature, lattice: GroupLattice, window: Window = Window(2, 1, 1),
                       beta=None, weight_zero: str | None = None, max_rounds: int = 4) -> ProbeVerdict:
    P = ExtensionProblem(candidate, signature, lattice, beta, weight_zero)
    return solve_extension(P, window, max_rounds)


def solve_extension(P: ExtensionProblem, window: Window, max_rounds: int = 4) -> ProbeVerdict:
    gens = generator_keys(P._closed, window.gamma_bound, window.level_bound)
    big = window.enlarged()
    vectors = P._closed.window_keys(big.gamma_bound, big.level_bound)
    triples = [(g, h, v) for a, g in enumerate(gens) for h in gens[a + 1:] for v in vectors]

    ls = LinearSystem()
    labels: list[str] = []
    fixed: dict = {}
    facts: list[str] = []
    pending = triples
    rounds = 0
    while pending and rounds < max_rounds:
        rounds += 1
        tag = "" if rounds == 1 else f" (round {rounds}, determined values substituted)"
        later = []
        for g, h, v in pending:
            res, spoiled = P.residual(g, h, v, fixed)
            for t, form in res.items():
                if t in spoiled or not form:
                    continue
                coeffs = {k: c for k, c in form.items() if k is not CONST}
                ls.add(coeffs, -form.get(CONST, 0), label=(g, h, v, t))
                labels.append(_equation_text(g, h, v, t) + tag)
            if spoiled:
                later.append((g, h, v))
        sol = ls.solve()
        if not sol.consistent:
            return _infeasible(P, ls, labels, sol, facts, rounds)
        new = {var: val for var, val in sol.values.items() if var not in fixed}
        if not new:
            break
        for var, val in sorted(new.items()):
            fixed[var] = val
            facts.append(f"{unknown_label(var)} = {scalar_str(val)}")
        pending = later
    if not ls.rows:
        raise ValueError("window too small: no equation involves the action")
    sol = ls.solve()
    unknowns = [v for v in ls.variables]
    determined = {v: sol.values[v] for v in unknowns if v in sol.values}
    return ProbeVerdict("feasible", P.candidate, len(ls.rows), len(unknowns), rounds,
                        facts=facts, determined=determined, free=sol.free, system=ls)


def _infeasible(P, ls, labels, sol, facts, rounds) -> ProbeVerdict:
    combo = sol.witness
    coeffs, rhs = ls.replay(combo)
    assert not coeffs and rhs != 0
    witness = [(m, labels[i]) for i, m in sorted(combo.items())]
    used = facts if rounds > 1 else []
    return ProbeVerdict("infeasible", P.candidate, len(ls.rows), len(ls.variables), rounds,
                        witness=witness, facts=used, contradiction=rhs, system=ls, combo=combo)


# ---------------------------------------------------------------------------
# the expected table for A'_{0,0} (+) F v_0


def quotient_reference(signature, lattice: GroupLattice) -> QuotientModule:
    return QuotientModule(ModuleSpec("GeneralAb", Signature(*signature) if not isinstance(signature, Signature)
                                     else signature, lattice, alpha=(0,) * lattice.dim, b=0))


def expected_extension_action(Q: QuotientModule, g, v) -> dict:
    """(x^mu t^i d_q) v_{nu,j} in the basis v_{nu,j} = v'_{nu,j} (nu != 0),
    v_{0,j} = v'_{0,j+1}, where v' is the basis of A_{0,0}/F v'_{0,0}; needs
    a single t-variable."""
    if Q.sig.n_t != 1:
        raise ValueError("the re-indexed table is defined for a single t-variable")
    nu, (j,) = v
    src = (nu, (j + 1,)) if not any(nu) else v
    out = {}
    for (s, (k,)), c in Q.act_basis(g, src).items():
        if not any(s):
            if k == 0:
                continue
            out[(s, (k - 1,))] = c
        else:
            out[(s, (k,))] = c
    return out


def compare_with_expected(P: ExtensionProblem, verdict: ProbeVerdict, window: Window) -> tuple[int, list]:
    """Check every determined unknown against the re-indexed quotient action
    and check that the full expected table satisfies every window equation,
    including those set aside for products.  Returns (checks, mismatches)."""
    Q = quotient_reference(P.sig, P.lattice)
    mismatches = []
    checks = 0
    for var, val in verdict.determined.items():
        _, g, v, t = var
        exp = expected_extension_action(Q, g, v).get(t, 0)
        checks += 1
        if exp != val:
            mismatches.append(f"{unknown_label(var)}: solved {scalar_str(val)}, expected {scalar_str(exp)}")

    class _Full(dict):
        def __contains__(self, var):
            return True

        def __getitem__(self, var):
            _, g, v, t = var
            return expected_extension_action(Q, g, v).get(t, Fraction(0))

    full = _Full()
    gens = generator_keys(P._closed, window.gamma_bound, window.level_bound)
    big = window.enlarged()
    for a, g in enumerate(gens):
        for h in gens[a + 1:]:
            for v in P._closed.window_keys(big.gamma_bound, big.level_bound):
                res, spoiled = P.residual(g, h, v, full)
                assert not spoiled
                checks += 1
                bad = {t: f.get(CONST, 0) for t, f in res.items() if f}
                if bad:
                    mismatches.append(f"equation fails for g={basis_label(g)}, h={basis_label(h)}, v={basis_label(v)}")
    return checks, mismatches
