"""Intermediate-series modules over W and the weight filtration.

Four families are supported:

``GeneralAb``
    A_{alpha,b} with basis v_{mu,i} for a signature with t-variables.
``GradedAb``, ``GradedAbeta``, ``GradedBbeta``
    A_{alpha,b}, A(beta) and B(beta) over the classical Witt algebra of a
    signature (0,0,ell), basis v_mu.

A vector is a :class:`ModuleVector` keyed by ``(mu, idx)``; for the graded
families ``idx`` is the empty tuple.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .foundations import (
    GroupLattice,
    Signature,
    add_coords,
    add_index,
    as_scalar,
    entry,
    iter_basis,
    level,
    lower,
    multiindex_key,
    multiindices,
    _norm,
    scalar_str,
    unit,
)
from .linalg import LinearSystem
from .sparse import Sparse, accumulate
from .witt import WittAlgebra, WittElement, _random_coeff

FAMILIES = ("GeneralAb", "GradedAb", "GradedAbeta", "GradedBbeta")


class ModuleSpecError(ValueError):
    pass


@dataclass(frozen=True)
class ModuleSpec:
    family: str
    signature: Signature
    lattice: GroupLattice
    alpha: tuple = ()
    b: Fraction = Fraction(0)
    beta: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "signature", Signature(*self.signature))
        object.__setattr__(self, "b", as_scalar(self.b))
        d = self.signature.dim
        alpha = tuple(as_scalar(a) for a in self.alpha) or (Fraction(0),) * d
        beta = tuple(as_scalar(a) for a in self.beta) or (Fraction(0),) * d
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    def validate(self) -> "ModuleSpec":
        sig = self.signature.validate()
        if self.family not in FAMILIES:
            raise ModuleSpecError(f"unknown module family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.lattice.dim != sig.dim:
            raise ModuleSpecError(f"lattice dimension {self.lattice.dim} does not match ell2+ell3={sig.dim}")
        if len(self.alpha) != sig.dim or len(self.beta) != sig.dim:
            raise ModuleSpecError(f"alpha and beta must have length ell2+ell3={sig.dim}")
        if self.family == "GeneralAb":
            if sig.n_t < 1 or sig.dim < 1:
                raise ModuleSpecError("GeneralAb needs ell1+ell2 >= 1 and ell2+ell3 >= 1")
        elif sig.n_t != 0:
            raise ModuleSpecError(f"{self.family} exists only for signatures (0,0,ell)")
        return self

    @property
    def alpha_in_lattice(self) -> bool:
        return self.lattice.contains(self.alpha)

    def describe(self) -> str:
        if self.family in ("GeneralAb", "GradedAb"):
            return f"{self.family}(alpha=[{', '.join(map(scalar_str, self.alpha))}], b={scalar_str(self.b)})"
        return f"{self.family}(beta=[{', '.join(map(scalar_str, self.beta))}])"


class ModuleVector(Sparse):
    __slots__ = ()

    def sort_key(self, key):
        mu, idx = key
        return (mu, multiindex_key(idx))

    def __repr__(self):
        from .io.expr import format_module_vector

        return f"ModuleVector({format_module_vector(self)!r})"


class Module:
    """A concrete module: a validated spec plus its action on basis vectors."""

    def __init__(self, spec: ModuleSpec):
        self.spec = spec.validate()
        self.sig = spec.signature
        self.lattice = spec.lattice
        self.W = WittAlgebra(self.sig, self.lattice)
        self.killed: frozenset = frozenset()
        self._kernel = {
            "GeneralAb": self._act_ab,
            "GradedAb": self._act_ab,
            "GradedAbeta": self._act_abeta,
            "GradedBbeta": self._act_bbeta,
        }[spec.family]
        self._zero = self.lattice.zero()
        # integral parameters as ints keep the kernels off Fraction arithmetic
        self._alpha = tuple(_norm(a) for a in spec.alpha)
        self._beta = tuple(_norm(a) for a in spec.beta)
        self._b = _norm(spec.b)

    def __eq__(self, other):
        return isinstance(other, Module) and (self.spec, self.killed) == (other.spec, other.killed)

    def __hash__(self):
        return hash((self.spec, self.killed))

    def __repr__(self):
        return f"Module({self.spec.describe()})"

    # coordinates ------------------------------------------------------------

    def comp(self, mu, p):
        """mu_p through the embedding; zero for p <= ell1."""
        l1 = self.sig.ell1
        return 0 if p <= l1 else self.lattice.embed(mu)[p - l1 - 1]

    def alpha_comp(self, p):
        l1 = self.sig.ell1
        return 0 if p <= l1 else self._alpha[p - l1 - 1]

    def beta_comp(self, p):
        l1 = self.sig.ell1
        return 0 if p <= l1 else self._beta[p - l1 - 1]

    # vectors ------------------------------------------------------------------

    def vector(self, terms) -> ModuleVector:
        v = ModuleVector(self, terms)
        if self.killed and any(k in self.killed for k in v.terms):
            v = ModuleVector(self, {k: c for k, c in v.terms.items() if k not in self.killed})
        return v

    def basis(self, mu=None, idx=None, coeff=1) -> ModuleVector:
        mu = tuple(mu) if mu is not None else self._zero
        idx = tuple(idx) if idx is not None else (0,) * self.sig.n_t
        if len(mu) != self.lattice.dim or len(idx) != self.sig.n_t or any(i < 0 for i in idx):
            raise ValueError(f"basis vector v[{mu}; {idx}] does not fit signature {self.sig}")
        return self.vector({(mu, idx): coeff})

    def zero(self) -> ModuleVector:
        return ModuleVector(self, {})

    # the action -----------------------------------------------------------------

    def _act_ab(self, g, v, acc, scale):
        (mu, i, p), (nu, j) = g, v
        tgt = add_coords(mu, nu)
        ij = add_index(i, j)
        b = self._b
        c1 = self.alpha_comp(p) + self.comp(nu, p) + b * self.comp(mu, p)
        if c1:
            accumulate(acc, (tgt, ij), scale * c1)
        if p <= self.sig.n_t:
            c2 = j[p - 1] + b * i[p - 1]
            if c2:
                accumulate(acc, (tgt, lower(ij, p)), scale * c2)

    def _act_abeta(self, g, v, acc, scale):
        (mu, _, p), (nu, _) = g, v
        tgt = add_coords(mu, nu)
        z = self._zero
        if tgt == z:
            return  # (x^mu d) v_{-mu} = 0, which also gives d v_0 = 0
        if nu == z:
            c = self.comp(mu, p) + self.beta_comp(p)
        else:
            c = self.comp(nu, p)
        if c:
            accumulate(acc, (tgt, ()), scale * c)

    def _act_bbeta(self, g, v, acc, scale):
        (mu, _, p), (nu, _) = g, v
        tgt = add_coords(mu, nu)
        z = self._zero
        if nu == z:
            return  # (x^mu d) v_0 = 0
        if tgt == z:
            c = -(self.comp(mu, p) + self.beta_comp(p))
        else:
            c = self.comp(tgt, p)
        if c:
            accumulate(acc, (tgt, ()), scale * c)

    def act_into(self, g: WittElement, v: ModuleVector, acc: dict, scale=1) -> None:
        kern = self._kernel
        for gk, gc in g.terms.items():
            for vk, vc in v.terms.items():
                kern(gk, vk, acc, scale * gc * vc)

    def act(self, g: WittElement, v: ModuleVector) -> ModuleVector:
        if g.ctx != self.W:
            raise ValueError(f"Witt element over {g.ctx} acting on a module over {self.W}")
        if v.ctx != self:
            raise ValueError("module vector belongs to a different module")
        acc: dict = {}
        self.act_into(g, v, acc)
        return self.vector(acc)

    def act_basis(self, gkey, vkey) -> dict:
        acc: dict = {}
        self._kernel(gkey, vkey, acc, 1)
        for k in self.killed:
            acc.pop(k, None)
        return acc

    def apply_derivation(self, p: int, v: ModuleVector) -> ModuleVector:
        return self.act(self.W.derivation(p), v)

    # sampling ---------------------------------------------------------------------

    def random_vector(self, gamma_bound: int, level_bound: int, support_size: int,
                      rng: random.Random) -> ModuleVector:
        idxs = multiindices(self.sig.n_t, level_bound)
        keys: dict = {}
        total = (2 * gamma_bound + 1) ** self.lattice.dim * len(idxs)
        if support_size > total:
            raise ValueError(f"support size {support_size} exceeds the window")
        while len(keys) < support_size:
            mu = tuple(rng.randint(-gamma_bound, gamma_bound) for _ in range(self.lattice.dim))
            key = (mu, rng.choice(idxs))
            if key not in self.killed:
                keys.setdefault(key, None)
        return self.vector({k: _random_coeff(rng) for k in keys})

    def window_keys(self, gamma_bound: int, level_bound: int) -> list:
        return [k for k in iter_basis(self.lattice, self.sig.n_t, gamma_bound, level_bound) if k not in self.killed]


class QuotientModule(Module):
    """A module modulo the span of one basis vector that is a trivial submodule.

    Coefficients on the killed vector are dropped after every operation.
    """

    def __init__(self, spec: ModuleSpec, killed_key=None):
        super().__init__(spec)
        if killed_key is None:
            killed_key = (self._zero, (0,) * self.sig.n_t)
        if not self._spans_trivial_submodule():
            raise ModuleSpecError(f"{spec.describe()} has no trivial submodule spanned by v_0")
        self.killed = frozenset([tuple(killed_key)])

    def _spans_trivial_submodule(self) -> bool:
        s = self.spec
        zero_alpha = all(a == 0 for a in s.alpha)
        if s.family in ("GeneralAb", "GradedAb"):
            return zero_alpha and s.b == 0
        return s.family == "GradedBbeta"

    def __repr__(self):
        return f"QuotientModule({self.spec.describe()} / F v_0)"


def general_ab_action(sig: Signature, lattice: GroupLattice, alpha, b, g: WittElement,
                      v: dict) -> dict:
    """The A_{alpha,b} action formula on raw key maps, without family validation.

    Used to compare the nongraded formula against the graded one in
    signatures (0,0,ell), where the formula is still defined.
    """
    b = as_scalar(b)
    l1, n_t = sig.ell1, sig.n_t
    comp = lambda vec, p: 0 if p <= l1 else vec[p - l1 - 1]
    acc: dict = {}
    for (mu, i, p), gc in g.terms.items():
        emb_mu = lattice.embed(mu)
        for (nu, j), vc in v.items():
            tgt = add_coords(mu, nu)
            ij = add_index(i, j)
            c1 = comp(alpha, p) + comp(lattice.embed(nu), p) + b * comp(emb_mu, p)
            if c1:
                accumulate(acc, (tgt, ij), gc * vc * c1)
            if p <= n_t:
                c2 = j[p - 1] + b * i[p - 1]
                if c2:
                    accumulate(acc, (tgt, lower(ij, p)), gc * vc * c2)
    return acc


def module_axiom_residual(M: Module, g: WittElement, h: WittElement, v: ModuleVector) -> ModuleVector:
    """[g,h]v - g(hv) + h(gv); zero for every valid module."""
    acc: dict = {}
    M.act_into(M.W.bracket(g, h), v, acc)
    M.act_into(g, M.act(h, v), acc, -1)
    M.act_into(h, M.act(g, v), acc, 1)
    return M.vector(acc)


# ---------------------------------------------------------------------------
# weight filtration


def _nilpotent_parts(M: Module, beta: Sequence):
    beta = tuple(as_scalar(x) for x in beta)
    if len(beta) != M.sig.dim:
        raise ValueError(f"weight of length {len(beta)} for signature {M.sig}")
    l1 = M.sig.ell1

    def N(p, v):
        shift = 0 if p <= l1 else beta[p - l1 - 1]
        return M.apply_derivation(p, v) - shift * v if shift else M.apply_derivation(p, v)

    return N


def weight_stage(M: Module, v: ModuleVector, beta: Sequence) -> int | None:
    """Smallest n with v in V_beta^(n), or None when v is not in V_beta.

    The operators N_p = d_p - beta_p commute, so v lies in V_beta^(n) exactly
    when every product of n+1 of them kills v.  For the modules here the
    stage of a vector never exceeds the top level of its support, which
    bounds the search.
    """
    if not v:
        return 0
    N = _nilpotent_parts(M, beta)
    bound = max(level(idx) for _, idx in v.terms) + 1
    layer = [v]
    for n in range(bound + 1):
        nxt: dict = {}
        for w in layer:
            for p in M.sig.indices:
                u = N(p, w)
                if u:
                    nxt.setdefault(frozenset(u.terms.items()), u)
        if not nxt:
            return n
        layer = list(nxt.values())
    return None


def in_filtration(M: Module, v: ModuleVector, beta: Sequence, n: int) -> bool:
    s = weight_stage(M, v, beta)
    return s is not None and s <= n


def eigenspace_dimension(M: Module, beta: Sequence, gamma_bound: int, level_bound: int) -> tuple[int, list]:
    """Dimension of the stage-0 weight space of weight beta inside a window.

    Solves the joint kernel of the N_p on the span of the window's basis
    vectors.  Returns the dimension and a basis of the kernel.
    """
    N = _nilpotent_parts(M, beta)
    ls = LinearSystem(track=False)
    keys = M.window_keys(gamma_bound, level_bound)
    rows: dict = {}
    for k in keys:
        v = M.vector({k: 1})
        for p in M.sig.indices:
            for tgt, c in N(p, v).terms.items():
                rows.setdefault((p, tgt), {})[k] = c
    for coeffs in rows.values():
        ls.add(coeffs)
    sol = ls.solve()
    kernel = []
    for f in keys:
        if f in sol.pivots:
            continue
        vec = {f: Fraction(1)}
        for pv, (row, _) in sol.pivots.items():
            c = row.get(f)
            if c:
                vec[pv] = -c
        kernel.append(M.vector(vec))
    return len(kernel), kernel


def quotient_weight_multiplicity(spec: ModuleSpec, gamma_bound: int = 1, level_bound: int = 2) -> int:
    """dim of the stage-0 weight-0 space of A_{0,0} / F v_{0,0} on a window."""
    if spec.family != "GeneralAb" or any(spec.alpha) or spec.b != 0:
        raise ModuleSpecError("quotient_weight_multiplicity needs GeneralAb with alpha=0, b=0")
    Q = QuotientModule(spec)
    dim, _ = eigenspace_dimension(Q, (0,) * spec.signature.dim, gamma_bound, level_bound)
    return dim


# ---------------------------------------------------------------------------
# the recursive construction of the basis, as a verification harness


@dataclass
class RecursionRecord:
    mu: tuple
    idx: tuple
    route: str
    derived: ModuleVector
    canonical: ModuleVector
    scale: Fraction | None
    """derived = scale * canonical, or None when not proportional."""

    @property
    def matches(self) -> bool:
        return self.derived == self.canonical


def _p_prime(idx) -> int:
    return next(p for p, i in enumerate(idx, start=1) if i)


def _p_double_prime(M: Module, mu) -> int:
    for p in range(M.sig.ell1 + 1, M.sig.ell + 1):
        if M.alpha_comp(p) + M.comp(mu, p):
            return p
    raise ModuleSpecError("alpha + mu vanishes; the generic recursion needs alpha outside the lattice")


def construct_basis_vector(M: Module, mu, idx, route: str = "generic", _memo=None) -> RecursionRecord:
    """Rebuild v_{mu,idx} from v_{mu,0} by the recursion and compare with the
    basis vector of the closed-form module.

    ``route="generic"`` divides by alpha_{p''} + mu_{p''} and needs alpha
    outside the lattice; ``route="zero"`` uses the alpha = 0 recursion
    through t^{2_[p']} d_{p'}.
    """
    if M.spec.family != "GeneralAb":
        raise ModuleSpecError("the recursion is defined for GeneralAb only")
    mu, idx = tuple(mu), tuple(idx)
    if route == "generic":
        if M.spec.alpha_in_lattice:
            raise ModuleSpecError("the generic recursion needs alpha outside the lattice")
        derive = _derive_generic
    elif route == "zero":
        if any(M.spec.alpha) or mu != M.lattice.zero():
            raise ModuleSpecError("the alpha = 0 recursion builds v_{0,i} in A_{0,b}")
        derive = _derive_zero
    else:
        raise ValueError(f"unknown recursion route {route!r}")
    memo = {} if _memo is None else _memo
    derived = derive(M, mu, idx, memo)
    canonical = M.basis(mu, idx)
    key = (mu, idx)
    c = derived.terms.get(key)
    scale = None
    if c is not None and derived == c * canonical:
        scale = Fraction(c)
    elif not derived:
        scale = Fraction(0)
    return RecursionRecord(mu, idx, route, derived, canonical, scale)


def _derive_generic(M: Module, mu, idx, memo) -> ModuleVector:
    key = (mu, idx)
    if key in memo:
        return memo[key]
    if not any(idx):
        out = M.basis(mu, idx)
    else:
        n_t = M.sig.n_t
        p1 = _p_prime(idx)
        p2 = _p_double_prime(M, mu)
        lead = M.alpha_comp(p2) + M.comp(mu, p2)
        g = M.W.basis(M.lattice.zero(), unit(n_t, p1), p2)
        prev = _derive_generic(M, mu, lower(idx, p1), memo)
        out = M.act(g, prev)
        delta = int(p1 == p2)
        c = entry(idx, p2) - delta + delta * M.spec.b
        below = lower(idx, p2) if p2 <= n_t else None
        if c and below is not None:
            out = out - c * _derive_generic(M, mu, below, memo)
        out = Fraction(1) / lead * out
    memo[key] = out
    return out


def _derive_zero(M: Module, mu, idx, memo) -> ModuleVector:
    key = (mu, idx)
    if key in memo:
        return memo[key]
    if not any(idx):
        out = M.basis(mu, idx)
    else:
        p1 = _p_prime(idx)
        g = M.W.basis(M.lattice.zero(), unit(M.sig.n_t, p1, 2), p1)
        out = Fraction(1, idx[p1 - 1] + 1) * M.act(g, _derive_zero(M, mu, lower(idx, p1), memo))
    memo[key] = out
    return out


# ---------------------------------------------------------------------------
# closed-form identities satisfied by the module


@dataclass
class IdentityFailure:
    identity: str
    params: dict
    lhs: ModuleVector
    rhs: ModuleVector


@dataclass
class IdentityReport:
    identity: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _ab_checks(M: Module):
    s = M.spec
    if s.family != "GeneralAb":
        raise ModuleSpecError("the identity suites run on GeneralAb modules")
    return s.b


def derivation_identity(M: Module, gamma_bound: int, level_bound: int) -> IdentityReport:
    """d_p v_{mu,i} = (alpha_p + mu_p) v_{mu,i} + i_p v_{mu,i-1_[p]}."""
    _ab_checks(M)
    rep = IdentityReport("derivation")
    for mu, idx in iter_basis(M.lattice, M.sig.n_t, gamma_bound, level_bound):
        v = M.basis(mu, idx)
        for p in M.sig.indices:
            lhs = M.apply_derivation(p, v)
            rhs = (M.alpha_comp(p) + M.comp(mu, p)) * v
            below = lower(idx, p)
            if below is not None:
                rhs = rhs + entry(idx, p) * M.basis(mu, below)
            rep.checked += 1
            if lhs != rhs:
                rep.failures.append(IdentityFailure(rep.identity, {"mu": mu, "i": idx, "p": p}, lhs, rhs))
    return rep


def _delta(a, b):
    return 1 if a == b else 0


def level_one_identities(M: Module, gamma_bound: int) -> tuple[IdentityReport, IdentityReport]:
    """The two level-one transport rules for x^mu d_q on v_{lambda,1_[p]} and
    x^mu t^{1_[p]} d_q on v_{lambda,0}."""
    b = _ab_checks(M)
    n_t = M.sig.n_t
    zero_idx = (0,) * n_t
    box = M.lattice.box(gamma_bound)
    first = IdentityReport("level_one_x")
    second = IdentityReport("level_one_xt")
    for p in range(1, n_t + 1):
        e = unit(n_t, p)
        for q in M.sig.indices:
            for mu in box:
                g1 = M.W.basis(mu, zero_idx, q)
                g2 = M.W.basis(mu, e, q)
                for lam in box:
                    s = add_coords(mu, lam)
                    c = M.alpha_comp(q) + M.comp(lam, q) + b * M.comp(mu, q)
                    lhs = M.act(g1, M.basis(lam, e))
                    rhs = M.vector({(s, e): c, (s, zero_idx): _delta(p, q)})
                    first.checked += 1
                    if lhs != rhs:
                        first.failures.append(IdentityFailure(first.identity, {"p": p, "q": q, "mu": mu, "lambda": lam}, lhs, rhs))
                    lhs = M.act(g2, M.basis(lam, zero_idx))
                    rhs = M.vector({(s, e): c, (s, zero_idx): _delta(p, q) * b})
                    second.checked += 1
                    if lhs != rhs:
                        second.failures.append(IdentityFailure(second.identity, {"p": p, "q": q, "mu": mu, "lambda": lam}, lhs, rhs))
    return first, second


def raising_identities(M: Module, gamma_bound: int, level_bound: int) -> tuple[IdentityReport, ...]:
    """The three general-level rules: t^{1_[p]} d_q on v_{lambda,i},
    x^mu d_q on v_{lambda,i+1_[p]} and x^mu t^{1_[p]} d_q on v_{lambda,i}."""
    b = _ab_checks(M)
    n_t = M.sig.n_t
    zero = M.lattice.zero()
    box = M.lattice.box(gamma_bound)
    idxs = multiindices(n_t, level_bound)
    reps = (IdentityReport("raise_t"), IdentityReport("raise_x"), IdentityReport("raise_xt"))

    def check(rep, params, lhs, rhs):
        rep.checked += 1
        if lhs != rhs:
            rep.failures.append(IdentityFailure(rep.identity, params, lhs, rhs))

    for p in range(1, n_t + 1):
        e = unit(n_t, p)
        for q in M.sig.indices:
            gt = M.W.basis(zero, e, q)
            for idx in idxs:
                up = add_index(idx, e)
                down = lower(up, q)
                iq = entry(idx, q)
                for lam in box:
                    v_i = M.basis(lam, idx)
                    v_up = M.basis(lam, up)
                    aq_l = M.alpha_comp(q) + M.comp(lam, q)
                    terms = {(lam, up): aq_l}
                    if down is not None:
                        accumulate(terms, (lam, down), iq + _delta(p, q) * b)
                    check(reps[0], {"p": p, "q": q, "lambda": lam, "i": idx}, M.act(gt, v_i), M.vector(terms))
                    for mu in box:
                        s = add_coords(mu, lam)
                        c = aq_l + b * M.comp(mu, q)
                        gx = M.W.basis(mu, (0,) * n_t, q)
                        gxt = M.W.basis(mu, e, q)
                        terms = {(s, up): c}
                        if down is not None:
                            accumulate(terms, (s, down), iq + _delta(p, q))
                        params = {"p": p, "q": q, "mu": mu, "lambda": lam, "i": idx}
                        check(reps[1], params, M.act(gx, v_up), M.vector(terms))
                        terms = {(s, up): c}
                        if down is not None:
                            accumulate(terms, (s, down), iq + _delta(p, q) * b)
                        check(reps[2], params, M.act(gxt, v_i), M.vector(terms))
    return reps


def claims_suite(M: Module, gamma_bound: int = 3, level_bound: int = 3) -> list[IdentityReport]:
    out = [derivation_identity(M, gamma_bound, level_bound)]
    out.extend(level_one_identities(M, gamma_bound))
    out.extend(raising_identities(M, gamma_bound, level_bound))
    return out


def sample_pairs(M: Module, trials: int, seed, gamma_bound: int = 3, level_bound: int = 3,
                 max_support: int = 4) -> Iterable[tuple[WittElement, WittElement, ModuleVector]]:
    rng = random.Random(seed)
    for _ in range(trials):
        g = M.W.random_element(gamma_bound, level_bound, rng.randint(1, max_support), rng=rng)
        h = M.W.random_element(gamma_bound, level_bound, rng.randint(1, max_support), rng=rng)
        v = M.random_vector(gamma_bound, level_bound, rng.randint(1, max_support), rng)
        yield g, h, v
