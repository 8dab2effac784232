"""The Witt-type Lie algebra W = A (x) D and its bracket."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .algebra import AlgebraElement, CommutativeAlgebra, ProbeReport, probe_operator
from .foundations import (
    GroupLattice,
    Signature,
    add_coords,
    add_index,
    entry,
    lower,
    multiindex_key,
    multiindices,
)
from .sparse import Sparse, accumulate


class WittElement(Sparse):
    """Keys are ``(alpha, idx, p)`` standing for x^alpha t^idx d_p."""

    __slots__ = ()

    def sort_key(self, key):
        alpha, idx, p = key
        return (alpha, multiindex_key(idx), p)

    def __repr__(self):
        from .io.expr import format_witt_element

        return f"WittElement({format_witt_element(self)!r})"


class WittAlgebra:
    def __init__(self, signature: Signature, lattice: GroupLattice):
        self.A = CommutativeAlgebra(signature, lattice)
        self.sig = self.A.sig
        self.lattice = lattice

    def __eq__(self, other):
        return isinstance(other, WittAlgebra) and self.A == other.A

    def __hash__(self):
        return hash(("W", self.A))

    def __repr__(self):
        return f"WittAlgebra{self.sig}"

    # construction ---------------------------------------------------------

    def element(self, terms) -> WittElement:
        return WittElement(self, terms)

    def zero(self) -> WittElement:
        return WittElement(self, {})

    def basis(self, alpha=None, idx=None, p: int = 1, coeff=1) -> WittElement:
        alpha = tuple(alpha) if alpha is not None else self.lattice.zero()
        idx = tuple(idx) if idx is not None else (0,) * self.sig.n_t
        self.A._check_key(alpha, idx)
        self.sig.kind(p)
        return WittElement(self, {(alpha, idx, p): coeff})

    def derivation(self, p: int) -> WittElement:
        """The bare derivation d_p = x^0 t^0 d_p."""
        return self.basis(p=p)

    # bracket --------------------------------------------------------------

    def _comp(self, alpha, p):
        return self.A.alpha_component(alpha, p)

    def bracket_basis(self, a, b, acc: dict, scale=1) -> None:
        """Accumulate scale * [a, b] into acc for basis keys a, b."""
        (al, i, p), (be, j, q) = a, b
        mu = add_coords(al, be)
        ij = add_index(i, j)
        # x^{a+b} t^{i+j} (beta_p d_q - alpha_q d_p)
        bp = self._comp(be, p)
        aq = self._comp(al, q)
        if bp:
            accumulate(acc, (mu, ij, q), scale * bp)
        if aq:
            accumulate(acc, (mu, ij, p), -scale * aq)
        jp = entry(j, p)
        if jp:
            accumulate(acc, (mu, lower(ij, p), q), scale * jp)
        iq = entry(i, q)
        if iq:
            accumulate(acc, (mu, lower(ij, q), p), -scale * iq)

    def bracket(self, u: WittElement, v: WittElement) -> WittElement:
        if u.ctx != self or v.ctx != self:
            raise ValueError("signature mismatch in bracket")
        acc: dict = {}
        for a, c in u.terms.items():
            for b, d in v.terms.items():
                self.bracket_basis(a, b, acc, c * d)
        return WittElement(self, acc)

    def ad(self, u: WittElement) -> Callable[[WittElement], WittElement]:
        return lambda v: self.bracket(u, v)

    def ad_probe(self, u: WittElement, v: WittElement, n_max: int = 64) -> ProbeReport:
        return probe_operator(self.ad(u), v, n_max)

    # action on A ------------------------------------------------------------

    def act_on_algebra(self, u: WittElement, f: AlgebraElement) -> AlgebraElement:
        """(x^a t^i d_p) f = x^a t^i * d_p(f); W acts faithfully on A."""
        out = self.A.zero()
        for (alpha, idx, p), c in u.terms.items():
            df = self.A.apply_derivation(p, f)
            if df:
                out = out + c * self.A.mul(self.A.monomial(alpha, idx), df)
        return out

    # sampling ----------------------------------------------------------------

    def window_keys(self, gamma_bound: int, level_bound: int) -> list:
        idxs = multiindices(self.sig.n_t, level_bound)
        return [
            (alpha, idx, p)
            for alpha in self.lattice.box(gamma_bound)
            for idx in idxs
            for p in self.sig.indices
        ]

    def random_element(self, gamma_bound: int, level_bound: int, support_size: int,
                       seed=None, rng: random.Random | None = None) -> WittElement:
        return generate_random_element(self, gamma_bound, level_bound, support_size, seed, rng)


def _random_coeff(rng: random.Random) -> Fraction:
    num = rng.randint(1, 10) * rng.choice((1, -1))
    return Fraction(num, rng.randint(1, 10))


def _sample_keys(rng: random.Random, W: WittAlgebra, gamma_bound, level_bound, k) -> list:
    """k distinct window keys without materializing huge windows."""
    n_t = W.sig.n_t
    idxs = multiindices(n_t, level_bound)
    total = (2 * gamma_bound + 1) ** W.lattice.dim * len(idxs) * W.sig.ell
    if k > total:
        raise ValueError(f"support size {k} exceeds the {total} basis elements of the window")
    seen: dict = {}
    while len(seen) < k:
        alpha = tuple(rng.randint(-gamma_bound, gamma_bound) for _ in range(W.lattice.dim))
        key = (alpha, rng.choice(idxs), rng.randint(1, W.sig.ell))
        seen.setdefault(key, None)
    return list(seen)


def generate_random_element(W: WittAlgebra, gamma_bound: int, level_bound: int,
                            support_size: int, seed=None,
                            rng: random.Random | None = None) -> WittElement:
    """Deterministic random element with exactly ``support_size`` terms."""
    if min(gamma_bound, level_bound, support_size) < 0:
        raise ValueError("window bounds must be nonnegative")
    rng = rng if rng is not None else random.Random(seed)
    keys = _sample_keys(rng, W, gamma_bound, level_bound, support_size)
    return WittElement(W, {k: _random_coeff(rng) for k in keys})


def classical_witt_bracket(W: WittAlgebra, u: WittElement, v: WittElement) -> WittElement:
    """[x^a d_p, x^b d_q] = x^{a+b}(b_p d_q - a_q d_p), for signatures (0,0,l)."""
    if W.sig.n_t:
        raise ValueError("the classical bracket needs a signature without t-variables")
    acc: dict = {}
    for (a, _, p), c in u.terms.items():
        va = W.lattice.embed(a)
        for (b, _, q), d in v.terms.items():
            vb = W.lattice.embed(b)
            s = add_coords(a, b)
            accumulate(acc, (s, (), q), c * d * vb[p - 1])
            accumulate(acc, (s, (), p), -c * d * va[q - 1])
    return WittElement(W, acc)
