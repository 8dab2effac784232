"""The semigroup algebra F[Gamma x Z_+^(ell1+ell2)] and its derivations.

A monomial x^alpha t^i is the key ``(alpha, i)`` with ``alpha`` the integer
lattice coordinates and ``i`` the multi-index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .foundations import (
    GroupLattice,
    Signature,
    add_coords,
    add_index,
    component,
    lower,
    multiindex_key,
)
from . import linalg
from .sparse import Sparse, accumulate


class AlgebraElement(Sparse):
    __slots__ = ()

    def sort_key(self, key):
        alpha, idx = key
        return (alpha, multiindex_key(idx))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.ctx.mul(self, other)
        return self.__rmul__(other)

    def __repr__(self):
        from .io.expr import format_algebra_element

        return f"AlgebraElement({format_algebra_element(self)!r})"


class CommutativeAlgebra:
    """A = F[Gamma x Z_+^(ell1+ell2)] for a signature and a lattice."""

    def __init__(self, signature: Signature, lattice: GroupLattice):
        self.sig = Signature(*signature).validate()
        if lattice.dim != self.sig.dim:
            raise ValueError(f"lattice dimension {lattice.dim} does not match ell2+ell3={self.sig.dim}")
        self.lattice = lattice

    def __eq__(self, other):
        return isinstance(other, CommutativeAlgebra) and (self.sig, self.lattice) == (other.sig, other.lattice)

    def __hash__(self):
        return hash((self.sig, self.lattice))

    def __repr__(self):
        return f"CommutativeAlgebra{self.sig}"

    # construction ---------------------------------------------------------

    def element(self, terms) -> AlgebraElement:
        return AlgebraElement(self, terms)

    def monomial(self, alpha=None, idx=None, coeff=1) -> AlgebraElement:
        alpha = tuple(alpha) if alpha is not None else self.lattice.zero()
        idx = tuple(idx) if idx is not None else (0,) * self.sig.n_t
        self._check_key(alpha, idx)
        return AlgebraElement(self, {(alpha, idx): coeff})

    def one(self) -> AlgebraElement:
        return self.monomial()

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def _check_key(self, alpha, idx):
        if len(alpha) != self.lattice.dim:
            raise ValueError(f"x-exponent needs {self.lattice.dim} coordinates, got {len(alpha)}")
        if len(idx) != self.sig.n_t or any(i < 0 for i in idx):
            raise ValueError(f"t-exponent must be {self.sig.n_t} nonnegative integers, got {idx}")

    def alpha_component(self, alpha, p: int):
        """alpha_p with the first ell1 slots reading zero."""
        return component(self.sig, self.lattice.embed(alpha), p)

    # product -------------------------------------------------------------

    def mul(self, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
        if u.ctx != self or v.ctx != self:
            raise ValueError("signature mismatch in algebra product")
        acc: dict = {}
        for (a, i), c in u.terms.items():
            for (b, j), d in v.terms.items():
                accumulate(acc, (add_coords(a, b), add_index(i, j)), c * d)
        return AlgebraElement(self, acc)

    # derivations ---------------------------------------------------------

    def apply_down_grading(self, p: int, u: AlgebraElement) -> AlgebraElement:
        if not 1 <= p <= self.sig.n_t:
            raise IndexError(f"down-grading index {p} outside 1..{self.sig.n_t}")
        acc: dict = {}
        for (a, i), c in u.terms.items():
            j = lower(i, p)
            if j is not None:
                accumulate(acc, (a, j), c * i[p - 1])
        return AlgebraElement(self, acc)

    def apply_grading(self, q: int, u: AlgebraElement) -> AlgebraElement:
        if not self.sig.ell1 < q <= self.sig.ell:
            raise IndexError(f"grading index {q} outside {self.sig.ell1 + 1}..{self.sig.ell}")
        acc: dict = {}
        for (a, i), c in u.terms.items():
            accumulate(acc, (a, i), c * self.alpha_component(a, q))
        return AlgebraElement(self, acc)

    def apply_derivation(self, p: int, u: AlgebraElement) -> AlgebraElement:
        kind = self.sig.kind(p)
        if kind == "down":
            return self.apply_down_grading(p, u)
        if kind == "grading":
            return self.apply_grading(p, u)
        return self.apply_down_grading(p, u) + self.apply_grading(p, u)

    def apply(self, derivation: Mapping[int, object], u: AlgebraElement) -> AlgebraElement:
        """Apply sum_p a_p d_p."""
        out = self.zero()
        for p, a in derivation.items():
            out = out + Fraction(a) * self.apply_derivation(p, u)
        return out

    # local behaviour ------------------------------------------------------

    def local_behavior_probe(self, p: int, u: AlgebraElement, n_max: int = 64) -> "ProbeReport":
        return probe_operator(lambda w: self.apply_derivation(p, w), u, n_max)


@dataclass(frozen=True)
class ProbeReport:
    nilpotent_at: int | None
    """Smallest n with T^n(v) = 0, if reached within the bound."""
    dimension_of_span: int
    eigen: Fraction | None
    """Eigenvalue when T(v) is a multiple of v."""
    stabilized: bool
    """Whether the span of the iterates stopped growing within the bound."""


def probe_operator(T, v: Sparse, n_max: int = 64) -> ProbeReport:
    """Iterate a linear operator on v and summarize the orbit."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    eigen = None
    if v:
        tv = T(v)
        k = next(iter(v.terms))
        lam = Fraction(tv.terms.get(k, 0)) / Fraction(v.terms[k])
        if tv == lam * v:
            eigen = lam
    iterates = []
    keys: dict = {}
    w = v
    nilpotent_at = 0 if not v else None
    dim = 0
    stabilized = False
    for n in range(n_max + 1):
        if not w:
            nilpotent_at = n
            stabilized = True
            break
        iterates.append(w)
        for key in w.terms:
            keys.setdefault(key, len(keys))
        rows = [[Fraction(it.terms.get(key, 0)) for key in keys] for it in iterates]
        new_dim = linalg.rank(rows)
        if new_dim == dim:
            stabilized = True
            iterates.pop()
            break
        dim = new_dim
        if n < n_max:
            w = T(w)
    return ProbeReport(nilpotent_at, dim, eigen, stabilized)
