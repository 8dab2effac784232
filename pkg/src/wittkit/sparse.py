"""Finitely supported linear combinations with exact coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping


def _clean(terms: Mapping) -> dict:
    out = {}
    for k, c in terms.items():
        if c:
            out[k] = c if isinstance(c, (int, Fraction)) else Fraction(c)
    return out


def accumulate(acc: dict, key, coeff) -> None:
    """acc[key] += coeff, dropping the entry when it cancels."""
    new = acc.get(key, 0) + coeff
    if new:
        acc[key] = new
    else:
        acc.pop(key, None)


class Sparse:
    """Base class: a map basis-key -> nonzero coefficient plus a context.

    Instances are treated as immutable.  ``sort_key`` orders the basis keys
    for display and serialization.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms: Mapping | Iterable = ()):
        self.ctx = ctx
        if not isinstance(terms, Mapping):
            acc: dict = {}
            for k, c in terms:
                accumulate(acc, k, c)
            terms = acc
        self.terms = _clean(terms)

    # subclasses override
    def sort_key(self, key):
        return key

    def _new(self, terms):
        return type(self)(self.ctx, terms)

    def _check(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ValueError(f"cannot combine elements of {self.ctx} and {other.ctx}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        acc = dict(self.terms)
        for k, c in other.terms.items():
            accumulate(acc, k, c)
        return self._new(acc)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        acc = dict(self.terms)
        for k, c in other.terms.items():
            accumulate(acc, k, -c)
        return self._new(acc)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __rmul__(self, scalar):
        if isinstance(scalar, Sparse):
            return NotImplemented
        s = Fraction(scalar)
        if s == 0:
            return self._new({})
        return self._new({k: c * s for k, c in self.terms.items()})

    def scale(self, scalar):
        return self.__rmul__(scalar)

    def map_keys(self, f: Callable):
        acc: dict = {}
        for k, c in self.terms.items():
            nk = f(k)
            if nk is not None:
                accumulate(acc, nk, c)
        return self._new(acc)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: self.sort_key(kv[0])))

    def coefficient(self, key) -> Fraction:
        return Fraction(self.terms.get(key, 0))

    def support(self) -> list:
        return sorted(self.terms, key=self.sort_key)

    def is_zero(self) -> bool:
        return not self.terms
