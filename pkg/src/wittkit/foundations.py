"""Scalars, multi-indices, the group lattice and the derivation pairing.

Scalars are :class:`fractions.Fraction`.  Multi-indices and lattice
coordinates are plain tuples of ints so they can be used as dictionary keys
in the sparse element types built on top of this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd as _gcd
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .linalg import clear_denominators, hermite_normal_form, hnf_solve, rank as _rank

Scalar = Fraction
MultiIndex = tuple  # tuple[int, ...] of nonnegative entries
Coords = tuple  # integer coordinates of a group element


class SignatureError(ValueError):
    pass


class LatticeError(ValueError):
    pass


def as_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def scalar_str(x) -> str:
    x = as_scalar(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _norm(x):
    """Fraction with denominator 1 becomes int; keeps hot loops on ints."""
    return x.numerator if isinstance(x, Fraction) and x.denominator == 1 else x


class Signature(NamedTuple):
    ell1: int
    ell2: int
    ell3: int

    def validate(self) -> "Signature":
        if min(self) < 0:
            raise SignatureError("ell1, ell2, ell3 must be nonnegative")
        if self.ell <= 0:
            raise SignatureError("ell = ell1 + ell2 + ell3 must be positive")
        return self

    @property
    def ell(self) -> int:
        return self.ell1 + self.ell2 + self.ell3

    @property
    def n_t(self) -> int:
        """Number of t-variables, i.e. the length of a multi-index."""
        return self.ell1 + self.ell2

    @property
    def dim(self) -> int:
        """Dimension of the ambient space of the group lattice."""
        return self.ell2 + self.ell3

    def kind(self, p: int) -> str:
        """'down', 'mixed' or 'grading' for the derivation index p (1-based)."""
        if not 1 <= p <= self.ell:
            raise IndexError(f"derivation index {p} outside 1..{self.ell}")
        if p <= self.ell1:
            return "down"
        if p <= self.ell1 + self.ell2:
            return "mixed"
        return "grading"

    def has_t(self, p: int) -> bool:
        return p <= self.n_t

    def has_x(self, p: int) -> bool:
        return p > self.ell1

    @property
    def indices(self) -> range:
        return range(1, self.ell + 1)

    def __str__(self):
        return f"({self.ell1},{self.ell2},{self.ell3})"


# ---------------------------------------------------------------------------
# multi-indices


def level(idx: MultiIndex) -> int:
    return sum(idx)


def multiindex_key(idx: MultiIndex) -> tuple:
    """Sort key realizing the total order: level first, then lexicographic."""
    return (sum(idx), tuple(idx))


def multiindex_compare(a: MultiIndex, b: MultiIndex) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    if len(a) != len(b):
        raise ValueError(f"multi-index length mismatch: {len(a)} vs {len(b)}")
    ka, kb = multiindex_key(a), multiindex_key(b)
    return (ka > kb) - (ka < kb)


def unit(n: int, p: int, times: int = 1) -> MultiIndex:
    """The multi-index with ``times`` in slot p (1-based) and zeros elsewhere."""
    return tuple(times if q == p else 0 for q in range(1, n + 1))


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def lower(idx: MultiIndex, p: int) -> MultiIndex | None:
    """idx - 1_[p], or None when the result leaves Z_+ (or p has no t-slot)."""
    if p > len(idx) or idx[p - 1] == 0:
        return None
    return idx[: p - 1] + (idx[p - 1] - 1,) + idx[p:]


def raise_(idx: MultiIndex, p: int, times: int = 1) -> MultiIndex:
    return idx[: p - 1] + (idx[p - 1] + times,) + idx[p:]


def entry(idx: MultiIndex, p: int) -> int:
    """i_p, reading 0 outside the t-slots."""
    return idx[p - 1] if p <= len(idx) else 0


def multiindices(n: int, max_level: int) -> list[MultiIndex]:
    """All multi-indices of length n with level <= max_level, in total order."""
    out: list[MultiIndex] = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for i in range(remaining + 1):
            rec(prefix + [i], remaining - i, slots - 1)

    rec([], max_level, n)
    return sorted(out, key=multiindex_key)


# ---------------------------------------------------------------------------
# group lattice


def _as_row(v) -> tuple[Fraction, ...]:
    return tuple(as_scalar(x) for x in v)


class GroupLattice:
    """A nondegenerate subgroup of Q^d given by d independent generators.

    Group elements are integer coordinate tuples relative to the generators.
    Rational vectors are tested for membership through the Hermite normal
    form of the denominator-cleared generator matrix.
    """

    def __init__(self, generators: Sequence[Sequence], dim: int | None = None):
        gens = [_as_row(g) for g in generators]
        if dim is None:
            if not gens:
                raise LatticeError("a lattice needs at least one generator")
            dim = len(gens[0])
        if any(len(g) != dim for g in gens):
            raise LatticeError(f"every generator must have length {dim}")
        if dim == 0:
            gens = []
        if len(gens) != dim or _rank([list(g) for g in gens]) != dim:
            raise LatticeError(
                f"degenerate lattice: generators must form a basis of Q^{dim} "
                f"(got {len(gens)} generators of rank {_rank([list(g) for g in gens]) if gens else 0})"
            )
        self.dim = dim
        self.generators = tuple(gens)
        self._scale = 1
        for g in gens:
            _, s = clear_denominators(g)
            self._scale = self._scale * s // _gcd(self._scale, s)
        int_rows = [[int(x * self._scale) for x in g] for g in gens]
        self._hnf = hermite_normal_form(int_rows)
        self._embed_cache: dict = {}

    @classmethod
    def standard(cls, dim: int) -> "GroupLattice":
        return cls([[int(i == j) for j in range(dim)] for i in range(dim)], dim=dim)

    @classmethod
    def from_generating_set(cls, vectors: Sequence[Sequence], dim: int | None = None) -> "GroupLattice":
        """Lattice generated by an arbitrary finite set, reduced to an HNF basis."""
        rows = [_as_row(v) for v in vectors]
        if dim is None:
            dim = len(rows[0])
        scale = 1
        for r in rows:
            _, s = clear_denominators(r)
            scale = scale * s // _gcd(scale, s)
        H, _, _ = hermite_normal_form([[int(x * scale) for x in r] for r in rows])
        return cls([[Fraction(x, scale) for x in h] for h in H], dim=dim)

    @cached_property
    def is_standard(self) -> bool:
        return all(g[j] == (i == j) for i, g in enumerate(self.generators) for j in range(self.dim))

    def __eq__(self, other):
        return isinstance(other, GroupLattice) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return f"GroupLattice({[[scalar_str(x) for x in g] for g in self.generators]})"

    def zero(self) -> Coords:
        return (0,) * self.dim

    def embed(self, coords: Coords) -> tuple:
        """Rational vector of a group element (entries are ints when integral)."""
        hit = self._embed_cache.get(coords)
        if hit is not None:
            return hit
        if len(coords) != self.dim:
            raise LatticeError(f"group element needs {self.dim} coordinates, got {len(coords)}")
        if self.is_standard:
            vec = tuple(int(c) for c in coords)
        else:
            vec = tuple(
                _norm(sum((Fraction(c) * g[j] for c, g in zip(coords, self.generators)), Fraction(0)))
                for j in range(self.dim)
            )
        self._embed_cache[coords] = vec
        return vec

    def coordinates(self, w: Sequence) -> Coords | None:
        """Integer coordinates of w, or None when w is not in the lattice."""
        w = _as_row(w)
        if len(w) != self.dim:
            raise LatticeError(f"vector of length {len(w)} in a lattice of dimension {self.dim}")
        target = [x * self._scale for x in w]
        if any(x.denominator != 1 for x in target):
            return None
        H, U, pivots = self._hnf
        x = hnf_solve(H, U, pivots, [int(t) for t in target])
        return None if x is None else tuple(x)

    def contains(self, w: Sequence) -> bool:
        if self.dim == 0:
            return True
        return self.coordinates(w) is not None

    def box(self, bound: int) -> list[Coords]:
        """All coordinate tuples with entries in [-bound, bound]."""
        out: list[Coords] = [()]
        for _ in range(self.dim):
            out = [c + (k,) for c in out for k in range(-bound, bound + 1)]
        return out


def lattice_contains(L: GroupLattice, w: Sequence) -> bool:
    return L.contains(w)


def add_coords(a: Coords, b: Coords) -> Coords:
    return tuple(x + y for x, y in zip(a, b))


def neg_coords(a: Coords) -> Coords:
    return tuple(-x for x in a)


def sub_coords(a: Coords, b: Coords) -> Coords:
    return tuple(x - y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# weights and the pairing


def component(sig: Signature, vec: Sequence, p: int):
    """Entry p (1-based over 1..ell) of a vector of F^(ell2+ell3) written with
    ell1 leading zeros."""
    if p <= sig.ell1:
        return 0
    return vec[p - sig.ell1 - 1]


def weight_vector(values: Iterable) -> tuple:
    return tuple(_norm(as_scalar(v)) for v in values)


def pairing(sig: Signature, derivation: Mapping[int, object], beta: Sequence) -> Fraction:
    """<sum a_p d_p, beta> = sum over p > ell1 of a_p beta_p."""
    if len(beta) != sig.dim:
        raise ValueError(f"weight of length {len(beta)} for signature {sig}")
    total = Fraction(0)
    for p, a in derivation.items():
        sig.kind(p)
        if p > sig.ell1:
            total += as_scalar(a) * as_scalar(beta[p - sig.ell1 - 1])
    return total


@dataclass(frozen=True)
class Window:
    """Finite fragment of a basis: bounded lattice coordinates and levels.

    ``margin`` is the extra room given to intermediate vectors.
    """

    gamma_bound: int = 2
    level_bound: int = 2
    margin: int = 1

    def __post_init__(self):
        if min(self.gamma_bound, self.level_bound, self.margin) < 0:
            raise ValueError("window bounds must be nonnegative")

    def enlarged(self) -> "Window":
        return Window(self.gamma_bound + self.margin, self.level_bound + self.margin, 0)


def iter_basis(lattice: GroupLattice, n_t: int, gamma_bound: int, level_bound: int) -> Iterator[tuple]:
    """(coords, multi-index) pairs of a window, coords lexicographic then
    multi-indices in total order."""
    idxs = multiindices(n_t, level_bound)
    for c in lattice.box(gamma_bound):
        for i in idxs:
            yield c, i
