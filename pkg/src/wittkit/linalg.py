"""Exact linear algebra over the integers and the rationals.

Three tools live here:

* ``hermite_normal_form`` -- row-style HNF of an integer matrix together with
  the unimodular transform, used for lattice membership and coordinates.
* ``bareiss_echelon`` and friends -- fraction-free elimination for small dense
  systems (determinants, ranks, null spaces).
* ``LinearSystem`` -- an incremental sparse solver that keeps a reduced row
  echelon form and records, for every reduced row, the combination of input
  rows that produced it.  An inconsistent system therefore always comes with
  a replayable certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Sequence


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


def clear_denominators(row: Sequence[Fraction]) -> tuple[list[int], int]:
    """Return (integer row, scale) with integer row == scale * row."""
    scale = 1
    for x in row:
        scale = _lcm(scale, Fraction(x).denominator)
    return [int(Fraction(x) * scale) for x in row], scale


# ---------------------------------------------------------------------------
# Hermite normal form


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(M: Sequence[Sequence[int]]):
    """Row-style Hermite normal form.

    Returns ``(H, U, pivots)`` where ``U`` is unimodular with ``U @ M``
    equal to ``H`` stacked on zero rows, ``H`` is in echelon form with positive
    pivots, and entries above each pivot are reduced into ``[0, pivot)``.
    ``pivots`` lists the pivot column of each row of ``H``.
    """
    A = [[int(x) for x in row] for row in M]
    k = len(A)
    n = len(A[0]) if k else 0
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    r = 0
    pivots = []
    for c in range(n):
        # fold every lower row into row r with extended gcd steps
        for i in range(r + 1, k):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            pa, pb = a // g, b // g
            A[r], A[i] = (
                [x * u + y * v for u, v in zip(A[r], A[i])],
                [-pb * u + pa * v for u, v in zip(A[r], A[i])],
            )
            U[r], U[i] = (
                [x * u + y * v for u, v in zip(U[r], U[i])],
                [-pb * u + pa * v for u, v in zip(U[r], U[i])],
            )
        if r < k and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-u for u in A[r]]
                U[r] = [-u for u in U[r]]
            piv = A[r][c]
            for i in range(r):
                q = A[i][c] // piv
                if q:
                    A[i] = [u - q * v for u, v in zip(A[i], A[r])]
                    U[i] = [u - q * v for u, v in zip(U[i], U[r])]
            pivots.append(c)
            r += 1
            if r == k:
                break
    return A[:r], U, pivots


def hnf_solve(H, U, pivots, w: Sequence[int]) -> list[int] | None:
    """Integer x with x @ M == w, using the output of ``hermite_normal_form``.

    Returns None when no integer solution exists.
    """
    w = [int(x) for x in w]
    y = []
    for row, c in zip(H, pivots):
        q, rem = divmod(w[c], row[c])
        if rem:
            return None
        y.append(q)
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    if any(w):
        return None
    k = len(U)
    return [sum(y[i] * U[i][j] for i in range(len(y))) for j in range(k)]


# ---------------------------------------------------------------------------
# dense fraction-free elimination


@dataclass
class Echelon:
    matrix: list[list[int]]
    rank: int
    row_perm: list[int]
    col_perm: list[int]
    sign: int


def bareiss_echelon(M: Sequence[Sequence[int]]) -> Echelon:
    """Bareiss elimination with full pivoting.

    The pivot at each stage is the first nonzero entry of the remaining
    submatrix in row-then-column order, so the result is deterministic.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    rows = list(range(m))
    cols = list(range(n))
    sign = 1
    prev = 1
    k = 0
    while k < min(m, n):
        found = None
        for i in range(k, m):
            for j in range(k, n):
                if A[i][j]:
                    found = (i, j)
                    break
            if found:
                break
        if found is None:
            break
        i, j = found
        if i != k:
            A[k], A[i] = A[i], A[k]
            rows[k], rows[i] = rows[i], rows[k]
            sign = -sign
        if j != k:
            for row in A:
                row[k], row[j] = row[j], row[k]
            cols[k], cols[j] = cols[j], cols[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, m):
            a_ik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (piv * row_i[j] - a_ik * row_k[j]) // prev
            row_i[k] = 0
        prev = piv
        k += 1
    return Echelon(A, k, rows, cols, sign)


def _integer_rows(M: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    out, scales = [], []
    for row in M:
        r, s = clear_denominators(row)
        out.append(r)
        scales.append(s)
    return out, scales


def determinant(M: Sequence[Sequence]) -> Fraction:
    n = len(M)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    A, scales = _integer_rows(M)
    ech = bareiss_echelon(A)
    if ech.rank < n:
        return Fraction(0)
    denom = 1
    for s in scales:
        denom *= s
    return Fraction(ech.sign * ech.matrix[n - 1][n - 1], denom)


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    A, _ = _integer_rows(M)
    return bareiss_echelon(A).rank


def nullspace(M: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : M x = 0}, one vector per free column, exact."""
    if not M:
        return [[Fraction(int(i == j)) for j in range(ncols or 0)] for i in range(ncols or 0)]
    A, _ = _integer_rows(M)
    ech = bareiss_echelon(A)
    n = len(A[0])
    r = ech.rank
    E = ech.matrix
    basis = []
    for f in range(r, n):
        # permuted coordinates: pivots 0..r-1, one free variable f set to 1
        y = [Fraction(0)] * n
        y[f] = Fraction(1)
        for i in range(r - 1, -1, -1):
            s = sum(Fraction(E[i][j]) * y[j] for j in range(i + 1, n) if E[i][j])
            y[i] = -s / E[i][i]
        x = [Fraction(0)] * n
        for pos, col in enumerate(ech.col_perm):
            x[col] = y[pos]
        basis.append(x)
    return basis


# ---------------------------------------------------------------------------
# sparse incremental solver


Var = Hashable


@dataclass
class Solution:
    consistent: bool
    rank: int
    nvars: int
    values: dict = field(default_factory=dict)
    """Variables whose value is forced (their RREF row has no free variable)."""
    free: list = field(default_factory=list)
    witness: dict | None = None
    """For an inconsistent system: row index -> multiplier; the combination
    cancels every variable and leaves a nonzero right-hand side."""
    pivots: dict = field(default_factory=dict)

    @property
    def nullity(self) -> int:
        return self.nvars - self.rank


class LinearSystem:
    """Sparse rows ``sum coeffs[v] * v == rhs`` over the rationals."""

    def __init__(self, track: bool = True):
        self.rows: list[tuple[dict, Fraction, object]] = []
        self.track = track
        self._order: dict = {}
        self._pivots: dict = {}  # var -> [coeffs, rhs, combo]
        self._occurs: dict = {}  # var -> set of pivot vars whose row contains it
        self._contradiction: tuple | None = None

    def __len__(self):
        return len(self.rows)

    @property
    def variables(self) -> list:
        return sorted(self._order, key=self._order.__getitem__)

    def add(self, coeffs: Mapping, rhs=0, label=None) -> int:
        """Append a row; returns its index."""
        clean = {v: Fraction(c) for v, c in coeffs.items() if c}
        idx = len(self.rows)
        self.rows.append((clean, Fraction(rhs), label))
        for v in clean:
            if v not in self._order:
                self._order[v] = len(self._order)
        if self._contradiction is None:
            self._insert(dict(clean), Fraction(rhs), {idx: Fraction(1)} if self.track else None)
        return idx

    def _axpy(self, target: dict, scale: Fraction, source: Mapping):
        for v, c in source.items():
            new = target.get(v, 0) - scale * c
            if new:
                target[v] = new
            else:
                target.pop(v, None)

    def _insert(self, row: dict, rhs: Fraction, combo):
        for v in [v for v in row if v in self._pivots]:
            c = row.get(v)
            if not c:
                continue
            prow, prhs, pcombo = self._pivots[v]
            self._axpy(row, c, prow)
            rhs -= c * prhs
            if combo is not None:
                self._axpy(combo, c, pcombo)
        if not row:
            if rhs:
                self._contradiction = (rhs, combo)
            return
        pv = min(row, key=self._order.__getitem__)
        c = row[pv]
        if c != 1:
            inv = 1 / c
            row = {v: x * inv for v, x in row.items()}
            rhs *= inv
            if combo is not None:
                combo = {k: x * inv for k, x in combo.items()}
        # back-substitute into existing pivot rows to keep RREF
        for other in list(self._occurs.get(pv, ())):
            orow, orhs, ocombo = self._pivots[other]
            f = orow.get(pv)
            if not f:
                continue
            before = set(orow)
            self._axpy(orow, f, row)
            orhs -= f * rhs
            if ocombo is not None:
                self._axpy(ocombo, f, combo)
            self._pivots[other] = [orow, orhs, ocombo]
            after = set(orow)
            for v in before - after:
                self._occurs[v].discard(other)
            for v in after - before:
                self._occurs.setdefault(v, set()).add(other)
        self._occurs.pop(pv, None)
        self._pivots[pv] = [row, rhs, combo]
        for v in row:
            if v != pv:
                self._occurs.setdefault(v, set()).add(pv)

    def solve(self) -> Solution:
        nvars = len(self._order)
        if self._contradiction is not None:
            rhs, combo = self._contradiction
            return Solution(False, len(self._pivots), nvars, witness=combo)
        values = {}
        for v, (row, rhs, _) in self._pivots.items():
            if len(row) == 1:
                values[v] = rhs
        free = [v for v in self.variables if v not in self._pivots]
        pivots = {v: (dict(r), rhs) for v, (r, rhs, _) in self._pivots.items()}
        return Solution(True, len(self._pivots), nvars, values, free, None, pivots)

    def derivation(self, var) -> dict | None:
        """Row combination proving the forced value of ``var`` (if tracked)."""
        entry = self._pivots.get(var)
        if entry is None or len(entry[0]) != 1:
            return None
        return entry[2]

    def replay(self, combo: Mapping[int, Fraction]) -> tuple[dict, Fraction]:
        """Evaluate a row combination: returns (coefficients, rhs)."""
        acc: dict = {}
        rhs = Fraction(0)
        for i, m in combo.items():
            coeffs, r, _ = self.rows[i]
            for v, c in coeffs.items():
                new = acc.get(v, 0) + m * c
                if new:
                    acc[v] = new
                else:
                    acc.pop(v, None)
            rhs += m * r
        return acc, rhs

    def nullspace(self) -> list[dict]:
        """Basis of solutions of the homogeneous system, as var -> value maps."""
        sol = self.solve()
        basis = []
        for f in sol.free:
            vec = {f: Fraction(1)}
            for pv, (row, _) in sol.pivots.items():
                c = row.get(f)
                if c:
                    vec[pv] = -c
            basis.append(vec)
        return basis


def solve_rows(rows: Iterable[tuple[Mapping, object]]) -> Solution:
    ls = LinearSystem()
    for coeffs, rhs in rows:
        ls.add(coeffs, rhs)
    return ls.solve()
