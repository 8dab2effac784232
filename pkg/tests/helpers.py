"""Independent reference formulas shared by the tests.

Nothing here calls into the action or bracket code under test; the
formulas are written out from the definitions so the tests compare two
separate computations.
"""

from fractions import Fraction

from wittkit import GroupLattice, Signature

HALF = Fraction(1, 2)


def Zd(d: int) -> GroupLattice:
    return GroupLattice([[int(i == j) for j in range(d)] for i in range(d)], dim=d)


def comp(sig: Signature, vec, p: int) -> Fraction:
    """p-th component of an embedded weight: zero for p <= l1."""
    if p <= sig.ell1:
        return Fraction(0)
    return Fraction(vec[p - sig.ell1 - 1])


def bracket_reference(sig: Signature, L: GroupLattice, a, b) -> dict:
    """[x^al t^i d_p, x^be t^j d_q] from the two-term derivation expansion."""
    (al, i, p), (be, j, q) = a, b
    va, vb = L.embed(al), L.embed(be)
    s = tuple(x + y for x, y in zip(al, be))
    ij = tuple(x + y for x, y in zip(i, j))
    out: dict = {}

    def add(key, c):
        if c:
            out[key] = out.get(key, 0) + c
            if out[key] == 0:
                del out[key]

    # x^al t^i d_p (x^be t^j) d_q
    add((s, ij, q), comp(sig, vb, p))
    if p <= sig.n_t and j[p - 1] > 0:
        k = list(ij)
        k[p - 1] -= 1
        add((s, tuple(k), q), j[p - 1])
    # - x^be t^j d_q (x^al t^i) d_p
    add((s, ij, p), -comp(sig, va, q))
    if q <= sig.n_t and i[q - 1] > 0:
        k = list(ij)
        k[q - 1] -= 1
        add((s, tuple(k), p), -i[q - 1])
    return out


def ab_reference(sig: Signature, L: GroupLattice, alpha, b, g, v) -> dict:
    """(x^mu t^i d_p) v_{nu,j} = (alpha_p+nu_p+b mu_p) v_{mu+nu,i+j} + (j_p + b i_p) v_{mu+nu,i+j-1_p}."""
    mu, i, p = g
    nu, j = v
    s = tuple(x + y for x, y in zip(mu, nu))
    ij = tuple(x + y for x, y in zip(i, j))
    out = {}
    c = comp(sig, alpha, p) + comp(sig, L.embed(nu), p) + Fraction(b) * comp(sig, L.embed(mu), p)
    if c:
        out[(s, ij)] = c
    if p <= sig.n_t and ij[p - 1] > 0:
        c2 = j[p - 1] + Fraction(b) * i[p - 1]
        if c2:
            k = list(ij)
            k[p - 1] -= 1
            out[(s, tuple(k))] = c2
    return out


def theorem_simple(alpha_in_lattice: bool, b, graded: bool) -> bool:
    if graded:
        return not alpha_in_lattice or b not in (0, 1)
    return not alpha_in_lattice or b != 0


def extension_reference(L: GroupLattice, g, v) -> dict:
    """Action on A_{0,0}/F v'_{0,0} in signature (1,0,l3), in the basis
    v_{nu,j} = v'_{nu,j} for nu != 0 and v_{0,j} = v'_{0,j+1}:

        (x^mu t^i d_1) v'_{nu,j} = j v'_{mu+nu,i+j-1},  (x^mu t^i d_q) v'_{nu,j} = nu_q v'_{mu+nu,i+j}.
    """
    mu, (i,), q = g
    nu, (j,) = v
    jp = j + 1 if not any(nu) else j
    s = tuple(x + y for x, y in zip(mu, nu))
    if q == 1:
        k, c = i + jp - 1, Fraction(jp)
    else:
        k, c = i + jp, Fraction(L.embed(nu)[q - 2])
    if c == 0 or k < 0:
        return {}
    if not any(s):
        return {} if k == 0 else {(s, (k - 1,)): c}
    return {(s, (k,)): c}


# ---------------------------------------------------------------------------
# a sympy model: x^mu t^i = exp(<mu, y>) t^i over the standard lattice


def sympy_model(sig: Signature):
    import sympy

    t = sympy.symbols(f"t1:{sig.n_t + 1}") if sig.n_t else ()
    y = sympy.symbols(f"y1:{sig.dim + 1}") if sig.dim else ()

    def mono(alpha, idx):
        e = sympy.Integer(1)
        for a, v in zip(alpha, y):
            e *= sympy.exp(a * v)
        for i, v in zip(idx, t):
            e *= v ** i
        return e

    def D(p, f):
        out = sympy.Integer(0)
        if p <= sig.n_t:
            out += sympy.diff(f, t[p - 1])
        if p > sig.ell1:
            out += sympy.diff(f, y[p - sig.ell1 - 1])
        return out

    def function(u):
        return sum((sympy.Rational(c.numerator, c.denominator) * mono(a, i) for (a, i), c in u), sympy.Integer(0))

    def field(u):
        """Witt element as {p: coefficient function}."""
        out = {}
        for (a, i, p), c in u:
            out[p] = out.get(p, 0) + sympy.Rational(c.numerator, c.denominator) * mono(a, i)
        return out

    def commutator(X, Y):
        out = {}
        for p, f in X.items():
            for q, g in Y.items():
                out[q] = out.get(q, 0) + f * D(p, g)
                out[p] = out.get(p, 0) - g * D(q, f)
        return out

    def same_field(X, Y):
        keys = set(X) | set(Y)
        return all(sympy.simplify(sympy.expand(X.get(k, 0) - Y.get(k, 0))) == 0 for k in keys)

    return type("Model", (), dict(mono=staticmethod(mono), D=staticmethod(D), function=staticmethod(function),
                                  field=staticmethod(field), commutator=staticmethod(commutator),
                                  same_field=staticmethod(same_field), t=t, y=y))
