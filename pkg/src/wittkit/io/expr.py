"""Element expressions: a small recursive-descent grammar.

    expr    := '0' | term (('+' | '-') term)*
    term    := [sign] [rational ['*']] factor+ | [sign] rational
    factor  := 'x' list | 't' list | 'd' '[' int ']' | 'v' '[' ints [';' ints] ']'
    list    := '[' [int (',' int)*] ']'
    rational:= digits ['/' digits]

Whitespace is insignificant.  A term containing ``d[..]`` is a Witt
element, one containing ``v[..]`` a module vector, anything else an element
of the commutative algebra.  Missing ``x`` or ``t`` factors default to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..foundations import multiindex_key, scalar_str
from ..sparse import accumulate


class ParseError(ValueError):
    """A syntax or semantic error with a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Term:
    coeff: Fraction
    x: tuple | None = None
    t: tuple | None = None
    d: int | None = None
    v: tuple | None = None  # (mu, idx)
    pos: int = 0


class _Parser:
    def __init__(self, text: str, line: int = 1, col0: int = 0):
        self.s = text
        self.i = 0
        self.line = line
        self.col0 = col0

    def error(self, msg, at=None):
        at = self.i if at is None else at
        return ParseError(msg, self.line, self.col0 + at + 1)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected {ch!r}, found {found}")
        self.i += 1

    def int_(self) -> int:
        self.ws()
        start = self.i
        if self.i < len(self.s) and self.s[self.i] in "+-":
            self.i += 1
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        tok = self.s[start:self.i]
        if not tok or tok in "+-":
            self.i = start
            raise self.error("expected an integer")
        return int(tok)

    def digits(self) -> int:
        start = self.i
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        if start == self.i:
            raise self.error("expected digits")
        return int(self.s[start:self.i])

    def rational(self) -> Fraction:
        self.ws()
        start = self.i
        num = self.digits()
        if self.peek() == "/":
            self.i += 1
            self.ws()
            den = self.digits()
            if den == 0:
                raise self.error("zero denominator in rational", start)
            return Fraction(num, den)
        return Fraction(num)

    def int_list(self, closers="]") -> tuple:
        out = []
        if self.peek() in closers:
            return ()
        out.append(self.int_())
        while self.peek() == ",":
            self.i += 1
            out.append(self.int_())
        return tuple(out)

    def bracketed(self) -> tuple:
        self.expect("[")
        out = self.int_list()
        self.expect("]")
        return out

    def term(self, sign: int) -> _Term:
        self.ws()
        pos = self.i
        coeff = Fraction(sign)
        c = self.peek()
        while c in "+-":
            # permits "+ -1 x[..]" as written by the serializer
            self.i += 1
            if c == "-":
                coeff = -coeff
            c = self.peek()
        have_coeff = False
        if c.isdigit():
            coeff *= self.rational()
            have_coeff = True
            if self.peek() == "*":
                self.i += 1
        term = _Term(coeff, pos=pos)
        nfactors = 0
        while True:
            c = self.peek()
            at = self.i
            if c not in ("x", "t", "d", "v"):
                break
            self.i += 1
            slot = c
            if getattr(term, slot) is not None:
                raise self.error(f"factor {slot}[..] repeated in one term", at)
            if slot == "d":
                self.expect("[")
                p = self.int_()
                self.expect("]")
                term.d = p
            elif slot == "v":
                self.expect("[")
                mu = self.int_list("];")
                idx: tuple = ()
                if self.peek() == ";":
                    self.i += 1
                    idx = self.int_list()
                self.expect("]")
                term.v = (mu, idx)
            else:
                setattr(term, slot, self.bracketed())
            nfactors += 1
        if not nfactors and not have_coeff:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected a term, found {found}")
        return term

    def expr(self) -> list[_Term]:
        terms = [self.term(1)]
        while True:
            c = self.peek()
            if c == "+":
                self.i += 1
                terms.append(self.term(1))
            elif c == "-":
                self.i += 1
                terms.append(self.term(-1))
            elif c == "":
                return terms
            else:
                raise self.error(f"unexpected character {c!r}")


def _parse_terms(text: str, line=1, col0=0) -> list[_Term]:
    return _Parser(text, line, col0).expr()


def _classify(terms: list[_Term]) -> str:
    kinds = set()
    for t in terms:
        if t.v is not None:
            if t.x is not None or t.t is not None or t.d is not None:
                raise ParseError("a module vector term cannot carry x, t or d factors", 1, t.pos + 1)
            kinds.add("module")
        elif t.d is not None:
            kinds.add("witt")
        elif t.x is not None or t.t is not None:
            kinds.add("algebra")
        elif t.coeff:
            kinds.add("scalar")
    if "algebra" in kinds:
        kinds.discard("scalar")  # 2 + x[1] is fine in A
    if len(kinds) > 1:
        raise ParseError(f"expression mixes {' and '.join(sorted(kinds))} terms")
    return kinds.pop() if kinds else "zero"


def parse_element(text: str, target, line: int = 1, col0: int = 0):
    """Parse into ``target``: a WittAlgebra, CommutativeAlgebra or Module.

    Like terms are merged and zero coefficients dropped.
    """
    from ..algebra import CommutativeAlgebra
    from ..modules import Module
    from ..witt import WittAlgebra

    terms = _parse_terms(text, line, col0)
    kind = _classify(terms)
    if isinstance(target, WittAlgebra):
        want = "witt"
    elif isinstance(target, CommutativeAlgebra):
        want = "algebra"
    elif isinstance(target, Module):
        want = "module"
    else:
        raise TypeError(f"cannot parse into {type(target).__name__}")
    if kind not in ("zero", want) and not (want == "algebra" and kind == "scalar"):
        raise ParseError(f"expected a {want} expression, got a {kind} expression", line, col0 + 1)

    sig = target.sig
    dim = target.lattice.dim
    acc: dict = {}
    for t in terms:
        col = col0 + t.pos + 1
        if want == "module":
            if t.v is None:
                if t.coeff:
                    raise ParseError("scalar term in a module expression", line, col)
                continue
            mu, idx = t.v
            if not idx and sig.n_t:
                raise ParseError(f"v[...] needs a multi-index of length {sig.n_t} after ';'", line, col)
            key = (mu, idx)
        else:
            mu = t.x if t.x is not None else (0,) * dim
            idx = t.t if t.t is not None else (0,) * sig.n_t
            if want == "witt":
                if t.d is None:
                    if t.coeff:
                        raise ParseError("a Witt term needs a derivation factor d[p]", line, col)
                    continue
                if not 1 <= t.d <= sig.ell:
                    raise ParseError(f"derivation index {t.d} outside 1..{sig.ell}", line, col)
                key = (mu, idx, t.d)
            else:
                key = (mu, idx)
        if len(mu) != dim:
            raise ParseError(f"lattice coordinates need {dim} entries, got {len(mu)}", line, col)
        if len(idx) != sig.n_t:
            raise ParseError(f"multi-index needs {sig.n_t} entries, got {len(idx)}", line, col)
        if any(i < 0 for i in idx):
            raise ParseError("multi-index entries must be nonnegative", line, col)
        accumulate(acc, key, t.coeff)
    if want == "witt":
        return target.element(acc)
    if want == "module":
        return target.vector(acc)
    return target.element(acc)


# ---------------------------------------------------------------------------
# canonical serialization


def _ints(xs) -> str:
    return ",".join(str(x) for x in xs)


def _join(parts: list[str]) -> str:
    return " + ".join(parts) if parts else "0"


def format_witt_element(u) -> str:
    parts = []
    for (alpha, idx, p), c in u:
        s = f"{scalar_str(c)} x[{_ints(alpha)}]"
        if idx:
            s += f" t[{_ints(idx)}]"
        parts.append(s + f" d[{p}]")
    return _join(parts)


def format_algebra_element(u) -> str:
    parts = []
    for (alpha, idx), c in u:
        s = f"{scalar_str(c)} x[{_ints(alpha)}]"
        if idx:
            s += f" t[{_ints(idx)}]"
        parts.append(s)
    return _join(parts)


def format_module_vector(v) -> str:
    parts = []
    for (mu, idx), c in v:
        inner = _ints(mu) + (f"; {_ints(idx)}" if idx else "")
        parts.append(f"{scalar_str(c)} v[{inner}]")
    return _join(parts)


def format_element(e) -> str:
    from ..algebra import AlgebraElement
    from ..modules import ModuleVector
    from ..witt import WittElement

    if isinstance(e, WittElement):
        return format_witt_element(e)
    if isinstance(e, ModuleVector):
        return format_module_vector(e)
    if isinstance(e, AlgebraElement):
        return format_algebra_element(e)
    raise TypeError(f"cannot format {type(e).__name__}")


def basis_label(key) -> str:
    """Canonical text for a single basis key (module or Witt)."""
    if len(key) == 3:
        alpha, idx, p = key
        return f"x[{_ints(alpha)}]" + (f" t[{_ints(idx)}]" if idx else "") + f" d[{p}]"
    mu, idx = key
    return f"v[{_ints(mu)}" + (f"; {_ints(idx)}" if idx else "") + "]"


def sort_basis(keys):
    return sorted(keys, key=lambda k: (k[0], multiindex_key(k[1])) + tuple(k[2:]))
