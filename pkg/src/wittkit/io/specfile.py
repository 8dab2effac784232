"""Line-oriented spec files.

    # comment
    signature = 1, 1, 1
    generators = [[1, 0], [0, 1]]
    window.gamma = 2
    window.level = 2
    window.margin = 1
    module A = GeneralAb alpha=[1/2, 0] b=2
    module Q = GeneralAb alpha=[0, 0] b=0 quotient
    element u = 3/2 x[0,1] t[2,0] d[1]
    element w in A = v[0,0; 1,0] - 2 v[1,0; 0,0]

``signature`` and ``generators`` are required; the generators are exactly
ell2+ell3 rational rows spanning Q^(ell2+ell3).  Omitted window keys take
the defaults 2, 2, 1.  Element expressions without ``in MODULE`` are Witt
elements, or elements of the commutative algebra when no ``d[..]`` occurs.

The canonical form (what ``serialize`` writes) lists signature, generators,
the three window keys, then modules and elements in file order, with
single spaces, ", " separators and reduced rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..foundations import GroupLattice, LatticeError, Signature, SignatureError, Window, scalar_str
from ..modules import FAMILIES, Module, ModuleSpec, ModuleSpecError, QuotientModule
from .expr import ParseError, format_element, parse_element

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RATIONAL = re.compile(r"\s*([+-]?\d+(?:\s*/\s*\d+)?)\s*")

PARAMS = {
    "GeneralAb": ("alpha", "b"),
    "GradedAb": ("alpha", "b"),
    "GradedAbeta": ("beta",),
    "GradedBbeta": ("beta",),
}


@dataclass
class ModuleDecl:
    name: str
    family: str
    alpha: tuple = ()
    b: Fraction = Fraction(0)
    beta: tuple = ()
    quotient: bool = False
    line: int = 0

    def canonical(self) -> str:
        parts = [f"module {self.name} = {self.family}"]
        if "alpha" in PARAMS[self.family]:
            parts.append(f"alpha={_vec(self.alpha)}")
            parts.append(f"b={scalar_str(self.b)}")
        else:
            parts.append(f"beta={_vec(self.beta)}")
        if self.quotient:
            parts.append("quotient")
        return " ".join(parts)


@dataclass
class ElementDecl:
    name: str
    module: str | None
    value: object
    line: int = 0

    def canonical(self) -> str:
        where = f" in {self.module}" if self.module else ""
        return f"element {self.name}{where} = {format_element(self.value)}"


@dataclass
class SpecFile:
    signature: Signature
    generators: tuple
    window: Window
    modules: dict = field(default_factory=dict)
    elements: dict = field(default_factory=dict)
    lattice: GroupLattice | None = None

    def __post_init__(self):
        if self.lattice is None:
            self.lattice = GroupLattice(self.generators, dim=self.signature.dim)
        self._built: dict = {}

    @property
    def W(self):
        from ..witt import WittAlgebra

        if "_W" not in self._built:
            self._built["_W"] = WittAlgebra(self.signature, self.lattice)
        return self._built["_W"]

    def module_spec(self, name: str) -> ModuleSpec:
        d = self.modules[name]
        return ModuleSpec(d.family, self.signature, self.lattice, alpha=d.alpha, b=d.b, beta=d.beta, name=name)

    def module(self, name: str) -> Module:
        if name not in self.modules:
            raise KeyError(f"no module named {name!r}; defined: {', '.join(self.modules) or 'none'}")
        if name not in self._built:
            spec = self.module_spec(name)
            self._built[name] = QuotientModule(spec) if self.modules[name].quotient else Module(spec)
        return self._built[name]

    def element(self, name: str):
        return self.elements[name].value


def _vec(xs) -> str:
    return "[" + ", ".join(scalar_str(x) for x in xs) + "]"


def serialize(spec: SpecFile) -> str:
    lines = [
        "signature = " + ", ".join(str(x) for x in spec.signature),
        "generators = [" + ", ".join(_vec(g) for g in spec.generators) + "]",
        f"window.gamma = {spec.window.gamma_bound}",
        f"window.level = {spec.window.level_bound}",
        f"window.margin = {spec.window.margin}",
    ]
    lines += [d.canonical() for d in spec.modules.values()]
    lines += [e.canonical() for e in spec.elements.values()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing


class _Cursor:
    """Character cursor over one line's value, for positioned errors."""

    def __init__(self, text: str, line: int, col0: int):
        self.s, self.i, self.line, self.col0 = text, 0, line, col0

    def error(self, msg: str, at: int | None = None) -> ParseError:
        return ParseError(msg, self.line, self.col0 + (self.i if at is None else at) + 1)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def done(self) -> bool:
        self.ws()
        return self.i >= len(self.s)

    def eat(self, ch: str):
        self.ws()
        if not self.s.startswith(ch, self.i):
            found = repr(self.s[self.i]) if self.i < len(self.s) else "end of line"
            raise self.error(f"expected {ch!r}, found {found}")
        self.i += len(ch)

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def rational(self) -> Fraction:
        m = _RATIONAL.match(self.s, self.i)
        if not m:
            raise self.error("expected a rational number p or p/q")
        tok = m.group(1).replace(" ", "")
        num, _, den = tok.partition("/")
        if den and int(den) == 0:
            raise self.error("zero denominator in rational")
        self.i = m.end()
        return Fraction(int(num), int(den) if den else 1)

    def integer(self) -> int:
        start = self.i
        x = self.rational()
        if x.denominator != 1:
            raise self.error("expected an integer", start)
        return int(x)

    def vector(self) -> tuple:
        self.eat("[")
        out = []
        if self.peek() != "]":
            out.append(self.rational())
            while self.peek() == ",":
                self.i += 1
                out.append(self.rational())
        self.eat("]")
        return tuple(out)

    def matrix(self) -> tuple:
        self.eat("[")
        rows = []
        if self.peek() != "]":
            rows.append(self.vector())
            while self.peek() == ",":
                self.i += 1
                rows.append(self.vector())
        self.eat("]")
        return tuple(rows)

    def name(self) -> str:
        self.ws()
        m = _NAME.match(self.s, self.i)
        if not m:
            raise self.error("expected a name")
        self.i = m.end()
        return m.group(0)

    def expect_end(self):
        if not self.done():
            raise self.error(f"unexpected text {self.s[self.i:]!r}")


def _split(raw: str, lineno: int):
    """(key, key_col, value, value_col) for a 'key = value' line."""
    text = raw.split("#", 1)[0].rstrip()
    if not text.strip():
        return None
    if "=" not in text:
        col = len(text) - len(text.lstrip()) + 1
        raise ParseError("expected 'key = value'", lineno, col)
    key, value = text.split("=", 1)
    kcol = len(key) - len(key.lstrip()) + 1
    vcol = len(key) + 1
    return key.strip(), kcol, value, vcol


def parse_spec(text: str) -> SpecFile:
    sig = gens = None
    gen_pos = (1, 1)
    window = {"gamma": 2, "level": 2, "margin": 1}
    seen: dict = {}
    pending_modules: list = []
    pending_elements: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = _split(raw, lineno)
        if parts is None:
            continue
        key, kcol, value, vcol = parts
        cur = _Cursor(value, lineno, vcol)
        head = key.split()
        if head[0] in ("module", "element"):
            pending = pending_modules if head[0] == "module" else pending_elements
            pending.append((head, kcol, cur, lineno))
            continue
        if key in seen:
            raise ParseError(f"duplicate key {key!r} (first on line {seen[key]})", lineno, kcol)
        seen[key] = lineno
        if key == "signature":
            vals = [cur.integer()]
            while cur.peek() == ",":
                cur.i += 1
                vals.append(cur.integer())
            cur.expect_end()
            if len(vals) != 3:
                raise ParseError(f"signature needs three integers ell1, ell2, ell3, got {len(vals)}", lineno, vcol + 1)
            try:
                sig = Signature(*vals).validate()
            except SignatureError as e:
                raise ParseError(str(e), lineno, vcol + 1) from None
        elif key == "generators":
            gens = cur.matrix()
            cur.expect_end()
            gen_pos = (lineno, vcol + 1)
        elif key.startswith("window."):
            field_ = key[len("window."):]
            if field_ not in window:
                raise ParseError(f"unknown window key {key!r}; expected window.gamma, window.level or window.margin",
                                 lineno, kcol)
            n = cur.integer()
            cur.expect_end()
            if n < 0:
                raise ParseError(f"{key} must be nonnegative", lineno, vcol + 1)
            window[field_] = n
        else:
            raise ParseError(f"unknown key {key!r}", lineno, kcol)
    if sig is None:
        raise ParseError("missing required key 'signature'", 1, 1)
    if gens is None:
        raise ParseError("missing required key 'generators'", 1, 1)
    d = sig.dim
    line, col = gen_pos
    if len(gens) != d or any(len(g) != d for g in gens):
        raise ParseError(f"generators must be {d} rows of length {d} (ell2+ell3 = {d}), "
                         f"got {len(gens)} rows", line, col)
    try:
        lattice = GroupLattice(gens, dim=d)
    except LatticeError as e:
        raise ParseError(str(e), line, col) from None
    spec = SpecFile(sig, tuple(tuple(g) for g in gens),
                    Window(window["gamma"], window["level"], window["margin"]), lattice=lattice)
    for head, kcol, cur, lineno in pending_modules:
        decl = _parse_module(spec, head, kcol, cur, lineno)
        if decl.name in spec.modules:
            raise ParseError(f"module {decl.name!r} defined twice", lineno, kcol)
        spec.modules[decl.name] = decl
    for head, kcol, cur, lineno in pending_elements:
        e = _parse_element_decl(spec, head, kcol, cur, lineno)
        if e.name in spec.elements:
            raise ParseError(f"element {e.name!r} defined twice", lineno, kcol)
        spec.elements[e.name] = e
    return spec


def _parse_module(spec: SpecFile, head, kcol, cur: _Cursor, lineno) -> ModuleDecl:
    if len(head) != 2 or not _NAME.fullmatch(head[1]):
        raise ParseError("expected 'module NAME = Family ...'", lineno, kcol)
    start = cur.i
    family = cur.name()
    if family not in FAMILIES:
        raise cur.error(f"unknown module family {family!r}; expected one of {', '.join(FAMILIES)}", start)
    decl = ModuleDecl(head[1], family, line=lineno)
    given = set()
    while not cur.done():
        at = cur.i
        word = cur.name()
        if word == "quotient":
            decl.quotient = True
            continue
        if word not in PARAMS[family]:
            raise cur.error(f"parameter {word!r} does not apply to {family}", at)
        if word in given:
            raise cur.error(f"parameter {word!r} given twice", at)
        given.add(word)
        cur.eat("=")
        if word == "b":
            decl.b = cur.rational()
        else:
            vec = cur.vector()
            if len(vec) != spec.signature.dim:
                raise cur.error(f"{word} needs {spec.signature.dim} entries, got {len(vec)}", at)
            setattr(decl, word, vec)
    d = spec.signature.dim
    zero = (Fraction(0),) * d
    if "alpha" in PARAMS[family]:
        decl.alpha = decl.alpha or zero
    else:
        decl.beta = decl.beta or zero
    try:
        ms = ModuleSpec(family, spec.signature, spec.lattice, alpha=decl.alpha, b=decl.b, beta=decl.beta,
                        name=decl.name).validate()
        if decl.quotient:
            QuotientModule(ms)
    except (ModuleSpecError, ValueError) as e:
        raise ParseError(str(e), lineno, cur.col0 + start + 1) from None
    return decl


def _parse_element_decl(spec: SpecFile, head, kcol, cur: _Cursor, lineno) -> ElementDecl:
    if len(head) == 2 and _NAME.fullmatch(head[1]):
        name, mod = head[1], None
    elif len(head) == 4 and head[2] == "in":
        name, mod = head[1], head[3]
        if mod not in spec.modules:
            raise ParseError(f"element {name!r} refers to undefined module {mod!r}", lineno, kcol)
    else:
        raise ParseError("expected 'element NAME = expr' or 'element NAME in MODULE = expr'", lineno, kcol)
    text = cur.s
    if mod is not None:
        target = spec.module(mod)
    elif "d[" in text:
        target = spec.W
    else:
        target = spec.W.A
    value = parse_element(text, target, line=lineno, col0=cur.col0)
    return ElementDecl(name, mod, value, lineno)


def load_spec(path) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
