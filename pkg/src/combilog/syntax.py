"""Term representations, the textual grammar, printers and size metrics.

Three families of trees live here:

* named terms (``Var``, ``Lam``, ``App``, ``Box``, ``Unbox``, ``LetBox``,
  ``BoolLit``, ``If``) covering plain, modal and staged calculi;
* de Bruijn terms (``Idx``, ``DLam``, ``DApp``);
* combinator terms (``Atom``, ``FreeAtom``, ``CApp``).

All nodes are frozen dataclasses, so terms are immutable and hashable.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


# ---------------------------------------------------------------------------
# Types (used only by binder annotations in the modal dialect)


@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "ModalType"
    cod: "ModalType"


@dataclass(frozen=True)
class BoxT:
    inner: "ModalType"


@dataclass(frozen=True)
class UnitT:
    pass


ModalType = Union[Base, Arrow, BoxT, UnitT]


# ---------------------------------------------------------------------------
# Named terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    body: "NamedTerm"
    ann: Optional[ModalType] = field(default=None, compare=False)


@dataclass(frozen=True)
class App:
    fn: "NamedTerm"
    arg: "NamedTerm"


@dataclass(frozen=True)
class Box:
    body: "NamedTerm"


@dataclass(frozen=True)
class Unbox:
    body: "NamedTerm"


@dataclass(frozen=True)
class LetBox:
    code_var: str
    bound: "NamedTerm"
    body: "NamedTerm"


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class If:
    cond: "NamedTerm"
    then: "NamedTerm"
    orelse: "NamedTerm"


NamedTerm = Union[Var, Lam, App, Box, Unbox, LetBox, BoolLit, If]
NAMED_NODES = (Var, Lam, App, Box, Unbox, LetBox, BoolLit, If)


# ---------------------------------------------------------------------------
# De Bruijn terms


@dataclass(frozen=True)
class Idx:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative de Bruijn index {self.index}")


@dataclass(frozen=True)
class DLam:
    body: "DbTerm"


@dataclass(frozen=True)
class DApp:
    fn: "DbTerm"
    arg: "DbTerm"


DbTerm = Union[Idx, DLam, DApp]
DB_NODES = (Idx, DLam, DApp)


# ---------------------------------------------------------------------------
# Combinator terms

COMBINATORS = ("S", "K", "I", "B", "C")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if self.name not in COMBINATORS:
            raise ValueError(f"unknown combinator {self.name!r}")


@dataclass(frozen=True)
class FreeAtom:
    """Uninterpreted constant; only ever used by tests and oracles."""

    name: str


@dataclass(frozen=True)
class CApp:
    fn: "CombTerm"
    arg: "CombTerm"


CombTerm = Union[Atom, FreeAtom, CApp]
COMB_NODES = (Atom, FreeAtom, CApp)

S, K, I, B, C = (Atom(n) for n in COMBINATORS)


def capp(head, *args):
    """Left-associated application: ``capp(S, K, K)`` is ``S K K``."""
    for a in args:
        head = CApp(head, a)
    return head


def app(head, *args):
    for a in args:
        head = App(head, a)
    return head


def dapp(head, *args):
    for a in args:
        head = DApp(head, a)
    return head


def lams(names, body):
    """Wrap ``body`` in lambdas, ``names[0]`` outermost."""
    for name in reversed(list(names)):
        body = Lam(name, body)
    return body


def spine(t):
    """Split an application spine into its head and argument list."""
    args = []
    while isinstance(t, (App, DApp, CApp)):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def children(t) -> tuple:
    if isinstance(t, (App, DApp, CApp)):
        return (t.fn, t.arg)
    if isinstance(t, (Lam, DLam, Box, Unbox)):
        return (t.body,)
    if isinstance(t, LetBox):
        return (t.bound, t.body)
    if isinstance(t, If):
        return (t.cond, t.then, t.orelse)
    return ()


def subterms(t) -> Iterator:
    """Pre-order traversal without recursion."""
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# ---------------------------------------------------------------------------
# Size


class SizeMetric(enum.Enum):
    NODE_COUNT = "NodeCount"
    DB_WEIGHTED = "DbWeighted"


def size(term, metric: SizeMetric = SizeMetric.NODE_COUNT) -> int:
    """Count nodes; under ``DB_WEIGHTED`` an index ``n`` costs ``n + 1``."""
    metric = SizeMetric(metric)
    if metric is SizeMetric.DB_WEIGHTED:
        if not isinstance(term, DB_NODES):
            raise TypeError("DbWeighted size applies to de Bruijn terms only")
        return sum(n.index + 1 if isinstance(n, Idx) else 1 for n in subterms(term))
    return sum(1 for _ in subterms(term))


# ---------------------------------------------------------------------------
# Lexer and parser


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class DialectError(ParseError):
    pass


DIALECTS = ("plain", "modal", "staged")
KEYWORDS = frozenset(
    {"let", "in", "letbox", "if", "then", "else", "true", "false", "box", "unbox", "unit"}
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<boxt>\[\])
  | (?P<nat>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[\\.()=:])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = "kw"
            toks.append((kind, value, pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, dialect="plain", booleans=False):
        if dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {dialect!r}")
        self.toks = _tokenize(text)
        self.i = 0
        self.dialect = dialect
        self.booleans = booleans

    # token helpers

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def at(self, value):
        kind, v, _ = self.peek()
        return v == value and kind in ("kw", "punct", "arrow", "boxt")

    def expect(self, value):
        kind, v, pos = self.next()
        if v != value or kind == "ident":
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def ident(self):
        kind, v, pos = self.next()
        if kind != "ident":
            raise ParseError(f"expected identifier, found {v or 'end of input'!r}", pos)
        return v

    def require(self, allowed, construct, pos):
        if self.dialect not in allowed:
            raise DialectError(f"{construct!r} is not allowed in the {self.dialect} dialect", pos)

    def require_booleans(self, construct, pos):
        if not self.booleans:
            raise DialectError(f"{construct!r} requires the boolean extension", pos)

    # grammar

    def parse(self):
        t = self.term()
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {v!r}", pos)
        return t

    def term(self):
        kind, v, pos = self.peek()
        if kind == "punct" and v == "\\":
            self.next()
            binders = []
            while True:
                name = self.ident()
                ann = None
                if self.at(":"):
                    self.require(("modal",), "type annotation", self.peek()[2])
                    self.next()
                    ann = self.type_()
                binders.append((name, ann))
                if self.at("."):
                    break
            self.expect(".")
            body = self.term()
            for name, ann in reversed(binders):
                body = Lam(name, body, ann)
            return body
        if kind == "kw" and v == "let":
            self.next()
            name = self.ident()
            self.expect("=")
            bound = self.term()
            self.expect("in")
            body = self.term()
            return App(Lam(name, body), bound)
        if kind == "kw" and v == "letbox":
            self.require(("modal",), "letbox", pos)
            self.next()
            name = self.ident()
            self.expect("=")
            bound = self.term()
            self.expect("in")
            body = self.term()
            return LetBox(name, bound, body)
        if kind == "kw" and v == "if":
            self.require_booleans("if", pos)
            self.next()
            cond = self.term()
            self.expect("then")
            then = self.term()
            self.expect("else")
            orelse = self.term()
            return If(cond, then, orelse)
        return self.application()

    def starts_atom(self):
        kind, v, _ = self.peek()
        return kind == "ident" or v == "(" or (
            kind == "kw" and v in ("true", "false", "box", "unbox")
        )

    def application(self):
        t = self.atom()
        while self.starts_atom():
            t = App(t, self.atom())
        return t

    def atom(self):
        kind, v, pos = self.next()
        if kind == "ident":
            return Var(v)
        if kind == "kw" and v in ("true", "false"):
            self.require_booleans(v, pos)
            return BoolLit(v == "true")
        if kind == "kw" and v == "box":
            self.require(("modal", "staged"), "box", pos)
            return Box(self.atom())
        if kind == "kw" and v == "unbox":
            self.require(("staged",), "unbox", pos)
            return Unbox(self.atom())
        if kind == "punct" and v == "(":
            t = self.term()
            self.expect(")")
            return t
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)

    # types: type := btype ('->' type)? ; btype := '[]' btype | ident | 'unit' | '(' type ')'

    def type_(self):
        dom = self.btype()
        if self.at("->"):
            self.next()
            return Arrow(dom, self.type_())
        return dom

    def btype(self):
        kind, v, pos = self.next()
        if kind == "boxt":
            return BoxT(self.btype())
        if kind == "kw" and v == "unit":
            return UnitT()
        if kind == "ident":
            return Base(v)
        if v == "(":
            t = self.type_()
            self.expect(")")
            return t
        raise ParseError(f"expected a type, found {v or 'end of input'!r}", pos)


def parse(text: str, dialect: str = "plain", booleans: bool = False) -> NamedTerm:
    """Parse surface syntax into a named term.

    ``let x = e1 in e2`` is desugared to ``(\\x. e2) e1``.  Constructs outside
    the dialect raise :class:`DialectError`.
    """
    return _Parser(text, dialect, booleans).parse()


def parse_type(text: str) -> ModalType:
    p = _Parser(text, "modal")
    t = p.type_()
    kind, v, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {v!r}", pos)
    return t


def parse_db(text: str) -> DbTerm:
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def term():
        nonlocal i
        kind, v, pos = peek()
        if v == "\\":
            i += 1
            if peek()[1] != ".":
                raise ParseError("expected '.' after '\\'", peek()[2])
            i += 1
            return DLam(term())
        t = atom()
        while peek()[0] == "nat" or peek()[1] == "(":
            t = DApp(t, atom())
        return t

    def atom():
        nonlocal i
        kind, v, pos = toks[i]
        i += 1
        if kind == "nat":
            return Idx(int(v))
        if v == "(":
            t = term()
            if peek()[1] != ")":
                raise ParseError("expected ')'", peek()[2])
            i += 1
            return t
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)

    t = term()
    if peek()[0] != "eof":
        raise ParseError(f"unexpected {peek()[1]!r}", peek()[2])
    return t


def parse_comb(text: str) -> CombTerm:
    """Parse ``S K (K a)``-style text; non-combinator identifiers become FreeAtoms."""
    toks = _tokenize(text)
    i = 0

    def seq():
        t = atom()
        while toks[i][0] in ("ident", "kw") or toks[i][1] == "(":
            t = CApp(t, atom())
        return t

    def atom():
        nonlocal i
        kind, v, pos = toks[i]
        i += 1
        if kind in ("ident", "kw"):
            return Atom(v) if v in COMBINATORS else FreeAtom(v)
        if v == "(":
            t = seq()
            if toks[i][1] != ")":
                raise ParseError("expected ')'", toks[i][2])
            i += 1
            return t
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)

    t = seq()
    if toks[i][0] != "eof":
        raise ParseError(f"unexpected {toks[i][1]!r}", toks[i][2])
    return t


# ---------------------------------------------------------------------------
# Printing


def show_type(t: ModalType) -> str:
    if isinstance(t, Base):
        return t.name
    if isinstance(t, UnitT):
        return "unit"
    if isinstance(t, BoxT):
        inner = show_type(t.inner)
        return "[]" + (f"({inner})" if isinstance(t.inner, Arrow) else inner)
    dom = show_type(t.dom)
    if isinstance(t.dom, Arrow):
        dom = f"({dom})"
    return f"{dom} -> {show_type(t.cod)}"


def _is_named_atom(t) -> bool:
    return isinstance(t, (Var, BoolLit, Box, Unbox))


def _show_named(t) -> str:
    if isinstance(t, Lam):
        binder = t.name if t.ann is None else f"{t.name}:{show_type(t.ann)}"
        sep = "" if isinstance(t.body, Lam) else " "
        return f"\\{binder}.{sep}{_show_named(t.body)}"
    if isinstance(t, LetBox):
        return f"letbox {t.code_var} = {_show_named(t.bound)} in {_show_named(t.body)}"
    if isinstance(t, If):
        return (
            f"if {_show_named(t.cond)} then {_show_named(t.then)} "
            f"else {_show_named(t.orelse)}"
        )
    if isinstance(t, App):
        head, args = spine(t)
        parts = [_show_named_atom(head)] + [_show_named_atom(a) for a in args]
        return " ".join(parts)
    return _show_named_atom(t)


def _show_named_atom(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, Box):
        return f"box {_show_named_atom(t.body)}"
    if isinstance(t, Unbox):
        return f"unbox {_show_named_atom(t.body)}"
    return f"({_show_named(t)})"


def _show_db(t) -> str:
    if isinstance(t, DLam):
        return "\\." + _show_db(t.body)
    if isinstance(t, DApp):
        head, args = spine(t)
        return " ".join(_show_db_atom(a) for a in [head] + args)
    return _show_db_atom(t)


def _show_db_atom(t) -> str:
    if isinstance(t, Idx):
        return str(t.index)
    return f"({_show_db(t)})"


def _show_comb(t) -> str:
    # Iterative so that very deep translator outputs still print.
    out = []
    stack = [("term", t)]
    while stack:
        kind, node = stack.pop()
        if kind == "text":
            out.append(node)
            continue
        head, args = spine(node)
        items = []
        for a in reversed(args):
            if isinstance(a, CApp):
                items += [("text", ")"), ("term", a), ("text", " (")]
            else:
                items += [("term", a), ("text", " ")]
        items.append(("text", head.name))
        stack.extend(items)
    return "".join(out)


def show(term) -> str:
    """Render any term as text accepted by the matching parser."""
    if isinstance(term, NAMED_NODES):
        return _show_named(term)
    if isinstance(term, DB_NODES):
        return _show_db(term)
    if isinstance(term, COMB_NODES):
        return _show_comb(term)
    if isinstance(term, (Base, Arrow, BoxT, UnitT)):
        return show_type(term)
    raise TypeError(f"not a term: {term!r}")
