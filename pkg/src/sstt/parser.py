"""Surface syntax: lexer and recursive-descent parser.

Produces a surface AST with unresolved names; scope resolution and
elaboration into the core language happen in ``scope``.  Cube expressions
and topes reuse the core representations directly, except that a tope may
contain a shape application placeholder that scope resolution expands.

The grammar is documented in docs/syntax.md.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .core import Span
from .cube import (
    CFst,
    CPair,
    CSnd,
    CSTAR,
    CVar,
    CZERO,
    CONE,
    CubeExpr,
    CubeType,
    INTERVAL,
    ProdCube,
    UNIT_CUBE,
)
from .tope import BOT, TOP, TAnd, TEq, TLe, TOr, Tope


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, filename: str = "<input>"):
        super().__init__(f"{filename}:{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = {
    "def", "postulate", "thm", "shape",
    "U", "Unit", "star", "fst", "snd", "Id", "refl", "J", "Sigma", "Pi",
    "TOP", "BOT",
}

PUNCT = [
    "|->", "|-", ":=", "===", "<=", "->", "/\\", "\\/",
    "(", ")", "{", "}", "[", "]", "<", ">", ",", ".", ":", "|", "*", "\\",
]


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "kw", "num", or the punctuation itself; "eof"
    value: str
    start: int
    end: int
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.start, self.end)


def lex(src: str, filename: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            word = src[i:j]
            kind = "kw" if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, i, j, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            word = src[i:j]
            if word not in ("0", "1", "2"):
                raise ParseError(f"unexpected number {word!r}", line, col, filename)
            toks.append(Token("num", word, i, j, line, col))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if src.startswith(p, i):
                toks.append(Token(p, p, i, i + len(p), line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col, filename)
    toks.append(Token("eof", "", n, n, line, col))
    return toks


# ---------------------------------------------------------------------------
# Surface AST

@dataclass(frozen=True)
class STShapeApp:
    """Unresolved shape applied to a cube point, in tope position."""

    name: str
    arg: CubeExpr
    span: Optional[Span] = field(default=None, compare=False, repr=False)


STope = Union[Tope, STShapeApp]  # shape apps may also sit under TAnd/TOr


def _sf():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SVar:
    name: str
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SU:
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SUnitT:
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SStarE:
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SNum:
    value: int  # 0 or 1, a cube endpoint in term position
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SDomCube:
    cube: CubeType
    tope: Optional[STope]
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SDomExpr:
    expr: "SExpr"
    span: Optional[Span] = _sf()


SDom = Union[SDomCube, SDomExpr]


@dataclass(frozen=True)
class SPiB:
    var: str
    dom: SDom
    cod: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SArrow:
    dom: "SExpr"
    cod: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SSigmaOp:
    left: "SExpr"
    right: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SSigmaB:
    var: str
    dom: "SExpr"
    body: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SLam:
    pattern: tuple[str, ...]  # singleton, or a cube tuple pattern
    tuple_pattern: bool
    body: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SApp:
    fn: "SExpr"
    arg: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SPairE:
    fst: "SExpr"
    snd: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SFstE:
    arg: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SSndE:
    arg: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SIdE:
    ty: "SExpr"
    lhs: "SExpr"
    rhs: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SReflE:
    arg: Optional["SExpr"]
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SJE:
    motive: "SExpr"
    base: "SExpr"
    path: "SExpr"
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SExtE:
    var: str
    dom: SDom
    family: "SExpr"
    branches: tuple[tuple[STope, "SExpr"], ...]
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SCaseE:
    branches: tuple[tuple[STope, "SExpr"], ...]
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SAnnE:
    expr: "SExpr"
    ty: "SExpr"
    span: Optional[Span] = _sf()


SExpr = Union[
    SVar, SU, SUnitT, SStarE, SNum, SPiB, SArrow, SSigmaOp, SSigmaB, SLam,
    SApp, SPairE, SFstE, SSndE, SIdE, SReflE, SJE, SExtE, SCaseE, SAnnE,
]


@dataclass(frozen=True)
class SParamTyped:
    names: tuple[str, ...]
    ty: SExpr
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SParamCube:
    names: tuple[str, ...]
    cube: CubeType
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SParamTope:
    tope: STope
    span: Optional[Span] = _sf()


SParam = Union[SParamTyped, SParamCube, SParamTope]


@dataclass(frozen=True)
class SDecl:
    kind: str  # "def", "postulate", "thm"
    name: str
    params: tuple[SParam, ...]
    ty: SExpr
    body: Optional[SExpr]
    span: Optional[Span] = _sf()


@dataclass(frozen=True)
class SShapeDecl:
    name: str
    pattern: tuple[str, ...]
    cube: CubeType
    tope: STope
    span: Optional[Span] = _sf()


STopLevel = Union[SDecl, SShapeDecl]


# ---------------------------------------------------------------------------
# Parser

class Parser:
    def __init__(self, src: str, filename: str = "<input>"):
        self.toks = lex(src, filename)
        self.pos = 0
        self.filename = filename

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if self.at(kind, value):
            return self.next()
        t = self.peek()
        want = value or kind
        got = t.value or t.kind
        raise ParseError(f"expected {want!r}, found {got!r}", t.line, t.col, self.filename)

    def fail(self, message: str) -> "ParseError":
        t = self.peek()
        return ParseError(message, t.line, t.col, self.filename)

    def span_from(self, start: Token) -> Span:
        end = self.toks[max(self.pos - 1, 0)]
        return Span(start.start, end.end)

    # -- top level

    def parse_file(self) -> list[STopLevel]:
        out: list[STopLevel] = []
        seen: set[str] = set()
        while not self.at("eof"):
            d = self.parse_toplevel()
            if d.name in seen:
                raise ParseError(
                    f"duplicate declaration of {d.name!r}",
                    self.toks[self.pos - 1].line, self.toks[self.pos - 1].col,
                    self.filename,
                )
            seen.add(d.name)
            out.append(d)
        return out

    def parse_toplevel(self) -> STopLevel:
        t = self.peek()
        if self.accept("kw", "shape"):
            return self.parse_shape_decl(t)
        for kw in ("def", "postulate", "thm"):
            if self.accept("kw", kw):
                return self.parse_decl(kw, t)
        raise self.fail("expected a declaration (def, postulate, thm, or shape)")

    def parse_shape_decl(self, start: Token) -> SShapeDecl:
        name = self.expect("ident").value
        self.expect(":=")
        self.expect("{")
        if self.accept("("):
            pats = [self.expect("ident").value]
            while self.accept(","):
                pats.append(self.expect("ident").value)
            self.expect(")")
            pattern = tuple(pats)
        else:
            pattern = (self.expect("ident").value,)
        self.expect(":")
        cube = self.parse_cube_type()
        self.expect("|")
        tope = self.parse_tope()
        self.expect("}")
        return SShapeDecl(name, pattern, cube, tope, span=self.span_from(start))

    def parse_decl(self, kind: str, start: Token) -> SDecl:
        name = self.expect("ident").value
        params: list[SParam] = []
        while self.at("(") or self.at("{"):
            params.append(self.parse_param())
        self.expect(":")
        ty = self.parse_expr()
        body: Optional[SExpr] = None
        if kind == "def":
            self.expect(":=")
            body = self.parse_expr()
        elif kind == "thm":
            if self.accept(":="):
                body = self.parse_expr()
        return SDecl(kind, name, tuple(params), ty, body, span=self.span_from(start))

    def parse_param(self) -> SParam:
        start = self.peek()
        if self.accept("{"):
            tope = self.parse_tope()
            self.expect("}")
            return SParamTope(tope, span=self.span_from(start))
        self.expect("(")
        names = [self.expect("ident").value]
        while self.at("ident"):
            names.append(self.next().value)
        self.expect(":")
        save = self.pos
        try:
            cube = self.parse_cube_type()
            self.expect(")")
            return SParamCube(tuple(names), cube, span=self.span_from(start))
        except ParseError:
            self.pos = save
        ty = self.parse_expr()
        self.expect(")")
        return SParamTyped(tuple(names), ty, span=self.span_from(start))

    # -- cube types

    def parse_cube_type(self) -> CubeType:
        left = self.parse_cube_type_atom()
        if self.accept("*"):
            return ProdCube(left, self.parse_cube_type())
        return left

    def parse_cube_type_atom(self) -> CubeType:
        if self.accept("num", "2"):
            return INTERVAL
        if self.accept("num", "1"):
            return UNIT_CUBE
        if self.accept("("):
            t = self.parse_cube_type()
            self.expect(")")
            return t
        raise self.fail("expected a cube type (1, 2, or a product)")

    # -- cube expressions

    def parse_cube_expr(self) -> CubeExpr:
        return self.parse_cube_atom()

    def parse_cube_atom(self) -> CubeExpr:
        if self.accept("num", "0"):
            return CZERO
        if self.accept("num", "1"):
            return CONE
        if self.accept("kw", "star"):
            return CSTAR
        if self.accept("kw", "fst"):
            return CFst(self.parse_cube_atom())
        if self.accept("kw", "snd"):
            return CSnd(self.parse_cube_atom())
        if self.at("ident"):
            return CVar(self.next().value)
        if self.accept("("):
            e = self.parse_cube_expr()
            while self.accept(","):
                e = CPair(e, self.parse_cube_expr())
            self.expect(")")
            return e
        raise self.fail("expected a cube point")

    # -- topes

    def parse_tope(self) -> STope:
        left = self.parse_tope_conj()
        while self.accept("\\/"):
            left = TOr(left, self.parse_tope_conj())
        return left

    def parse_tope_conj(self) -> STope:
        left = self.parse_tope_atom()
        while self.accept("/\\"):
            left = TAnd(left, self.parse_tope_atom())
        return left

    def parse_tope_atom(self) -> STope:
        if self.accept("kw", "TOP"):
            return TOP
        if self.accept("kw", "BOT"):
            return BOT
        if self.at("("):
            save = self.pos
            try:
                self.expect("(")
                t = self.parse_tope()
                self.expect(")")
                if self.at("<=") or self.at("==="):
                    raise self.fail("relation after parenthesized tope")
                return t
            except ParseError:
                self.pos = save
            return self.parse_tope_relation()
        if self.at("ident"):
            # either a relation whose left side is a variable, or a shape
            # application
            save = self.pos
            try:
                return self.parse_tope_relation()
            except ParseError:
                self.pos = save
            tok = self.next()
            arg = self.parse_cube_atom()
            return STShapeApp(tok.value, arg, span=self.span_from(tok))
        return self.parse_tope_relation()

    def parse_tope_relation(self) -> Tope:
        a = self.parse_cube_expr()
        if self.accept("<="):
            return TLe(a, self.parse_cube_expr())
        self.expect("===")
        return TEq(a, self.parse_cube_expr())

    # -- expressions

    def parse_expr(self) -> SExpr:
        start = self.peek()
        if self.accept("\\"):
            return self.parse_lambda(start)
        return self.parse_arrow()

    def parse_lambda(self, start: Token) -> SExpr:
        if self.accept("("):
            pats = [self.expect("ident").value]
            while self.accept(","):
                pats.append(self.expect("ident").value)
            self.expect(")")
            pattern, tup = tuple(pats), True
            if len(pats) < 2:
                tup = False
        else:
            pattern, tup = (self.expect("ident").value,), False
        self.expect(".")
        body = self.parse_expr()
        return SLam(pattern, tup, body, span=self.span_from(start))

    def parse_arrow(self) -> SExpr:
        start = self.peek()
        binder = self.try_parse_pi_binder()
        if binder is not None:
            var, dom = binder
            cod = self.parse_arrow()
            return SPiB(var, dom, cod, span=self.span_from(start))
        left = self.parse_sigma_op()
        if self.accept("->"):
            return SArrow(left, self.parse_arrow(), span=self.span_from(start))
        return left

    def try_parse_pi_binder(self) -> Optional[tuple[str, SDom]]:
        """Parse ``(x : D) ->`` where D is a cube domain (with optional tope
        refinement) or a type; backtracks on failure."""
        save = self.pos
        if not self.accept("("):
            return None
        name_tok = self.accept("ident")
        if name_tok is None or not self.accept(":"):
            self.pos = save
            return None
        dom = self.try_parse_domain()
        if dom is None or not self.accept(")") or not self.accept("->"):
            self.pos = save
            return None
        return name_tok.value, dom

    def try_parse_domain(self) -> Optional[SDom]:
        start = self.peek()
        save = self.pos
        try:
            cube = self.parse_cube_type()
            tope: Optional[STope] = None
            if self.accept("|"):
                tope = self.parse_tope()
            if self.at(")"):
                return SDomCube(cube, tope, span=self.span_from(start))
        except ParseError:
            pass
        self.pos = save
        try:
            e = self.parse_expr()
        except ParseError:
            return None
        return SDomExpr(e, span=self.span_from(start))

    def parse_sigma_op(self) -> SExpr:
        start = self.peek()
        left = self.parse_app()
        if self.accept("*"):
            return SSigmaOp(left, self.parse_sigma_op(), span=self.span_from(start))
        return left

    def parse_app(self) -> SExpr:
        start = self.peek()
        head = self.parse_prefix()
        while self.starts_atom():
            arg = self.parse_prefix()
            head = SApp(head, arg, span=self.span_from(start))
        return head

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("ident", "num"):
            return True
        if t.kind == "kw":
            return t.value in ("U", "Unit", "star", "fst", "snd", "Id", "refl",
                              "J", "Sigma")
        # "[" deliberately does not start an application argument: a
        # tope-case used as an argument must be parenthesized, which keeps
        # extension-type boundaries unambiguous
        return t.kind in ("(", "<")

    def parse_prefix(self) -> SExpr:
        """An atom possibly led by one of the prefix operators."""
        start = self.peek()
        if self.accept("kw", "fst"):
            return SFstE(self.parse_prefix(), span=self.span_from(start))
        if self.accept("kw", "snd"):
            return SSndE(self.parse_prefix(), span=self.span_from(start))
        if self.accept("kw", "Id"):
            ty = self.parse_atom()
            lhs = self.parse_atom()
            rhs = self.parse_atom()
            return SIdE(ty, lhs, rhs, span=self.span_from(start))
        if self.accept("kw", "refl"):
            arg = self.parse_atom() if self.starts_atom() else None
            return SReflE(arg, span=self.span_from(start))
        if self.accept("kw", "J"):
            motive = self.parse_atom()
            base = self.parse_atom()
            path = self.parse_atom()
            return SJE(motive, base, path, span=self.span_from(start))
        if self.accept("kw", "Sigma"):
            self.expect("(")
            var = self.expect("ident").value
            self.expect(":")
            dom = self.parse_expr()
            self.expect(")")
            body = self.parse_app()
            return SSigmaB(var, dom, body, span=self.span_from(start))
        return self.parse_atom()

    def parse_atom(self) -> SExpr:
        start = self.peek()
        if self.accept("kw", "U"):
            return SU(span=start.span)
        if self.accept("kw", "Unit"):
            return SUnitT(span=start.span)
        if self.accept("kw", "star"):
            return SStarE(span=start.span)
        if self.at("num"):
            t = self.next()
            if t.value == "2":
                raise ParseError("the interval is not a term", t.line, t.col, self.filename)
            return SNum(int(t.value), span=t.span)
        if self.at("ident"):
            t = self.next()
            return SVar(t.value, span=t.span)
        if self.at("<"):
            return self.parse_ext(start)
        if self.at("["):
            return self.parse_tope_case(start)
        if self.accept("("):
            if self.at("\\"):
                self.next()
                e = self.parse_lambda(start)
            else:
                e = self.parse_expr()
            if self.accept(","):
                snd = self.parse_expr()
                self.expect(")")
                return SPairE(e, snd, span=self.span_from(start))
            if self.accept(":"):
                ty = self.parse_expr()
                self.expect(")")
                return SAnnE(e, ty, span=self.span_from(start))
            self.expect(")")
            return e
        raise self.fail("expected an expression")

    def parse_ext(self, start: Token) -> SExpr:
        self.expect("<")
        self.expect("kw", "Pi")
        self.expect("(")
        var = self.expect("ident").value
        self.expect(":")
        dom = self.try_parse_domain()
        if dom is None:
            raise self.fail("expected a cube domain or shape")
        self.expect(")")
        self.expect("->")
        family = self.parse_sigma_op()
        branches: tuple[tuple[STope, SExpr], ...] = ()
        self.expect("[")
        if not self.at("]"):
            branches = self.parse_branches()
        self.expect("]")
        self.expect(">")
        return SExtE(var, dom, family, branches, span=self.span_from(start))

    def parse_tope_case(self, start: Token) -> SExpr:
        self.expect("[")
        branches: tuple[tuple[STope, SExpr], ...] = ()
        if not self.at("]"):
            branches = self.parse_branches()
        self.expect("]")
        return SCaseE(branches, span=self.span_from(start))

    def parse_branches(self) -> tuple[tuple[STope, SExpr], ...]:
        out = []
        while True:
            tope = self.parse_tope()
            self.expect("|->")
            body = self.parse_expr()
            out.append((tope, body))
            if not self.accept("|"):
                break
        return tuple(out)


# ---------------------------------------------------------------------------
# Entry points

def parse_file(src: str, filename: str = "<input>") -> list[STopLevel]:
    return Parser(src, filename).parse_file()


def parse_expr(src: str, filename: str = "<input>") -> SExpr:
    p = Parser(src, filename)
    e = p.parse_expr()
    p.expect("eof")
    return e


def parse_sequent_source(src: str, filename: str = "<sequent>"):
    """Parse ``x : 2, y : 2 | hyp |- goal`` into a tope sequent.

    The context lists cube variables; the hypothesis and goal are topes
    (shape applications are not allowed here)."""
    from .tope import Sequent

    p = Parser(src, filename)
    ctx: list[tuple[str, CubeType]] = []
    if not p.at("|"):
        while True:
            name = p.expect("ident").value
            p.expect(":")
            cube = p.parse_cube_type()
            ctx.append((name, cube))
            if not p.accept(","):
                break
    p.expect("|")
    hyp = p.parse_tope()
    p.expect("|-")
    goal = p.parse_tope()
    p.expect("eof")
    for t in (hyp, goal):
        _reject_shape_apps(t, p)
    return Sequent(tuple(ctx), hyp, goal)


def _reject_shape_apps(t: STope, p: Parser) -> None:
    match t:
        case STShapeApp(name, _):
            raise ParseError(f"unknown tope form {name!r}", 1, 1, p.filename)
        case TAnd(a, b) | TOr(a, b):
            _reject_shape_apps(a, p)
            _reject_shape_apps(b, p)
        case _:
            pass
