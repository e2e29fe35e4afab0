"""Third layer: core terms and types.

One shared namespace covers cube variables and typed variables; the
three-layer context tracks which sort each name has.  Terms are immutable
trees, so they can be shared freely.  Substitution is capture-avoiding by
renaming binders against the free variables of the substituted value, for
both typed values and cube points (cube variables occur inside extension
types, extension applications and tope-case scrutinees).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .cube import (
    CFst,
    CPair,
    CSnd,
    CStar,
    CubeContext,
    CubeExpr,
    CubeType,
    CVar,
    cube_free_vars,
)
from .tope import (
    BOT,
    TOP,
    TAnd,
    TEq,
    TLe,
    TOr,
    Tope,
    tope_and,
    tope_free_vars,
)


def subst_cube_sim(c: CubeExpr, mapping: dict[str, CubeExpr]) -> CubeExpr:
    """Simultaneous substitution of cube points for cube variables."""
    match c:
        case CVar(n):
            return mapping.get(n, c)
        case CPair(a, b):
            return CPair(subst_cube_sim(a, mapping), subst_cube_sim(b, mapping))
        case CFst(a):
            return CFst(subst_cube_sim(a, mapping))
        case CSnd(a):
            return CSnd(subst_cube_sim(a, mapping))
        case _:
            return c


def subst_tope_sim(t: Tope, mapping: dict[str, CubeExpr]) -> Tope:
    """Simultaneous substitution of cube points in a tope."""
    match t:
        case TAnd(a, b):
            return TAnd(subst_tope_sim(a, mapping), subst_tope_sim(b, mapping))
        case TOr(a, b):
            return TOr(subst_tope_sim(a, mapping), subst_tope_sim(b, mapping))
        case TLe(a, b):
            return TLe(subst_cube_sim(a, mapping), subst_cube_sim(b, mapping))
        case TEq(a, b):
            return TEq(subst_cube_sim(a, mapping), subst_cube_sim(b, mapping))
        case _:
            return t


@dataclass(frozen=True)
class Span:
    start: int
    end: int

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


_counter = itertools.count(1)


def fresh(base: str = "x") -> str:
    base = base.split("$")[0] or "x"
    return f"{base}${next(_counter)}"


def reset_fresh() -> None:
    """Restart the fresh-name counter (called per checking run so that
    printed names, and hence reports, are reproducible)."""
    global _counter
    _counter = itertools.count(1)


def display_name(name: str) -> str:
    """Printable form of a possibly-freshened name."""
    return name.replace("$", "_")


# ---------------------------------------------------------------------------
# Terms

def _span_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class U:
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class UnitType:
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class UnitPoint:
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Const:
    name: str
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Pi:
    var: str
    dom: "Expr"
    cod: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Lam:
    var: str
    body: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class App:
    fn: "Expr"
    arg: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Sigma:
    var: str
    fst_ty: "Expr"
    snd_ty: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Pair:
    fst: "Expr"
    snd: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Fst:
    arg: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Snd:
    arg: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class IdT:
    ty: "Expr"
    lhs: "Expr"
    rhs: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Refl:
    arg: Optional["Expr"] = None
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class J:
    motive: "Expr"
    base: "Expr"
    path: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Ext:
    """Extension type: sections of ``family`` over the shape ``{var : cube |
    shape_tope}`` that restrict on the sub-shape ``boundary_tope`` to
    ``boundary``.  ``var`` scopes over both topes, the family and the
    boundary term."""

    var: str
    cube: CubeType
    shape_tope: Tope
    family: "Expr"
    boundary_tope: Tope
    boundary: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class ExtApp:
    fn: "Expr"
    arg: CubeExpr
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class TopeCase:
    """Case split over tope disjuncts; branches must agree where they
    overlap.  Topes refer to cube variables already in scope."""

    branches: tuple[tuple[Tope, "Expr"], ...]
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Ann:
    expr: "Expr"
    ty: "Expr"
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class CubeLit:
    """An interval endpoint in term position.  Compound cube points embed
    into terms through pairs and projections (see ``cube_to_term``), so
    this only ever wraps an endpoint."""

    expr: CubeExpr
    span: Optional[Span] = _span_field()


Expr = Union[
    U, UnitType, UnitPoint, Var, Const, Pi, Lam, App, Sigma, Pair, Fst, Snd,
    IdT, Refl, J, Ext, ExtApp, TopeCase, Ann, CubeLit,
]


# ---------------------------------------------------------------------------
# Free variables (both sorts share the namespace)

def free_vars(e: Expr) -> set[str]:
    match e:
        case Var(n):
            return {n}
        case Pi(x, a, b) | Sigma(x, a, b):
            return free_vars(a) | (free_vars(b) - {x})
        case Lam(x, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Pair(a, b):
            return free_vars(a) | free_vars(b)
        case Fst(a) | Snd(a):
            return free_vars(a)
        case IdT(t, l, r):
            return free_vars(t) | free_vars(l) | free_vars(r)
        case Refl(a):
            return free_vars(a) if a is not None else set()
        case J(c, d, p):
            return free_vars(c) | free_vars(d) | free_vars(p)
        case Ext(t, _, psi, fam, phi, bd):
            inner = (
                tope_free_vars(psi) | free_vars(fam) | tope_free_vars(phi) | free_vars(bd)
            )
            return inner - {t}
        case ExtApp(f, c):
            return free_vars(f) | cube_free_vars(c)
        case TopeCase(branches):
            out: set[str] = set()
            for tp, br in branches:
                out |= tope_free_vars(tp) | free_vars(br)
            return out
        case Ann(x, t):
            return free_vars(x) | free_vars(t)
        case CubeLit(c):
            return cube_free_vars(c)
        case _:
            return set()


# ---------------------------------------------------------------------------
# Renaming and substitution

class _Subst:
    """Simultaneous capture-avoiding substitution of typed values and cube
    points for names."""

    def __init__(self, typed: dict[str, Expr], cubes: dict[str, CubeExpr]):
        self.typed = dict(typed)
        self.cubes = dict(cubes)
        self.value_fvs: set[str] = set()
        for v in self.typed.values():
            self.value_fvs |= free_vars(v)
        for c in self.cubes.values():
            self.value_fvs |= cube_free_vars(c)

    def active(self) -> bool:
        return bool(self.typed or self.cubes)

    def under(self, x: str) -> tuple[str, "_Subst"]:
        sub = _Subst(
            {k: v for k, v in self.typed.items() if k != x},
            {k: v for k, v in self.cubes.items() if k != x},
        )
        if x in self.value_fvs:
            nx = fresh(x)
            sub.cubes[x] = CVar(nx)
            sub.typed[x] = Var(nx)
            sub.value_fvs = self.value_fvs | {nx}
            return nx, sub
        return x, sub

    def cube_expr(self, c: CubeExpr) -> CubeExpr:
        return subst_cube_sim(c, self.cubes)

    def tope(self, t: Tope) -> Tope:
        return subst_tope_sim(t, self.cubes)

    def expr(self, e: Expr) -> Expr:
        if not self.active():
            return e
        match e:
            case Var(n):
                return self.typed.get(n, e)
            case Const(_) | U() | UnitType() | UnitPoint():
                return e
            case Pi(x, a, b):
                na = self.expr(a)
                nx, sub = self.under(x)
                return Pi(nx, na, sub.expr(b), span=e.span)
            case Sigma(x, a, b):
                na = self.expr(a)
                nx, sub = self.under(x)
                return Sigma(nx, na, sub.expr(b), span=e.span)
            case Lam(x, b):
                nx, sub = self.under(x)
                return Lam(nx, sub.expr(b), span=e.span)
            case App(f, a):
                return App(self.expr(f), self.expr(a), span=e.span)
            case Pair(a, b):
                return Pair(self.expr(a), self.expr(b), span=e.span)
            case Fst(a):
                return Fst(self.expr(a), span=e.span)
            case Snd(a):
                return Snd(self.expr(a), span=e.span)
            case IdT(t, l, r):
                return IdT(self.expr(t), self.expr(l), self.expr(r), span=e.span)
            case Refl(a):
                return Refl(self.expr(a) if a is not None else None, span=e.span)
            case J(c, d, p):
                return J(self.expr(c), self.expr(d), self.expr(p), span=e.span)
            case Ext(t, cube, psi, fam, phi, bd):
                nt, sub = self.under(t)
                return Ext(
                    nt, cube, sub.tope(psi), sub.expr(fam), sub.tope(phi), sub.expr(bd),
                    span=e.span,
                )
            case ExtApp(f, c):
                return ExtApp(self.expr(f), self.cube_expr(c), span=e.span)
            case TopeCase(branches):
                return TopeCase(
                    tuple((self.tope(tp), self.expr(br)) for tp, br in branches),
                    span=e.span,
                )
            case Ann(x, t):
                return Ann(self.expr(x), self.expr(t), span=e.span)
            case CubeLit(c):
                return CubeLit(self.cube_expr(c), span=e.span)
        raise TypeError(f"not an expression: {e!r}")


def cube_to_term(c: CubeExpr) -> Expr:
    """Embed a cube point into the term language."""
    match c:
        case CVar(n):
            return Var(n)
        case CPair(a, b):
            return Pair(cube_to_term(a), cube_to_term(b))
        case CFst(a):
            return Fst(cube_to_term(a))
        case CSnd(a):
            return Snd(cube_to_term(a))
        case CStar():
            return UnitPoint()
        case _:
            return CubeLit(c)


def subst_typed(e: Expr, name: str, value: Expr) -> Expr:
    """Capture-avoiding substitution of a term for a typed variable."""
    return _Subst({name: value}, {}).expr(e)


def subst_cube(e: Expr, name: str, point: CubeExpr) -> Expr:
    """Capture-avoiding substitution of a cube point for a cube variable.
    Covers both sorts of occurrence: in cube position (topes, extension
    applications) and in term position (via the term embedding)."""
    return _Subst({name: cube_to_term(point)}, {name: point}).expr(e)


def rename_var(e: Expr, old: str, new: str) -> Expr:
    """Rename a free variable of either sort."""
    return _Subst({old: Var(new)}, {old: CVar(new)}).expr(e)


# ---------------------------------------------------------------------------
# Alpha-equivalence

def _rename_cube_env(c: CubeExpr, env: dict[str, str]) -> CubeExpr:
    return subst_cube_sim(c, {old: CVar(new) for old, new in env.items()})


def _rename_tope_env(t: Tope, env: dict[str, str]) -> Tope:
    return subst_tope_sim(t, {old: CVar(new) for old, new in env.items()})


def alpha_eq(a: Expr, b: Expr, env: Optional[dict[str, str]] = None) -> bool:
    """Structural equality up to renaming of bound variables.  ``env`` maps
    binders of ``a`` to the corresponding binders of ``b``."""
    env = env or {}

    def go(a: Expr, b: Expr, env: dict[str, str]) -> bool:
        match a, b:
            case Var(n), Var(m):
                return env.get(n, n) == m
            case Const(n), Const(m):
                return n == m
            case U(), U():
                return True
            case UnitType(), UnitType():
                return True
            case UnitPoint(), UnitPoint():
                return True
            case Pi(x, d1, c1), Pi(y, d2, c2):
                return go(d1, d2, env) and go(c1, c2, {**env, x: y})
            case Sigma(x, d1, c1), Sigma(y, d2, c2):
                return go(d1, d2, env) and go(c1, c2, {**env, x: y})
            case Lam(x, b1), Lam(y, b2):
                return go(b1, b2, {**env, x: y})
            case App(f1, a1), App(f2, a2):
                return go(f1, f2, env) and go(a1, a2, env)
            case Pair(a1, b1), Pair(a2, b2):
                return go(a1, a2, env) and go(b1, b2, env)
            case Fst(a1), Fst(a2):
                return go(a1, a2, env)
            case Snd(a1), Snd(a2):
                return go(a1, a2, env)
            case IdT(t1, l1, r1), IdT(t2, l2, r2):
                return go(t1, t2, env) and go(l1, l2, env) and go(r1, r2, env)
            case Refl(x1), Refl(x2):
                if (x1 is None) != (x2 is None):
                    return False
                return x1 is None or go(x1, x2, env)
            case J(c1, d1, p1), J(c2, d2, p2):
                return go(c1, c2, env) and go(d1, d2, env) and go(p1, p2, env)
            case Ext(t1, cu1, ps1, f1, ph1, b1), Ext(t2, cu2, ps2, f2, ph2, b2):
                if cu1 != cu2:
                    return False
                env2 = {**env, t1: t2}
                return (
                    _rename_tope_env(ps1, env2) == ps2
                    and go(f1, f2, env2)
                    and _rename_tope_env(ph1, env2) == ph2
                    and go(b1, b2, env2)
                )
            case ExtApp(f1, c1), ExtApp(f2, c2):
                return go(f1, f2, env) and _rename_cube_env(c1, env) == c2
            case TopeCase(bs1), TopeCase(bs2):
                if len(bs1) != len(bs2):
                    return False
                return all(
                    _rename_tope_env(t1, env) == t2 and go(e1, e2, env)
                    for (t1, e1), (t2, e2) in zip(bs1, bs2)
                )
            case Ann(e1, t1), Ann(e2, t2):
                return go(e1, e2, env) and go(t1, t2, env)
            case CubeLit(c1), CubeLit(c2):
                return _rename_cube_env(c1, env) == c2
            case _:
                return False

    return go(a, b, env)


# ---------------------------------------------------------------------------
# Contexts

class VarSort(Enum):
    CUBE = "cube"
    TYPED = "typed"


@dataclass(frozen=True)
class TriContext:
    """Three-layer context: cube variables, tope constraints, typed
    variables.  Tope refinement is monotone: binding only ever conjoins."""

    cube_vars: tuple[tuple[str, CubeType], ...] = ()
    tope: Tope = TOP
    typed_vars: tuple[tuple[str, Optional[Expr]], ...] = ()

    def bind_cube(self, name: str, cube: CubeType) -> "TriContext":
        return TriContext(self.cube_vars + ((name, cube),), self.tope, self.typed_vars)

    def bind_tope(self, t: Tope) -> "TriContext":
        return TriContext(self.cube_vars, tope_and(self.tope, t), self.typed_vars)

    def with_tope(self, t: Tope) -> "TriContext":
        """Replace the tope constraint (used for branch-wise reasoning)."""
        return TriContext(self.cube_vars, t, self.typed_vars)

    def bind_typed(self, name: str, ty: Optional[Expr]) -> "TriContext":
        return TriContext(self.cube_vars, self.tope, self.typed_vars + ((name, ty),))

    def lookup_typed(self, name: str) -> Optional[Expr]:
        for n, t in reversed(self.typed_vars):
            if n == name:
                return t
        return None

    def has_typed(self, name: str) -> bool:
        return any(n == name for n, _ in self.typed_vars)

    def lookup_cube(self, name: str) -> Optional[CubeType]:
        for n, t in reversed(self.cube_vars):
            if n == name:
                return t
        return None

    def cube_context(self) -> CubeContext:
        return dict(self.cube_vars)


# ---------------------------------------------------------------------------
# Declarations

class DeclTag(Enum):
    DEFINITION = "definition"
    AXIOM = "axiom"
    THEOREM_PROVED = "theorem-proved"
    THEOREM_STATED = "theorem-stated"


@dataclass(frozen=True)
class CubeParam:
    name: str
    cube: CubeType


@dataclass(frozen=True)
class TopeParam:
    tope: Tope


@dataclass(frozen=True)
class TypedParam:
    name: str
    ty: Expr


TeleParam = Union[CubeParam, TopeParam, TypedParam]


@dataclass(frozen=True)
class Decl:
    """A checked declaration: a telescope, a stated type, and (for
    definitions and proved theorems) a body.  ``ty``/``body`` are the
    telescope-folded forms consumed by the checker."""

    name: str
    tag: DeclTag
    telescope: tuple[TeleParam, ...]
    inner_ty: Expr
    inner_body: Optional[Expr]
    ty: Expr
    body: Optional[Expr]
    span: Optional[Span] = _span_field()

    @property
    def has_body(self) -> bool:
        return self.body is not None


def fold_telescope(telescope: tuple[TeleParam, ...], inner_ty: Expr,
                   inner_body: Optional[Expr]) -> tuple[Expr, Optional[Expr]]:
    """Fold a telescope into a single type (and body): typed parameters
    become Pi/lambda, a cube parameter with its following tope parameters
    becomes an extension type over that sub-shape with empty boundary."""
    ty = inner_ty
    body = inner_body
    i = len(telescope)
    while i > 0:
        i -= 1
        p = telescope[i]
        if isinstance(p, TypedParam):
            ty = Pi(p.name, p.ty, ty)
            if body is not None:
                body = Lam(p.name, body)
        elif isinstance(p, CubeParam):
            # gather tope params that follow this cube param (already consumed
            # below when scanning right to left: collect pending topes)
            ty = Ext(p.name, p.cube, _pending_tope(telescope, i), ty,
                     BOT, TopeCase(()))
            if body is not None:
                body = Lam(p.name, body)
        else:
            # tope param: folded into the nearest enclosing cube param
            continue
    return ty, body


def _pending_tope(telescope: tuple[TeleParam, ...], cube_index: int) -> Tope:
    """The conjunction of tope parameters between this cube parameter and the
    next one (they constrain this cube variable's sub-shape)."""
    ts = []
    for p in telescope[cube_index + 1:]:
        if isinstance(p, CubeParam):
            break
        if isinstance(p, TopeParam):
            ts.append(p.tope)
    return tope_and(*ts)
