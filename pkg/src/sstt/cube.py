"""First layer: cubes.

Cube types are generated from the interval ``2`` and the one-point cube ``1``
by finite products.  Points of a cube are built from variables, the endpoints
``0`` and ``1``, pairing, projections and the unique point of ``1``.

Every well-typed point has a *tuple normal form*: projections are pushed
through pairs and variables of product type are eta-expanded, so a normal
point of a product cube is a tuple whose leaves are interval-valued atoms
(``0``, ``1``, or a projection chain applied to a variable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class CubeError(Exception):
    """Ill-scoped or ill-typed cube expression."""


# ---------------------------------------------------------------------------
# Cube types

@dataclass(frozen=True)
class Interval:
    def __str__(self) -> str:
        return "2"


@dataclass(frozen=True)
class UnitCube:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class ProdCube:
    left: "CubeType"
    right: "CubeType"

    def __str__(self) -> str:
        def atom(t: CubeType) -> str:
            return f"({t})" if isinstance(t, ProdCube) else str(t)

        return f"{atom(self.left)} * {atom(self.right)}"


CubeType = Union[Interval, UnitCube, ProdCube]

INTERVAL = Interval()
UNIT_CUBE = UnitCube()


# ---------------------------------------------------------------------------
# Cube expressions

@dataclass(frozen=True)
class CVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CZero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class COne:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class CStar:
    """The unique point of the one-point cube."""

    def __str__(self) -> str:
        return "star"


@dataclass(frozen=True)
class CPair:
    fst: "CubeExpr"
    snd: "CubeExpr"

    def __str__(self) -> str:
        return f"({self.fst}, {self.snd})"


@dataclass(frozen=True)
class CFst:
    arg: "CubeExpr"

    def __str__(self) -> str:
        return f"fst {_paren(self.arg)}"


@dataclass(frozen=True)
class CSnd:
    arg: "CubeExpr"

    def __str__(self) -> str:
        return f"snd {_paren(self.arg)}"


CubeExpr = Union[CVar, CZero, COne, CStar, CPair, CFst, CSnd]

CZERO = CZero()
CONE = COne()
CSTAR = CStar()


def _paren(e: CubeExpr) -> str:
    if isinstance(e, (CVar, CZero, COne, CStar, CPair)):
        return str(e)
    return f"({e})"


# ---------------------------------------------------------------------------
# Typing and normalization

CubeContext = dict[str, CubeType]


def cube_type_of(ctx: CubeContext, e: CubeExpr) -> CubeType:
    """Infer the cube type of ``e`` in ``ctx``; raises CubeError if ill-typed."""
    match e:
        case CVar(name):
            if name not in ctx:
                raise CubeError(f"unbound cube variable {name!r}")
            return ctx[name]
        case CZero() | COne():
            return INTERVAL
        case CStar():
            return UNIT_CUBE
        case CPair(a, b):
            return ProdCube(cube_type_of(ctx, a), cube_type_of(ctx, b))
        case CFst(a):
            t = cube_type_of(ctx, a)
            if not isinstance(t, ProdCube):
                raise CubeError(f"fst applied to point of non-product cube {t}")
            return t.left
        case CSnd(a):
            t = cube_type_of(ctx, a)
            if not isinstance(t, ProdCube):
                raise CubeError(f"snd applied to point of non-product cube {t}")
            return t.right
    raise CubeError(f"not a cube expression: {e!r}")


def normalize_cube(ctx: CubeContext, e: CubeExpr) -> CubeExpr:
    """Tuple normal form of ``e``.

    Projections are evaluated on pairs, variables are eta-expanded at product
    type, and every point of the one-point cube collapses to ``star``.  The
    result of normalizing a point of a product cube is always a ``CPair`` of
    normal forms.
    """
    ty = cube_type_of(ctx, e)
    return _normalize(ctx, e, ty)


def _normalize(ctx: CubeContext, e: CubeExpr, ty: CubeType) -> CubeExpr:
    if isinstance(ty, UnitCube):
        return CSTAR
    if isinstance(ty, ProdCube):
        return CPair(
            _normalize(ctx, _proj(e, True), ty.left),
            _normalize(ctx, _proj(e, False), ty.right),
        )
    # interval type: chase projections down to an atom
    match e:
        case CVar(_) | CZero() | COne():
            return e
        case CFst(a):
            inner = _normalize_head(ctx, a)
            if isinstance(inner, CPair):
                return _normalize(ctx, inner.fst, ty)
            return CFst(inner)
        case CSnd(a):
            inner = _normalize_head(ctx, a)
            if isinstance(inner, CPair):
                return _normalize(ctx, inner.snd, ty)
            return CSnd(inner)
    raise CubeError(f"cannot normalize {e!r} at interval type")


def _normalize_head(ctx: CubeContext, e: CubeExpr) -> CubeExpr:
    """Expose a pair at the head of a product-typed expression when possible."""
    match e:
        case CPair(_, _):
            return e
        case CFst(a):
            inner = _normalize_head(ctx, a)
            return _normalize_head(ctx, _proj(inner, True)) if isinstance(inner, CPair) else CFst(inner)
        case CSnd(a):
            inner = _normalize_head(ctx, a)
            return _normalize_head(ctx, _proj(inner, False)) if isinstance(inner, CPair) else CSnd(inner)
        case _:
            return e


def _proj(e: CubeExpr, first: bool) -> CubeExpr:
    if isinstance(e, CPair):
        return e.fst if first else e.snd
    return CFst(e) if first else CSnd(e)


def interval_atoms(ctx: CubeContext, e: CubeExpr) -> Iterator[CubeExpr]:
    """The interval-valued leaves of the tuple normal form of ``e``."""
    n = normalize_cube(ctx, e)
    yield from _leaves(n)


def _leaves(n: CubeExpr) -> Iterator[CubeExpr]:
    if isinstance(n, CPair):
        yield from _leaves(n.fst)
        yield from _leaves(n.snd)
    elif not isinstance(n, CStar):
        yield n


def subst_cube_expr(e: CubeExpr, name: str, value: CubeExpr) -> CubeExpr:
    """Substitute ``value`` for the cube variable ``name`` in ``e``."""
    match e:
        case CVar(n):
            return value if n == name else e
        case CPair(a, b):
            return CPair(subst_cube_expr(a, name, value), subst_cube_expr(b, name, value))
        case CFst(a):
            return CFst(subst_cube_expr(a, name, value))
        case CSnd(a):
            return CSnd(subst_cube_expr(a, name, value))
        case _:
            return e


def cube_free_vars(e: CubeExpr) -> set[str]:
    match e:
        case CVar(n):
            return {n}
        case CPair(a, b):
            return cube_free_vars(a) | cube_free_vars(b)
        case CFst(a) | CSnd(a):
            return cube_free_vars(a)
        case _:
            return set()
