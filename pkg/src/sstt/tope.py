"""Second layer: topes, and the decision procedure for tope entailment.

A tope is a positive formula (top, bottom, conjunction, disjunction,
inequality, strict equality) over interval-valued points of a cube context.
Negation, implication and quantifiers do not exist in this layer.

Entailment ``Xi | Phi |- phi`` is decided semantically.  The models of the
theory are valuations of the interval atoms into an arbitrary bounded total
order with distinct endpoints, and the truth of a positive formula under a
valuation depends only on the induced weak order (total preorder) of the
atoms together with the endpoints 0 and 1.  There are finitely many such weak
orders, so the procedure is: DNF-expand the hypothesis, and for each disjunct
check the goal under every admissible weak order consistent with it.  A
failed entailment comes with one violating weak order as a counter-model.

Admissible weak orders place 0 in the bottom block and 1 in the top block,
strictly apart; this builds in the axioms 0 <= x, x <= 1 and 0 /= 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .cube import (
    CONE,
    CZERO,
    CubeContext,
    CubeExpr,
    CubeType,
    COne,
    CPair,
    CStar,
    CVar,
    CZero,
    Interval,
    cube_type_of,
    interval_atoms,
    normalize_cube,
    subst_cube_expr,
)

MAX_DISJUNCTS = 4096


class TopeError(Exception):
    """Ill-scoped or ill-typed tope."""


class TopeTooLargeError(TopeError):
    """DNF expansion exceeded MAX_DISJUNCTS disjuncts."""


# ---------------------------------------------------------------------------
# Tope syntax

@dataclass(frozen=True)
class TTop:
    def __str__(self) -> str:
        return "TOP"


@dataclass(frozen=True)
class TBot:
    def __str__(self) -> str:
        return "BOT"


@dataclass(frozen=True)
class TAnd:
    left: "Tope"
    right: "Tope"

    def __str__(self) -> str:
        return f"{_wrap(self.left)} /\\ {_wrap(self.right)}"


@dataclass(frozen=True)
class TOr:
    left: "Tope"
    right: "Tope"

    def __str__(self) -> str:
        return f"{_wrap(self.left)} \\/ {_wrap(self.right)}"


@dataclass(frozen=True)
class TLe:
    left: CubeExpr
    right: CubeExpr

    def __str__(self) -> str:
        return f"{self.left} <= {self.right}"


@dataclass(frozen=True)
class TEq:
    left: CubeExpr
    right: CubeExpr

    def __str__(self) -> str:
        return f"{self.left} === {self.right}"


Tope = Union[TTop, TBot, TAnd, TOr, TLe, TEq]

TOP = TTop()
BOT = TBot()


def _wrap(t: Tope) -> str:
    if isinstance(t, (TAnd, TOr)):
        return f"({t})"
    return str(t)


def tope_and(*ts: Tope) -> Tope:
    acc: Tope = TOP
    for t in ts:
        if isinstance(t, TTop):
            continue
        acc = t if isinstance(acc, TTop) else TAnd(acc, t)
    return acc


def tope_or(*ts: Tope) -> Tope:
    acc: Tope = BOT
    for t in ts:
        if isinstance(t, TBot):
            continue
        acc = t if isinstance(acc, TBot) else TOr(acc, t)
    return acc


def subst_tope(t: Tope, name: str, value: CubeExpr) -> Tope:
    match t:
        case TAnd(a, b):
            return TAnd(subst_tope(a, name, value), subst_tope(b, name, value))
        case TOr(a, b):
            return TOr(subst_tope(a, name, value), subst_tope(b, name, value))
        case TLe(a, b):
            return TLe(subst_cube_expr(a, name, value), subst_cube_expr(b, name, value))
        case TEq(a, b):
            return TEq(subst_cube_expr(a, name, value), subst_cube_expr(b, name, value))
        case _:
            return t


def tope_free_vars(t: Tope) -> set[str]:
    from .cube import cube_free_vars

    match t:
        case TAnd(a, b) | TOr(a, b):
            return tope_free_vars(a) | tope_free_vars(b)
        case TLe(a, b) | TEq(a, b):
            return cube_free_vars(a) | cube_free_vars(b)
        case _:
            return set()


# ---------------------------------------------------------------------------
# Shapes and sequents

@dataclass(frozen=True)
class Shape:
    """A sub-polytope {var : cube | constraint} of a cube."""

    var: str
    cube: CubeType
    constraint: Tope

    def __str__(self) -> str:
        return f"{{{self.var} : {self.cube} | {self.constraint}}}"

    def applied_to(self, point: CubeExpr) -> Tope:
        return subst_tope(self.constraint, self.var, point)


@dataclass(frozen=True)
class Sequent:
    """Entailment judgment: cube context, hypothesis tope, goal tope."""

    ctx: tuple[tuple[str, CubeType], ...]
    hyp: Tope
    goal: Tope

    def cube_context(self) -> CubeContext:
        return dict(self.ctx)

    def __str__(self) -> str:
        vars_ = ", ".join(f"{n} : {t}" for n, t in self.ctx)
        return f"{vars_} | {self.hyp} |- {self.goal}"


# ---------------------------------------------------------------------------
# Normalization: reduce every inequality/equality to interval atoms

def normalize_tope(ctx: CubeContext, t: Tope) -> Tope:
    """Normalize cube arguments; equalities at product/unit cubes decompose
    componentwise.  After this, every TLe/TEq argument is an interval atom."""
    match t:
        case TTop() | TBot():
            return t
        case TAnd(a, b):
            return tope_and(normalize_tope(ctx, a), normalize_tope(ctx, b))
        case TOr(a, b):
            na, nb = normalize_tope(ctx, a), normalize_tope(ctx, b)
            if isinstance(na, TBot):
                return nb
            if isinstance(nb, TBot):
                return na
            return TOr(na, nb)
        case TLe(a, b):
            ta, tb = cube_type_of(ctx, a), cube_type_of(ctx, b)
            if not isinstance(ta, Interval) or not isinstance(tb, Interval):
                raise TopeError(f"<= requires interval-valued points, got {ta} and {tb}")
            return TLe(normalize_cube(ctx, a), normalize_cube(ctx, b))
        case TEq(a, b):
            ta, tb = cube_type_of(ctx, a), cube_type_of(ctx, b)
            if ta != tb:
                raise TopeError(f"=== requires points of the same cube, got {ta} and {tb}")
            return _eq_components(normalize_cube(ctx, a), normalize_cube(ctx, b))
    raise TopeError(f"not a tope: {t!r}")


def _eq_components(a: CubeExpr, b: CubeExpr) -> Tope:
    if isinstance(a, CStar) or isinstance(b, CStar):
        return TOP
    if isinstance(a, CPair) and isinstance(b, CPair):
        return tope_and(_eq_components(a.fst, b.fst), _eq_components(a.snd, b.snd))
    return TEq(a, b)


# ---------------------------------------------------------------------------
# DNF

def dnf(t: Tope) -> list[list[Tope]]:
    """Disjunctive normal form: a list of disjuncts, each a list of atomic
    literals (TLe/TEq).  An unsatisfiable literal TBot kills its disjunct; an
    empty disjunct list means the tope is equivalent to BOT."""
    match t:
        case TTop():
            return [[]]
        case TBot():
            return []
        case TLe(_, _) | TEq(_, _):
            return [[t]]
        case TOr(a, b):
            out = dnf(a) + dnf(b)
            if len(out) > MAX_DISJUNCTS:
                raise TopeTooLargeError(f"tope too large: more than {MAX_DISJUNCTS} disjuncts")
            return out
        case TAnd(a, b):
            da, db = dnf(a), dnf(b)
            if len(da) * len(db) > MAX_DISJUNCTS:
                raise TopeTooLargeError(f"tope too large: more than {MAX_DISJUNCTS} disjuncts")
            return [x + y for x in da for y in db]
    raise TopeError(f"not a tope: {t!r}")


# ---------------------------------------------------------------------------
# Weak orders

@dataclass(frozen=True)
class WeakOrder:
    """A total preorder on the atoms together with 0 and 1, reported as an
    ordered partition (blocks of tied atoms, listed from bottom to top)."""

    blocks: tuple[tuple[str, ...], ...]

    def __str__(self) -> str:
        return " < ".join(" = ".join(block) for block in self.blocks)

    def rank(self, name: str) -> int:
        for i, block in enumerate(self.blocks):
            if name in block:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class EntailResult:
    yes: bool
    counter_model: Optional[WeakOrder] = None

    def __bool__(self) -> bool:
        return self.yes


_RANK_CACHE: dict[int, np.ndarray] = {}


def _rank_matrix(n_atoms: int) -> np.ndarray:
    """All admissible weak orders of 0, 1, and n_atoms atoms, as a matrix of
    ranks with columns [0, 1, atom_0, ..., atom_{n-1}].

    0 always has the minimum rank and 1 the maximum rank, strictly apart;
    atoms may tie with either endpoint or with each other.
    """
    if n_atoms in _RANK_CACHE:
        return _RANK_CACHE[n_atoms]
    top = n_atoms + 1
    seen: set[tuple[int, ...]] = set()
    rows: list[tuple[int, ...]] = []
    for assignment in itertools.product(range(top + 1), repeat=n_atoms):
        ranks = (0, top) + assignment
        used = sorted(set(ranks))
        compress = {r: i for i, r in enumerate(used)}
        canon = tuple(compress[r] for r in ranks)
        if canon not in seen:
            seen.add(canon)
            rows.append(canon)
    rows.sort()
    mat = np.array(rows, dtype=np.int64) if rows else np.zeros((0, 2), dtype=np.int64)
    _RANK_CACHE[n_atoms] = mat
    return mat


def _collect_atoms(ts: list[Tope]) -> list[CubeExpr]:
    atoms: list[CubeExpr] = []
    seen: set[CubeExpr] = set()

    def visit(t: Tope) -> None:
        match t:
            case TAnd(a, b) | TOr(a, b):
                visit(a)
                visit(b)
            case TLe(a, b) | TEq(a, b):
                for e in (a, b):
                    if not isinstance(e, (CZero, COne)) and e not in seen:
                        seen.add(e)
                        atoms.append(e)
            case _:
                pass

    for t in ts:
        visit(t)
    atoms.sort(key=str)
    return atoms


def _eval_tope(t: Tope, ranks: np.ndarray, col: dict[CubeExpr, int]) -> np.ndarray:
    """Truth of ``t`` (atoms already normalized) under every weak order."""
    match t:
        case TTop():
            return np.ones(ranks.shape[0], dtype=bool)
        case TBot():
            return np.zeros(ranks.shape[0], dtype=bool)
        case TAnd(a, b):
            return _eval_tope(a, ranks, col) & _eval_tope(b, ranks, col)
        case TOr(a, b):
            return _eval_tope(a, ranks, col) | _eval_tope(b, ranks, col)
        case TLe(a, b):
            return ranks[:, col[a]] <= ranks[:, col[b]]
        case TEq(a, b):
            return ranks[:, col[a]] == ranks[:, col[b]]
    raise TopeError(f"not a tope: {t!r}")


_ENTAILS_CACHE: dict[tuple[Tope, Tope], EntailResult] = {}


def entails(seq: Sequent) -> EntailResult:
    """Decide the sequent.  Yes iff the goal holds in every model of the
    hypothesis; otherwise one violating weak order is returned."""
    ctx = seq.cube_context()
    hyp = normalize_tope(ctx, seq.hyp)
    goal = normalize_tope(ctx, seq.goal)
    key = (hyp, goal)
    cached = _ENTAILS_CACHE.get(key)
    if cached is not None:
        return cached
    result = _entails_normalized(hyp, goal)
    _ENTAILS_CACHE[key] = result
    return result


def _entails_normalized(hyp: Tope, goal: Tope) -> EntailResult:
    atoms = _collect_atoms([hyp, goal])
    ranks = _rank_matrix(len(atoms))
    col: dict[CubeExpr, int] = {CZERO: 0, CONE: 1}
    for i, a in enumerate(atoms):
        col[a] = i + 2
    goal_v = _eval_tope(goal, ranks, col)
    for disjunct in dnf(hyp):
        mask = np.ones(ranks.shape[0], dtype=bool)
        for lit in disjunct:
            mask &= _eval_tope(lit, ranks, col)
        bad = mask & ~goal_v
        if bad.any():
            row = ranks[int(np.argmax(bad))]
            return EntailResult(False, _weak_order_from_row(row, atoms))
    return EntailResult(True)


def _weak_order_from_row(row: np.ndarray, atoms: list[CubeExpr]) -> WeakOrder:
    names = ["0", "1"] + [str(a) for a in atoms]
    nblocks = int(row.max()) + 1
    blocks = tuple(
        tuple(sorted(names[i] for i in range(len(names)) if row[i] == r))
        for r in range(nblocks)
    )
    return WeakOrder(blocks)


def clear_caches() -> None:
    _ENTAILS_CACHE.clear()


# ---------------------------------------------------------------------------
# Derived queries

def shape_included(sub: Shape, sup: Shape) -> EntailResult:
    """Is ``sub`` a sub-shape of ``sup``?  Both must carve the same cube."""
    if sub.cube != sup.cube:
        raise TopeError(f"shape cubes differ: {sub.cube} vs {sup.cube}")
    var = sub.var
    seq = Sequent(((var, sub.cube),), sub.constraint, sup.applied_to(CVar(var)))
    return entails(seq)


def eq_under(ctx: CubeContext, hyp: Tope, s: CubeExpr, t: CubeExpr) -> bool:
    """Tope equality of two points, componentwise on tuple normal forms."""
    ts, tt = cube_type_of(ctx, s), cube_type_of(ctx, t)
    if ts != tt:
        raise TopeError(f"points of different cubes: {ts} vs {tt}")
    ctx_items = tuple(sorted(ctx.items()))
    leaves_s = list(interval_atoms(ctx, s))
    leaves_t = list(interval_atoms(ctx, t))
    return all(
        entails(Sequent(ctx_items, hyp, TEq(a, b))).yes
        for a, b in zip(leaves_s, leaves_t)
    )


def tope_unsatisfiable(ctx: CubeContext, hyp: Tope) -> bool:
    return entails(Sequent(tuple(sorted(ctx.items())), hyp, BOT)).yes
