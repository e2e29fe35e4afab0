"""Bidirectional type checker for the three-layer language.

Checking elaborates as it goes: applications of extension-typed functions
become explicit cube applications, and bare ``refl`` is annotated with its
endpoint.  Reduction (``whnf``) therefore never has to guess the sort of a
binder.

Equality is tope-aware.  The context's tope constraint is split into
disjuncts and conversion must hold under every consistent one; an
inconsistent constraint makes all terms equal.  Pi and Sigma types enjoy
eta; extension types do not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    Ann,
    App,
    Const,
    CubeLit,
    CubeParam,
    Decl,
    DeclTag,
    Ext,
    ExtApp,
    Expr,
    Fst,
    IdT,
    J,
    Lam,
    Pair,
    Pi,
    Refl,
    Sigma,
    Snd,
    Span,
    TopeCase,
    TopeParam,
    TriContext,
    TypedParam,
    U,
    UnitPoint,
    UnitType,
    Var,
    fold_telescope,
    free_vars,
    fresh,
    rename_var,
    subst_cube,
    subst_typed,
)
from .cube import (
    CPair,
    CFst,
    CSnd,
    CSTAR,
    CubeError,
    CubeExpr,
    CVar,
    cube_type_of,
)
from .scope import GlobalEnv, ScopeError, _validate_tope
from .tope import (
    BOT,
    Sequent,
    Tope,
    TopeError,
    TopeTooLargeError,
    dnf,
    entails,
    eq_under,
    normalize_tope,
    subst_tope,
    tope_and,
    tope_free_vars,
)

DIAGNOSTIC_KINDS = (
    "parse",
    "scope",
    "type-mismatch",
    "tope-unsolved",
    "boundary",
    "fuel",
    "unledgered-axiom",
    "tope-too-large",
)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    decl: Optional[str] = None
    span: Optional[Span] = field(default=None, compare=False)

    def __post_init__(self):
        assert self.kind in DIAGNOSTIC_KINDS, self.kind

    def to_json(self) -> dict:
        out = {"kind": self.kind, "message": self.message}
        if self.decl is not None:
            out["decl"] = self.decl
        if self.span is not None:
            out["start"] = self.span.start
            out["end"] = self.span.end
        return out


class CheckError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(f"{diagnostic.kind}: {diagnostic.message}")
        self.diagnostic = diagnostic


DEFAULT_FUEL = 10_000


class Checker:
    def __init__(self, env: GlobalEnv, fuel: int = DEFAULT_FUEL):
        self.env = env
        self.fuel = fuel
        self.steps = 0
        self.current_decl: Optional[str] = None

    # -- plumbing

    def _err(self, kind: str, message: str, span: Optional[Span] = None):
        raise CheckError(Diagnostic(kind, message, self.current_decl, span))

    def _tick(self):
        self.steps += 1
        if self.steps > self.fuel:
            self._err(
                "fuel",
                f"reduction did not finish within {self.fuel} steps; "
                "the declaration may require a larger --fuel bound",
            )

    def _pp(self, e: Expr) -> str:
        from .printer import print_expr

        return print_expr(e)

    # -- tope layer access

    def entails_ctx(self, ctx: TriContext, goal: Tope) -> bool:
        try:
            return bool(entails(Sequent(ctx.cube_vars, ctx.tope, goal)))
        except TopeTooLargeError as e:
            self._err("tope-too-large", str(e))
        except TopeError:
            return False

    def ctx_unsat(self, ctx: TriContext) -> bool:
        return self.entails_ctx(ctx, BOT)

    def _ctx_disjuncts(self, ctx: TriContext) -> list[TriContext]:
        """Split the context's tope into satisfiable disjuncts."""
        try:
            norm = normalize_tope(ctx.cube_context(), ctx.tope)
            parts = dnf(norm)
        except TopeTooLargeError as e:
            self._err("tope-too-large", str(e))
        except TopeError:
            return [ctx]
        out = []
        for atoms in parts:
            branch = ctx.with_tope(tope_and(*atoms))
            if not self.ctx_unsat(branch):
                out.append(branch)
        return out

    # -- cube embedding

    def as_cube_expr(self, ctx: TriContext, e: Expr) -> Optional[CubeExpr]:
        match e:
            case Var(n):
                return CVar(n) if ctx.lookup_cube(n) is not None else None
            case CubeLit(c):
                return c
            case UnitPoint():
                return CSTAR
            case Pair(a, b):
                ca, cb = self.as_cube_expr(ctx, a), self.as_cube_expr(ctx, b)
                return CPair(ca, cb) if ca is not None and cb is not None else None
            case Fst(a):
                ca = self.as_cube_expr(ctx, a)
                return CFst(ca) if ca is not None else None
            case Snd(a):
                ca = self.as_cube_expr(ctx, a)
                return CSnd(ca) if ca is not None else None
            case Ann(x, _):
                return self.as_cube_expr(ctx, x)
            case _:
                return None

    # -- reduction

    def whnf(self, ctx: TriContext, e: Expr, unfold: bool = True) -> Expr:
        while True:
            match e:
                case Ann(x, _):
                    e = x
                case Const(n) if unfold:
                    d = self.env.decls.get(n)
                    if d is None or d.body is None:
                        return e
                    self._tick()
                    e = d.body
                case App(f, a):
                    wf = self.whnf(ctx, f, unfold)
                    if isinstance(wf, Lam):
                        self._tick()
                        e = subst_typed(wf.body, wf.var, a)
                    else:
                        return App(wf, a)
                case ExtApp(f, c):
                    wf = self.whnf(ctx, f, unfold)
                    if isinstance(wf, Lam):
                        self._tick()
                        e = subst_cube(wf.body, wf.var, c)
                        continue
                    r = self._boundary_reduce(ctx, wf, c)
                    if r is None:
                        return ExtApp(wf, c)
                    self._tick()
                    e = r
                case Fst(p):
                    wp = self.whnf(ctx, p, unfold)
                    if isinstance(wp, Pair):
                        self._tick()
                        e = wp.fst
                    else:
                        return Fst(wp)
                case Snd(p):
                    wp = self.whnf(ctx, p, unfold)
                    if isinstance(wp, Pair):
                        self._tick()
                        e = wp.snd
                    else:
                        return Snd(wp)
                case J(c, d, p):
                    wp = self.whnf(ctx, p, unfold)
                    if isinstance(wp, Refl):
                        if wp.arg is None:
                            return J(c, d, wp)
                        self._tick()
                        e = App(d, wp.arg)
                    else:
                        return J(c, d, wp)
                case TopeCase(branches):
                    for t, body in branches:
                        if self.entails_ctx(ctx, t):
                            self._tick()
                            e = body
                            break
                    else:
                        return e
                case _:
                    return e

    def _boundary_reduce(self, ctx: TriContext, neutral: Expr,
                         c: CubeExpr) -> Optional[Expr]:
        """Reduce an application of a neutral extension-typed term at a point
        of its boundary sub-shape."""
        try:
            ty = self.infer_type(ctx, neutral)
        except CheckError:
            return None
        wty = self.whnf(ctx, ty)
        if not isinstance(wty, Ext):
            return None
        phi_c = subst_tope(wty.boundary_tope, wty.var, c)
        if not self.entails_ctx(ctx, phi_c):
            return None
        bd = wty.boundary
        if isinstance(bd, TopeCase):
            for t, body in bd.branches:
                if self.entails_ctx(ctx, subst_tope(t, wty.var, c)):
                    return subst_cube(body, wty.var, c)
            return None
        return subst_cube(bd, wty.var, c)

    # -- equality

    def equal(self, ctx: TriContext, a: Expr, b: Expr,
              ty: Optional[Expr] = None) -> bool:
        for branch in self._ctx_disjuncts(ctx):
            if not self._equal_branch(branch, a, b, ty):
                return False
        return True

    def _equal_branch(self, ctx: TriContext, a: Expr, b: Expr,
                      ty: Optional[Expr]) -> bool:
        a1 = self.whnf(ctx, a, unfold=False)
        b1 = self.whnf(ctx, b, unfold=False)
        if self._alpha_mod_cube(ctx, a1, b1):
            return True
        spine = self._equal_spines(ctx, a1, b1)
        if spine is not None:
            return spine
        a2 = self.whnf(ctx, a1)
        b2 = self.whnf(ctx, b1)
        if self._alpha_mod_cube(ctx, a2, b2):
            return True
        if isinstance(a2, TopeCase):
            return self._equal_split_case(ctx, a2, b2, ty)
        if isinstance(b2, TopeCase):
            return self._equal_split_case(ctx, b2, a2, ty)
        if ty is not None:
            r = self._equal_at_type(ctx, a2, b2, ty)
            if r is not None:
                return r
        spine = self._equal_spines(ctx, a2, b2)
        if spine is not None:
            return spine
        return self._equal_structural(ctx, a2, b2)

    def _alpha_mod_cube(self, ctx: TriContext, a: Expr, b: Expr) -> bool:
        from .core import alpha_eq

        if alpha_eq(a, b):
            return True
        ca, cb = self.as_cube_expr(ctx, a), self.as_cube_expr(ctx, b)
        if ca is not None and cb is not None:
            try:
                return eq_under(ctx.cube_context(), ctx.tope, ca, cb)
            except TopeError:
                return False
        return False

    def _equal_split_case(self, ctx: TriContext, case: TopeCase, other: Expr,
                          ty: Optional[Expr]) -> bool:
        """A neutral case split equals ``other`` iff each branch body does
        under the branch's tope (the branches cover the context)."""
        for t, body in case.branches:
            branch = ctx.bind_tope(t)
            if self.ctx_unsat(branch):
                continue
            if not self.equal(branch, body, other, ty):
                return False
        return True

    def _equal_at_type(self, ctx: TriContext, a: Expr, b: Expr,
                       ty: Expr) -> Optional[bool]:
        w = self.whnf(ctx, ty)
        match w:
            case UnitType():
                return True
            case Pi(x, dom, cod):
                v = fresh(x)
                ctx2 = ctx.bind_typed(v, dom)
                return self.equal(
                    ctx2,
                    App(a, Var(v)),
                    App(b, Var(v)),
                    subst_typed(cod, x, Var(v)),
                )
            case Sigma(x, fst_ty, snd_ty):
                if not self.equal(ctx, Fst(a), Fst(b), fst_ty):
                    return False
                return self.equal(
                    ctx, Snd(a), Snd(b), subst_typed(snd_ty, x, Fst(a)))
            case Ext(t, cube, psi, fam, _, _):
                # no eta here: only compare pointwise when both sides are
                # literal functions
                if isinstance(a, Lam) and isinstance(b, Lam):
                    v = fresh(t)
                    ctx2 = ctx.bind_cube(v, cube).bind_tope(
                        subst_tope(psi, t, CVar(v)))
                    return self.equal(
                        ctx2,
                        ExtApp(a, CVar(v)),
                        ExtApp(b, CVar(v)),
                        subst_cube(fam, t, CVar(v)),
                    )
                return None
            case _:
                return None

    def _spine(self, e: Expr):
        items = []
        while True:
            match e:
                case App(f, a):
                    items.append(("app", a))
                    e = f
                case ExtApp(f, c):
                    items.append(("ext", c))
                    e = f
                case Fst(p):
                    items.append(("fst", None))
                    e = p
                case Snd(p):
                    items.append(("snd", None))
                    e = p
                case _:
                    items.reverse()
                    return e, items

    def _head_key(self, e: Expr):
        match e:
            case Var(n):
                return ("var", n)
            case Const(n):
                return ("const", n)
            case _:
                return None

    def _equal_spines(self, ctx: TriContext, a: Expr, b: Expr) -> Optional[bool]:
        """Compare two neutral spines with the same rigid head, argument by
        argument at the types the head demands.  Returns None when the
        comparison does not apply or is inconclusive (a definition head may
        still unfold to equal terms)."""
        ha, sa = self._spine(a)
        hb, sb = self._spine(b)
        ka, kb = self._head_key(ha), self._head_key(hb)
        if ka is None or kb is None or not sa or not sb:
            return None

        def is_rigid(k) -> bool:
            if k[0] == "var":
                return True
            d = self.env.decls.get(k[1])
            return d is None or d.body is None

        rigid = is_rigid(ka) and is_rigid(kb)
        inconclusive = None if not rigid else False
        if ka != kb or len(sa) != len(sb):
            return inconclusive
        try:
            head_ty = self.infer_type(ctx, ha)
        except CheckError:
            return None
        term = ha
        for (kind_a, arg_a), (kind_b, arg_b) in zip(sa, sb):
            if kind_a != kind_b:
                return inconclusive
            w = self.whnf(ctx, head_ty)
            ok: Optional[bool]
            if kind_a == "app":
                if not isinstance(w, Pi):
                    return None
                ok = self.equal(ctx, arg_a, arg_b, w.dom)
                head_ty = subst_typed(w.cod, w.var, arg_a)
                term = App(term, arg_a)
            elif kind_a == "ext":
                if not isinstance(w, Ext):
                    return None
                try:
                    ok = eq_under(ctx.cube_context(), ctx.tope, arg_a, arg_b)
                except TopeError:
                    ok = False
                head_ty = subst_cube(w.family, w.var, arg_a)
                term = ExtApp(term, arg_a)
            elif kind_a == "fst":
                if not isinstance(w, Sigma):
                    return None
                ok = True
                head_ty = w.fst_ty
                term = Fst(term)
            else:
                if not isinstance(w, Sigma):
                    return None
                ok = True
                head_ty = subst_typed(w.snd_ty, w.var, Fst(term))
                term = Snd(term)
            if not ok:
                return inconclusive
        return True

    def _equal_structural(self, ctx: TriContext, a: Expr, b: Expr) -> bool:
        match a, b:
            case U(), U():
                return True
            case UnitType(), UnitType():
                return True
            case UnitPoint(), UnitPoint():
                return True
            case Var(n), Var(m):
                return n == m or self._alpha_mod_cube(ctx, a, b)
            case Refl(_), Refl(_):
                # endpoints agree by typing
                return True
            case Pair(a1, b1), Pair(a2, b2):
                return self.equal(ctx, a1, a2) and self.equal(ctx, b1, b2)
            case Lam(x, b1), Lam(y, b2):
                # sort of the binder is unknown without a type; treat it as
                # an opaque typed variable
                v = fresh(x)
                ctx2 = ctx.bind_typed(v, None)
                return self.equal(
                    ctx2, subst_typed(b1, x, Var(v)), subst_typed(b2, y, Var(v)))
            case IdT(t1, l1, r1), IdT(t2, l2, r2):
                return (self.equal(ctx, t1, t2, U())
                        and self.equal(ctx, l1, l2, t1)
                        and self.equal(ctx, r1, r2, t1))
            case Pi(x, d1, c1), Pi(y, d2, c2):
                if not self.equal(ctx, d1, d2, U()):
                    return False
                v = fresh(x)
                ctx2 = ctx.bind_typed(v, d1)
                return self.equal(
                    ctx2, subst_typed(c1, x, Var(v)), subst_typed(c2, y, Var(v)), U())
            case Sigma(x, d1, c1), Sigma(y, d2, c2):
                if not self.equal(ctx, d1, d2, U()):
                    return False
                v = fresh(x)
                ctx2 = ctx.bind_typed(v, d1)
                return self.equal(
                    ctx2, subst_typed(c1, x, Var(v)), subst_typed(c2, y, Var(v)), U())
            case Ext(_, _, _, _, _, _), Ext(_, _, _, _, _, _):
                return self._equal_ext(ctx, a, b)
            case J(c1, d1, p1), J(c2, d2, p2):
                return (self.equal(ctx, c1, c2) and self.equal(ctx, d1, d2)
                        and self.equal(ctx, p1, p2))
            case App(f1, x1), App(f2, x2):
                # neutral applications whose head is not a variable or a
                # constant (a stuck J, say) fall through the spine check
                return self.equal(ctx, f1, f2) and self.equal(ctx, x1, x2)
            case ExtApp(f1, c1), ExtApp(f2, c2):
                if not self.equal(ctx, f1, f2):
                    return False
                try:
                    return eq_under(ctx.cube_context(), ctx.tope, c1, c2)
                except TopeError:
                    return False
            case Fst(p1), Fst(p2):
                return self.equal(ctx, p1, p2)
            case Snd(p1), Snd(p2):
                return self.equal(ctx, p1, p2)
            case CubeLit(_) | UnitPoint() | Var(_), _:
                return self._alpha_mod_cube(ctx, a, b)
            case _, CubeLit(_) | UnitPoint():
                return self._alpha_mod_cube(ctx, a, b)
            case _:
                return False

    def _equal_ext(self, ctx: TriContext, a: Ext, b: Ext) -> bool:
        if a.cube != b.cube:
            return False
        v = fresh(a.var)
        psi_a = subst_tope(a.shape_tope, a.var, CVar(v))
        psi_b = subst_tope(b.shape_tope, b.var, CVar(v))
        ctx_v = ctx.bind_cube(v, a.cube)
        if not (self.entails_ctx(ctx_v.bind_tope(psi_a), psi_b)
                and self.entails_ctx(ctx_v.bind_tope(psi_b), psi_a)):
            return False
        ctx_psi = ctx_v.bind_tope(psi_a)
        fam_a = subst_cube(a.family, a.var, CVar(v))
        fam_b = subst_cube(b.family, b.var, CVar(v))
        if not self.equal(ctx_psi, fam_a, fam_b, U()):
            return False
        phi_a = subst_tope(a.boundary_tope, a.var, CVar(v))
        phi_b = subst_tope(b.boundary_tope, b.var, CVar(v))
        if not (self.entails_ctx(ctx_psi.bind_tope(phi_a), phi_b)
                and self.entails_ctx(ctx_psi.bind_tope(phi_b), phi_a)):
            return False
        ctx_phi = ctx_psi.bind_tope(phi_a)
        if self.ctx_unsat(ctx_phi):
            return True
        bd_a = subst_cube(a.boundary, a.var, CVar(v))
        bd_b = subst_cube(b.boundary, b.var, CVar(v))
        return self.equal(ctx_phi, bd_a, bd_b, fam_a)

    # -- inference

    def infer_type(self, ctx: TriContext, e: Expr) -> Expr:
        ty, _ = self.infer(ctx, e)
        return ty

    def infer(self, ctx: TriContext, e: Expr) -> tuple[Expr, Expr]:
        match e:
            case Var(n):
                ty = ctx.lookup_typed(n)
                if ty is not None:
                    return ty, e
                if ctx.lookup_cube(n) is not None:
                    self._err(
                        "type-mismatch",
                        f"cube variable {n!r} used where a term of a type is expected",
                        e.span,
                    )
                if ctx.has_typed(n):
                    self._err(
                        "type-mismatch",
                        f"the type of {n!r} is not known here", e.span)
                self._err("scope", f"unbound variable {n!r}", e.span)
            case Const(n):
                d = self.env.decls.get(n)
                if d is None:
                    self._err("scope", f"unknown constant {n!r}", e.span)
                return d.ty, e
            case U():
                return U(), e
            case UnitType():
                return U(), e
            case UnitPoint():
                return UnitType(), e
            case CubeLit(_):
                self._err(
                    "type-mismatch",
                    "a cube endpoint is not a term of a type on its own", e.span)
            case Ann(x, t):
                te = self.check(ctx, t, U())
                xe = self.check(ctx, x, te)
                return te, xe
            case Pi(x, dom, cod):
                de = self.check(ctx, dom, U())
                ce = self.check(ctx.bind_typed(x, de), cod, U())
                return U(), Pi(x, de, ce, span=e.span)
            case Sigma(x, dom, cod):
                de = self.check(ctx, dom, U())
                ce = self.check(ctx.bind_typed(x, de), cod, U())
                return U(), Sigma(x, de, ce, span=e.span)
            case IdT(t, l, r):
                te = self.check(ctx, t, U())
                le = self.check(ctx, l, te)
                re = self.check(ctx, r, te)
                return U(), IdT(te, le, re, span=e.span)
            case Ext(_, _, _, _, _, _):
                return U(), self._check_ext_formation(ctx, e)
            case App(f, a):
                if isinstance(f, Lam):
                    # a literal beta redex has no inferable head; reduce it
                    # (such redexes arise from recorded refl endpoints)
                    self._tick()
                    return self.infer(ctx, subst_typed(f.body, f.var, a))
                fty, fe = self.infer(ctx, f)
                w = self.whnf(ctx, fty)
                if isinstance(w, Pi):
                    ae = self.check(ctx, a, w.dom)
                    return subst_typed(w.cod, w.var, ae), App(fe, ae, span=e.span)
                if isinstance(w, Ext):
                    return self._infer_ext_app(ctx, fe, w, a, e.span)
                self._err(
                    "type-mismatch",
                    f"cannot apply a term of type {self._pp(w)}", e.span)
            case ExtApp(f, c):
                fty, fe = self.infer(ctx, f)
                w = self.whnf(ctx, fty)
                if not isinstance(w, Ext):
                    self._err(
                        "type-mismatch",
                        f"cannot apply a term of type {self._pp(w)} to a cube point",
                        e.span,
                    )
                return self._check_cube_arg(ctx, fe, w, c, e.span)
            case Fst(p):
                pty, pe = self.infer(ctx, p)
                w = self.whnf(ctx, pty)
                if not isinstance(w, Sigma):
                    self._err(
                        "type-mismatch",
                        f"first projection of a term of type {self._pp(w)}", e.span)
                return w.fst_ty, Fst(pe, span=e.span)
            case Snd(p):
                pty, pe = self.infer(ctx, p)
                w = self.whnf(ctx, pty)
                if not isinstance(w, Sigma):
                    self._err(
                        "type-mismatch",
                        f"second projection of a term of type {self._pp(w)}", e.span)
                return subst_typed(w.snd_ty, w.var, Fst(pe)), Snd(pe, span=e.span)
            case Refl(arg) if arg is not None:
                aty, ae = self.infer(ctx, arg)
                return IdT(aty, ae, ae), Refl(ae, span=e.span)
            case J(c, d, p):
                return self._infer_j(ctx, c, d, p, e.span)
            case _:
                self._err(
                    "type-mismatch",
                    f"cannot infer a type for {self._pp(e)}; "
                    "add an annotation", getattr(e, "span", None))

    def _infer_ext_app(self, ctx: TriContext, fe: Expr, w: Ext, a: Expr,
                       span: Optional[Span]) -> tuple[Expr, Expr]:
        c = self.as_cube_expr(ctx, a)
        if c is None:
            self._err(
                "type-mismatch",
                "this function takes a point of a cube, but the argument is "
                f"{self._pp(a)}", span)
        return self._check_cube_arg(ctx, fe, w, c, span)

    def _check_cube_arg(self, ctx: TriContext, fe: Expr, w: Ext, c: CubeExpr,
                        span: Optional[Span]) -> tuple[Expr, Expr]:
        try:
            cty = cube_type_of(ctx.cube_context(), c)
        except CubeError as err:
            self._err("scope", str(err), span)
        if cty != w.cube:
            self._err(
                "type-mismatch",
                f"the point lives in cube {cty} but the function expects {w.cube}",
                span,
            )
        psi_c = subst_tope(w.shape_tope, w.var, c)
        if not self.entails_ctx(ctx, psi_c):
            self._err(
                "tope-unsolved",
                "the point is not provably inside the function's shape "
                f"(needed: {self._pt(psi_c)})", span)
        return subst_cube(w.family, w.var, c), ExtApp(fe, c, span=span)

    def _pt(self, t: Tope) -> str:
        from .printer import print_tope

        return print_tope(t)

    def _infer_j(self, ctx: TriContext, c: Expr, d: Expr, p: Expr,
                 span: Optional[Span]) -> tuple[Expr, Expr]:
        pty, pe = self.infer(ctx, p)
        w = self.whnf(ctx, pty)
        if not isinstance(w, IdT):
            self._err(
                "type-mismatch",
                f"path induction needs an identification, got {self._pp(w)}", span)
        a_ty, lhs, rhs = w.ty, w.lhs, w.rhs
        u, v, q = fresh("u"), fresh("v"), fresh("q")
        motive_ty = Pi(u, a_ty, Pi(v, a_ty,
                       Pi(q, IdT(a_ty, Var(u), Var(v)), U())))
        ce = self.check(ctx, c, motive_ty)
        base_ty = Pi(u, a_ty, App(App(App(ce, Var(u)), Var(u)), Refl(Var(u))))
        de = self.check(ctx, d, base_ty)
        res = App(App(App(ce, lhs), rhs), pe)
        return res, J(ce, de, pe, span=span)

    def _check_ext_formation(self, ctx: TriContext, e: Ext) -> Expr:
        t = e.var
        ctx_t = ctx.bind_cube(t, e.cube)
        try:
            _validate_tope(ctx_t.cube_context(), e.shape_tope, e.span)
            _validate_tope(ctx_t.cube_context(), e.boundary_tope, e.span)
        except ScopeError as err:
            self._err("scope", err.message, err.span or e.span)
        ctx_psi = ctx_t.bind_tope(e.shape_tope)
        fam = self.check(ctx_psi, e.family, U())
        if not self.entails_ctx(ctx_t.bind_tope(e.boundary_tope), e.shape_tope):
            self._err(
                "tope-unsolved",
                "the boundary sub-shape is not provably contained in the shape",
                e.span,
            )
        ctx_phi = ctx_t.bind_tope(e.boundary_tope)
        if isinstance(e.boundary, TopeCase):
            bd = self._check_tope_case(ctx_phi, e.boundary, fam)
        else:
            bd = self.check(ctx_phi, e.boundary, fam)
        return Ext(t, e.cube, e.shape_tope, fam, e.boundary_tope, bd, span=e.span)

    def _check_tope_case(self, ctx: TriContext, e: TopeCase, ty: Expr) -> Expr:
        for t, _ in e.branches:
            try:
                _validate_tope(ctx.cube_context(), t, e.span)
            except ScopeError as err:
                self._err("scope", err.message, err.span or e.span)
        from .tope import tope_or

        cover = tope_or(*(t for t, _ in e.branches))
        if not self.entails_ctx(ctx, cover):
            self._err(
                "tope-unsolved",
                "the case split does not cover its context "
                f"(needed: {self._pt(cover)})", e.span)
        elaborated = []
        for t, body in e.branches:
            branch = ctx.bind_tope(t)
            if self.ctx_unsat(branch):
                elaborated.append((t, body))
                continue
            elaborated.append((t, self.check(branch, body, ty)))
        for i in range(len(elaborated)):
            for j in range(i + 1, len(elaborated)):
                ti, bi = elaborated[i]
                tj, bj = elaborated[j]
                overlap = ctx.bind_tope(ti).bind_tope(tj)
                if self.ctx_unsat(overlap):
                    continue
                if not self.equal(overlap, bi, bj, ty):
                    self._err(
                        "boundary",
                        "the branches of a case split disagree where "
                        f"{self._pt(ti)} and {self._pt(tj)} overlap", e.span)
        return TopeCase(tuple(elaborated), span=e.span)

    # -- checking

    def check(self, ctx: TriContext, e: Expr, ty: Expr) -> Expr:
        w = self.whnf(ctx, ty)
        match e, w:
            case Lam(x, body), Pi(y, dom, cod):
                if x in free_vars(cod) - {y}:
                    # the binder shadows a name the codomain mentions
                    nx = fresh(x)
                    body, x = rename_var(body, x, nx), nx
                ctx2 = ctx.bind_typed(x, dom)
                be = self.check(ctx2, body, subst_typed(cod, y, Var(x)))
                return Lam(x, be, span=e.span)
            case Lam(x, body), Ext(t, cube, psi, fam, phi, bd):
                shadows = (free_vars(fam) | free_vars(bd)
                           | tope_free_vars(psi) | tope_free_vars(phi)) - {t}
                if x in shadows:
                    nx = fresh(x)
                    body, x = rename_var(body, x, nx), nx
                psi_x = subst_tope(psi, t, CVar(x))
                fam_x = subst_cube(fam, t, CVar(x))
                ctx2 = ctx.bind_cube(x, cube).bind_tope(psi_x)
                be = self.check(ctx2, body, fam_x)
                phi_x = subst_tope(phi, t, CVar(x))
                ctx_phi = ctx2.bind_tope(phi_x)
                if not self.ctx_unsat(ctx_phi):
                    bd_x = subst_cube(bd, t, CVar(x))
                    if not self.equal(ctx_phi, be, bd_x, fam_x):
                        self._err(
                            "boundary",
                            "the function does not restrict to the required "
                            f"boundary on {self._pt(phi_x)}", e.span)
                return Lam(x, be, span=e.span)
            case Lam(_, _), _:
                self._err(
                    "type-mismatch",
                    f"a function cannot have type {self._pp(w)}", e.span)
            case Pair(a, b), Sigma(y, fst_ty, snd_ty):
                ae = self.check(ctx, a, fst_ty)
                be = self.check(ctx, b, subst_typed(snd_ty, y, ae))
                return Pair(ae, be, span=e.span)
            case Pair(_, _), _:
                self._err(
                    "type-mismatch",
                    f"a pair cannot have type {self._pp(w)}", e.span)
            case Refl(arg), IdT(a_ty, lhs, rhs):
                if not self.equal(ctx, lhs, rhs, a_ty):
                    self._err(
                        "type-mismatch",
                        "reflexivity needs equal endpoints, but "
                        f"{self._pp(lhs)} and {self._pp(rhs)} differ", e.span)
                if arg is not None:
                    ae = self.check(ctx, arg, a_ty)
                    if not self.equal(ctx, ae, lhs, a_ty):
                        self._err(
                            "type-mismatch",
                            "the endpoint of refl does not match the "
                            "identification being proved", e.span)
                return Refl(lhs, span=e.span)
            case TopeCase(_), _:
                return self._check_tope_case(ctx, e, w)
            case _:
                ity, ee = self.infer(ctx, e)
                if not self.equal(ctx, ity, w, U()):
                    self._err(
                        "type-mismatch",
                        f"expected a term of type {self._pp(w)}, found one of "
                        f"type {self._pp(ity)}", getattr(e, "span", None))
                return ee

    # -- declarations

    def check_decl(self, decl: Decl) -> Decl:
        self.current_decl = decl.name
        self.steps = 0
        ctx = TriContext()
        tele = []
        for p in decl.telescope:
            match p:
                case CubeParam(name, cube):
                    ctx = ctx.bind_cube(name, cube)
                    tele.append(p)
                case TopeParam(t):
                    ctx = ctx.bind_tope(t)
                    tele.append(p)
                case TypedParam(name, ty):
                    te = self.check(ctx, ty, U())
                    ctx = ctx.bind_typed(name, te)
                    tele.append(TypedParam(name, te))
        ity = self.check(ctx, decl.inner_ty, U())
        ibody = None
        if decl.inner_body is not None:
            ibody = self.check(ctx, decl.inner_body, ity)
        ty, body = fold_telescope(tuple(tele), ity, ibody)
        return Decl(decl.name, decl.tag, tuple(tele), ity, ibody, ty, body,
                    span=decl.span)
