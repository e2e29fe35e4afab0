import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import random_expr
from sstt.core import U, App, Lam, Pi, Var, alpha_eq
from sstt.parser import ParseError, parse_expr, parse_file, parse_sequent_source
from sstt.printer import print_expr
from sstt.scope import Elaborator, GlobalEnv


def roundtrip(e):
    text = print_expr(e)
    parsed = parse_expr(text)
    back = Elaborator(GlobalEnv()).elab(parsed, {})
    assert alpha_eq(e, back), f"{text!r} re-read as {print_expr(back)!r}"


def test_roundtrip_simple():
    roundtrip(Lam("x", Var("x")))
    roundtrip(Pi("x", U(), Var("x")))
    roundtrip(Lam("f", Lam("x", App(Var("f"), Var("x")))))


def test_roundtrip_random_sample():
    rng = random.Random(1)
    for _ in range(300):
        roundtrip(random_expr(rng, depth=4))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_roundtrip_property(seed):
    roundtrip(random_expr(random.Random(seed), depth=5))


def test_parse_file_kinds():
    items = parse_file(
        "def idarr (A : U) (x : A) : hom A x x := \\t. x\n"
        "postulate ax (A : U) : A\n"
        "thm stated (A : U) : U\n"
    )
    kinds = [d.kind for d in items]
    assert kinds == ["def", "postulate", "thm"]
    assert items[0].body is not None
    assert items[1].body is None
    assert items[2].body is None


def test_duplicate_names_rejected():
    with pytest.raises(ParseError) as e:
        parse_file("def a (A : U) : U := A\ndef a (A : U) : U := A\n")
    assert "a" in str(e.value.message)


def test_parse_error_has_location():
    with pytest.raises(ParseError) as e:
        parse_expr("Sigma (x : ")
    assert e.value.line >= 1 and e.value.col >= 1


def test_parse_sequent():
    seq = parse_sequent_source("t : 2, s : 2 | t <= s |- t <= 1")
    assert [n for n, _ in seq.ctx] == ["t", "s"]


def test_spans_nest():
    items = parse_file("def f (A : U) (x : A) : A := x\n")
    decl = items[0]
    assert decl.span is not None
    for p in decl.params:
        assert decl.span.contains(p.span)
    assert decl.span.contains(decl.ty.span)
    assert decl.span.contains(decl.body.span)
