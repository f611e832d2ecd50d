import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critshock.expr import (
    BinOp, Call, Const, DomainError, Jet, Neg, Num, ParseError, Pow, Var,
    compose, eval_jet, evaluate, free_variable, parse, to_source,
)

SQ3 = math.sqrt(3.0)

CATALOG = [
    "1/(1+x^2)", "sin(x)*cos(x)", "exp(-x^2/2)", "log(1+x^2)", "atan(x)^3",
    "sqrt(2+sin(x))", "x^4 - 2*x^2 + pi", "-x/(3+x^2)^2", "exp(sin(x)) - log(2+cos(x))",
]


def test_rational_value():
    assert evaluate(parse("1/(1+x^2)"), 2.0) == pytest.approx(0.2, abs=1e-15)


def test_unclosed_paren_offset():
    with pytest.raises(ParseError) as info:
        parse("sin(x")
    assert info.value.offset == 5
    assert ")" in str(info.value)


def test_precedence_unary_minus():
    e = parse("u*u - -u")
    assert e == BinOp("-", BinOp("*", Var("u"), Var("u")), Neg(Var("u")))
    assert evaluate(e, 3.0) == 12.0


@pytest.mark.parametrize("src, x, want", [
    ("-x^2", 3.0, -9.0),
    ("1-2-3", 0.0, -4.0),
    ("8/4/2", 0.0, 1.0),
    ("2*pi", 0.0, 2 * math.pi),
])
def test_associativity(src, x, want):
    assert evaluate(parse(src, "x"), x) == pytest.approx(want)


@pytest.mark.parametrize("src", ["x^-1", "x^1.5", "x^y", "x^(2)"])
def test_bad_exponent(src):
    with pytest.raises(ParseError):
        parse(src, "x")


@pytest.mark.parametrize("src", ["", "x +", "foo(x)", "x y", "(x", "x)", "3..2"])
def test_syntax_errors(src):
    with pytest.raises(ParseError):
        parse(src, "x")


def test_unknown_identifier():
    with pytest.raises(ParseError, match="unknown identifier"):
        parse("x + y", "x")


def test_free_variable():
    assert free_variable(parse("u^2 + 1")) == "u"
    assert free_variable(parse("pi + 1")) is None


@pytest.mark.parametrize("src", CATALOG + ["u*u - -u", "-(-x)", "2^3", "x-(x-x)"])
def test_round_trip(src):
    e = parse(src)
    assert parse(to_source(e), free_variable(e)) == e


def test_jet_sine():
    assert eval_jet("sin(x)", 0.0, 4).coefficients == pytest.approx((0, 1, 0, -1, 0), abs=1e-15)


def test_jet_initial_data_at_inflection():
    want = (0.75, -3 * SQ3 / 8, 0.0, 27 * SQ3 / 16)
    got = eval_jet(parse("1/(1+x^2)", "x"), 1 / SQ3, 3).coefficients
    assert got == pytest.approx(want, rel=1e-13, abs=1e-13)


def test_jet_identity():
    assert eval_jet("x", 7.0, 2).coefficients == (7.0, 1.0, 0.0)


@pytest.mark.parametrize("order", [-1, 5])
def test_order_bounds(order):
    with pytest.raises(ValueError):
        eval_jet("x", 0.0, order)


@pytest.mark.parametrize("src, x", [("log(x)", 0.0), ("log(x)", -1.0), ("sqrt(x)", -1.0), ("1/x", 0.0)])
def test_domain_errors(src, x):
    with pytest.raises(DomainError) as info:
        eval_jet(src, x, 2)
    assert info.value.node is not None


@pytest.mark.parametrize("src", CATALOG)
@pytest.mark.parametrize("p", [-0.7, 0.3, 1.1])
def test_jet_matches_finite_differences(src, p):
    # coefficient k against a central difference of coefficient k-1
    e = parse(src, "x")
    h = 1e-4
    for k in range(1, 4):
        fd = (eval_jet(e, p + h, k - 1)[k - 1] - eval_jet(e, p - h, k - 1)[k - 1]) / (2 * h)
        exact = eval_jet(e, p, 3)[k]
        assert abs(fd - exact) <= 1e-5 * max(1.0, abs(exact))


def test_compose_chain_rule():
    inner = eval_jet("x^2 + 1", 0.5, 4)
    outer = eval_jet("log(u)", inner.value, 4)
    direct = eval_jet("log(x^2+1)", 0.5, 4)
    assert compose(outer, inner).coefficients == pytest.approx(direct.coefficients, rel=1e-13)


def test_jet_array_points():
    xs = np.linspace(-1, 1, 5)
    j = eval_jet("x^3", xs, 3)
    np.testing.assert_allclose(j[1], 3 * xs ** 2)
    np.testing.assert_allclose(j[3], 6.0)


# -- random ASTs ------------------------------------------------------------

_leaf = st.one_of(
    st.builds(Num, st.floats(0, 3, allow_nan=False).map(lambda v: round(v, 3))),
    st.just(Var("x")),
    st.just(Const("pi")),
)


def _extend(children):
    return st.one_of(
        st.builds(lambda a, b: BinOp("+", a, b), children, children),
        st.builds(lambda a, b: BinOp("-", a, b), children, children),
        st.builds(lambda a, b: BinOp("*", a, b), children, children),
        st.builds(Neg, children),
        st.builds(lambda a, n: Pow(a, n), children, st.integers(0, 3)),
        st.builds(lambda a: Call("sin", a), children),
        st.builds(lambda a: Call("atan", a), children),
        st.builds(lambda a: Call("exp", Call("sin", a)), children),
    )


small_ast = st.recursive(_leaf, _extend, max_leaves=6)


@settings(max_examples=1000, deadline=None)
@given(small_ast, small_ast, st.floats(-1.5, 1.5, allow_nan=False))
def test_product_is_leibniz(f, g, p):
    jf, jg = eval_jet(f, p, 4), eval_jet(g, p, 4)
    jfg = eval_jet(BinOp("*", f, g), p, 4)
    for n in range(5):
        leibniz = sum(math.comb(n, k) * jf[k] * jg[n - k] for k in range(n + 1))
        scale = max(1.0, sum(abs(math.comb(n, k) * jf[k] * jg[n - k]) for k in range(n + 1)))
        assert abs(jfg[n] - leibniz) <= 1e-9 * scale


@settings(max_examples=200, deadline=None)
@given(small_ast)
def test_round_trip_random(e):
    assert parse(to_source(e), "x") == e


def test_jet_roundtrip_derivatives():
    j = Jet.from_derivatives([1.0, 2.0, 6.0, 24.0])
    assert j.coefficients == pytest.approx((1.0, 2.0, 6.0, 24.0))
    assert j.order == 3
