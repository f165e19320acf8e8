from fractions import Fraction

from tmotive.cinf import CinfContext, artin_schreier_solve
from tmotive.errors import PrecisionError, UnrepresentableError
from tmotive.grammar import parse_cinf

import pytest


@pytest.fixture
def ctx():
    return CinfContext(2)


def test_valuation_examples(ctx):
    assert ctx.theta().valuation() == -1
    assert ctx.one.valuation() == 0
    x = parse_cinf("t^-3+t^-5", ctx)
    assert x.valuation() == 3
    assert ctx.zero.valuation() is None


def test_field_ops_examples(ctx):
    t = ctx.theta()
    assert (t.invert() * t) == ctx.one
    inv = parse_cinf("1+t^-1@4", ctx).invert()
    assert inv == parse_cinf("1+t^-1+t^-2+t^-3@4", ctx)
    # precision propagation: x mod t^-5 times t^2 -> known mod t^-3
    x = parse_cinf("1@5", ctx)
    y = ctx.theta(2)
    assert (x * y).precision == 3


def test_mul_precision_rule(ctx):
    x = parse_cinf("t^-1+t^-2@6", ctx)   # v=1, pi=6
    y = parse_cinf("t^-3@10", ctx)       # v=3, pi=10
    # min(6+3, 10+1) = 9
    assert (x * y).precision == 9


def test_qth_root_examples(ctx):
    assert ctx.theta(-2).qth_root() == ctx.theta(-1)
    r = ctx.theta().qth_root()
    assert r.terms == {Fraction(-1, 2): ctx.base_field.one}
    x = parse_cinf("t^-1+t^-4@12", ctx)
    assert (x.qth_root().frob(1)).agrees(x)


def test_qth_root_q3():
    ctx3 = CinfContext(3)
    x = ctx3.theta(-3)
    assert x.qth_root() == ctx3.theta(-1)
    y = parse_cinf("t^-1+t^-2+2*t^-5@20", ctx3)
    assert y.qth_root().frob(1).agrees(y)


def test_valuation_axioms(ctx):
    x = parse_cinf("t^-1+t^-3@10", ctx)
    y = parse_cinf("t^-2@10", ctx)
    assert (x * y).valuation() == x.valuation() + y.valuation()
    assert (x + y).valuation() == min(x.valuation(), y.valuation())


def test_frobenius_scales_valuation(ctx):
    x = parse_cinf("t^-3+t^-4@9", ctx)
    assert x.frob(1).valuation() == 6
    assert x.frob(1).precision == 18
    assert x.qth_root().valuation() == Fraction(3, 2)


def test_nth_root_with_field_growth(ctx):
    # cube root of t^-3 needs omega with omega^3=1; stays correct after cubing
    x = ctx.theta(-3)
    r = x.nth_root(3)
    assert (r ** 3) == x._lift(r.field)


def test_exponent_cap(ctx):
    x = ctx.theta()
    for _ in range(ctx.s_cap):
        x = x.qth_root()
    with pytest.raises((PrecisionError, UnrepresentableError)):
        x.qth_root()


def test_artin_schreier_homogeneous(ctx):
    t = ctx.theta()
    res = artin_schreier_solve(t, ctx.zero)
    vals = sorted((s.valuation() for s in res.solutions if s.terms))
    assert vals == [Fraction(1)]  # -v(u)/(q-1) = 1
    assert any(not s.terms for s in res.solutions)
    assert res.complete and not res.divergent


def test_artin_schreier_divergent_boundary(ctx):
    t = ctx.theta()
    res = artin_schreier_solve(ctx.one, t * t)
    assert res.divergent
    assert not res.complete
    # stalling approximation valuations -1, -1/2, -1/4, ...
    for n, v in enumerate(res.trace):
        assert v == Fraction(-1, 2 ** n)


def test_artin_schreier_contraction(ctx):
    t = ctx.theta()
    w = ctx.theta(-2)
    res = artin_schreier_solve(t, w)
    sol = [s for s in res.solutions if s.valuation() == 2]
    assert sol, "expected the v=2 particular solution"
    s = sol[0]
    low = sorted(a for a in s.terms)[:4]
    assert low == [2, 3, 5, 9]
    # every solution satisfies the equation through the certificate
    for y in res.solutions:
        assert (t * y.frob(1) + y - w).with_precision(res.certified).is_zero()


def test_artin_schreier_q3_homogeneous_unrepresentable():
    # q=3, u=t: homogeneous valuation -v(u)/(q-1) = 1/2; representable now that
    # denominators may carry the q-1 factor
    ctx3 = CinfContext(3)
    t = ctx3.theta()
    res = artin_schreier_solve(t, ctx3.zero)
    nonzero = [s for s in res.solutions if s.terms]
    assert len(nonzero) == 2
    assert all(s.valuation() == Fraction(1, 2) for s in nonzero)


def test_ratfunc_embedding(ctx):
    from tmotive.ff import FiniteField
    from tmotive.ratfunc import RatFuncField
    from tmotive.grammar import parse_ratfunc
    rff = RatFuncField(FiniteField.get(2))
    r = parse_ratfunc("(t+1)/(t^2+t+1)", rff)
    x = ctx.from_ratfunc(r)
    den = ctx.from_poly(r.den)
    num = ctx.from_poly(r.num)
    assert (x * den).agrees(num)
    assert x.valuation() == 1  # deg den - deg num


def test_grammar_roundtrip(ctx):
    for s in ["t^-1", "1+t^-1+t^-3", "t^(-3/2)", "t^2+1+t^-1", "0"]:
        x = parse_cinf(s, ctx)
        assert parse_cinf(repr(x), ctx) == x
