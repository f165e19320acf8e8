import random
from fractions import Fraction

import pytest

from tmotive.analytic import (AdditiveOperator, carlitz_exp_closed_form,
                              em_action, exp_coeffs, is_additive,
                              poly_action_operator, scattering_check,
                              subspace_product, t_action_operator,
                              torsion_operator)
from tmotive.cinf import CinfContext
from tmotive.construct import carlitz_power, xi_series
from tmotive.ff import FiniteField
from tmotive.grammar import parse_ratfunc
from tmotive.matrix import Mat
from tmotive.motive import TMotive, carlitz
from tmotive.poly import Poly
from tmotive.ratfunc import RatFuncField
from tmotive.tauseries import TauMatrix, theta_shift, theta_shift_product_check

F2 = FiniteField.get(2)
F3 = FiniteField.get(3)


@pytest.fixture
def rff():
    return RatFuncField(F2)


def test_carlitz_exp_coeffs_closed_form(rff):
    C = carlitz(rff)
    coeffs = exp_coeffs(C, 4)
    for i in range(1, 5):
        assert coeffs[i][0, 0] == carlitz_exp_closed_form(rff, i)
    t = rff.gen()
    assert coeffs[1][0, 0] == rff.one / (t ** 2 - t)
    c2 = rff.one / ((t ** 4 - t ** 2) * (t ** 4 - t))
    assert coeffs[2][0, 0] == c2
    c3 = rff.one / ((t ** 8 - t ** 4) * (t ** 8 - t ** 2) * (t ** 8 - t))
    assert coeffs[3][0, 0] == c3


@pytest.mark.parametrize("field", [F2, F3])
def test_carlitz_exp_valuations(field):
    rff = RatFuncField(field)
    C = carlitz(rff)
    q = field.order
    coeffs = exp_coeffs(C, 4)
    for i in range(1, 5):
        assert coeffs[i][0, 0].v_inf() == i * q ** i


def test_exp_coeffs_residual_zero(rff):
    rng = random.Random(2)
    t = rff.gen()
    D = TMotive(rff, [[[t]], [[t + rff.one]], [[rff.one]]])
    coeffs = exp_coeffs(D, 4)
    for i in range(1, 5):
        resid = coeffs.residual(i)
        assert not any(bool(x) for x in resid.entries())


def test_exp_coeffs_nilpotent_case(rff):
    # the Carlitz square has N != 0; the twisted Sylvester step must still
    # produce exact residual-zero coefficients
    M = carlitz_power(rff, 2)
    coeffs = exp_coeffs(M, 3)
    for i in range(1, 4):
        resid = coeffs.residual(i)
        assert not any(bool(x) for x in resid.entries())
    assert coeffs[0] == Mat.identity(rff, 2)


def test_em_action_carlitz_examples(rff):
    ctx = CinfContext(2, precision=48)
    C = carlitz(rff)
    T = Poly.gen(F2, "T")
    x = ctx.theta(-1) + ctx.one  # arbitrary test point
    tx = em_action(C, T, [x])[0]
    theta = ctx.theta()
    assert (tx - (theta * x + x ** 2)).is_zero()
    # T^2(x) = theta^2 x + (theta + theta^q) x^q + x^{q^2}
    t2x = em_action(C, T * T, [x])[0]
    expect = theta ** 2 * x + (theta + theta ** 2) * x ** 2 + x ** 4
    assert (t2x - expect).is_zero()
    # (T^2+T)(x) = (theta^2+theta) x + (theta^q+theta+1) x^q + x^{q^2}
    t2tx = em_action(C, T * T + T, [x])[0]
    expect2 = ((theta ** 2 + theta) * x
               + (theta ** 2 + theta + ctx.one) * x ** 2 + x ** 4)
    assert (t2tx - expect2).is_zero()


def test_em_action_q3_t_squared():
    rff3 = RatFuncField(F3)
    C3 = carlitz(rff3)
    op = poly_action_operator(C3, Poly.gen(F3, "T") ** 2)
    t = rff3.gen()
    assert op.mats[0][0, 0] == t ** 2
    assert op.mats[1][0, 0] == t + t ** 3
    assert op.mats[2][0, 0] == rff3.one


def test_em_action_multiplicative(rff):
    ctx = CinfContext(2, precision=32)
    C = carlitz(rff)
    rng = random.Random(8)
    T = Poly.gen(F2, "T")
    P1 = T ** 2 + T
    P2 = T + Poly.one(F2, "T")
    x = ctx.theta(-2) + ctx.theta(-1)
    lhs = em_action(C, P1 * P2, [x])[0]
    rhs = em_action(C, P1, em_action(C, P2, [x]))[0]
    assert (lhs - rhs).is_zero()


def test_torsion_operator(rff):
    C = carlitz(rff)
    T = Poly.gen(F2, "T")
    op, dim = torsion_operator(C, T)
    assert op.q_degree() == 1 and dim == 1
    t = rff.gen()
    assert op.mats[0][0, 0] == t and op.mats[1][0, 0] == rff.one
    D = TMotive(rff, [[[t]], [[t]], [[rff.one]]])
    op2, dim2 = torsion_operator(D, T)
    assert op2.q_degree() == 2 and dim2 == 2
    one_op, dim_one = torsion_operator(carlitz(rff), Poly.one(F2, "T"))
    assert one_op.q_degree() == 0 and dim_one == 0


def test_theta_shift_basics():
    ctx = CinfContext(2, precision=32)
    theta = ctx.theta()
    # Y = T: substitute T = N + theta
    Y = TauMatrix.from_scalar_series(ctx, [ctx.zero, ctx.one], 4)
    sh = theta_shift(Y, theta)
    assert (sh[0][0, 0] - theta).is_zero()
    assert (sh[1][0, 0] - ctx.one).is_zero()
    # Y = T^2 at q=2: N^2 + theta^2 (the cross term has even coefficient)
    Y2 = TauMatrix.from_scalar_series(ctx, [ctx.zero, ctx.zero, ctx.one], 4)
    sh2 = theta_shift(Y2, theta)
    assert (sh2[0][0, 0] - theta ** 2).is_zero()
    assert sh2[1][0, 0].is_zero()
    assert (sh2[2][0, 0] - ctx.one).is_zero()


def test_theta_shift_xi_vanishes_at_theta():
    # evaluating the truncated Xi at T = theta: the N^0 coefficient valuation
    # grows with the truncation order
    ctx = CinfContext(2, precision=4096)
    prev = None
    for order in (4, 6, 8):
        xi = xi_series(ctx, order, precision=4096)
        sh = theta_shift(xi, ctx.theta())
        z0 = sh[0][0, 0]
        v = z0.valuation() if z0.terms else z0.precision
        if prev is not None:
            assert v > prev
        prev = v


def test_theta_shift_ring_map():
    ctx = CinfContext(2, precision=64)
    rng = random.Random(3)
    for _ in range(5):
        order = 9
        Y = TauMatrix.from_scalar_series(
            ctx, [ctx.theta(-rng.randrange(0, 3)) * rng.randrange(2)
                  for _ in range(3)], order)
        Z = TauMatrix.from_scalar_series(
            ctx, [ctx.theta(-rng.randrange(0, 3)) * rng.randrange(2)
                  for _ in range(3)], order)
        ok, where = theta_shift_product_check(Y, Z, ctx.theta())
        assert ok, f"ring-map law failed at N^{where}"


def test_theta_shift_negative_orders():
    ctx = CinfContext(2, precision=32)
    Y = TauMatrix.from_scalar_series(ctx, [ctx.one], 3)
    sh = theta_shift(Y, ctx.theta(), max_neg=1, den_exp=1)
    assert (sh[-1][0, 0] - ctx.one).is_zero()
    from tmotive.errors import NotDefinedError
    with pytest.raises(NotDefinedError):
        theta_shift(Y, ctx.theta(), max_neg=1, den_exp=0)


def test_scattering_check_carlitz(rff):
    ctx = CinfContext(2, precision=96)
    from tmotive.h1 import h_1_of
    order = 10
    _, _, cert = h_1_of(carlitz(rff), ctx=ctx, horizon=order, window=4,
                        precision=96)
    cand = cert.convergent()[0]
    psi = cand.as_series(ctx, order)
    Q = carlitz(rff).companion_Q()
    assert scattering_check(psi, Q, ctx) is None
    # zero matrix trivially satisfies the relation
    zero = TauMatrix.zeros(ctx, 1, 1, order)
    assert scattering_check(zero, Q, ctx) is None
    # perturb one coefficient: failure is reported at exactly that order
    bad_mats = [cand.as_series(ctx, order).coeff(i) for i in range(order)]
    bad_mats[3] = bad_mats[3] + Mat(ctx, [[ctx.theta(-1)]])
    bad = TauMatrix.from_coeff_mats(ctx, bad_mats, order)
    res = scattering_check(bad, Q, ctx)
    assert res is not None and res[0] == 3


def test_subspace_product_single_generator():
    ctx = CinfContext(2, precision=32)
    omega = ctx.theta(-1)
    # q=2, bound 0: z (1 - z/omega) = z + z^2/omega
    p = subspace_product(ctx, [omega], 0)
    assert p.degree() == 2
    assert (p.coeff(1) - ctx.one).is_zero()
    assert (p.coeff(2) - omega.invert()).is_zero()
    assert is_additive(p, 2)


def test_subspace_product_additivity_and_roots():
    ctx = CinfContext(2, precision=48)
    F4 = FiniteField.get(2, 2)
    omega = ctx.from_ff(F4.gen)
    for bound in (0, 1):
        p = subspace_product(ctx, [ctx.one, omega], bound)
        assert is_additive(p, 2)
        # the product vanishes on every nonzero subspace point
        val = p.eval(omega)
        assert val.is_zero() or val.valuation() >= 40
    with pytest.raises(Exception):
        subspace_product(ctx, [ctx.one, ctx.one], 0)
