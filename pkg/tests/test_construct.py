import random
from fractions import Fraction
from math import comb

import pytest

from tmotive.cinf import CinfContext
from tmotive.construct import (RationalQ, TPresentation, carlitz_power,
                               carlitz_power_tpresentation, dim_from_Q,
                               drinfeld_tensor_tau_basis, dual_presentation,
                               exterior_power, psi_dual,
                               psi_dual_contract_residual, tensor, xi_series,
                               xi_relation_residual, scale_by_scalar_series)
from tmotive.ff import FiniteField
from tmotive.matrix import Mat
from tmotive.motive import TMotive, carlitz, ring_theta
from tmotive.ratfunc import RatFuncField
from tmotive.tauseries import TauMatrix

F2 = FiniteField.get(2)


@pytest.fixture
def rff():
    return RatFuncField(F2)


def random_drinfeld(rff, rng, r):
    """Te = theta e + a_1 tau e + ... + tau^r e with small integral a_i."""
    t = rff.gen()
    mats = [Mat(rff, [[t]])]
    for i in range(1, r):
        c = rff.coerce(rng.randrange(2)) + t * rng.randrange(2)
        mats.append(Mat(rff, [[c]]))
    mats.append(Mat(rff, [[rff.one]]))
    return TMotive(rff, mats)


def test_tensor_carlitz_square(rff):
    C = carlitz(rff)
    TT = tensor(C, C)
    assert TT.r == 1 and TT.n == 2
    R = TT.Q.ring
    lin = R.gen() - R.coerce(rff.gen())
    assert TT.Q[0, 0] == lin * lin


def test_tensor_dimension_formula(rff):
    rng = random.Random(42)
    for _ in range(8):
        r1, r2 = rng.randrange(1, 4), rng.randrange(1, 4)
        M1, M2 = random_drinfeld(rff, rng, r1), random_drinfeld(rff, rng, r2)
        TT = tensor(M1, M2)
        assert TT.r == r1 * r2
        assert TT.n == 1 * r2 + 1 * r1


def test_tensor_with_carlitz_multiplies_by_linear(rff):
    rng = random.Random(9)
    M = random_drinfeld(rff, rng, 2)
    C = carlitz(rff)
    TT = tensor(M, C)
    base = TPresentation(rff, M.companion_Q())
    assert TT.n == base.n + base.r


def test_carlitz_power_shapes(rff):
    t = rff.gen()
    for n in (1, 2, 3):
        M = carlitz_power(rff, n)
        assert M.n == n
        assert M.A[0][0, 0] == t
        if n > 1:
            assert M.A[0][0, 1] == rff.one  # Jordan shift above the diagonal
            assert M.A[1][n - 1, 0] == rff.one
        pres = carlitz_power_tpresentation(rff, n)
        assert pres.r == 1 and pres.n == n


def test_drinfeld_tensor_tau_basis(rff):
    rng = random.Random(5)
    C = carlitz(rff)
    DT = drinfeld_tensor_tau_basis(C, C)
    assert DT.n == 2
    # nilpotent part is epsilon_{1, r1+r2}
    assert DT.N[0, 1] == rff.one
    assert not any(bool(DT.N[i, j]) for i in range(2) for j in range(2)
                   if (i, j) != (0, 1))
    NN = DT.N * DT.N
    assert not any(bool(x) for x in NN.entries())

    M2 = random_drinfeld(rff, rng, 2)
    DT2 = drinfeld_tensor_tau_basis(M2, C)
    assert DT2.n == 3
    assert DT2.N[0, 2] == rff.one


def test_exterior_power_binomials(rff):
    rng = random.Random(17)
    for r in (2, 3, 4):
        M = random_drinfeld(rff, rng, r)
        for k in range(1, r + 1):
            pres = exterior_power(M, k)
            assert pres.r == comb(r, k)
            assert pres.n == comb(r - 1, k - 1)


def test_exterior_identity_and_top(rff):
    rng = random.Random(19)
    M = random_drinfeld(rff, rng, 3)
    E1 = exterior_power(M, 1)
    assert E1.Q == M.companion_Q()
    Etop = exterior_power(M, 3)
    assert Etop.r == 1 and Etop.n == 1


def test_dual_carlitz(rff):
    C = carlitz(rff)
    dq = dual_presentation(C)
    assert dq.den_exp == 1
    assert dq.target_dim == 0
    assert dq.num[0, 0] == dq.num.ring.one
    back = dq.inverse_transpose()
    assert back.den_exp == 0
    assert back.num == C.companion_Q()


def test_dual_involution_random(rff):
    rng = random.Random(77)
    for _ in range(12):
        r = rng.randrange(2, 4)
        M = random_drinfeld(rff, rng, r)
        Q = M.companion_Q()
        dq = dual_presentation(M)
        assert dq.target_dim == r - 1
        dd = dq.inverse_transpose()
        assert dd.den_exp == 0 and dd.num == Q


def test_dual_rank2_shape(rff):
    t = rff.gen()
    a1 = t + rff.one
    D = TMotive(rff, [[[t]], [[a1]], [[rff.one]]])
    dq = dual_presentation(D)
    # (Q^t)^{-1} with det Q = -(T-theta): entries match the adjugate pattern
    R = dq.num.ring
    assert dq.den_exp == 1
    prod = dq.num.transpose() * D.companion_Q()
    lin = R.gen() - R.coerce(t)
    assert prod == Mat.identity(R, 2) * lin


def test_xi_series_q2():
    ctx = CinfContext(2, precision=64)
    xi = xi_series(ctx, 12, precision=4096)
    a = xi.scalar_coeffs()
    assert a[0].coeff(1) == F2.one and a[0].valuation() == 1
    # constant-term identity a_0 = -theta a_0^q
    lhs = a[0]
    rhs = (-(ctx.theta())) * a[0].frob(1)
    assert (lhs - rhs).is_zero()
    assert xi_relation_residual(xi, ctx) is None
    vals = [x.valuation() for x in a[:11]]
    assert all(vals[i] < vals[i + 1] for i in range(10))


def test_xi_series_q3():
    ctx = CinfContext(3, precision=48)
    xi = xi_series(ctx, 8)
    assert xi_relation_residual(xi, ctx) is None
    a0 = xi.scalar_coeffs()[0]
    assert a0.valuation() == Fraction(1, 2)


def _random_invertible_psi(ctx, n, order, rng):
    field = ctx.base_field
    while True:
        const = Mat.from_lists(ctx, [[rng.randrange(2) for _ in range(n)]
                                     for _ in range(n)])
        if const.det():
            break
    mats = [const]
    for _ in range(order - 1):
        mats.append(Mat(ctx, [[ctx.theta(-rng.randrange(1, 4)) * rng.randrange(2)
                               for _ in range(n)] for _ in range(n)]))
    return TauMatrix.from_coeff_mats(ctx, mats, order)


def test_psi_dual_identity():
    ctx = CinfContext(2, precision=48)
    rng = random.Random(4)
    xi = xi_series(ctx, 16)
    # 1x1: Psi = Xi^{-1} gives Psi' = the unit series
    psi = xi.inverse()
    psid = psi_dual(psi, xi)
    ident = TauMatrix.identity(ctx, 1, 16)
    diff = psid - ident
    assert diff.first_nonzero_order() is None
    for _ in range(3):
        psi2 = _random_invertible_psi(ctx, 2, 16, rng)
        psid2 = psi_dual(psi2, xi)
        assert psi_dual_contract_residual(psi2, psid2, xi) is None


def test_dual_scattering_corrected_identity():
    # Psi' (Q')^t (T-theta) = Psi'^(1) whenever Psi Q^t = Psi^(1); checked on
    # the rank-1 case where Psi is an actual scattering matrix
    ctx = CinfContext(2, precision=96)
    order = 12
    xi = xi_series(ctx, order)
    rff = RatFuncField(F2)
    C = carlitz(rff)
    from tmotive.h1 import h_1_of
    _, _, cert = h_1_of(C, ctx=ctx, horizon=order, window=4, precision=96)
    cand = cert.convergent()[0]
    psi = cand.as_series(ctx, order)  # r x 1; for r=1 it is the 1x1 Psi
    Q = C.companion_Q()
    Qtau = TauMatrix.from_poly_matrix(ctx, Q, order,
                                      convert=lambda c: ctx.from_ratfunc(c))
    # sanity: the scattering relation itself
    assert (psi * Qtau.transpose() - psi.twist(1)).first_nonzero_order() is None
    psid = psi_dual(psi, xi)
    Qdual = Qtau.inverse().transpose()  # (Q^t)^{-1} as a series
    lin = Qtau  # (T-theta) equals Q in rank 1
    lhs_t = psid * Qdual.transpose() * lin
    rhs = psid.twist(1)
    assert (lhs_t - rhs).first_nonzero_order() is None


def test_dim_from_q_rejects_bad_det(rff):
    R = carlitz(rff).companion_Q().ring
    M = Mat(R, [[R.gen()]])  # det = T, not c(T-theta)^n
    from tmotive.errors import ValidationError
    with pytest.raises(ValidationError):
        dim_from_Q(M, rff)
