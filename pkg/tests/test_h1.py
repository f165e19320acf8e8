import random
from fractions import Fraction

import pytest

from tmotive.cinf import CinfContext, artin_schreier_solve
from tmotive.construct import dual_presentation
from tmotive.errors import PrecisionError, ValidationError
from tmotive.ff import FiniteField
from tmotive.grammar import parse_ratfunc
from tmotive.h1 import (CONVERGENT, H1_LOWER, H1_UPPER, StepSolver,
                        TwistedSystem, h1_of, h_1_of, make_system,
                        pairing_matrix, twisted_solve, uniformizability,
                        UNIFORMIZABLE, NOT_UNIFORMIZABLE)
from tmotive.matrix import Mat
from tmotive.motive import TMotive, carlitz, m_of_a
from tmotive.poly import PolyRing
from tmotive.ratfunc import RatFuncField

F2 = FiniteField.get(2)


@pytest.fixture
def rff():
    return RatFuncField(F2)


@pytest.fixture
def ctx():
    return CinfContext(2, precision=64)


def the_bad_m_of_a(rff):
    A = [[parse_ratfunc("t", rff), parse_ratfunc("t^6", rff)],
         [parse_ratfunc("1/t^2", rff), rff.zero]]
    return m_of_a(rff, A)


def test_carlitz_h1_upper(rff, ctx):
    value, status, cert = h1_of(carlitz(rff), ctx=ctx, horizon=12, window=4,
                                precision=600)
    assert value == 1 and status == "exact"
    prof = cert.convergent()[0].profile
    for i, v in enumerate(prof):
        if v is not None:
            assert v == Fraction(2 ** i)  # q^i/(q-1) at q=2


def test_carlitz_h1_lower(rff, ctx):
    value, status, cert = h_1_of(carlitz(rff), ctx=ctx, horizon=12, window=4,
                                 precision=64)
    assert value == 1 and status == "exact"
    prof = cert.convergent()[0].profile
    assert prof[0] == Fraction(-1)
    assert all(prof[i + 1] == prof[i] + 1 for i in range(len(prof) - 1))


def test_carlitz_prune_counts(rff, ctx):
    _, _, cert = h1_of(carlitz(rff), ctx=ctx, horizon=10, window=4,
                       precision=600)
    # the homogeneous additions on the canonical stem: q-1 pruned per step
    for step, (nonzero_stem, _) in enumerate(cert.pruned_per_step):
        if step >= 1:
            assert nonzero_stem == 1  # q - 1


def test_zero_system_rank_zero(rff, ctx):
    # a twisted system with no nonzero convergent solutions: the bad M(A) upper
    M = the_bad_m_of_a(rff)
    value, status, cert = h1_of(M, ctx=ctx, horizon=24, window=6, precision=64)
    assert value == 0
    assert status in ("exact", "bounds")
    assert not cert.convergent()


def test_bad_m_of_a_lower(rff, ctx):
    M = the_bad_m_of_a(rff)
    value, status, cert = h_1_of(M, ctx=ctx, horizon=16, window=5, precision=48)
    assert value >= 1
    assert cert.convergent()


def test_random_drinfeld_uniformizable(rff, ctx):
    rng = random.Random(123)
    for r in (2, 3):
        t = rff.gen()
        mats = [Mat(rff, [[t]])]
        for _ in range(1, r):
            c = rff.coerce(rng.randrange(2)) + t * rng.randrange(2)
            mats.append(Mat(rff, [[c]]))
        mats.append(Mat(rff, [[rff.one]]))
        M = TMotive(rff, mats)
        v_up, s_up, _ = h1_of(M, ctx=ctx, horizon=16, window=5, precision=64)
        v_lo, s_lo, _ = h_1_of(M, ctx=ctx, horizon=16, window=5, precision=64)
        assert (v_up, s_up) == (r, "exact")
        assert (v_lo, s_lo) == (r, "exact")


def test_block_diagonal_additivity(rff, ctx):
    # h1 of a direct sum is the sum of the parts: block-diagonal Q
    C = carlitz(rff)
    Q = C.companion_Q()
    R = Q.ring
    Q2 = Mat(R, [[Q[0, 0], R.zero], [R.zero, Q[0, 0]]])
    sys2 = TwistedSystem(ctx, Q2, H1_UPPER, horizon=10, window=4, precision=600)
    cert = twisted_solve(sys2)
    assert cert.rank_low == 2 and cert.status == "exact"


def test_window_solver_matches_scalar(ctx):
    # r = 1 step systems agree with the scalar Artin-Schreier primitive
    t = ctx.theta()
    A0 = Mat(ctx, [[ctx.one]])
    A1 = Mat(ctx, [[t]])
    solver = StepSolver(ctx, A0, A1)
    w = (t * t).invert().with_precision(40)
    part, kernel, pi_out = solver.solve([w], 40)
    res = artin_schreier_solve(t, w)
    window_sols = {repr(part[0].with_precision(20))}
    for k in kernel:
        window_sols.add(repr((part[0] + k[0]).with_precision(20)))
    scalar_sols = {repr(s.with_precision(20)) for s in res.solutions}
    assert window_sols == scalar_sols


def test_dual_consistency_carlitz(rff, ctx):
    # H^1(M) = H_1(M') as equations: the certificates agree in rank
    C = carlitz(rff)
    dq = dual_presentation(C)
    up = twisted_solve(make_system(C, H1_UPPER, ctx=ctx, horizon=10, window=4,
                                   precision=600))
    lo_dual = twisted_solve(TwistedSystem(ctx, dq, H1_LOWER, horizon=10,
                                          window=4, precision=600))
    assert up.rank_low == lo_dual.rank_low == 1


def test_uniformizability_verdicts(rff, ctx):
    assert uniformizability(carlitz(rff), ctx=ctx, horizon=12, window=4,
                            precision=64)[0] == UNIFORMIZABLE
    # M(A) with all entries of valuation >= 1 > q/(q^2-1): the fast path
    t_inv = parse_ratfunc("1/t", rff)
    M = m_of_a(rff, [[t_inv, rff.zero], [rff.zero, t_inv]])
    verdict, why, _ = uniformizability(M, ctx=ctx)
    assert verdict == UNIFORMIZABLE and "bound" in why
    bad = the_bad_m_of_a(rff)
    verdict, why, cert = uniformizability(bad, ctx=ctx, horizon=16, window=5,
                                          precision=48)
    assert verdict == NOT_UNIFORMIZABLE
    assert "h_1 = 1 < r = 4" in why


def test_pairing_matrix_carlitz(rff, ctx):
    up = twisted_solve(make_system(carlitz(rff), H1_UPPER, ctx=ctx, horizon=10,
                                   window=4, precision=600))
    lo = twisted_solve(make_system(carlitz(rff), H1_LOWER, ctx=ctx, horizon=10,
                                   window=4, precision=600))
    gram = pairing_matrix(up, lo, carlitz(rff))
    det = gram.det()
    assert det.degree() == 0 and det.const_value() == F2.one


def test_pairing_matrix_rank2(rff, ctx):
    t = rff.gen()
    D = TMotive(rff, [[[t]], [[rff.one]], [[rff.one]]])
    up = twisted_solve(make_system(D, H1_UPPER, ctx=ctx, horizon=10, window=4,
                                   precision=400))
    lo = twisted_solve(make_system(D, H1_LOWER, ctx=ctx, horizon=10, window=4,
                                   precision=400))
    assert up.rank_low == lo.rank_low == 2
    gram = pairing_matrix(up, lo, D)
    det = gram.det()
    assert det.degree() == 0 and bool(det.const_value())


def test_rank_monotone_in_horizon(rff, ctx):
    # increasing the horizon does not increase an exact rank verdict
    M = the_bad_m_of_a(rff)
    r1 = h1_of(M, ctx=ctx, horizon=12, window=4, precision=64)[0]
    r2 = h1_of(M, ctx=ctx, horizon=20, window=4, precision=64)[0]
    assert r2 <= r1


def test_system_validation(ctx, rff):
    Q = carlitz(rff).companion_Q()
    with pytest.raises(ValidationError):
        TwistedSystem(ctx, Q, H1_UPPER, horizon=4, window=6)
    with pytest.raises(ValidationError):
        TwistedSystem(ctx, Q, "sideways")


def test_candidates_satisfy_equation(rff, ctx):
    # independent re-check: every convergent candidate satisfies its equation
    system = make_system(carlitz(rff), H1_UPPER, ctx=ctx, horizon=10, window=4,
                         precision=600)
    cert = twisted_solve(system)
    for cand in cert.convergent():
        for i in range(len(cand.coeffs)):
            w = system.rhs_for(cand.coeffs, i)
            resid = system.solver.residual(cand.coeffs[i], w, 64)
            for x in resid:
                assert x.with_precision(64).is_zero()
