"""Exponential coefficients, the F_q[T]-action on C_inf^n, torsion operators,
scattering-relation checks and finite-subspace products.

The exponential recursion equates q^i-power coefficients in
T(exp(z)) = exp(T_Lie z): with A_0 = theta I + N,

    C_i (theta^{q^i} I + N^(i)) - (theta I + N) C_i = sum_{j>=1} A_j C_{i-j}^(j),

solved by dividing by theta^{q^i} - theta and iterating the nilpotent
correction, which terminates exactly.  Everything is generic over the scalar
domain, so arithmetic presentations give exact rational-function coefficients.
"""

from itertools import product

from .cinf import CinfContext, CinfElement
from .errors import PrecisionError, ValidationError
from .matrix import Mat
from .motive import TMotive, ring_theta
from .poly import Poly
from .tauseries import TauMatrix


class ExpCoeffs:
    """C_0 = I, C_1, ... of the exponential of a t-motive."""

    def __init__(self, motive, mats):
        self.motive = motive
        self.mats = mats

    def __getitem__(self, i):
        return self.mats[i]

    def __len__(self):
        return len(self.mats)

    def residual(self, i):
        """C_i A_0^(i) - A_0 C_i - sum_{j} A_j C_{i-j}^(j); zero when correct."""
        M = self.motive
        lhs = self.mats[i] * M.A[0].coeff_twist(i) - M.A[0] * self.mats[i]
        for j in range(1, min(i, M.k) + 1):
            lhs = lhs - M.A[j] * self.mats[i - j].coeff_twist(j)
        return lhs


def exp_coeffs(M, count):
    """First `count` coefficient matrices of exp_M beyond C_0 = I."""
    ring = M.ring
    theta = ring_theta(ring)
    q = M.q
    n = M.n
    ident = Mat.identity(ring, n)
    N = M.N
    mats = [ident]
    for i in range(1, count + 1):
        rhs = Mat.zeros(ring, n, n)
        for j in range(1, min(i, M.k) + 1):
            rhs = rhs + M.A[j] * mats[i - j].coeff_twist(j)
        d = theta ** (q ** i) - theta
        d_inv = _invert_scalar(ring, d)
        Ni = N.coeff_twist(i)
        C = Mat.zeros(ring, n, n)
        for _ in range(2 * n + 1):
            C_new = (rhs + N * C - C * Ni) * d_inv
            if C_new == C:
                break
            C = C_new
        resid = C * M.A[0].coeff_twist(i) - M.A[0] * C - rhs
        if any(bool(x) for x in resid.entries()):
            raise PrecisionError(f"exp recursion residual nonzero at i={i}")
        mats.append(C)
    return ExpCoeffs(M, mats)


def _invert_scalar(ring, x):
    if isinstance(ring, CinfContext):
        return x.invert()
    return ring.one / x


def carlitz_exp_closed_form(ring, i):
    """prod_{j<i} (theta^{q^i} - theta^{q^j})^{-1}, exactly."""
    if i < 0:
        raise ValidationError("index must be >= 0")
    theta = ring_theta(ring)
    q = ring_base_order(ring)
    if i == 0:
        return ring.one
    acc = ring.one
    top = theta ** (q ** i)
    for j in range(i):
        acc = acc * (top - theta ** (q ** j))
    return _invert_scalar(ring, acc)


def ring_base_order(ring):
    if isinstance(ring, CinfContext):
        return ring.q
    return ring.field.order


# ---------------------------------------------------------------------------
# additive operators: the E(M) action and torsion


class AdditiveOperator:
    """sum_j B_j x^(q^j) with matrix coefficients; composition is the twisted
    (Ore) product."""

    def __init__(self, ring, q, mats):
        while len(mats) > 1 and all(not bool(x) for x in mats[-1].entries()):
            mats = mats[:-1]
        self.ring = ring
        self.q = q
        self.mats = mats
        self.n = mats[0].nrows

    @staticmethod
    def zero(ring, q, n):
        return AdditiveOperator(ring, q, [Mat.zeros(ring, n, n)])

    @staticmethod
    def scalar(ring, q, n, c):
        return AdditiveOperator(ring, q, [Mat.identity(ring, n) * ring.coerce(c)])

    def q_degree(self):
        return len(self.mats) - 1

    def __add__(self, other):
        k = max(len(self.mats), len(other.mats))
        mats = []
        for j in range(k):
            a = self.mats[j] if j < len(self.mats) else Mat.zeros(self.ring, self.n, self.n)
            b = other.mats[j] if j < len(other.mats) else Mat.zeros(self.ring, self.n, self.n)
            mats.append(a + b)
        return AdditiveOperator(self.ring, self.q, mats)

    def compose(self, other):
        """(self o other)(x) = self(other(x))."""
        k1, k2 = len(self.mats), len(other.mats)
        out = [Mat.zeros(self.ring, self.n, self.n) for _ in range(k1 + k2 - 1)]
        for j, S in enumerate(self.mats):
            for l, R in enumerate(other.mats):
                out[j + l] = out[j + l] + S * R.coeff_twist(j)
        return AdditiveOperator(self.ring, self.q, out)

    def apply(self, xs):
        """Evaluate on a vector (list) of scalars; arithmetic coefficients are
        expanded into the series model when the points live there."""
        mats = self.mats
        x0 = xs[0]
        if isinstance(x0, CinfElement) and not isinstance(self.ring, CinfContext):
            ctx = x0.ctx
            mats = [B.map(lambda c: ctx.from_ratfunc(c)) for B in mats]
        out = None
        for j, B in enumerate(mats):
            xq = [x ** (self.q ** j) for x in xs]
            term = [None] * self.n
            for i in range(self.n):
                acc = None
                for l in range(self.n):
                    t = B[i, l] * xq[l]
                    acc = t if acc is None else acc + t
                term[i] = acc
            out = term if out is None else [a + b for a, b in zip(out, term)]
        return out


def t_action_operator(M):
    """The generator action T({x}) = A_0 {x} + A_1 {x}^(1) + ... + A_k {x}^(k)."""
    return AdditiveOperator(M.ring, M.q, list(M.A))


def poly_action_operator(M, P):
    """The action of P(T) in F_q[T] via sums and composition."""
    if P.var != "T":
        raise ValidationError("action polynomials live in F_q[T]")
    t_op = t_action_operator(M)
    acc = AdditiveOperator.zero(M.ring, M.q, M.n)
    power = AdditiveOperator.scalar(M.ring, M.q, M.n, M.ring.one)
    for i, c in enumerate(P.coeffs):
        if c:
            acc = acc + AdditiveOperator.scalar(M.ring, M.q, M.n, c).compose(power)
        if i < len(P.coeffs) - 1:
            power = t_op.compose(power)
    return acc


def em_action(M, P, xs):
    """P({x}) in E(M) for P in F_q[T] and {x} in the n-dim coefficient space."""
    if len(xs) != M.n:
        raise ValidationError("vector length must equal the dimension")
    return poly_action_operator(M, P).apply(xs)


def torsion_operator(M, P):
    """The additive operator with kernel the P-torsion, plus the dimension
    claim: q-degree r*deg(P) and expected torsion size q^(r deg P)."""
    if not P.is_monic():
        raise ValidationError("torsion polynomial must be monic")
    op = poly_action_operator(M, P)
    r = M.rank_dim()[0]
    expected_dim = r * P.degree()
    return op, expected_dim


# ---------------------------------------------------------------------------
# scattering relation


def scattering_check(psi, Q, ctx=None):
    """First (T-order, valuation) where Psi Q^t - Psi^(1) fails, or None.

    psi: TauMatrix; Q: T-polynomial matrix or TauMatrix.
    """
    if not isinstance(Q, TauMatrix):
        ctx = ctx or psi.ring
        Q = TauMatrix.from_poly_matrix(ctx, Q, psi.order,
                                       convert=_poly_entry_converter(ctx, Q))
    diff = psi * Q.transpose() - psi.twist(1)
    for i in range(diff.order):
        mat = diff.coeff(i)
        vals = []
        for x in mat.entries():
            if x.terms:
                vals.append(x.valuation())
        if vals:
            return i, min(vals)
    return None


def _poly_entry_converter(ctx, Q):
    from .h1 import _entry_converter
    return _entry_converter(ctx, Q)


# ---------------------------------------------------------------------------
# finite-subspace products


def subspace_product(ctx, generators, bound):
    """z * prod (1 - z/omega) over the nonzero F_q[theta]-combinations of the
    generators with multiplier degree <= bound; additive in z."""
    if not generators:
        raise ValidationError("need at least one generator")
    field_elems = ctx.base_field.elements()
    coeff_tuples = list(product(range(ctx.base_field.order), repeat=bound + 1))
    poly = Poly.one(_zring(ctx), "z")
    z = Poly.gen(_zring(ctx), "z")
    for combo in product(coeff_tuples, repeat=len(generators)):
        if all(all(c == 0 for c in tup) for tup in combo):
            continue
        omega = ctx.zero
        for gen, tup in zip(generators, combo):
            mult = ctx.zero
            for d, ci in enumerate(tup):
                if ci:
                    mult = mult + ctx.theta(d) * ctx.from_ff(field_elems[ci])
            omega = omega + mult * gen
        if not omega.terms:
            raise ValidationError("zero lattice point: generators are dependent")
        poly = poly * (Poly.one(_zring(ctx), "z") - z * omega.invert())
    return z * poly


def _zring(ctx):
    return ctx


def is_additive(poly, q):
    """Nonzero coefficients only at exponents q^j."""
    for d, c in enumerate(poly.coeffs):
        if not c:
            continue
        e = d
        while e > 1 and e % q == 0:
            e //= q
        if e != 1:
            return False
    return True
