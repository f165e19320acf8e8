"""Reductions mod primes of F_q[t] and exact L-functions.

The local factor at a good prime P of degree d is det(I - Q~^[d] U^d)^{-1},
with Q~ the reduction of Q mod P and ^[d] the ordered Frobenius product; its
coefficients descend from the residue field to F_q[T], which is verified, not
assumed.  The global function is the truncated product over all good primes
of degree <= D.  Torsion counts over residue fields are exact F_q-linear
algebra in Frobenius powers.
"""

from .analytic import poly_action_operator
from .errors import BadPrimeError, InternalDefect, UnsupportedError, ValidationError
from .ff import FF, FiniteField, embed
from .gflin import FqGauss
from .matrix import Mat, frobenius_product
from .motive import TMotive
from .poly import Poly, PolyRing, enumerate_monic_irreducibles
from .ratfunc import RatFunc, RatFuncField, ResidueField


class LSeries:
    """Truncated power series in U with F_q[T] coefficients."""

    def __init__(self, tring, coeffs, truncation):
        coeffs = list(coeffs)[:truncation + 1]
        coeffs += [tring.zero] * (truncation + 1 - len(coeffs))
        self.tring = tring
        self.coeffs = coeffs
        self.truncation = truncation

    @staticmethod
    def one(tring, truncation):
        return LSeries(tring, [tring.one], truncation)

    def __mul__(self, other):
        D = min(self.truncation, other.truncation)
        out = [self.tring.zero] * (D + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero() or i > D:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > D:
                    break
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return LSeries(self.tring, out, D)

    def __eq__(self, other):
        if isinstance(other, LSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def coeff(self, i):
        return self.coeffs[i]

    def __repr__(self):
        from .grammar import format_series
        return format_series(self.coeffs, "U")


def _charpoly_reversed_UD(Qd, d, D, residue):
    """det(I - Qd U^d) as an LSeries with verified F_q[T] coefficients."""
    # entries of Qd are T-polynomials over the residue field
    rev = Qd.charpoly_rev("X")  # sum e_k (-1)^k X^k over residue[T]
    base = residue.base
    tring = PolyRing(base, "T")
    out = [tring.zero] * (D + 1)
    for k, c in enumerate(rev.coeffs):
        # c is a T-polynomial over the residue field; it must descend to F_q
        desc = []
        for cc in c.coeffs:
            if not cc.in_prime_subfield():
                raise InternalDefect(
                    "local factor coefficient failed to descend to F_q[T]")
            desc.append(cc.as_base_constant())
        if k * d <= D:
            out[k * d] = Poly(base, "T", desc)
    return LSeries(tring, out, D)


def _series_inverse(ls):
    """1 / ls for constant term 1, truncated like ls."""
    tring = ls.tring
    D = ls.truncation
    if not ls.coeffs[0] == tring.one:
        raise ValidationError("series inversion needs constant term 1")
    inv = [tring.one] + [tring.zero] * D
    for m in range(1, D + 1):
        acc = tring.zero
        for j in range(1, m + 1):
            if not ls.coeffs[j].is_zero():
                acc = acc + ls.coeffs[j] * inv[m - j]
        inv[m] = -acc
    return LSeries(tring, inv, D)


# ---------------------------------------------------------------------------
# reduction criteria


def good_reduction_check(M, P):
    """'good' iff every entry of every A_i is P-integral and the top
    coefficient keeps its rank over the residue field."""
    if not M.is_arithmetic:
        raise ValidationError("reduction applies to arithmetic presentations")
    residue = ResidueField(P)
    for i, mat in enumerate(M.A):
        for x in mat.entries():
            if not x.is_integral_at(P):
                return "bad", "non-integral"
    top = M.A[-1]
    rank_generic = _ratfunc_rank(top, M.ring)
    reduced = top.map(lambda x: residue.coerce(x))
    rank_res = Mat(residue, reduced.rows).rank()
    if rank_res != rank_generic:
        return "bad", "rank-drop"
    return "good", None


def _ratfunc_rank(mat, rff):
    return Mat(rff, mat.rows).rank()


def ordinary_check(M, P):
    """'ordinary' iff, beyond good reduction, the x^q-coefficient of the
    iota^{-1}(P)-action keeps its rank after reduction.  Implemented for
    Drinfeld shapes (n = 1); other shapes return 'undefined'."""
    verdict, _ = good_reduction_check(M, P)
    if verdict != "good":
        raise BadPrimeError(f"no good reduction at {P!r}")
    if M.n != 1:
        return "undefined"
    TP = _iota_inverse(M, P)
    op = poly_action_operator(M, TP)
    residue = ResidueField(P)
    if op.q_degree() < 1:
        return "undefined"
    B1 = op.mats[1]
    rank_generic = _ratfunc_rank(B1, M.ring)
    reduced = B1.map(lambda x: residue.coerce(x))
    rank_res = Mat(residue, reduced.rows).rank()
    return "ordinary" if rank_res == rank_generic else "non-ordinary"


def _iota_inverse(M, P):
    """The polynomial P with t replaced by T (the iota^{-1} image)."""
    return Poly(P.ring, "T", list(P.coeffs))


# ---------------------------------------------------------------------------
# local and global L-factors


def local_factor(M, P, D):
    """L_P(M, U) = det(I - Q~^[d] U^d)^{-1} truncated at U^D."""
    verdict, reason = good_reduction_check(M, P)
    if verdict != "good":
        raise BadPrimeError(f"bad prime: {reason}", reason=reason)
    d = P.degree()
    if d > D:
        return LSeries.one(PolyRing(P.ring, "T"), D)
    Q = M.companion_Q()
    residue = ResidueField(P)
    tring_res = PolyRing(residue, "T")
    Qred = Mat(tring_res, [[_reduce_tpoly(Q[i, j], residue, tring_res)
                            for j in range(Q.ncols)] for i in range(Q.nrows)])
    Qd = frobenius_product(Qred, d)
    det_series = _charpoly_reversed_UD(Qd, d, D, residue)
    return _series_inverse(det_series)


def _reduce_tpoly(f, residue, tring_res):
    return Poly(residue, "T", [residue.coerce(c) for c in f.coeffs])


def reduced_companion(M, P):
    """Q~ = Q mod P (exposed so callers can apply alternative criteria)."""
    residue = ResidueField(P)
    tring_res = PolyRing(residue, "T")
    Q = M.companion_Q()
    return Mat(tring_res, [[_reduce_tpoly(Q[i, j], residue, tring_res)
                            for j in range(Q.ncols)] for i in range(Q.nrows)])


def global_L(M, D, prime_order=None):
    """prod over good monic irreducible P with deg P <= D, truncated at U^D.

    Returns (LSeries, bad_primes).  prime_order optionally permutes the
    factor order (the exact product is order-independent)."""
    if D < 1:
        raise ValidationError("D must be >= 1")
    field = M.field
    primes = enumerate_monic_irreducibles(field, D)
    if prime_order is not None:
        primes = [primes[i] for i in prime_order]
    tring = PolyRing(field, "T")
    acc = LSeries.one(tring, D)
    bad = []
    for P in primes:
        try:
            acc = acc * local_factor(M, P, D)
        except BadPrimeError:
            bad.append(P)
    return acc, bad


# ---------------------------------------------------------------------------
# torsion counts over residue fields


def torsion_count_reduction(M, P, ext_degree, size_cap=4096):
    """Number of iota^{-1}(P)-torsion points of the reduction over the
    residue-field extension of the given degree, by exact linear algebra.

    Returns (count, expected) with expected = |F_q[t]/P|^(r-n); the count
    stabilizes at `expected` once the extension is large enough (checked by
    the caller over increasing degrees)."""
    if ordinary_check(M, P) != "ordinary":
        raise ValidationError("torsion counting needs an ordinary reduction")
    r, n = M.rank_dim()
    q = M.q
    d = P.degree()
    residue = ResidueField(P)
    TP = _iota_inverse(M, P)
    op = poly_action_operator(M, TP)
    K_deg = M.field.k * d * ext_degree
    if q ** (K_deg * n) > q ** 24 or K_deg > 24:
        raise UnsupportedError("torsion instance too large for exact counting")
    big = FiniteField.get(M.field.p, K_deg)
    # embed the residue field F_q[t]/P into big via a root of P
    theta_img = _root_of_in(P, big)
    def emb(x):
        # x: ResidueElem -> element of big by evaluating its representative
        acc = big.zero
        power = big.one
        for c in x.rep.coeffs:
            acc = acc + power * embed(c, big)
            power = power * theta_img
        return acc
    mats = []
    for B in op.mats:
        reduced = B.map(lambda x: residue.coerce(x))
        mats.append([[emb(reduced[i, j]) for j in range(n)] for i in range(n)])
    # F_p-linear map on big^n: x -> sum_j B_j x^(q^j)
    p = M.field.p
    K = big.k
    basis = []
    g = big.one
    for _ in range(K):
        basis.append(g)
        g = g * big.gen
    cols = []
    for comp in range(n):
        for b in basis:
            vec = [big.zero] * n
            vec[comp] = b
            img = [big.zero] * n
            for j, B in enumerate(mats):
                xq = [x ** (q ** j) for x in vec]
                for i in range(n):
                    acc = img[i]
                    for l in range(n):
                        acc = acc + B[i][l] * xq[l]
                    img[i] = acc
            col = []
            for i in range(n):
                col.extend(img[i].coeffs)
            cols.append(col)
    gauss = FqGauss(p, len(cols))
    for rowi in range(len(cols[0])):
        gauss.add_row({ci: col[rowi] for ci, col in enumerate(cols) if col[rowi]})
    nullity = len(cols) - gauss.rank()
    count = p ** nullity
    expected = (q ** d) ** (r - n)
    return count, expected


def _root_of_in(P, big):
    """First root of P in the field `big` (deterministic scan)."""
    for m in range(big.order):
        cand = big.element_from_int(m)
        acc = big.zero
        power = big.one
        for c in P.coeffs:
            acc = acc + power * embed(c, big)
            power = power * cand
        if not acc:
            return cand
    raise InternalDefect("residue field does not embed (degree mismatch)")
