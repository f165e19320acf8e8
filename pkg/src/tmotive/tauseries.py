"""Truncated power series in T with matrix coefficients over a scalar ring.

TauMatrix is the workhorse for everything valued in C_inf{T}: scattering
matrices, H1/H_1 candidate vectors (shape r x 1), the Xi series (1 x 1).
Coefficients are exact scalar matrices; all products truncate at the common
order.  The theta-shift re-expands T = N + theta and extracts the Laurent
coefficients in N, including the negative powers contributed by a declared
(T-theta)-power denominator.
"""

from math import comb

from .errors import NotDefinedError, ValidationError
from .matrix import Mat


class TauMatrix:
    __slots__ = ("ring", "nrows", "ncols", "coeffs", "order")

    def __init__(self, ring, nrows, ncols, coeffs, order):
        coeffs = list(coeffs)[:order]
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.coeffs = coeffs
        self.order = order

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zeros(ring, nrows, ncols, order):
        return TauMatrix(ring, nrows, ncols, [], order)

    @staticmethod
    def identity(ring, n, order):
        return TauMatrix(ring, n, n, [Mat.identity(ring, n)], order)

    @staticmethod
    def const(ring, mat, order):
        return TauMatrix(ring, mat.nrows, mat.ncols, [mat], order)

    @staticmethod
    def from_coeff_mats(ring, mats, order):
        if not mats:
            raise ValidationError("need at least one coefficient matrix")
        return TauMatrix(ring, mats[0].nrows, mats[0].ncols, mats, order)

    @staticmethod
    def from_poly_matrix(ring, poly_mat, order, convert=None):
        """T-polynomial matrix -> TauMatrix; `convert` maps entry coefficients
        into the scalar ring (defaults to ring.coerce)."""
        convert = convert or ring.coerce
        deg = max((e.degree() for e in poly_mat.entries()), default=-1)
        mats = []
        for i in range(min(deg + 1, order)):
            mats.append(Mat(ring, [[convert(poly_mat[r, c].coeff(i))
                                    for c in range(poly_mat.ncols)]
                                   for r in range(poly_mat.nrows)]))
        return TauMatrix(ring, poly_mat.nrows, poly_mat.ncols, mats, order)

    @staticmethod
    def from_scalar_series(ring, scalars, order):
        mats = [Mat(ring, [[s]]) for s in scalars]
        return TauMatrix(ring, 1, 1, mats, order)

    # -- access ----------------------------------------------------------------

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Mat.zeros(self.ring, self.nrows, self.ncols)

    def entry_series(self, r, c):
        return [self.coeff(i)[r, c] for i in range(self.order)]

    def scalar_coeffs(self):
        if self.nrows != 1 or self.ncols != 1:
            raise ValidationError("not a scalar series")
        return [self.coeff(i)[0, 0] for i in range(self.order)]

    def truncate(self, order):
        return TauMatrix(self.ring, self.nrows, self.ncols, self.coeffs[:order], order)

    def is_zero(self):
        return all(not any(m.entries()) for m in self.coeffs)

    def first_nonzero_order(self):
        for i, m in enumerate(self.coeffs):
            if any(m.entries()):
                return i
        return None

    # -- arithmetic --------------------------------------------------------------

    def _common(self, other):
        if self.ring is not other.ring and self.ring != other.ring:
            raise ValidationError("series over different scalar rings")
        return min(self.order, other.order)

    def __add__(self, other):
        order = self._common(other)
        n = max(len(self.coeffs), len(other.coeffs))
        mats = [self.coeff(i) + other.coeff(i) for i in range(min(n, order))]
        return TauMatrix(self.ring, self.nrows, self.ncols, mats, order)

    def __neg__(self):
        return TauMatrix(self.ring, self.nrows, self.ncols,
                         [-m for m in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TauMatrix):
            if self.ncols != other.nrows:
                raise ValidationError("shape mismatch in series product")
            order = self._common(other)
            mats = []
            for k in range(order):
                acc = None
                for i in range(min(k + 1, len(self.coeffs))):
                    j = k - i
                    if j >= len(other.coeffs):
                        continue
                    term = self.coeffs[i] * other.coeffs[j]
                    acc = term if acc is None else acc + term
                mats.append(acc if acc is not None
                            else Mat.zeros(self.ring, self.nrows, other.ncols))
            return TauMatrix(self.ring, self.nrows, other.ncols, mats, order)
        # scalar (ring element) multiple
        return TauMatrix(self.ring, self.nrows, self.ncols,
                         [m * other for m in self.coeffs], self.order)

    def __rmul__(self, other):
        return TauMatrix(self.ring, self.nrows, self.ncols,
                         [other * m for m in self.coeffs], self.order)

    def shift_T(self, k):
        """Multiply by T^k."""
        mats = [Mat.zeros(self.ring, self.nrows, self.ncols)] * k + self.coeffs
        return TauMatrix(self.ring, self.nrows, self.ncols, mats, self.order)

    def twist(self, j=1):
        """tau action on coefficients: every scalar raised to the q^j-th power."""
        return TauMatrix(self.ring, self.nrows, self.ncols,
                         [m.coeff_twist(j) for m in self.coeffs], self.order)

    def transpose(self):
        return TauMatrix(self.ring, self.ncols, self.nrows,
                         [m.transpose() for m in self.coeffs], self.order)

    def inverse(self):
        """Series inverse; needs an invertible constant term."""
        if self.nrows != self.ncols:
            raise ValidationError("inverse of a non-square series")
        c0 = self.coeff(0)
        inv0 = c0.inverse()
        mats = [inv0]
        for m in range(1, self.order):
            acc = None
            for j in range(1, min(m, len(self.coeffs) - 1) + 1):
                term = self.coeff(j) * mats[m - j]
                acc = term if acc is None else acc + term
            mats.append(Mat.zeros(self.ring, self.nrows, self.ncols)
                        if acc is None else -(inv0 * acc))
        return TauMatrix(self.ring, self.nrows, self.ncols, mats, self.order)

    def __eq__(self, other):
        if not isinstance(other, TauMatrix):
            return NotImplemented
        order = min(self.order, other.order)
        return all(self.coeff(i) == other.coeff(i) for i in range(order))

    def __repr__(self):
        from .grammar import format_series
        if self.nrows == 1 and self.ncols == 1:
            return format_series(self.scalar_coeffs(), "T") + f"+O(T^{self.order})"
        return f"TauMatrix({self.nrows}x{self.ncols}, order {self.order})"


# ---------------------------------------------------------------------------
# theta-shift: substitute T = N + theta


def theta_shift(Y, theta, max_neg=0, den_exp=0):
    """Laurent coefficients in N of Y(T)|_{T = N + theta} / N^den_exp.

    Y is a TauMatrix (or 1x1 scalar series); theta is the scalar ring's
    generator image.  Returns a dict j -> coefficient matrix for
    j = -den_exp .. order-1-den_exp.  Each returned coefficient is the partial
    sum over the stored T-orders; callers see precision through the scalars.
    """
    if max_neg > den_exp:
        raise NotDefinedError(
            "negative shift orders beyond the declared (T-theta) denominator")
    ring = Y.ring
    out = {}
    theta_pows = [ring.one]
    for _ in range(Y.order):
        theta_pows.append(theta_pows[-1] * theta)
    p = _ring_char(ring)
    for j in range(Y.order):
        acc = None
        for i in range(j, len(Y.coeffs)):
            b = comb(i, j) % p
            if b == 0:
                continue
            term = Y.coeffs[i] * (theta_pows[i - j] * b)
            acc = term if acc is None else acc + term
        out[j - den_exp] = acc if acc is not None else Mat.zeros(ring, Y.nrows, Y.ncols)
    return out


def _ring_char(ring):
    p = getattr(ring, "p", None)
    if p is None:
        field = getattr(ring, "field", None) or getattr(ring, "base_field", None)
        p = field.p
    return p


def theta_shift_product_check(Y, Z, theta):
    """shift(Y*Z) == shift(Y)*shift(Z) through the common order (ring map law)."""
    YZ = Y * Z
    s_yz = theta_shift(YZ, theta)
    s_y = theta_shift(Y, theta)
    s_z = theta_shift(Z, theta)
    order = YZ.order
    for j in range(order):
        acc = None
        for a in range(j + 1):
            b = j - a
            if a in s_y and b in s_z:
                term = s_y[a] * s_z[b]
                acc = term if acc is None else acc + term
        lhs = s_yz[j]
        rhs = acc if acc is not None else Mat.zeros(Y.ring, Y.nrows, Z.ncols)
        if lhs != rhs:
            return False, j
    return True, None
