"""Tensor products, Carlitz powers, exterior powers, duality and the Xi series.

Tensor and exterior results are carried in the T-presentation only: an r x r
matrix Q over the T-polynomial ring with det Q = c (T-theta)^n.  The two
explicit tau-presentations (Carlitz powers and Drinfeld (x) Drinfeld on the
listed basis) are reconstructed by solving a linear system for the A_i.
"""

from .errors import InternalDefect, UnsupportedError, ValidationError
from .matrix import Mat, solve_field_system
from .motive import TMotive, ring_theta
from .poly import Poly, PolyRing
from .tauseries import TauMatrix


class TPresentation:
    """A t-motive given by its T-basis matrix Q; rank and dimension derived."""

    def __init__(self, ring, Q):
        self.ring = ring
        self.Q = Q
        self.r = Q.nrows
        self.n, self.det_scalar = dim_from_Q(Q, ring)

    def __repr__(self):
        return f"TPresentation(r={self.r}, n={self.n})"


def dim_from_Q(Q, ring):
    """(n, c) with det Q = c (T-theta)^n; fails if det is not of this shape."""
    if not Q.is_square():
        raise ValidationError("Q must be square")
    det = Q.det()
    if not det:
        raise ValidationError("Q is singular")
    R = Q.ring
    lin = R.gen() - R.coerce(ring_theta(ring))
    n = 0
    while True:
        q, rem = divmod(det, lin)
        if not rem.is_zero():
            break
        det = q
        n += 1
    if det.degree() != 0:
        raise ValidationError("det Q is not c*(T-theta)^n")
    return n, det.const_value()


def q_of(m):
    """Companion Q of a TMotive, or the Q already carried by a TPresentation."""
    if isinstance(m, TPresentation):
        return m.Q
    return m.companion_Q()


def tensor(m1, m2):
    """T-presentation of the tensor product: Q = Q_1 (x) Q_2."""
    Q1, Q2 = q_of(m1), q_of(m2)
    ring = m1.ring
    out = TPresentation(ring, Q1.kron(Q2))
    return out


def carlitz_power(ring, n):
    """tau-presentation of the n-th Carlitz tensor power: A_0 = theta*I + N
    (N the one-step shift), A_1 = epsilon_{n,1}."""
    if n < 1:
        raise ValidationError("power must be >= 1")
    theta = ring_theta(ring)
    a0 = [[theta if i == j else (ring.one if j == i + 1 else ring.zero)
           for j in range(n)] for i in range(n)]
    a1 = [[ring.one if (i == n - 1 and j == 0) else ring.zero
           for j in range(n)] for i in range(n)]
    return TMotive(ring, [Mat(ring, a0), Mat(ring, a1)])


def carlitz_power_tpresentation(ring, n):
    """The same motive in its rank-1 T-presentation: Q = (T - theta)^n."""
    R = PolyRing(ring, "T")
    lin = R.gen() - R.coerce(ring_theta(ring))
    return TPresentation(ring, Mat(R, [[lin ** n]]))


def exterior_power(m, k):
    """k-th exterior power of a rank-r Drinfeld presentation via the k-th
    compound of Q; rank C(r,k), dimension C(r-1,k-1)."""
    Q = q_of(m)
    r = Q.nrows
    if not 1 <= k <= r:
        raise ValidationError("exterior power order out of range")
    return TPresentation(m.ring, Q.compound(k))


# ---------------------------------------------------------------------------
# duality at the presentation level


class RationalQ:
    """num / (T-theta)^den_exp with num a T-polynomial matrix; minimal den_exp."""

    def __init__(self, ring, num, den_exp, target_dim=None):
        R = num.ring
        lin = R.gen() - R.coerce(ring_theta(ring))
        while den_exp > 0:
            try:
                num = num.map(lambda e: e.exact_div(lin))
                den_exp -= 1
            except ValidationError:
                break
        self.ring = ring
        self.num = num
        self.den_exp = den_exp
        self.r = num.nrows
        self.target_dim = target_dim

    def inverse_transpose(self):
        """(self^t)^{-1}, staying in the (T-theta)-denominator form."""
        Nt = self.num.transpose()
        n_pole, c = dim_from_Q(Nt, self.ring)
        R = Nt.ring
        adj = _adjugate(Nt)
        c_inv = self.ring.one / c
        num = adj.map(lambda e: e * R.coerce(c_inv))
        # (N^t/(T-th)^d)^{-1} = adj(N^t) (T-th)^d / (c (T-th)^{n_pole})
        lin = R.gen() - R.coerce(ring_theta(self.ring))
        d = self.den_exp
        if d >= n_pole:
            num = num.map(lambda e: e * lin ** (d - n_pole))
            return RationalQ(self.ring, num, 0)
        return RationalQ(self.ring, num, n_pole - d)

    def as_polynomial_matrix(self):
        if self.den_exp != 0:
            raise ValidationError("presentation has (T-theta) denominators")
        return self.num

    def __eq__(self, other):
        return (isinstance(other, RationalQ) and self.den_exp == other.den_exp
                and self.num == other.num)

    def __repr__(self):
        return f"RationalQ(r={self.r}, den_exp={self.den_exp})"


def _adjugate(M):
    n = M.nrows
    if n == 1:
        return Mat(M.ring, [[M.ring.one]])
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            rs = [a for a in range(n) if a != j]
            cs = [b for b in range(n) if b != i]
            cof = M.minor(rs, cs)
            if (i + j) % 2 == 1:
                cof = -cof
            row.append(cof)
        rows.append(row)
    return Mat(M.ring, rows)


def dual_presentation(m):
    """Q' = (Q^t)^{-1} over the fraction field, denominators powers of
    (T-theta); records the dual's dimension r - n."""
    if isinstance(m, RationalQ):
        return m.inverse_transpose()
    Q = q_of(m)
    ring = m.ring
    n, _ = dim_from_Q(Q, ring)
    base = RationalQ(ring, Q, 0)
    out = base.inverse_transpose()
    out.target_dim = Q.nrows - n
    return out


# ---------------------------------------------------------------------------
# explicit tau-presentations from a T-presentation basis


def tau_presentation_from_basis(ring, Q, basis_coords, k_max=6):
    """Solve T*v_m = sum_i A_i tau^i(v_m) for the matrices A_i.

    Q is the tau-matrix on the ambient T-basis; basis_coords lists the
    candidate tau-basis elements as coordinate vectors of T-polynomials.
    Returns the TMotive on that basis.  Raises if no presentation of
    tau-degree <= k_max exists (the basis claim fails).
    """
    R = Q.ring
    nb = len(basis_coords)
    Qt = Q.transpose()

    def tau_coords(vec):
        twisted = [c.coeff_twist(1) for c in vec]
        return [_dot_poly(Qt.rows[i], twisted, R) for i in range(len(vec))]

    towers = [[list(v)] for v in basis_coords]  # towers[j][i] = coords of tau^i v_j
    for k in range(1, k_max + 1):
        for j in range(nb):
            towers[j].append(tau_coords(towers[j][-1]))
        A, ok = _solve_presentation(ring, R, basis_coords, towers, k)
        if ok:
            return TMotive(ring, A)
    raise UnsupportedError("no tau-presentation of bounded degree on this basis")


def _dot_poly(row, vec, R):
    acc = R.zero
    for a, b in zip(row, vec):
        acc = acc + a * b
    return acc


def _solve_presentation(ring, R, basis_coords, towers, k):
    nb = len(basis_coords)
    T = R.gen()
    max_deg = 0
    cols = []
    for j in range(nb):
        for i in range(k + 1):
            cols.append(towers[j][i])
    targets = [[T * c for c in v] for v in basis_coords]
    for vec in cols + [t for t in targets]:
        for c in vec:
            max_deg = max(max_deg, c.degree())

    def flatten(vec):
        out = []
        for c in vec:
            for d in range(max_deg + 1):
                out.append(c.coeff(d))
        return out

    col_flat = [flatten(v) for v in cols]
    rows = [list(r) for r in zip(*col_flat)]  # equations x unknowns
    A_mats = [[[ring.zero] * nb for _ in range(nb)] for _ in range(k + 1)]
    for m in range(nb):
        sol = solve_field_system(ring, rows, flatten(targets[m]))
        if sol is None:
            return None, False
        idx = 0
        for j in range(nb):
            for i in range(k + 1):
                A_mats[i][m][j] = sol[idx]
                idx += 1
    mats = [Mat(ring, a) for a in A_mats]
    while len(mats) > 1 and not any(bool(x) for x in mats[-1].entries()):
        mats.pop()
    if len(mats) == 1:
        return None, False
    try:
        return mats, True
    except ValidationError:  # pragma: no cover
        return None, False


def drinfeld_tensor_tau_basis(m1, m2):
    """tau-presentation of M_1 (x) M_2 for Drinfeld factors, on the basis

        e1(x)e2, e1(x)tau e2, ..., e1(x)tau^{r2-1} e2,
        tau e1(x)e2, ..., tau^{r1-1} e1(x)e2,  (T-theta)(e1(x)e2).

    The nilpotent part comes out as epsilon_{1, r1+r2}.
    """
    if not (m1.is_drinfeld() and m2.is_drinfeld()):
        raise ValidationError("both factors must be Drinfeld presentations")
    ring = m1.ring
    Q1, Q2 = m1.companion_Q(), m2.companion_Q()
    r1, r2 = Q1.nrows, Q2.nrows
    Q = Q1.kron(Q2)
    R = Q.ring
    theta = R.coerce(ring_theta(ring))
    dim = r1 * r2

    def unit(idx):
        return [R.one if a == idx else R.zero for a in range(dim)]

    basis = []
    for j in range(r2):
        basis.append(unit(j))              # e1 (x) tau^j e2  ->  index 0*r2 + j
    for i in range(1, r1):
        basis.append(unit(i * r2))         # tau^i e1 (x) e2
    tminus = [ (R.gen() - theta) * c for c in unit(0)]
    basis.append(tminus)                   # (T-theta)(e1 (x) e2)
    return tau_presentation_from_basis(ring, Q, basis, k_max=max(r1, r2) + 1)


# ---------------------------------------------------------------------------
# the Xi series and scattering duality


def xi_series(ctx, order, precision=None):
    """Xi = c (1 - theta^{-1} T)(1 - theta^{-q} T)... with c^(q-1) = -theta^{-1};
    satisfies Xi = (T - theta) Xi^(1).  Returned as a 1 x 1 TauMatrix whose
    coefficients are certified modulo the working precision (factors beyond
    the precision horizon cannot affect stored terms)."""
    if order < 1:
        raise ValidationError("order must be >= 1")
    q = ctx.q
    prec = precision if precision is not None else ctx.precision
    J = 1
    while q ** J < prec:
        J += 1
    c = (-ctx.theta()).invert()
    if q > 2:
        c = c.nth_root(q - 1)
    # fix the F_q^* ambiguity: scale to the smallest leading coefficient
    alpha, lead = c.leading()
    best = None
    for m in range(1, ctx.base_field.order):
        u = ctx.base_field.element_from_int(m)
        cand = lead * u
        if best is None or cand.to_int() < best[0]:
            best = (cand.to_int(), u)
    c = c * ctx.from_ff(best[1])
    coeffs = [c.with_precision(prec)] + [ctx.zero.with_precision(prec)] * (order - 1)
    for j in range(J + 1):
        factor1 = ctx.theta(-(q ** j))  # theta^{-q^j}
        new = list(coeffs)
        for i in range(order - 1, 0, -1):
            new[i] = (coeffs[i] - factor1 * coeffs[i - 1]).with_precision(prec)
        coeffs = new
    return TauMatrix.from_scalar_series(ctx, coeffs, order)


def xi_relation_residual(xi, ctx):
    """First T-order where Xi - (T-theta) Xi^(1) has a nonzero coefficient, or None."""
    order = xi.order
    a = xi.scalar_coeffs()
    tw = [x.frob(1) for x in a]
    theta = ctx.theta()
    for i in range(order):
        lhs = a[i]
        rhs = (tw[i - 1] if i >= 1 else ctx.zero) - theta * tw[i]
        if not (lhs - rhs).is_zero():
            return i
    return None


def scale_by_scalar_series(mat_series, scalar_series):
    """Multiply a matrix series by a 1 x 1 series."""
    s = scalar_series.scalar_coeffs()
    n = mat_series.nrows
    diag = TauMatrix(mat_series.ring, n, n,
                     [Mat.identity(mat_series.ring, n) * c for c in s],
                     min(mat_series.order, scalar_series.order))
    return diag * mat_series


def psi_dual(psi, xi):
    """Psi' = Xi^{-1} (Psi^t)^{-1}; contract: Psi'^t * Psi * Xi = I."""
    inv = psi.transpose().inverse()
    return scale_by_scalar_series(inv, xi.inverse())


def psi_dual_contract_residual(psi, psi_dual_m, xi):
    """First failing T-order of Psi'^t Psi Xi = I, or None when it holds."""
    prod = scale_by_scalar_series(psi_dual_m.transpose() * psi, xi)
    ident = TauMatrix.identity(prod.ring, prod.nrows, prod.order)
    diff = prod - ident
    return diff.first_nonzero_order()
