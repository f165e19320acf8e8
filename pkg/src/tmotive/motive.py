"""Anderson t-motive presentations: validation, ranks, the T-basis matrix Q,
Drinfeld-module normalizations and basis changes.

A motive is presented by square matrices A_0..A_k over a scalar domain, either
F_q(t) (arithmetic presentations, the ones that reduce well) or the series
model of C_inf.  Validation enforces that A_0 - theta*I is nilpotent and
A_k != 0.  The matrix Q of the tau-action on the standard T-basis
{tau^i e_j} exists when A_k = I and satisfies det Q = c (T - theta)^n.
"""

from .cinf import CinfContext
from .errors import (NotNilpotentError, UnsupportedError, ValidationError)
from .matrix import Mat
from .poly import Poly, PolyRing
from .ratfunc import RatFunc, RatFuncField


def ring_theta(ring):
    """The image of theta in a scalar domain (series context or F_q(t))."""
    if isinstance(ring, CinfContext):
        return ring.theta()
    return ring.gen()


def ring_base_field(ring):
    if isinstance(ring, CinfContext):
        return ring.base_field
    return ring.field


class TMotive:
    def __init__(self, ring, matrices):
        matrices = [m if isinstance(m, Mat) else Mat.from_lists(ring, m)
                    for m in matrices]
        if not matrices:
            raise ValidationError("need at least A_0")
        n = matrices[0].nrows
        for m in matrices:
            if not m.is_square() or m.nrows != n:
                raise ValidationError("presentation matrices must be square of equal size")
        if not any(bool(x) for x in matrices[-1].entries()):
            raise ValidationError("top coefficient A_k must be nonzero")
        self.ring = ring
        self.field = ring_base_field(ring)
        self.q = self.field.order
        self.A = matrices
        self.n = n
        self.k = len(matrices) - 1
        theta = ring_theta(ring)
        self.N = matrices[0] - Mat.identity(ring, n) * theta
        self._check_nilpotent()
        self._Q = None

    def _check_nilpotent(self):
        power = self.N
        for _ in range(self.n - 1):
            if not any(bool(x) for x in power.entries()):
                break
            power = power * self.N
        if any(bool(x) for x in power.entries()):
            raise NotNilpotentError("A_0 - theta*I is not nilpotent")

    # -- derived data -----------------------------------------------------------

    @property
    def is_arithmetic(self):
        return isinstance(self.ring, RatFuncField)

    def is_drinfeld(self):
        return self.n == 1

    def drinfeld_coeffs(self):
        """a_0..a_r for n = 1 presentations."""
        if not self.is_drinfeld():
            raise ValidationError("not a Drinfeld presentation")
        return [m[0, 0] for m in self.A]

    def top_is_identity(self):
        return self.A[-1] == Mat.identity(self.ring, self.n)

    def rank_dim(self, q_matrix=None):
        """(r, n).  r = k*n when det A_k != 0; otherwise a caller-supplied
        T-basis matrix must be given and is consistency-checked."""
        det_top = self.A[-1].det()
        if det_top:
            r = self.k * self.n
            if q_matrix is not None:
                _check_q_criterion(q_matrix, self.ring, self.n)
                if q_matrix.nrows != r:
                    raise ValidationError("supplied T-basis size disagrees with k*n")
            return r, self.n
        if q_matrix is None:
            raise UnsupportedError(
                "UNSUPPORTED: det A_k = 0 and no T-basis supplied")
        _check_q_criterion(q_matrix, self.ring, self.n)
        return q_matrix.nrows, self.n

    def companion_Q(self):
        """The r x r matrix of tau on the basis {tau^i e_j}; needs A_k = I."""
        if self._Q is not None:
            return self._Q
        if not self.top_is_identity():
            raise ValidationError("companion form needs A_k = I (normalize first)")
        ring = self.ring
        n, k = self.n, self.k
        R = PolyRing(ring, "T")
        r = k * n
        Q = [[R.zero for _ in range(r)] for _ in range(r)]
        for i in range(r - n):
            Q[i][i + n] = R.one
        T = R.gen()
        for bi in range(n):
            for bj in range(n):
                top = T * (R.one if bi == bj else R.zero) - R.coerce(self.A[0][bi, bj])
                Q[r - n + bi][bj] = top
                for blk in range(1, k):
                    Q[r - n + bi][blk * n + bj] = -R.coerce(self.A[blk][bi, bj])
        self._Q = Mat(R, Q)
        _check_q_criterion(self._Q, ring, n)
        return self._Q

    def exp_adjoint_data(self):
        """(A_0, [A_1..A_k]) for the exponential recursion."""
        return self.A[0], self.A[1:]

    def __repr__(self):
        kind = "arithmetic" if self.is_arithmetic else "analytic"
        return f"TMotive(n={self.n}, k={self.k}, {kind})"


def _check_q_criterion(Q, ring, n):
    """det Q must be c*(T-theta)^n with c a nonzero scalar."""
    det = Q.det()
    R = Q.ring
    theta = ring_theta(ring)
    lin = R.gen() - R.coerce(theta)
    rem = det
    for _ in range(n):
        rem = rem.exact_div(lin)
    if rem.degree() != 0 or not rem.const_value():
        raise ValidationError("det Q is not a scalar multiple of (T-theta)^n")
    return rem.const_value()


def q_det_scalar(Q, ring, n):
    return _check_q_criterion(Q, ring, n)


# -- canonical constructions ----------------------------------------------------


def carlitz(ring):
    """Te = theta e + tau e."""
    theta = ring_theta(ring)
    return TMotive(ring, [Mat(ring, [[theta]]), Mat(ring, [[ring.one]])])


def carlitz_twist(ring, P):
    """Te = theta e + P tau e; P != 0 in F_q(t) (or the series model)."""
    P = ring.coerce(P)
    if not P:
        raise ValidationError("twist coefficient P must be nonzero")
    theta = ring_theta(ring)
    return TMotive(ring, [Mat(ring, [[theta]]), Mat(ring, [[P]])])


def m_of_a(ring, A):
    """The rank-2n family: Te = theta e + A tau e + tau^2 e."""
    A = A if isinstance(A, Mat) else Mat.from_lists(ring, A)
    n = A.nrows
    ident = Mat.identity(ring, n)
    return TMotive(ring, [ident * ring_theta(ring), A, ident])


def is_m_of_a_shape(M):
    return (M.k == 2 and M.top_is_identity()
            and M.A[0] == Mat.identity(M.ring, M.n) * ring_theta(M.ring))


# -- Drinfeld-module algebra ------------------------------------------------------


def drinfeld_rescale(M, c):
    """Isomorphic presentation with a_i -> c^(q^i - 1) a_i (n = 1 only)."""
    if not M.is_drinfeld():
        raise ValidationError("rescale applies to n = 1 presentations")
    if not c:
        raise ValidationError("rescale constant must be nonzero")
    q = M.q
    coeffs = M.drinfeld_coeffs()
    out = [coeffs[0]]
    for i in range(1, len(coeffs)):
        out.append(c ** (q ** i - 1) * coeffs[i])
    return TMotive(M.ring, [Mat(M.ring, [[a]]) for a in out])


def drinfeld_iso_rank2(a1, a2, q):
    """Te = theta e + a tau e + tau^2 e presentations are isomorphic iff the
    ratio of the tau-coefficients is a (q+1)-th root of unity."""
    z1, z2 = not a1, not a2
    if z1 or z2:
        return z1 and z2
    rho = a2 / a1
    diff = rho ** (q + 1) - _one_like(rho)
    if hasattr(diff, "is_zero"):
        return diff.is_zero()
    return not diff


def _one_like(x):
    if isinstance(x, RatFunc):
        return x.ring.one
    return x.ctx.one


def change_basis_const(M, C):
    """A_i -> C^{-1} A_i C^(i) for a constant invertible C; needs A_0 = theta*I."""
    ident = Mat.identity(M.ring, M.n)
    if M.A[0] != ident * ring_theta(M.ring):
        raise ValidationError("constant basis change implemented for A_0 = theta*I")
    C = C if isinstance(C, Mat) else Mat.from_lists(M.ring, C)
    Cinv = C.inverse()
    out = [M.A[0]]
    for i in range(1, len(M.A)):
        out.append(Cinv * M.A[i] * C.coeff_twist(i))
    return TMotive(M.ring, out)


def normalize_top(M):
    """Isomorphic Drinfeld presentation with a_r = 1, via c^(q^r - 1) = a_r^{-1}.

    Root extraction happens in the series model, so M must be analytic; the
    coefficient field may grow (Lang normalization is constructive for n = 1).
    """
    if not M.is_drinfeld():
        raise UnsupportedError("NO_ALGORITHM: constructive normalization only for n = 1")
    if not isinstance(M.ring, CinfContext):
        raise ValidationError("normalize_top needs the series domain (roots required)")
    coeffs = M.drinfeld_coeffs()
    a_r = coeffs[-1]
    one = M.ring.one
    if a_r == one:
        return M
    r = M.k
    c = a_r.invert().nth_root(M.q ** r - 1)
    return drinfeld_rescale(M, c)


def isomorphism_test(M1, M2):
    """General isomorphism over GL_n(C_inf{tau}) is refused: no algorithm."""
    raise UnsupportedError("NO_ALGORITHM: general t-motive isomorphism is undecided")


# -- definition-file round-trip ----------------------------------------------------


def dump_motive(M, precision=None):
    """Serialize to the definition-file format (lossless round-trip)."""
    from .grammar import format_scalar
    lines = []
    f = M.field
    if f.k > 1:
        mod = ",".join(str(c) for c in f.modulus)
        lines.append(f"field p={f.p} e={f.k} modulus={mod}")
    else:
        lines.append(f"field p={f.p} e=1")
    if M.is_arithmetic:
        lines.append("domain rational")
    else:
        ctx = M.ring
        lines.append(f"domain cinf precision={ctx.precision} s_cap={ctx.s_cap}")
    for i, mat in enumerate(M.A):
        lines.append(f"matrix A{i} {mat.nrows} {mat.ncols}")
        for row in mat.rows:
            for entry in row:
                lines.append(format_scalar(entry))
    return "\n".join(lines) + "\n"


def load_motive(text):
    """Parse the definition-file format produced by dump_motive."""
    from .errors import ParseError
    from .grammar import parse_cinf, parse_ratfunc
    from .ff import FiniteField
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("field"):
        raise ParseError("definition file must start with a field block", line=1)
    opts = _parse_kv(lines[0][len("field"):])
    p = int(opts["p"])
    e = int(opts.get("e", "1"))
    modulus = None
    if "modulus" in opts:
        modulus = tuple(int(x) for x in opts["modulus"].split(","))
    idx = 1
    if idx >= len(lines) or not lines[idx].startswith("domain"):
        raise ParseError("missing domain block", line=2)
    dom_parts = lines[idx].split()
    domain = dom_parts[1]
    dom_opts = _parse_kv(" ".join(dom_parts[2:]))
    idx += 1
    field = FiniteField.get(p, e, modulus)
    if domain == "rational":
        ring = RatFuncField(field)
        parse_entry = lambda s: parse_ratfunc(s, ring)
    elif domain == "cinf":
        from fractions import Fraction
        ring = CinfContext(p, e, modulus=modulus,
                           precision=Fraction(dom_opts.get("precision", "64")),
                           s_cap=int(dom_opts.get("s_cap", "8")))
        parse_entry = lambda s: parse_cinf(s, ring)
    else:
        raise ParseError(f"unknown domain {domain!r}")
    matrices = []
    expect = 0
    while idx < len(lines):
        header = lines[idx].split()
        if header[0] != "matrix" or len(header) != 4:
            raise ParseError(f"expected matrix header, got {lines[idx]!r}", line=idx + 1)
        tag, nr, nc = header[1], int(header[2]), int(header[3])
        if tag != f"A{expect}":
            raise ParseError(f"matrices must appear in order, expected A{expect}", line=idx + 1)
        idx += 1
        rows = []
        for _ in range(nr):
            row = []
            for _ in range(nc):
                if idx >= len(lines):
                    raise ParseError("truncated matrix block", line=idx + 1)
                row.append(parse_entry(lines[idx]))
                idx += 1
            rows.append(row)
        matrices.append(Mat(ring, rows))
        expect += 1
    return TMotive(ring, matrices)


def _parse_kv(s):
    out = {}
    for part in s.split():
        if "=" in part:
            k, v = part.split("=", 1)
            out[k] = v
    return out
