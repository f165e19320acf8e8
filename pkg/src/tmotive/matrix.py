"""Exact matrices over any of the package's coefficient rings.

Determinants use fraction-free Bareiss elimination (exact division via the
ring handle when entries are polynomials, plain division over fields), so the
same code serves F_q, residue fields, F_q(t), C_inf-model elements and
T-polynomial entries.  Sizes stay at desk scale; no attempt at asymptotics.
"""

from itertools import combinations

from .errors import ValidationError


class Mat:
    __slots__ = ("ring", "rows")

    def __init__(self, ring, rows):
        rows = [list(r) for r in rows]
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise ValidationError("ragged matrix")
        self.ring = ring
        self.rows = rows

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_lists(ring, rows):
        return Mat(ring, [[ring.coerce(x) for x in r] for r in rows])

    @staticmethod
    def identity(ring, n):
        return Mat(ring, [[ring.one if i == j else ring.zero for j in range(n)]
                          for i in range(n)])

    @staticmethod
    def zeros(ring, n, m=None):
        m = n if m is None else m
        return Mat(ring, [[ring.zero] * m for _ in range(n)])

    # -- shape ---------------------------------------------------------------

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def is_square(self):
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for r in self.rows:
            yield from r

    def copy_rows(self):
        return [list(r) for r in self.rows]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValidationError("shape mismatch in addition")
        return Mat(self.ring, [[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Mat(self.ring, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise ValidationError("shape mismatch in product")
            bt = list(zip(*other.rows))
            out = []
            for r in self.rows:
                out.append([_dot(r, col, self.ring) for col in bt])
            return Mat(self.ring, out)
        return Mat(self.ring, [[a * other for a in r] for r in self.rows])

    def __rmul__(self, other):
        return Mat(self.ring, [[other * a for a in r] for r in self.rows])

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def transpose(self):
        return Mat(self.ring, [list(col) for col in zip(*self.rows)])

    def map(self, fn):
        return Mat(self.ring, [[fn(a) for a in r] for r in self.rows])

    def coeff_twist(self, j):
        """Entrywise Frobenius twist via the ring handle."""
        if j == 0:
            return self
        return self.map(lambda a: self.ring.frob(a, j))

    def __repr__(self):
        body = "; ".join(", ".join(repr(a) for a in r) for r in self.rows)
        return f"Mat[{body}]"

    # -- multilinear algebra --------------------------------------------------

    def kron(self, other):
        """Kronecker product (row-major block layout)."""
        out = []
        for r1 in self.rows:
            for r2 in other.rows:
                out.append([a * b for a in r1 for b in r2])
        return Mat(self.ring, out)

    def minor(self, rows_idx, cols_idx):
        sub = Mat(self.ring, [[self.rows[i][j] for j in cols_idx] for i in rows_idx])
        return sub.det()

    def compound(self, k):
        """k-th compound: matrix of all k x k minors, index sets in lex order."""
        n = self.nrows
        if not self.is_square():
            raise ValidationError("compound of a non-square matrix")
        if not 1 <= k <= n:
            raise ValidationError("compound order out of range")
        subsets = list(combinations(range(n), k))
        return Mat(self.ring, [[self.minor(rs, cs) for cs in subsets] for rs in subsets])

    # -- elimination ----------------------------------------------------------

    def det(self):
        """Fraction-free Bareiss determinant (exact over integral domains)."""
        if not self.is_square():
            raise ValidationError("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return self.ring.one
        a = self.copy_rows()
        exact_div = getattr(self.ring, "exact_div", lambda x, y: x / y)
        sign = 1
        prev = self.ring.one
        for k in range(n - 1):
            if not a[k][k]:
                pivot_row = next((i for i in range(k + 1, n) if a[i][k]), None)
                if pivot_row is None:
                    return self.ring.zero
                a[k], a[pivot_row] = a[pivot_row], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                    a[i][j] = exact_div(num, prev)
                a[i][k] = self.ring.zero
            prev = a[k][k]
        d = a[n - 1][n - 1]
        return d if sign == 1 else -d

    def rank(self):
        """Rank by Gaussian elimination; requires field entries."""
        a = self.copy_rows()
        nr, nc = self.nrows, self.ncols
        rank = 0
        row = 0
        for col in range(nc):
            piv = next((i for i in range(row, nr) if a[i][col]), None)
            if piv is None:
                continue
            a[row], a[piv] = a[piv], a[row]
            inv = self.ring.one / a[row][col]
            a[row] = [x * inv for x in a[row]]
            for i in range(nr):
                if i != row and a[i][col]:
                    c = a[i][col]
                    a[i] = [x - c * y for x, y in zip(a[i], a[row])]
            row += 1
            rank += 1
            if row == nr:
                break
        return rank

    def inverse(self):
        """Gauss-Jordan inverse; requires field entries."""
        if not self.is_square():
            raise ValidationError("inverse of a non-square matrix")
        n = self.nrows
        a = self.copy_rows()
        b = Mat.identity(self.ring, n).copy_rows()
        for col in range(n):
            piv = next((i for i in range(col, n) if a[i][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            inv = self.ring.one / a[col][col]
            a[col] = [x * inv for x in a[col]]
            b[col] = [x * inv for x in b[col]]
            for i in range(n):
                if i != col and a[i][col]:
                    c = a[i][col]
                    a[i] = [x - c * y for x, y in zip(a[i], a[col])]
                    b[i] = [x - c * y for x, y in zip(b[i], b[col])]
        return Mat(self.ring, b)

    def solve(self, rhs_cols):
        """Solve self * X = rhs (both matrices); requires field entries."""
        return self.inverse() * rhs_cols

    def charpoly_rev(self, var="X"):
        """det(I - self*X) as a polynomial in X via principal-minor sums."""
        from .poly import Poly
        if not self.is_square():
            raise ValidationError("characteristic data of a non-square matrix")
        n = self.nrows
        coeffs = [self.ring.one]
        for k in range(1, n + 1):
            s = self.ring.zero
            for idx in combinations(range(n), k):
                s = s + self.minor(idx, idx)
            sign = self.ring.one if k % 2 == 0 else -self.ring.one
            coeffs.append(sign * s)
        return Poly(_ScalarWrap(self.ring), var, coeffs)


class _ScalarWrap:
    """Minimal ring handle exposing a ring's scalars to Poly."""

    def __init__(self, ring):
        self._ring = ring
        self.zero = ring.zero
        self.one = ring.one

    def coerce(self, v):
        return self._ring.coerce(v)

    def frob(self, x, j):
        return self._ring.frob(x, j)

    def __eq__(self, other):
        return isinstance(other, _ScalarWrap) and self._ring == other._ring

    def __hash__(self):
        return hash(("wrap", self._ring))


def _dot(row, col, ring):
    acc = ring.zero
    for a, b in zip(row, col):
        acc = acc + a * b
    return acc


def solve_field_system(ring, rows, rhs):
    """One solution of rows * x = rhs over a field ring, or None if inconsistent.

    rows: list of coefficient lists; rhs: list.  Free variables are set to 0.
    """
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(nc):
        piv = next((i for i in range(row, nr) if a[i][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = ring.one / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for i in range(nr):
            if i != row and a[i][col]:
                c = a[i][col]
                a[i] = [x - c * y for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
        if row == nr:
            break
    for i in range(row, nr):
        if a[i][nc]:
            return None
    x = [ring.zero] * nc
    for i, col in enumerate(pivots):
        x[col] = a[i][nc]
    return x


def frobenius_twist(x, j):
    """x^(j) for matrices and polynomials: coefficientwise q^j-th powers."""
    return x.coeff_twist(j)


def frobenius_product(A, k):
    """A^[k] = A^(k-1) * ... * A^(1) * A (ordered Frobenius product)."""
    if not A.is_square():
        raise ValidationError("Frobenius product needs a square matrix")
    if k < 1:
        raise ValidationError("Frobenius product needs k >= 1")
    out = A
    for j in range(1, k):
        out = A.coeff_twist(j) * out
    return out
