"""Generic dense univariate polynomials over an exact coefficient ring.

The same class carries F_q[t] (variable `t` standing for the base-ring
generator theta), F_q[T], polynomials over residue fields, rational functions
or series elements.  A ring handle supplies `zero`, `one`, `coerce`, and a
Frobenius hook `frob(x, j)` raising a coefficient to the q^j-th power, which
is what coefficientwise twisting a^(k) needs.
"""

from .errors import ValidationError

try:  # only needed for the q-power "element Frobenius" shortcut
    from .ff import FF, FiniteField
except ImportError:  # pragma: no cover
    FF = FiniteField = None


class Poly:
    __slots__ = ("ring", "var", "coeffs")

    def __init__(self, ring, var, coeffs):
        coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.ring = ring
        self.var = var
        self.coeffs = coeffs

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(ring, var, c):
        return Poly(ring, var, [ring.coerce(c)])

    @staticmethod
    def zero(ring, var):
        return Poly(ring, var, [])

    @staticmethod
    def one(ring, var):
        return Poly(ring, var, [ring.one])

    @staticmethod
    def gen(ring, var):
        return Poly(ring, var, [ring.zero, ring.one])

    @staticmethod
    def monomial(ring, var, c, d):
        return Poly(ring, var, [ring.zero] * d + [ring.coerce(c)])

    # -- structure ----------------------------------------------------------

    def degree(self):
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def lead(self):
        if not self.coeffs:
            raise ValidationError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.ring.zero

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == self.ring.one

    def is_const(self):
        return len(self.coeffs) <= 1

    def const_value(self):
        return self.coeffs[0] if self.coeffs else self.ring.zero

    def map_coeffs(self, fn):
        return Poly(self.ring, self.var, [fn(c) for c in self.coeffs])

    # -- ring operations ----------------------------------------------------

    def _coerce_other(self, other):
        if isinstance(other, Poly):
            if other.var != self.var:
                raise ValidationError(f"variable mismatch {self.var} vs {other.var}")
            return other
        return Poly.const(self.ring, self.var, other)

    def __add__(self, other):
        other = self._coerce_other(other)
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.ring.zero
        a = self.coeffs + [z] * (n - len(self.coeffs))
        b = other.coeffs + [z] * (n - len(other.coeffs))
        return Poly(self.ring, self.var, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, self.var, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce_other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.ring.coerce(other)
            return Poly(self.ring, self.var, [x * c for x in self.coeffs])
        other = self._coerce_other(other)
        if not self.coeffs or not other.coeffs:
            return Poly.zero(self.ring, self.var)
        z = self.ring.zero
        out = [z] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(other.coeffs):
                if y:
                    out[i + j] = out[i + j] + x * y
        return Poly(self.ring, self.var, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValidationError("negative power of a polynomial")
        result = Poly.one(self.ring, self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce_other(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        inv_lead = self.ring.one / other.lead()
        q = Poly.zero(self.ring, self.var)
        r = self
        d = other.degree()
        while not r.is_zero() and r.degree() >= d:
            c = r.lead() * inv_lead
            shift = r.degree() - d
            term = Poly.monomial(self.ring, self.var, c, shift)
            q = q + term
            r = r - term * other
        return q, r

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValidationError("division is not exact")
        return q

    def __truediv__(self, other):
        """Exact division only; use RatFunc for genuine fractions."""
        return self.exact_div(self._coerce_other(other))

    def monic(self):
        if self.is_zero():
            return self
        return self * (self.ring.one / self.lead())

    def gcd(self, other):
        a, b = self, self._coerce_other(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def eval(self, x):
        """Horner evaluation; x may live in any ring accepting the coefficients."""
        if not self.coeffs:
            return x * 0
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return acc

    def shift_var(self, amount):
        """Multiply by var^amount (amount >= 0)."""
        if self.is_zero():
            return self
        return Poly(self.ring, self.var, [self.ring.zero] * amount + self.coeffs)

    # -- Frobenius ----------------------------------------------------------

    def coeff_twist(self, j):
        """a^(j): every coefficient raised to the q^j-th power, degrees kept."""
        if j == 0:
            return self
        return self.map_coeffs(lambda c: self.ring.frob(c, j))

    def element_frob(self, j, q):
        """The polynomial itself raised to the q^j-th power (freshman's dream)."""
        if j == 0 or self.is_zero():
            return self
        step = q ** j
        out = [self.ring.zero] * (self.degree() * step + 1)
        for i, c in enumerate(self.coeffs):
            if c:
                out[i * step] = self.ring.frob(c, j)
        return Poly(self.ring, self.var, out)

    # -- comparison / display ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.var == other.var and self.coeffs == other.coeffs
        if not self.coeffs:
            return not other
        return self.is_const() and self.coeffs[0] == other

    def __hash__(self):
        return hash((self.var, tuple(self.coeffs)))

    def __repr__(self):
        from .grammar import format_poly
        return format_poly(self)


# ---------------------------------------------------------------------------
# ring handle for F_q-coefficient polynomials and enumeration of primes


class PolyRing:
    """Handle making Poly(ring=coeff) usable itself as a matrix/series ring."""

    def __init__(self, coeff_ring, var):
        self.coeff_ring = coeff_ring
        self.var = var
        self.zero = Poly.zero(coeff_ring, var)
        self.one = Poly.one(coeff_ring, var)

    def coerce(self, v):
        if isinstance(v, Poly) and v.var == self.var:
            return v
        return Poly.const(self.coeff_ring, self.var, v)

    def gen(self):
        return Poly.gen(self.coeff_ring, self.var)

    def frob(self, x, j):
        return x.coeff_twist(j)

    def exact_div(self, a, b):
        return a.exact_div(b)

    def __repr__(self):
        return f"{self.coeff_ring!r}[{self.var}]"

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.var == other.var
                and self.coeff_ring == other.coeff_ring)

    def __hash__(self):
        return hash((self.coeff_ring, self.var))


def theta_ring(field):
    """F_q[t] with t the transcendental generator (theta)."""
    return PolyRing(field, "t")


def is_irreducible(f):
    """Rabin-style trial-gcd irreducibility over a finite coefficient field.

    f irreducible of degree d iff it shares no factor with x^{q^i} - x for
    i <= d/2; each gcd is taken after modular exponentiation.
    """
    field = f.ring
    d = f.degree()
    if d < 1:
        return False
    if not f.coeff(0):
        return d == 1
    q = field.order
    x = Poly.gen(field, f.var)
    xq = x
    for _ in range(d // 2):
        xq = _powmod(xq, q, f)
        g = f.gcd(xq - x)
        if g.degree() >= 1:
            return False
    return True


def _powmod(base, e, m):
    result = Poly.one(base.ring, base.var)
    base = base % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def monic_polys_of_degree(field, d):
    """All monic degree-d polynomials over field, in integer-encoding order."""
    q = field.order
    out = []
    for m in range(q ** d):
        coeffs = []
        v = m
        for _ in range(d):
            coeffs.append(field.element_from_int(v % q))
            v //= q
        out.append(Poly(field, "t", coeffs + [field.one]))
    return out


def enumerate_monic_irreducibles(field, d_max):
    """All monic irreducible polynomials of degree <= d_max over F_q.

    Ordered by (degree, integer encoding); each appears exactly once.
    """
    if d_max < 1:
        raise ValidationError("d_max must be >= 1")
    out = []
    for d in range(1, d_max + 1):
        for f in monic_polys_of_degree(field, d):
            if is_irreducible(f):
                out.append(f)
    return out
