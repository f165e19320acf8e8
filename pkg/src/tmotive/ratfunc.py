"""F_q(t): rational functions in theta, and residue fields F_q[t]/P.

RatFunc is kept normalized (monic denominator, gcd 1) so equality is
structural.  v_inf is deg(den) - deg(num), the valuation with v_inf(t) = -1.
ResidueField reuses the polynomial representation with reduction after each
multiplication; it is the coefficient ring of reduced T-matrices.
"""

from .errors import BadPrimeError, ValidationError
from .poly import Poly, PolyRing


class RatFuncField:
    """Ring handle for F_q(t)."""

    def __init__(self, field, var="t"):
        self.field = field
        self.var = var
        self.poly_ring = PolyRing(field, var)
        self.zero = RatFunc(self, self.poly_ring.zero, self.poly_ring.one)
        self.one = RatFunc(self, self.poly_ring.one, self.poly_ring.one)

    def coerce(self, v):
        if isinstance(v, RatFunc):
            if v.ring.field == self.field and v.ring.var == self.var:
                return v
            raise ValidationError("rational function from a different field")
        if isinstance(v, Poly):
            if v.var != self.var:
                raise ValidationError(f"variable mismatch {v.var} vs {self.var}")
            return RatFunc(self, v, self.poly_ring.one)
        return RatFunc(self, self.poly_ring.coerce(v), self.poly_ring.one)

    def gen(self):
        return self.coerce(self.poly_ring.gen())

    def frob(self, x, j):
        """x^(q^j) as an element of F_q(t)."""
        q = self.field.order
        return RatFunc(self, x.num.element_frob(j, q), x.den.element_frob(j, q))

    def __eq__(self, other):
        return (isinstance(other, RatFuncField) and self.field == other.field
                and self.var == other.var)

    def __hash__(self):
        return hash((self.field, self.var, "ratfunc"))

    def __repr__(self):
        return f"{self.field!r}({self.var})"


class RatFunc:
    __slots__ = ("ring", "num", "den")

    def __init__(self, ring, num, den, normalize=True):
        if normalize:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            g = num.gcd(den)
            if g.degree() > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            if not den.is_monic():
                c = den.lead()
                num = num * (ring.field.one / c)
                den = den.monic()
        self.ring = ring
        self.num = num
        self.den = den

    def _coerce(self, other):
        return other if isinstance(other, RatFunc) else self.ring.coerce(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RatFunc(self.ring, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.ring, -self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.ring, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.ring, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return (self.ring.one / self) ** (-e)
        return RatFunc(self.ring, self.num ** e, self.den ** e)

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        try:
            o = self.ring.coerce(other)
        except (ValidationError, TypeError):
            return NotImplemented
        return self == o

    def __hash__(self):
        return hash((self.num, self.den))

    def is_polynomial(self):
        return self.den.degree() == 0

    def v_inf(self):
        """deg(den) - deg(num); None for 0 (valuation +infinity)."""
        if self.num.is_zero():
            return None
        return self.den.degree() - self.num.degree()

    def reduce_mod(self, residue_field):
        """Image in F_q[t]/P; BadPrimeError on a pole at P."""
        return residue_field.coerce(self)

    def is_integral_at(self, P):
        """True when the denominator is coprime to the prime P."""
        return self.den.gcd(P).degree() == 0

    def __repr__(self):
        from .grammar import format_ratfunc
        return format_ratfunc(self)


# ---------------------------------------------------------------------------


class ResidueField:
    """F_q[t]/P for monic irreducible P: a field of order q^deg(P)."""

    def __init__(self, P):
        from .poly import is_irreducible
        if not P.is_monic() or not is_irreducible(P):
            raise ValidationError("modulus must be monic irreducible")
        self.P = P
        self.base = P.ring
        self.base_order = self.base.order
        self.d = P.degree()
        self.order = self.base_order ** self.d
        self.zero = ResidueElem(self, Poly.zero(self.base, P.var))
        self.one = ResidueElem(self, Poly.one(self.base, P.var))

    def coerce(self, v):
        if isinstance(v, ResidueElem):
            if v.field.P == self.P:
                return v
            raise ValidationError("element of a different residue field")
        if isinstance(v, RatFunc):
            num = self.coerce(v.num)
            den = self.coerce(v.den)
            if not den:
                raise BadPrimeError(f"pole at {self.P!r}", reason="non-integral")
            return num / den
        if isinstance(v, Poly):
            return ResidueElem(self, v % self.P)
        return ResidueElem(self, Poly.const(self.base, self.P.var, v))

    def theta(self):
        """The residue class of t."""
        return ResidueElem(self, Poly.gen(self.base, self.P.var))

    def frob(self, x, j):
        """x^(q^j) with q the order of the base field (twist semantics)."""
        return x ** pow(self.base_order, j, self.order - 1) if x and j else x

    def elements(self):
        out = []
        for m in range(self.order):
            coeffs = []
            v = m
            for _ in range(self.d):
                coeffs.append(self.base.element_from_int(v % self.base_order))
                v //= self.base_order
            out.append(ResidueElem(self, Poly(self.base, self.P.var, coeffs)))
        return out

    def __eq__(self, other):
        return isinstance(other, ResidueField) and self.P == other.P

    def __hash__(self):
        return hash(("residue", self.P))

    def __repr__(self):
        return f"F[{self.P!r}]"


class ResidueElem:
    __slots__ = ("field", "rep")

    def __init__(self, field, rep):
        self.field = field
        self.rep = rep

    def _coerce(self, other):
        return other if isinstance(other, ResidueElem) else self.field.coerce(other)

    def __add__(self, other):
        o = self._coerce(other)
        return ResidueElem(self.field, self.rep + o.rep)

    __radd__ = __add__

    def __neg__(self):
        return ResidueElem(self.field, -self.rep)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return ResidueElem(self.field, (self.rep * o.rep) % self.field.P)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not self:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return self.field.one if e == 0 else self.field.zero
        e %= self.field.order - 1
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if not self:
            raise ZeroDivisionError("0 has no inverse in the residue field")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __bool__(self):
        return bool(self.rep)

    def __eq__(self, other):
        if isinstance(other, ResidueElem):
            return self.field.P == other.field.P and self.rep == other.rep
        try:
            return self == self._coerce(other)
        except (ValidationError, TypeError):
            return NotImplemented

    def __hash__(self):
        return hash(("residue", self.field.P, self.rep))

    def in_prime_subfield(self):
        """True when the element lies in F_q inside F_q[t]/P."""
        return self.rep.degree() <= 0

    def as_base_constant(self):
        if not self.in_prime_subfield():
            raise ValidationError("element is not an F_q constant")
        return self.rep.const_value()

    def to_int(self):
        v = 0
        for c in reversed(self.rep.coeffs):
            v = v * self.field.base_order + c.to_int()
        return v

    def __repr__(self):
        return f"[{self.rep!r}]"
