"""The computational model of C_inf: truncated fractional-exponent series.

An element is a finite sum of terms c * t^(-alpha) with alpha rational
(denominator dividing (q-1)*q^s_cap), coefficients in a finite extension of
F_q, plus a precision bound pi: the element is known modulo terms of
valuation >= pi.  The stored key of a term IS its valuation (v(t) = -1, so
t^(-alpha) has valuation alpha).  precision None means exact.

Elements outside this sub-model (the classical example x^2+x+theta^2 = 0 at
q=2) are deliberately unrepresentable; the Artin-Schreier solver surfaces
them as DIVERGENT with the trace of stalling approximation valuations.
"""

from fractions import Fraction

from .errors import (PrecisionError, UnrepresentableError, ValidationError)
from .ff import FF, FiniteField, embed, extension_root
from .poly import Poly
from .ratfunc import RatFunc


def pmin(a, b):
    """min with None = +infinity."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def padd(a, b):
    """a + b with None = +infinity absorbing."""
    if a is None or b is None:
        return None
    return a + b


class CinfContext:
    """Configuration and ring handle for the series model."""

    def __init__(self, p, e=1, precision=64, s_cap=8, field_cap=12, modulus=None):
        self.base_field = FiniteField.get(p, e, modulus)
        self.p = p
        self.e = e
        self.q = p ** e
        self.precision = Fraction(precision)
        self.s_cap = s_cap
        self.field_cap = field_cap
        # exponent denominators q^s times a (q^l - 1)-part: twisted kernels of
        # rank-l systems have leading valuations with such denominators
        from math import lcm as _lcm
        extra = 1
        for l in range(1, 7):
            extra = _lcm(extra, self.q ** l - 1)
        self.max_den = extra * self.q ** s_cap
        self.zero = CinfElement(self, self.base_field, {}, None)
        self.one = CinfElement(self, self.base_field,
                               {Fraction(0): self.base_field.one}, None)

    # ring-handle protocol ---------------------------------------------------

    def coerce(self, v):
        if isinstance(v, CinfElement):
            if v.ctx is self:
                return v
            raise ValidationError("element of a different series context")
        if isinstance(v, int):
            return self.from_ff(self.base_field.coerce(v))
        if isinstance(v, FF):
            return self.from_ff(v)
        if isinstance(v, Poly):
            return self.from_poly(v)
        if isinstance(v, RatFunc):
            return self.from_ratfunc(v)
        raise ValidationError(f"cannot coerce {v!r} into the series model")

    def frob(self, x, j):
        return x.frob(j)

    # constructors -----------------------------------------------------------

    def element(self, terms, precision=None, field=None):
        field = field or self.base_field
        clean = {}
        for a, c in terms.items():
            a = Fraction(a)
            c = field.coerce(c) if not isinstance(c, FF) else c
            if c:
                clean[a] = clean[a] + c if a in clean else c
        return CinfElement(self, field, clean, precision)

    def from_ff(self, c):
        c = self.base_field.coerce(c) if isinstance(c, int) else c
        return CinfElement(self, c.field, {Fraction(0): c} if c else {}, None)

    def theta(self, power=1):
        """t^power, exact."""
        return CinfElement(self, self.base_field,
                           {Fraction(-power): self.base_field.one}, None)

    def from_poly(self, f):
        """Exact image of a polynomial in t."""
        terms = {Fraction(-i): c for i, c in enumerate(f.coeffs) if c}
        return CinfElement(self, self.base_field, terms, None)

    def from_ratfunc(self, r, precision=None):
        """Series expansion of num/den; exact when den is a monomial."""
        num = self.from_poly(r.num)
        den = self.from_poly(r.den)
        out = num * den.invert()
        if precision is not None:
            out = out.with_precision(precision)
        return out

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"Cinf(q={self.q})"


class CinfElement:
    __slots__ = ("ctx", "field", "terms", "precision")

    def __init__(self, ctx, field, terms, precision):
        if precision is not None:
            precision = Fraction(precision)
            terms = {a: c for a, c in terms.items() if a < precision}
        for a in terms:
            if a.denominator > ctx.max_den:
                raise UnrepresentableError(
                    f"exponent denominator {a.denominator} exceeds the cap {ctx.max_den}")
        if field.k > ctx.field_cap * ctx.e:
            raise PrecisionError("coefficient field cap exceeded")
        self.ctx = ctx
        self.field = field
        self.terms = terms
        self.precision = precision

    # -- structure ------------------------------------------------------------

    def is_zero(self):
        """No stored terms (zero modulo precision; exactly zero when exact)."""
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def valuation(self):
        """Minimal term valuation; None for a term-free element (>= precision)."""
        return min(self.terms) if self.terms else None

    def vbound(self):
        """Lower bound for the valuation: the precision when no term is stored."""
        return min(self.terms) if self.terms else self.precision

    def leading(self):
        a = self.valuation()
        if a is None:
            raise PrecisionError("no leading term before the precision bound")
        return a, self.terms[a]

    def is_monomial(self):
        return len(self.terms) == 1

    def coeff(self, alpha):
        return self.terms.get(Fraction(alpha), self.field.zero)

    def with_precision(self, precision):
        return CinfElement(self.ctx, self.field, dict(self.terms),
                           pmin(self.precision, Fraction(precision)))

    def exact_part(self):
        """The stored terms as an exact element (drops the O(...) tail)."""
        return CinfElement(self.ctx, self.field, dict(self.terms), None)

    def _lift(self, field):
        if field == self.field:
            return self
        terms = {a: embed(c, field) for a, c in self.terms.items()}
        return CinfElement(self.ctx, field, terms, self.precision)

    def _pair(self, other):
        if not isinstance(other, CinfElement):
            other = self.ctx.coerce(other)
        if other.field == self.field:
            return self, other
        from .ff import unify
        a, b = unify(next(iter(self.terms.values()), self.field.zero),
                     next(iter(other.terms.values()), other.field.zero))
        target = a.field
        return self._lift(target), other._lift(target)

    # -- ring operations -------------------------------------------------------

    def __add__(self, other):
        a, b = self._pair(other)
        prec = pmin(a.precision, b.precision)
        terms = dict(a.terms)
        for al, c in b.terms.items():
            s = terms.get(al)
            s = c if s is None else s + c
            if s:
                terms[al] = s
            elif al in terms:
                del terms[al]
        return CinfElement(a.ctx, a.field, terms, prec)

    __radd__ = __add__

    def __neg__(self):
        return CinfElement(self.ctx, self.field,
                           {a: -c for a, c in self.terms.items()}, self.precision)

    def __sub__(self, other):
        return self + (-(self.ctx.coerce(other) if not isinstance(other, CinfElement) else other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        # precision: min(pi_a + v(b), pi_b + v(a)); exact zero absorbs
        if a.precision is None and not a.terms:
            return a
        if b.precision is None and not b.terms:
            return b
        prec = pmin(padd(a.precision, b.vbound()), padd(b.precision, a.vbound()))
        terms = {}
        for a1, c1 in a.terms.items():
            for a2, c2 in b.terms.items():
                al = a1 + a2
                if prec is not None and al >= prec:
                    continue
                c = c1 * c2
                s = terms.get(al)
                s = c if s is None else s + c
                if s:
                    terms[al] = s
                elif al in terms:
                    del terms[al]
        return CinfElement(a.ctx, a.field, terms, prec)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.invert() ** (-n)
        result = self.ctx.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def invert(self):
        """1/x.  Exact for exact monomials; otherwise precision pi - 2 v(x)
        (exact inputs get the context's default precision, relatively)."""
        if not self.terms:
            if self.precision is None:
                raise ZeroDivisionError("inversion of exact zero")
            raise PrecisionError("inversion of an element with no terms before its precision")
        alpha, c = self.leading()
        lead_inv = CinfElement(self.ctx, c.field, {-alpha: c.inverse()}, None)
        if self.is_monomial() and self.precision is None:
            return lead_inv
        if self.precision is not None:
            target = self.precision - 2 * alpha
        else:
            target = self.ctx.precision - alpha
        z = lead_inv.with_precision(target)
        x = self.with_precision(target + alpha)
        one = self.ctx.one
        for _ in range(200):
            r = one - x * z
            if not r.terms:
                break
            z = (z + z * r).with_precision(target)
        else:  # pragma: no cover
            raise PrecisionError("inversion did not stabilize")
        return z

    def __truediv__(self, other):
        other = other if isinstance(other, CinfElement) else self.ctx.coerce(other)
        return self * other.invert()

    def __rtruediv__(self, other):
        return self.ctx.coerce(other) / self

    # -- Frobenius and roots ----------------------------------------------------

    def frob(self, j):
        """x^(q^j): valuations scale by q^j, coefficients take q^j-th powers."""
        if j == 0:
            return self
        step = self.ctx.q ** j
        terms = {a * step: c ** step for a, c in self.terms.items()}
        prec = None if self.precision is None else self.precision * step
        return CinfElement(self.ctx, self.field, terms, prec)

    def pth_root(self):
        p = self.ctx.p
        K = self.field.k
        inv_exp = p ** (K - 1)
        terms = {a / p: c ** inv_exp for a, c in self.terms.items()}
        prec = None if self.precision is None else self.precision / p
        return CinfElement(self.ctx, self.field, terms, prec)

    def qth_root(self):
        """The unique y with y^q = x (the model is perfect up to the caps)."""
        out = self
        for _ in range(self.ctx.e):
            out = out.pth_root()
        return out

    def frac_pow(self, e):
        """Monomial fractional power, used by the literal grammar (t^(-3/2))."""
        e = Fraction(e)
        if not self.is_monomial() or self.precision is not None:
            raise ValidationError("fractional power of a non-monomial")
        a, c = self.leading()
        if e.denominator == 1 and c == self.field.one:
            return CinfElement(self.ctx, self.field, {a * e: c}, None)
        if c != self.field.one:
            raise ValidationError("fractional power with a non-unit coefficient")
        return CinfElement(self.ctx, self.field, {a * e: c}, None)

    def nth_root(self, n):
        """Some y with y^n = x; deterministic choice.  Enlarges the coefficient
        field when the leading-coefficient root requires it."""
        if n < 1:
            raise ValidationError("root order must be >= 1")
        if not self.terms:
            if self.precision is None:
                return self
            return CinfElement(self.ctx, self.field, {}, self.precision / n)
        x = self
        p = self.ctx.p
        while n % p == 0:
            x = x.pth_root()
            n //= p
        if n == 1:
            return x
        alpha, c = x.leading()
        beta = alpha / n
        if beta.denominator > self.ctx.max_den:
            raise UnrepresentableError(
                f"{n}-th root needs exponent denominator {beta.denominator}")
        croot = extension_root(c, n, self.ctx.e, self.ctx.field_cap)
        lead = CinfElement(self.ctx, croot.field, {beta: croot}, None)
        if x.is_monomial():
            if x.precision is None:
                return lead
            return lead.with_precision(x.precision - alpha + beta)
        # Hensel for the 1 + eps part: unit derivative since gcd(n, p) = 1
        u = (x * lead.invert() ** n)
        target = u.precision if u.precision is not None else self.ctx.precision
        u = u.with_precision(target)
        z = self.ctx.one.with_precision(target)
        n_inv = self.ctx.from_ff(self.ctx.base_field.coerce(n).inverse())
        for _ in range(200):
            r = z ** n - u
            if not r.terms:
                break
            z = (z - r * n_inv * (z ** (n - 1)).invert()).with_precision(target)
        else:  # pragma: no cover
            raise PrecisionError("root iteration did not stabilize")
        return lead * z

    # -- comparison / display -----------------------------------------------------

    def agrees(self, other, through=None):
        """Equal modulo the common precision (optionally capped at `through`)."""
        other = other if isinstance(other, CinfElement) else self.ctx.coerce(other)
        d = self - other
        bound = pmin(d.precision, through)
        if bound is None:
            return not d.terms
        return all(a >= bound for a in d.terms)

    def __eq__(self, other):
        if not isinstance(other, CinfElement):
            try:
                other = self.ctx.coerce(other)
            except (ValidationError, TypeError):
                return NotImplemented
        a, b = self._pair(other)
        return a.terms == b.terms and a.precision == b.precision

    __hash__ = None

    def __repr__(self):
        from .grammar import format_cinf
        return format_cinf(self)


# ---------------------------------------------------------------------------
# Artin-Schreier-type solving: u*y^q + y = w


class ASResult:
    """Solution report for u*y^q + y = w.

    solutions    -- distinct solutions found (each certified to `certified`)
    divergent    -- True when successive approximation stalled (the model
                    boundary phenomenon); the solution set is then incomplete
    trace        -- valuations of the root-branch corrections, in order
    complete     -- False when divergent or when a homogeneous solution fell
                    outside the representable model
    certified    -- precision through which solutions were verified
    """

    def __init__(self, solutions, divergent, trace, complete, certified):
        self.solutions = solutions
        self.divergent = divergent
        self.trace = trace
        self.complete = complete
        self.certified = certified

    def __repr__(self):
        tag = "divergent" if self.divergent else f"{len(self.solutions)} solution(s)"
        return f"ASResult({tag}, complete={self.complete})"


def _as_homogeneous(u):
    """Nonzero y with u*y^q + y = 0: y = (-1/u)^(1/(q-1)); None if q = 2 trick
    does not apply and the root is unrepresentable."""
    ctx = u.ctx
    q = ctx.q
    base = -(u.invert())
    if q == 2:
        return base
    return base.nth_root(q - 1)


def _residual(u, w, y):
    return u * y.frob(1) + y - w


def artin_schreier_solve(u, w, depth=32):
    """All model-representable solutions of u*y^q + y = w, by valuation analysis.

    Branches: the contraction y ~ w when v(w) exceeds the homogeneous
    valuation -v(u)/(q-1); the q-th-root branch y ~ (w/u)^(1/q) otherwise,
    iterated up to `depth` corrections and declared DIVERGENT when the
    correction valuations keep stalling below the homogeneous valuation; a
    boundary leading-coefficient solve when the valuations tie.  The q - 1
    homogeneous solutions are added to any particular solution found.
    """
    ctx = u.ctx
    if not u.terms:
        raise ValidationError("u must be nonzero")
    q = ctx.q
    vstar = -u.valuation() / (q - 1)

    complete = True
    try:
        hom = _as_homogeneous(u)
    except (UnrepresentableError, PrecisionError):
        hom = None
        complete = False

    work_prec = pmin(u.precision, w.precision)
    if work_prec is None:
        # exact data: pick a target comfortably above the interesting range
        base = max((a for a in list(u.terms) + list(w.terms)), default=Fraction(0))
        work_prec = max(ctx.precision, base + ctx.precision)
    w_cur = w.with_precision(work_prec)
    y = ctx.zero.with_precision(work_prec)
    trace = []
    divergent = False

    for _ in range(depth):
        if not w_cur.terms:
            break
        vw = w_cur.valuation()
        if vw > vstar:
            # contraction zone: adding the residual gains valuation every pass
            while w_cur.terms:
                prev = w_cur.valuation()
                y = y + w_cur
                w_cur = (-_residual(u, w, y)).with_precision(work_prec)
                if w_cur.terms and w_cur.valuation() <= prev:
                    raise PrecisionError("contraction failed to gain valuation")
            break
        if vw == vstar:
            c = _boundary_coefficient(u, w_cur, vstar)
            if c is None:
                return ASResult([], False, trace, False, work_prec)
            step = CinfElement(ctx, c.field, {vstar: c}, None)
            y = y + step
            w_cur = (-_residual(u, w, y)).with_precision(work_prec)
            continue
        # root branch: u y^q dominates
        try:
            step = (w_cur * u.invert()).qth_root()
        except (UnrepresentableError, PrecisionError):
            divergent = True
            break
        trace.append(step.valuation())
        y = y + step
        w_cur = (-_residual(u, w, y)).with_precision(work_prec)
    else:
        divergent = True

    if divergent:
        return ASResult([], True, trace, False, work_prec)

    sols = [y]
    if hom is not None:
        for m in range(1, ctx.base_field.order):
            c = ctx.base_field.element_from_int(m)
            sols.append(y + hom * ctx.from_ff(c))
    out = []
    for s in sols:
        r = _residual(u, w, s).with_precision(work_prec)
        if r.terms:
            continue
        if not any(s.agrees(t, work_prec) for t in out):
            out.append(s)
    out.sort(key=_sort_key)
    return ASResult(out, False, trace, complete, work_prec)


def _sort_key(x):
    v = x.valuation()
    return (0, Fraction(0), ()) if v is None else (
        1, v, tuple(sorted((a, c.to_int()) for a, c in x.terms.items())))


def _boundary_coefficient(u, w, vstar):
    """Solve u0*c^q + c = w0 for the tied-valuation leading coefficient,
    enlarging the coefficient field if needed (additive polynomials are
    surjective over the algebraic closure)."""
    ctx = u.ctx
    u0 = u.terms[u.valuation()]
    w0 = w.terms[w.valuation()]
    from .ff import unify
    u0, w0 = unify(u0, w0)
    field = u0.field
    for _ in range(ctx.field_cap):
        sol = _solve_additive_ff(u0, w0, field, ctx.q)
        if sol is not None:
            return sol
        bigger = FiniteField.get(field.p, field.k * 2)
        u0 = embed(u0, bigger)
        w0 = embed(w0, bigger)
        field = bigger
        if field.k > ctx.field_cap * ctx.e:
            break
    return None


def _solve_additive_ff(u0, w0, field, q):
    """Smallest c in to_int order with u0*c^q + c = w0, or None."""
    for m in range(field.order):
        c = field.element_from_int(m)
        if u0 * c ** q + c == w0:
            return c
    return None
