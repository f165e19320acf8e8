"""Finite fields F_{p^k} with a fixed polynomial basis over F_p.

A field is described by its characteristic p and an irreducible monic modulus
over F_p; elements are coefficient tuples in the power basis of the residue of
x (printed as `g`).  Prime fields use no modulus.  Extensions are built on
demand with a deterministically chosen modulus, and embeddings between
compatible fields map the source generator to the first root of the source
modulus in the target (fixed enumeration order), so results are reproducible.
"""

from .errors import UnrepresentableError, ValidationError

# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient lists, index = degree)


def _ptrim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _padd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _ptrim(out)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        if a[-1] == 0:
            a.pop()
            continue
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % p
        a = _ptrim(a)
    return a


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, e, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _is_irreducible(f, p):
    """Trial-gcd test: f has no factor of degree <= d/2 iff gcd(f, x^{p^i}-x)=1."""
    d = len(f) - 1
    if d < 1:
        return False
    if f[0] == 0:  # divisible by x
        return d == 1
    xq = [0, 1]
    for _ in range(d // 2):
        xq = _ppowmod(xq, p, f, p)
        g = _pgcd(f, _padd(xq, [0, p - 1], p), p)
        if len(g) - 1 >= 1:
            return False
    return True


def _find_irreducible(p, k):
    """First monic irreducible of degree k over F_p in integer-encoding order."""
    if k == 1:
        return [0, 1]
    for m in range(p ** k):
        coeffs = []
        v = m
        for _ in range(k):
            coeffs.append(v % p)
            v //= p
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return f
    raise AssertionError("irreducible of every degree exists")  # pragma: no cover


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------

_FIELD_CACHE = {}


class FiniteField:
    """F_{p^k}; doubles as the FieldSpec (q = p^e is the field of scalars when e=k)."""

    def __init__(self, p, k=1, modulus=None):
        if not is_prime(p):
            raise ValidationError(f"{p} is not prime")
        if k < 1:
            raise ValidationError("extension degree must be >= 1")
        self.p = p
        self.k = k
        if modulus is None:
            modulus = tuple(_find_irreducible(p, k)) if k > 1 else (0, 1)
        else:
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ValidationError("modulus must be monic of degree k")
            if k > 1 and not _is_irreducible(list(modulus), p):
                raise ValidationError("modulus is not irreducible over F_p")
        self.modulus = modulus
        self.order = p ** k
        self.zero = FF(self, (0,) * k)
        self.one = FF(self, (1,) + (0,) * (k - 1))
        if k > 1:
            self.gen = FF(self, (0, 1) + (0,) * (k - 2))
        else:
            self.gen = self.one

    @staticmethod
    def get(p, k=1, modulus=None):
        key = (p, k, tuple(modulus) if modulus is not None else None)
        f = _FIELD_CACHE.get(key)
        if f is None:
            f = FiniteField(p, k, modulus)
            _FIELD_CACHE[key] = f
        return f

    def coerce(self, v):
        if isinstance(v, FF):
            if v.field is self:
                return v
            if v.field.p != self.p:
                raise ValidationError("characteristic mismatch")
            return embed(v, self)
        if isinstance(v, int):
            return FF(self, (v % self.p,) + (0,) * (self.k - 1))
        raise ValidationError(f"cannot coerce {v!r} into {self!r}")

    def element_from_int(self, m):
        """Inverse of FF.to_int: base-p digits, constant coefficient least significant."""
        coeffs = []
        for _ in range(self.k):
            coeffs.append(m % self.p)
            m //= self.p
        return FF(self, tuple(coeffs))

    def elements(self):
        """All elements in to_int order (deterministic)."""
        return [self.element_from_int(m) for m in range(self.order)]

    def frob(self, x, j):
        """x -> x^(q^j) with q the order of this field (scalar-field twist hook)."""
        return x ** pow(self.order, j, self.order - 1) if x and j else x

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return (isinstance(other, FiniteField) and self.p == other.p
                and self.k == other.k and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))


class FF:
    """Element of a FiniteField; immutable coefficient tuple in the g-power basis."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _pair(self, other):
        if isinstance(other, int):
            other = self.field.coerce(other)
        if other.field is self.field or other.field == self.field:
            return self, other
        return unify(self, other)

    def __add__(self, other):
        a, b = self._pair(other)
        p = a.field.p
        return FF(a.field, tuple((x + y) % p for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FF(self.field, tuple((-x) % p for x in self.coeffs))

    def __sub__(self, other):
        a, b = self._pair(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        f = a.field
        prod = _pmul(list(a.coeffs), list(b.coeffs), f.p)
        if f.k > 1:
            prod = _pmod(prod, list(f.modulus), f.p)
        prod = prod + [0] * (f.k - len(prod))
        return FF(f, tuple(prod[: f.k]))

    __rmul__ = __mul__

    def __pow__(self, e):
        f = self.field
        if not self:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return f.one if e == 0 else f.zero
        e %= f.order - 1
        result = f.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if not self:
            raise ZeroDivisionError("0 has no inverse")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        a, b = self._pair(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.field.coerce(other) / self

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.coerce(other)
        if not isinstance(other, FF):
            return NotImplemented
        if other.field != self.field:
            a, b = unify(self, other)
            return a.coeffs == b.coeffs
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coeffs))

    def to_int(self):
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.field.p + c
        return v

    def order_mult(self):
        """Multiplicative order; 0 for the zero element."""
        if not self:
            return 0
        n = self.field.order - 1
        o = n
        d = 2
        rest = n
        primes = []
        while d * d <= rest:
            if rest % d == 0:
                primes.append(d)
                while rest % d == 0:
                    rest //= d
            d += 1
        if rest > 1:
            primes.append(rest)
        for pr in primes:
            while o % pr == 0 and self ** (o // pr) == self.field.one:
                o //= pr
        return o

    def nth_root(self, n):
        """A y with y^n = self in this field, or None if none exists here.

        Deterministic: smallest root in to_int order.  Brute force; fields at
        desk scale stay tiny.
        """
        if not self:
            return self.field.zero
        if n == 1:
            return self
        N = self.field.order - 1
        from math import gcd
        g = gcd(n, N)
        if self ** (N // g) != self.field.one:
            return None
        for m in range(1, self.field.order):
            cand = self.field.element_from_int(m)
            if cand ** n == self:
                return cand
        return None

    def __repr__(self):
        return f"FF({self.to_int()} in {self.field!r})"


# ---------------------------------------------------------------------------
# embeddings between fields of the same characteristic

_EMBED_CACHE = {}


def _embedding_image(src, dst):
    """Image of src's generator in dst: first root of src.modulus in dst."""
    key = (src.p, src.k, src.modulus, dst.k, dst.modulus)
    img = _EMBED_CACHE.get(key)
    if img is not None:
        return img
    if dst.k % src.k != 0:
        raise ValidationError(f"no embedding {src!r} -> {dst!r}")
    mod = src.modulus
    for m in range(dst.order):
        cand = dst.element_from_int(m)
        acc = dst.zero
        power = dst.one
        for c in mod:
            if c:
                acc = acc + power * c
            power = power * cand
        if not acc:
            _EMBED_CACHE[key] = cand
            return cand
    raise UnrepresentableError(f"no root of modulus of {src!r} found in {dst!r}")


def embed(x, dst):
    """Embed x into the compatible larger field dst."""
    src = x.field
    if src == dst:
        return FF(dst, x.coeffs)
    if src.k == 1:
        return dst.coerce(x.coeffs[0])
    img = _embedding_image(src, dst)
    acc = dst.zero
    power = dst.one
    for c in x.coeffs:
        if c:
            acc = acc + power * c
        power = power * img
    return acc


def unify(a, b):
    """Return (a', b') in a common field (degree lcm, deterministic modulus)."""
    if a.field == b.field:
        return a, b
    if a.field.p != b.field.p:
        raise ValidationError("characteristic mismatch")
    ka, kb = a.field.k, b.field.k
    if kb % ka == 0:
        return embed(a, b.field), b
    if ka % kb == 0:
        return a, embed(b, a.field)
    from math import lcm
    target = FiniteField.get(a.field.p, lcm(ka, kb))
    return embed(a, target), embed(b, target)


def extension_root(x, n, base_degree, degree_cap=12):
    """n-th root of x, enlarging the field if needed.

    base_degree is the degree over F_p of the scalar field F_q; extensions are
    taken through multiples of x's current degree so the F_q-structure is kept.
    Returns the root (possibly in a bigger field).  Raises UnrepresentableError
    when the cap is hit.
    """
    r = x.nth_root(n)
    if r is not None:
        return r
    k = x.field.k
    j = 2
    while j * k <= degree_cap * base_degree:
        big = FiniteField.get(x.field.p, j * k)
        r = embed(x, big).nth_root(n)
        if r is not None:
            return r
        j += 1
    raise UnrepresentableError(
        f"no {n}-th root of {x!r} within field degree cap {degree_cap}")
