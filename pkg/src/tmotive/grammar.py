"""Shared literal grammar for every module's inputs and outputs.

`t` is the base-ring generator (theta), `T` the motive variable, `U` the
L-series variable, `g` the configured generator of an extension coefficient
field.  Coefficients are integers reduced mod p.  Powers are written `t^3`,
`t^-3` or `t^(-3/2)`; a trailing `@64` / `@(3/2)` annotates series precision.
The printers are canonical (terms joined with `+`, fixed orderings) so output
bytes are reproducible, and the parser round-trips them.
"""

from fractions import Fraction

from .errors import ParseError

# ---------------------------------------------------------------------------
# formatting


def _fmt_exp(e):
    e = Fraction(e)
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def _fmt_power(var, e):
    e = Fraction(e)
    if e == 0:
        return "1"
    if e == 1:
        return var
    return f"{var}^{_fmt_exp(e)}"


def format_ff(x):
    """Finite-field element: integer for prime fields, polynomial in g otherwise."""
    if x.field.k == 1:
        return str(x.coeffs[0])
    terms = []
    for i in range(x.field.k - 1, -1, -1):
        c = x.coeffs[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif c == 1:
            terms.append(_fmt_power("g", i))
        else:
            terms.append(f"{c}*{_fmt_power('g', i)}")
    return "+".join(terms) if terms else "0"


def _needs_parens(s):
    return "+" in s or "/" in s


def _fmt_coeff_power(coeff_str, var, e):
    """coeff * var^e with canonical omission of unit coefficients."""
    power = _fmt_power(var, e)
    if power == "1":
        return coeff_str if not _needs_parens(coeff_str) else f"({coeff_str})"
    if coeff_str == "1":
        return power
    if _needs_parens(coeff_str):
        return f"({coeff_str})*{power}"
    return f"{coeff_str}*{power}"


def format_scalar(c):
    """Canonical string for any coefficient scalar the grammar knows."""
    from .ff import FF
    from .poly import Poly
    from .ratfunc import RatFunc, ResidueElem
    if isinstance(c, FF):
        return format_ff(c)
    if isinstance(c, Poly):
        return format_poly(c)
    if isinstance(c, RatFunc):
        return format_ratfunc(c)
    if isinstance(c, ResidueElem):
        return format_poly(c.rep)
    if hasattr(c, "terms") and hasattr(c, "precision"):
        return format_cinf(c)
    return str(c)


def format_poly(p):
    """Polynomial, highest degree first: `t^3+t+1`."""
    if p.is_zero():
        return "0"
    parts = []
    for d in range(p.degree(), -1, -1):
        c = p.coeff(d)
        if not c:
            continue
        parts.append(_fmt_coeff_power(format_scalar(c), p.var, d))
    return "+".join(parts)


def format_ratfunc(r):
    num = format_poly(r.num)
    if r.den.degree() == 0:
        return num
    den = format_poly(r.den)
    num_s = f"({num})" if _needs_parens(num) else num
    den_s = f"({den})" if _needs_parens(den) or "*" in den or "^" in den else den
    return f"{num_s}/{den_s}"


def format_cinf(x):
    """C_inf-model element, terms by increasing valuation; `@prec` suffix."""
    parts = []
    for alpha in sorted(x.terms):
        c = x.terms[alpha]
        parts.append(_fmt_coeff_power(format_ff(c), "t", -alpha))
    body = "+".join(parts) if parts else "0"
    if x.precision is not None:
        return f"{body}@{_fmt_exp(x.precision)}"
    return body


def format_series(coeffs, var):
    """Truncated series sum coeff_i var^i, ascending; zero coefficients skipped."""
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        parts.append(_fmt_coeff_power(format_scalar(c), var, i))
    return "+".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# parsing: tokenizer + recursive descent into a small AST


class _Tok:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind = kind
        self.value = value
        self.pos = pos


def _tokenize(s):
    toks = []
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and s[j].isdigit():
                j += 1
            toks.append(_Tok("int", int(s[i:j]), i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (s[j].isalnum() or s[j] == "_"):
                j += 1
            toks.append(_Tok("name", s[i:j], i))
            i = j
            continue
        if ch in "+-*/^()@":
            toks.append(_Tok(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", column=i)
    toks.append(_Tok("end", None, n))
    return toks


# AST nodes: ("num", n) ("var", name) ("add", a, b) ("sub", a, b)
#            ("mul", a, b) ("div", a, b) ("pow", a, Fraction) ("neg", a)
#            ("prec", a, Fraction)


class _Parser:
    def __init__(self, s):
        self.toks = _tokenize(s)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.toks[self.i]
        if kind is not None and t.kind != kind:
            raise ParseError(f"expected {kind}, got {t.kind}", column=t.pos)
        self.i += 1
        return t

    def parse(self):
        node = self.additive()
        if self.peek().kind == "@":
            self.take()
            prec = self.signed_fraction()
            node = ("prec", node, prec)
        end = self.take()
        if end.kind != "end":
            raise ParseError("trailing input", column=end.pos)
        return node

    def additive(self):
        node = self.multiplicative()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            rhs = self.multiplicative()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def multiplicative(self):
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.take().kind
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self):
        if self.peek().kind == "-":
            self.take()
            return ("neg", self.unary())
        if self.peek().kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        while self.peek().kind == "^":
            self.take()
            node = ("pow", node, self.exponent())
        return node

    def exponent(self):
        t = self.peek()
        if t.kind == "int":
            self.take()
            return Fraction(t.value)
        if t.kind == "-":
            self.take()
            return -Fraction(self.take("int").value)
        if t.kind == "(":
            self.take()
            f = self.signed_fraction()
            self.take(")")
            return f
        raise ParseError("malformed exponent", column=t.pos)

    def signed_fraction(self):
        sign = 1
        if self.peek().kind == "-":
            self.take()
            sign = -1
        if self.peek().kind == "(":
            self.take()
            f = self.signed_fraction()
            self.take(")")
            return sign * f
        num = self.take("int").value
        if self.peek().kind == "/":
            self.take()
            den = self.take("int").value
            return Fraction(sign * num, den)
        return Fraction(sign * num)

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.take()
            return ("num", t.value)
        if t.kind == "name":
            self.take()
            return ("var", t.value)
        if t.kind == "(":
            self.take()
            node = self.additive()
            self.take(")")
            return node
        raise ParseError(f"unexpected token {t.kind!r}", column=t.pos)


def parse_ast(s):
    return _Parser(s).parse()


def eval_ast(node, ring, env, allow_precision=False):
    """Evaluate an AST in a ring with `env` binding variable names to elements.

    Fractional powers route through the element's `frac_pow`; the `@` suffix
    through `with_precision` (series model only).
    """
    kind = node[0]
    if kind == "num":
        return ring.coerce(node[1])
    if kind == "var":
        name = node[1]
        if name not in env:
            raise ParseError(f"unknown symbol {name!r}")
        return env[name]
    if kind == "add":
        return eval_ast(node[1], ring, env) + eval_ast(node[2], ring, env)
    if kind == "sub":
        return eval_ast(node[1], ring, env) - eval_ast(node[2], ring, env)
    if kind == "mul":
        return eval_ast(node[1], ring, env) * eval_ast(node[2], ring, env)
    if kind == "div":
        return eval_ast(node[1], ring, env) / eval_ast(node[2], ring, env)
    if kind == "neg":
        return -eval_ast(node[1], ring, env)
    if kind == "pow":
        base = eval_ast(node[1], ring, env)
        e = node[2]
        if e.denominator == 1:
            n = e.numerator
            if n >= 0:
                return base ** n
            return (ring.one / base) ** (-n)
        if hasattr(base, "frac_pow"):
            return base.frac_pow(e)
        raise ParseError("fractional exponent outside the series model")
    if kind == "prec":
        if not allow_precision:
            raise ParseError("precision annotation not allowed here")
        val = eval_ast(node[1], ring, env)
        if not hasattr(val, "with_precision"):
            raise ParseError("precision annotation on a non-series value")
        return val.with_precision(node[2])
    raise ParseError(f"bad AST node {kind!r}")  # pragma: no cover


def parse_poly(s, poly_ring, extra_env=None):
    """Parse into F_q[<var>]; rejects non-polynomial results."""
    env = {poly_ring.var: poly_ring.gen()}
    field = poly_ring.coeff_ring
    if getattr(field, "k", 1) > 1:
        env["g"] = poly_ring.coerce(field.gen)
    if extra_env:
        env.update(extra_env)
    val = eval_ast(parse_ast(s), poly_ring, env)
    return val


def parse_ratfunc(s, rff):
    env = {rff.var: rff.gen()}
    if rff.field.k > 1:
        env["g"] = rff.coerce(rff.field.gen)
    return eval_ast(parse_ast(s), rff, env)


def parse_cinf(s, ctx):
    env = {"t": ctx.theta(), "g": ctx.from_ff(ctx.base_field.gen)}
    return eval_ast(parse_ast(s), ctx, env, allow_precision=True)
