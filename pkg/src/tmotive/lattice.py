"""F_q[t]-lattices in C_inf^n at finite precision: independence certificates,
Siegel matrices, the partial fractional-linear action, duals and exterior
lattices.

Independence over the completion F_q((1/t)) is semi-decidable at truncation:
a vector decomposes over the "symbols" (fractional exponent class, coordinate
of the coefficient over F_q), with completion-series coordinates; elimination
over those coordinates certifies independence with the pivot valuations, or
returns UNDECIDED when a row vanishes at its precision.
"""

from fractions import Fraction
from itertools import combinations

from .cinf import CinfContext, CinfElement
from .errors import NotDefinedError, PrecisionError, ValidationError
from .ff import FF, FiniteField, embed
from .matrix import Mat


class LatticeCertificate:
    def __init__(self, ok, pivot_valuations, reason=None):
        self.ok = ok
        self.pivot_valuations = pivot_valuations
        self.reason = reason

    def __bool__(self):
        return self.ok

    def __repr__(self):
        tag = "lattice" if self.ok else f"not-a-lattice ({self.reason})"
        return f"Certificate({tag}, pivots={self.pivot_valuations})"


class Lattice:
    """r generator vectors in C_inf^n, held with their certificate."""

    def __init__(self, ctx, vectors, certificate):
        self.ctx = ctx
        self.vectors = vectors
        self.certificate = certificate
        self.r = len(vectors)
        self.n = len(vectors[0]) if vectors else 0


def _cinf_rank(ctx, vectors, n):
    """Rank over C_inf by valuation-pivot elimination."""
    rows = [list(v) for v in vectors]
    rank = 0
    used = set()
    for _ in range(n):
        best = None
        for i, row in enumerate(rows):
            if i in used:
                continue
            for j in range(n):
                x = row[j]
                if x.terms:
                    v = x.valuation()
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        _, pi, pj = best
        used.add(pi)
        rank += 1
        pivot_inv = rows[pi][pj].invert()
        for i, row in enumerate(rows):
            if i in used or not row[pj].terms:
                continue
            c = row[pj] * pivot_inv
            rows[i] = [a - c * b for a, b in zip(row, rows[pi])]
    return rank


def _symbol_decomposition(ctx, x):
    """Map a series-model element to completion coordinates.

    Returns dict symbol -> dict(integer valuation -> F_q coefficient), where
    a symbol is (fractional class of the exponent, index of the coefficient
    coordinate over F_q).  Multiplying by an element of F_q((1/t)) acts
    within each symbol, so independence over the completion is elimination
    over these coordinate series.
    """
    out = {}
    for a, c in x.terms.items():
        frac_part = a - (a.numerator // a.denominator)
        coords = _fq_coords(ctx, c)
        for l, cl in enumerate(coords):
            if not cl:
                continue
            sym = (frac_part, l)
            out.setdefault(sym, {})[a - frac_part] = cl
    return out


def _fq_coords(ctx, c):
    """Coordinates of c over F_q in the gamma-power basis of its field."""
    field = c.field
    if field.k == ctx.e:
        return [ctx.base_field.coerce(c) if field.k == 1 else c]
    m = field.k // ctx.e
    basis = []
    g = field.one
    for _ in range(m):
        basis.append(g)
        g = g * field.gen
    if ctx.e == 1:
        mat_cols = [list(b.coeffs) for b in basis]
        coords_fp = _solve_fp(mat_cols, list(c.coeffs), field.p)
        return [ctx.base_field.coerce(v) for v in coords_fp]
    delta = embed(ctx.base_field.gen, field)
    mat_cols = []
    for b in basis:
        dp = field.one
        for _ in range(ctx.e):
            mat_cols.append(list((b * dp).coeffs))
            dp = dp * delta
    coords_fp = _solve_fp(mat_cols, list(c.coeffs), field.p)
    out = []
    for l in range(m):
        acc = ctx.base_field.zero
        dpow = ctx.base_field.one
        for j in range(ctx.e):
            acc = acc + dpow * coords_fp[l * ctx.e + j]
            dpow = dpow * ctx.base_field.gen
        out.append(acc)
    return out


def _solve_fp(cols, target, p):
    """Solve sum_i x_i cols[i] = target over F_p; returns the x_i as ints."""
    K = len(target)
    a = [[cols[j][i] % p for j in range(len(cols))] + [target[i] % p]
         for i in range(K)]
    nc = len(cols)
    row = 0
    pivots = []
    for col in range(nc):
        piv = next((i for i in range(row, K) if a[i][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = pow(a[row][col], p - 2, p)
        a[row] = [(x * inv) % p for x in a[row]]
        for i in range(K):
            if i != row and a[i][col]:
                c0 = a[i][col]
                a[i] = [(x - c0 * y) % p for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
    x = [0] * nc
    for i, col in enumerate(pivots):
        x[col] = a[i][nc]
    return x


def is_lattice(ctx, vectors):
    """Certificate that the vectors generate C_inf^n and are independent over
    the completion; UNDECIDED surfaces as a PrecisionError-backed failure."""
    if not vectors:
        raise ValidationError("need at least one generator")
    n = len(vectors[0])
    r = len(vectors)
    for v in vectors:
        if len(v) != n:
            raise ValidationError("generators of unequal length")
    if _cinf_rank(ctx, vectors, n) < n:
        return LatticeCertificate(False, [], "generators do not span C_inf^n")
    # completion-independence: rows = generators, columns = (coordinate, symbol)
    rows = []
    all_symbols = set()
    decomposed = []
    for vec in vectors:
        comp = [_symbol_decomposition(ctx, x) for x in vec]
        decomposed.append(comp)
        for ci, d in enumerate(comp):
            for sym in d:
                all_symbols.add((ci, sym))
    symbols = sorted(all_symbols, key=lambda s: (s[0], s[1][0], s[1][1]))
    # completion coordinates are truncated Laurent series over F_q in 1/t,
    # realized as integer-exponent series-model elements with F_q coefficients
    sub = CinfContext(ctx.p, ctx.e, precision=ctx.precision, s_cap=0)
    table = []
    for comp in decomposed:
        row = []
        for (ci, sym) in symbols:
            series = comp[ci].get(sym, {})
            el = sub.element(series,
                             precision=_entry_precision(vectors, ci, ctx))
            row.append(el)
        table.append(row)
    pivots = []
    used_cols = set()
    work = [list(r) for r in table]
    for i in range(r):
        best = None
        for j, x in enumerate(work[i]):
            if j in used_cols or not x.terms:
                continue
            v = x.valuation()
            if best is None or v < best[0]:
                best = (v, j)
        if best is None:
            exact_zero = all(x.precision is None and not x.terms for x in work[i])
            reason = ("dependent over the completion" if exact_zero
                      else "UNDECIDED: row vanished at precision")
            return LatticeCertificate(False, pivots, reason)
        v, pj = best
        pivots.append(v)
        used_cols.add(pj)
        inv = work[i][pj].invert()
        for i2 in range(i + 1, r):
            if work[i2][pj].terms:
                c = work[i2][pj] * inv
                work[i2] = [a - c * b for a, b in zip(work[i2], work[i])]
    return LatticeCertificate(True, pivots)


def _entry_precision(vectors, ci, ctx):
    """Common precision of the ci-th coordinates; None when all are exact
    (exact zero rows then witness genuine dependence over the completion)."""
    precs = [x.precision for v in vectors for x in [v[ci]] if x.precision is not None]
    return min(precs) if precs else None


def lattice(ctx, vectors):
    cert = is_lattice(ctx, vectors)
    if not cert.ok:
        raise ValidationError(f"not a lattice: {cert.reason}")
    return Lattice(ctx, vectors, cert)


# ---------------------------------------------------------------------------
# Siegel matrices


def siegel_matrix(ctx, vectors, n=None):
    """Solve e_{n+j} = sum_i S_{ji} e_i for the (r-n) x n Siegel matrix; the
    first n vectors must be a C_inf-basis (else NO_SIEGEL)."""
    n = n if n is not None else len(vectors[0])
    r = len(vectors)
    if r <= n:
        raise ValidationError("need more generators than the dimension")
    head = Mat(ctx, [list(vectors[i]) for i in range(n)])
    try:
        head_inv = head.transpose().inverse()
    except ZeroDivisionError:
        raise NotDefinedError("NO_SIEGEL: leading block is singular at precision")
    rows = []
    for j in range(n, r):
        col = Mat(ctx, [[x] for x in vectors[j]])
        sol = head_inv * col
        rows.append([sol[i, 0] for i in range(n)])
    return Mat(ctx, rows)


def siegel_action(ctx, g, S):
    """S' = (g21 + g22 S)(g11 + g12 S)^{-1}; NOT_DEFINED when the denominator
    block is singular at precision."""
    rn = S.ncols
    r = g.nrows
    g11 = Mat(ctx, [row[:rn] for row in g.rows[:rn]])
    g12 = Mat(ctx, [row[rn:] for row in g.rows[:rn]])
    g21 = Mat(ctx, [row[:rn] for row in g.rows[rn:]])
    g22 = Mat(ctx, [row[rn:] for row in g.rows[rn:]])
    den = g11 + g12 * S
    num = g21 + g22 * S
    try:
        den_inv = den.inverse()
    except ZeroDivisionError:
        raise NotDefinedError("NOT_DEFINED: gamma11 + gamma12 S is singular")
    return num * den_inv


def dual_siegel(S):
    """The dual lattice's Siegel matrix: the transpose."""
    return S.transpose()


# ---------------------------------------------------------------------------
# exterior lattices via generalized Moore determinants


def moore_determinant(ctx, elems, exponents):
    """det( elems[a]^(q^exponents[b]) ) for the k x k generalized Moore matrix."""
    k = len(elems)
    rows = []
    for a in range(k):
        rows.append([elems[a].frob(e) for e in exponents])
    return Mat(ctx, rows).det()


def exterior_lattice(ctx, generators, k):
    """k-th exterior power of a rank-r lattice in C_inf^1.

    Generators indexed by k-subsets I; coordinates indexed by the k-element
    exponent sets E containing 0 (there are C(r-1, k-1) of them), with entry
    the generalized Moore determinant det(omega_{i_a}^{q^{e_b}}).
    """
    r = len(generators)
    if not 1 <= k <= r:
        raise ValidationError("exterior power order out of range")
    if k == 1:
        return [[w] for w in generators]
    esets = [tuple([0] + list(rest))
             for rest in combinations(range(1, r), k - 1)]
    out = []
    for I in combinations(range(r), k):
        elems = [generators[i] for i in I]
        out.append([moore_determinant(ctx, elems, E) for E in esets])
    return out
