"""Twisted fixed-point engine: H^1 and H_1 ranks at finite precision.

Both directions are one equation family L(T) y = R(T) y^(1) on truncated
series y in C_inf{T}^r:

    upper (fixed points of tau on M{T}):        y = Q^t y^(1)
    lower (tau-equivariant maps, rows of Psi):  y^(1) = Q y

Expanding in T-degree turns each step into a system A1 y_i^(1) + A0 y_i = w_i
over the series model.  Since Frobenius and multiplication by constants are
F_p-linear on the coefficient field, each step is an exact F_p-linear system
on a bounded exponent window; the window bounds come from the ultrametric
balance of the equation.  Branches (kernel choices per step) are explored
breadth-first with dedup, a live cap, and the monotone-tail prune that always
keeps the canonical particular continuation.  Every verdict carries its
(horizon, window, precision) parameters; nothing is reported as a bare number.
"""

from fractions import Fraction
from math import lcm

from .cinf import CinfContext, CinfElement, pmin
from .construct import RationalQ
from .errors import PrecisionError, UnsupportedError, ValidationError
from .ff import FF, FiniteField, embed
from .gflin import FqGauss
from .matrix import Mat
from .motive import TMotive, is_m_of_a_shape, ring_theta
from .poly import Poly, PolyRing
from .ratfunc import RatFunc, RatFuncField
from .tauseries import TauMatrix

H1_UPPER = "upper"
H1_LOWER = "lower"

CONVERGENT = "CONVERGENT"
DIVERGENT = "DIVERGENT"
UNDECIDED = "UNDECIDED"


# ---------------------------------------------------------------------------
# F_p coordinates of the working coefficient field


class FpStructure:
    """F_{p^K} as an F_p-space; q-Frobenius and scalings as column matrices."""

    def __init__(self, field, q):
        self.field = field
        self.p = field.p
        self.K = field.k
        self.q = q

    def basis_powers(self):
        out = []
        g = self.field.one
        for _ in range(self.K):
            out.append(g)
            g = g * self.field.gen
        return out

    def frob_cols(self):
        return [list((b ** self.q).coeffs) for b in self.basis_powers()]

    def mult_cols(self, a):
        return [list((a * b).coeffs) for b in self.basis_powers()]


def _compose_cols(A, B, p):
    """Columns of x -> A(B(x)) for F_p column-matrices."""
    K = len(B)
    out = []
    for l in range(K):
        col = [0] * K
        for t, v in enumerate(B[l]):
            if v:
                Acol = A[t]
                for s in range(K):
                    col[s] = (col[s] + v * Acol[s]) % p
        out.append(col)
    return out


def _cycle_len(orbit, q):
    f = next(iter(orbit))
    seen = []
    while f not in seen:
        seen.append(f)
        f = (f * q) - int(f * q)
    return len(seen) - seen.index(f)


def _orbit_of(x, q):
    """Forward closure of the fractional class of x under multiplication by q
    on Q/Z (frozen, canonical block key)."""
    f = x - (x.numerator // x.denominator)
    seen = set()
    while f not in seen:
        seen.add(f)
        f = (f * q) - int(f * q)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# one T-degree step: A1 y^(1) + A0 y = w


class StepSolver:
    """Exact solver for A1 y^(1) + A0 y = w on exponent windows.

    The equation preserves the fractional class of exponents modulo the
    multiplication-by-q orbits on Q/Z, so each right-hand side splits into
    decoupled blocks: the base (integral) block plus one block per orbit that
    carries a kernel-valuation candidate.  Kernel leading coefficients of a
    length-l balance chain live in degree-l extensions, so each class block
    works over the coefficient field enlarged by its cycle length (the base
    block degree is a caller option, recorded in the certificate).
    """

    DENSE_CAP = 6000
    SPARSE_CAP = 6000

    def __init__(self, ctx, A0, A1, field_degree=1):
        if ctx.e != 1:
            raise UnsupportedError("window solver supports prime base fields")
        self.ctx = ctx
        self.q = ctx.q
        field = ctx.base_field
        for m in (A0, A1):
            for x in m.entries():
                for c in x.terms.values():
                    if c.field.k > field.k:
                        field = c.field
        if field_degree > 1:
            field = FiniteField.get(ctx.p, field.k * field_degree)
        self.field = field
        self.base_field_degree = field_degree
        self.r = A0.nrows
        self.A0 = A0
        self.A1 = A1
        self.terms0 = self._collect(A0)
        self.terms1 = self._collect(A1)
        self.exps0 = sorted({a for row in self.terms0 for cell in row for (a, _) in cell})
        self.exps1 = sorted({a for row in self.terms1 for cell in row for (a, _) in cell})
        if not self.exps0 and not self.exps1:
            raise ValidationError("step system is identically zero")
        # kernel leading valuations: a cancellation cycle through the leading
        # terms composes affine maps x -> qx + (a1 - a0) (cross pairings),
        # x -> x + (a0 - a0') and x -> x + (a1 - a1')/q (same-side pairings);
        # a cycle with k q-steps and accumulated shift S pins mu = -S/(q^k - 1).
        # Blocks are the orbits of the fractional classes under q on Q/Z.
        diffs10 = sorted({a1 - a0 for a1 in self.exps1 for a0 in self.exps0})
        shifts = {a - b for a in self.exps0 for b in self.exps0}
        shifts.discard(Fraction(0))
        Lmax = min(self.r, 4)
        cands = {}
        states = {(0, Fraction(0))}
        for _ in range(2 * Lmax):
            new_states = set()
            for (k, S) in states:
                if k < Lmax:
                    for d in diffs10:
                        new_states.add((k + 1, self.q * S + d))
                for e in shifts:
                    new_states.add((k, S + e))
            states = new_states | states
            if len(states) > 20000:
                break
        for (k, S) in states:
            if k >= 1:
                mu = Fraction(-S, self.q ** k - 1)
                if mu.denominator <= ctx.max_den and mu not in cands:
                    cands[mu] = k
        # pre-periodic leaders: q-preimages of the pinned cycle values
        frontier = set(cands)
        for _ in range(1):
            frontier = {Fraction(mu - d, self.q)
                        for mu in frontier for d in diffs10}
            frontier = {mu for mu in frontier
                        if mu.denominator <= ctx.max_den and mu not in cands}
            for mu in frontier:
                cands[mu] = 1
        self.kernel_candidates = sorted(cands)
        self.base_orbit = frozenset({Fraction(0)})
        self.base_degree_hint = 1
        base_extra_den = 1
        raw_blocks = {}
        for mu, l in sorted(cands.items()):
            key = _orbit_of(mu, self.q)
            if Fraction(0) in key:
                # q-power-denominator classes are refinements of the base lattice
                self.base_degree_hint = lcm(self.base_degree_hint, l)
                base_extra_den = lcm(base_extra_den, mu.denominator)
                continue
            raw_blocks.setdefault(key, []).append(mu)
        # merge orbits that share lattice classes (sub-orbits of refinements)
        merged = []
        for key in sorted(raw_blocks, key=lambda k: sorted(k)):
            hit = None
            for grp in merged:
                if grp[0] & key:
                    hit = grp
                    break
            if hit is None:
                merged.append([set(key), list(raw_blocks[key])])
            else:
                hit[0] |= key
                hit[1].extend(raw_blocks[key])
        self.blocks = {frozenset(f): sorted(c) for f, c in merged}
        self._frac_block = {}
        for key in self.blocks:
            for f in key:
                self._frac_block[f] = key
        den = base_extra_den
        for a in self.exps0 + self.exps1:
            den = lcm(den, Fraction(a).denominator)
        self.den = den
        self._block_ctx = {}
        self._systems = {}
        self._class_cache = {}
        self.limitations = set()
        if field_degree < self.base_degree_hint:
            self.limitations.add(
                f"base block searched at coefficient degree {field_degree * ctx.e}"
                f" of the indicated {self.base_degree_hint * ctx.e}")

    def _collect(self, M):
        out = []
        for i in range(self.r):
            row = []
            for j in range(self.r):
                x = M[i, j]
                row.append(sorted((a, c) for a, c in x.terms.items()))
            out.append(row)
        return out

    def expected_kernel_dim(self):
        """F_p-dimension of the step kernel over the algebraic closure: r*e
        when both coefficient matrices are invertible (separable additive
        system), else None (no clean count)."""
        try:
            d0 = self.A0.det()
            d1 = self.A1.det()
        except (ZeroDivisionError, PrecisionError):
            return None
        if bool(d0) and bool(d1):
            return self.r * self.ctx.e
        return None

    def searched_degrees(self):
        out = {tuple(sorted(self.base_orbit)): self.field.k}
        for key in self.blocks:
            out[tuple(sorted(key))] = self.field.k * len(key)
        return out

    def pi_y_for(self, pi_eq):
        """Unknown cutoff: every unknown below it keeps a pinning row below
        pi_eq through the stronger route, and dropped coefficients provably
        touch no valid row (both routes land at >= pi_eq)."""
        cut = []
        if self.exps0:
            cut.append(pi_eq - min(self.exps0))
        if self.exps1:
            cut.append((pi_eq - min(self.exps1)) / self.q)
        return max(cut)

    def _register_block(self, orb):
        for key in self.blocks:
            if key & orb:
                newkey = frozenset(key | orb)
                cands = self.blocks.pop(key)
                self.blocks[newkey] = cands
                for f in newkey:
                    self._frac_block[f] = newkey
                return newkey
        newkey = frozenset(orb)
        self.blocks[newkey] = []
        for f in newkey:
            self._frac_block[f] = newkey
        return newkey

    def block_context(self, key, w_field_k=1):
        if key == self.base_orbit:
            k = self.field.k
        else:
            # the leading-coefficient consistency equation runs over the
            # multiplicative cycle; the pre-period does not enlarge the field
            k = self.field.k * _cycle_len(key, self.q)
        k = lcm(k, w_field_k)
        got = self._block_ctx.get((key, k))
        if got is None:
            got = self._block_ctx[(key, k)] = _BlockContext(
                self, FiniteField.get(self.ctx.p, k))
        return got

    def _floor_for(self, w_val, candidates):
        cands = list(candidates)
        if w_val is not None:
            for a in self.exps0:
                cands.append(w_val - a)
            for a in self.exps1:
                cands.append(Fraction(w_val - a, self.q))
        if not cands:
            cands = [Fraction(0)]
        return min(cands) - 2

    def _dense_support(self, floor, pi_y, den, fracs=None):
        lo = int((floor * den).__floor__())
        hi = int(((pi_y * den)).__ceil__())
        out = []
        for n in range(lo, hi):
            a = Fraction(n, den)
            if a >= pi_y:
                continue
            if fracs is not None and a - (a.numerator // a.denominator) not in fracs:
                continue
            out.append(a)
        return out

    def _sparse_support(self, seeds, floor, pi_eq, pi_y):
        support = set()
        frontier = set()
        for s in seeds:
            for a in self.exps0:
                frontier.add(s - a)
            for a in self.exps1:
                frontier.add(Fraction(s - a, self.q))
            frontier.add(s)
        frontier = {a for a in frontier if floor <= a < pi_y
                    and a.denominator <= self.ctx.max_den}
        while frontier:
            support |= frontier
            if len(support) > self.SPARSE_CAP:
                raise PrecisionError("sparse window exceeded the cap")
            rows = set()
            for al in frontier:
                for a in self.exps0:
                    b = al + a
                    if b < pi_eq:
                        rows.add(b)
                for a in self.exps1:
                    b = self.q * al + a
                    if b < pi_eq:
                        rows.add(b)
            nxt = set()
            for beta in rows:
                for a in self.exps0:
                    nxt.add(beta - a)
                for a in self.exps1:
                    nxt.add(Fraction(beta - a, self.q))
            frontier = {a for a in nxt if floor <= a < pi_y
                        and a.denominator <= self.ctx.max_den and a not in support}
        return sorted(support)

    def solve(self, w_vec, pi_eq, noise_threshold=None):
        """(particular | None, kernel basis, pi_out).

        Kernel vectors whose valuation reaches noise_threshold are precision
        artifacts of the truncated window (the rows that would pin them lie
        beyond pi_eq); they are not branched over and instead lower the
        certified output precision pi_out.  This is the branch deduplication
        modulo precision."""
        pi_eq = Fraction(pi_eq)
        pi_y = self.pi_y_for(pi_eq)
        for x in w_vec:
            if x.precision is not None and x.precision < pi_eq:
                raise PrecisionError("right-hand side unknown below the row precision")
        # split the right-hand side over the fractional-class blocks
        w_blocks = {}
        for i, x in enumerate(w_vec):
            for a, c in x.terms.items():
                f = a - (a.numerator // a.denominator)
                if f == 0 or (self.den * f).denominator == 1:
                    key = self.base_orbit
                else:
                    key = self._frac_block.get(f)
                    if key is None:
                        orb = _orbit_of(f, self.q)
                        key = (self.base_orbit if Fraction(0) in orb
                               else self._register_block(orb))
                slot = w_blocks.setdefault(key, [dict() for _ in range(self.r)])
                slot[i][a] = c
        needed = set(w_blocks) | set(self.blocks) | {self.base_orbit}
        total_part = None
        kernels = []
        pi_out_all = pi_eq
        for key in sorted(needed, key=lambda k: sorted(k)):
            w_terms = w_blocks.get(key)
            homogeneous = w_terms is None
            if homogeneous and key != self.base_orbit:
                cached = self._class_cache.get(key)
                if cached is not None:
                    kern_b, pi_b = cached
                    kernels.extend(kern_b)
                    pi_out_all = min(pi_out_all, pi_b)
                    continue
            w_field_k = 1
            if w_terms:
                for slot in w_terms:
                    for c in slot.values():
                        w_field_k = lcm(w_field_k, c.field.k)
            bctx = self.block_context(key, w_field_k)
            w_b = [CinfElement(self.ctx, bctx.field,
                               {a: embed(c, bctx.field) for a, c in w_terms[i].items()}
                               if w_terms else {}, pi_eq)
                   for i in range(self.r)]
            try:
                part_b, kern_b, pi_b = self._solve_block(key, bctx, w_b, pi_eq,
                                                         pi_y, noise_threshold)
            except PrecisionError as exc:
                if homogeneous and key != self.base_orbit:
                    # candidate class unexplored: reported, never silent
                    self.limitations.add(f"class {sorted(key)}: {exc}")
                    self._class_cache[key] = ([], pi_eq)
                    continue
                raise
            if part_b is None:
                return None, [], pi_eq
            if homogeneous and key != self.base_orbit:
                self._class_cache[key] = (kern_b, pi_b)
            kernels.extend(kern_b)
            pi_out_all = min(pi_out_all, pi_b)
            if any(x.terms for x in part_b):
                total_part = part_b if total_part is None else _vec_add(total_part, part_b)
        if total_part is None:
            total_part = [self.ctx.zero.with_precision(pi_out_all)
                          for _ in range(self.r)]
        else:
            total_part = [x.with_precision(pi_out_all) for x in total_part]
        return total_part, kernels, pi_out_all

    def _solve_block(self, key, bctx, w_vec, pi_eq, pi_y, noise_threshold):
        cands = self.blocks.get(key, [])
        w_supp = set()
        w_val = None
        for x in w_vec:
            if x.terms:
                w_supp |= set(x.terms)
                v = x.valuation()
                w_val = v if w_val is None else min(w_val, v)
        floor = self._floor_for(w_val, cands)
        if key == self.base_orbit:
            den, fracs = self.den, None
            for a in w_supp:
                den = lcm(den, a.denominator)
            width = den
        else:
            den = self.den
            for f in key:
                den = lcm(den, f.denominator)
            fracs = key
            width = len(key) * self.den
        size = (pi_y - floor) * width * self.r * bctx.K
        if size <= self.DENSE_CAP:
            ckey = (key, bctx.K, floor, pi_eq)
            system = self._systems.get(ckey)
            if system is None:
                support = self._dense_support(floor, pi_y, den, fracs)
                system = self._systems[ckey] = _StepSystem(self, bctx, support, pi_eq)
                if len(self._systems) > 128:
                    self._systems.pop(next(iter(self._systems)))
            return self._solve_on(system, bctx, w_vec, pi_eq, noise_threshold)
        seeds = set(a for a in w_supp if a < pi_eq)
        seeds |= {mu for mu in cands if mu >= floor}
        support = self._sparse_support(seeds, floor, pi_eq, pi_y)
        if fracs is not None:
            support = [a for a in support
                       if a - (a.numerator // a.denominator) in fracs]
        if len(support) * self.r * bctx.K > self.DENSE_CAP:
            raise PrecisionError(
                f"window of {len(support)} exponents at field degree "
                f"{bctx.K} exceeds the solver cap")
        system = _StepSystem(self, bctx, support, pi_eq)
        return self._solve_on(system, bctx, w_vec, pi_eq, noise_threshold)

    def _solve_on(self, system, bctx, w_vec, pi_eq, noise_threshold):
        K = bctx.K
        rhs = {}
        for i, x in enumerate(w_vec):
            for a, c in x.terms.items():
                if a >= pi_eq:
                    continue
                rn = system.row_index.get((i, a))
                if rn is None:
                    return None, [], pi_eq  # unmatched w-term: inconsistent
                cc = embed(c, bctx.field)
                for l, v in enumerate(cc.coeffs):
                    if v:
                        rhs[rn * K + l] = v
        sol = system.gauss.solve(rhs)
        kernel_raw = [self._vec_from_cols(system, bctx, kv, pi_eq)
                      for kv in system.gauss.kernel_basis()]
        threshold = pi_eq if noise_threshold is None else Fraction(noise_threshold)
        pi_out = pi_eq
        kernel = []
        for k in kernel_raw:
            vals = [x.valuation() for x in k if x.terms]
            if not vals:
                continue
            v = min(vals)
            if v >= threshold:
                pi_out = min(pi_out, v)
            else:
                kernel.append(k)
        if sol is None:
            return None, [], pi_out
        particular = self._vec_from_cols(system, bctx, sol, pi_out)
        kernel = [[x.with_precision(pi_out) for x in k] for k in kernel]
        kernel = [k for k in kernel if any(x.terms for x in k)]
        return particular, kernel, pi_out

    def _vec_from_cols(self, system, bctx, col_map, pi_eq):
        K = bctx.K
        per = [dict() for _ in range(self.r)]
        for col, val in col_map.items():
            unknown, l = divmod(col, K)
            j, a = system.unknown_of[unknown]
            coords = per[j].setdefault(a, [0] * K)
            coords[l] = (coords[l] + val) % self.ctx.p
        out = []
        for j in range(self.r):
            terms = {}
            for a, coords in per[j].items():
                c = FF(bctx.field, tuple(coords))
                if c:
                    terms[a] = c
            out.append(CinfElement(self.ctx, bctx.field, terms, pi_eq))
        return out

    def residual(self, y_vec, w_vec, pi_eq):
        """A1 y^(1) + A0 y - w as a vector (for independent re-checking)."""
        out = []
        for i in range(self.r):
            acc = self.ctx.zero.with_precision(pi_eq)
            for j in range(self.r):
                yj = y_vec[j]
                y1 = yj.frob(1)
                for (a, c) in self.terms0[i][j]:
                    acc = acc + CinfElement(self.ctx, c.field, {a: c}, None) * yj
                for (a, c) in self.terms1[i][j]:
                    acc = acc + CinfElement(self.ctx, c.field, {a: c}, None) * y1
            out.append(acc - w_vec[i])
        return out


class _BlockContext:
    """Per-block coefficient field with its Frobenius/scaling tables."""

    def __init__(self, solver, field):
        self.field = field
        self.K = field.k
        self.fp = FpStructure(field, solver.ctx.q)
        self.frob_cols = self.fp.frob_cols()
        self._mult_cache = {}

    def mult_cols(self, coeff):
        c = embed(coeff, self.field)
        key = c.coeffs
        got = self._mult_cache.get(key)
        if got is None:
            got = self.fp.mult_cols(c)
            self._mult_cache[key] = got
        return got

    def mult_frob_cols(self, coeff, p):
        c = embed(coeff, self.field)
        key = ("mf", c.coeffs)
        got = self._mult_cache.get(key)
        if got is None:
            got = _compose_cols(self.mult_cols(c), self.frob_cols, p)
            self._mult_cache[key] = got
        return got


class _StepSystem:
    """One assembled F_p-linear system on a fixed exponent support."""

    def __init__(self, solver, bctx, support, pi_eq):
        K = bctx.K
        q = solver.q
        p = solver.ctx.p
        self.unknown_of = []
        idx = {}
        for j in range(solver.r):
            for a in support:
                idx[(j, a)] = len(self.unknown_of)
                self.unknown_of.append((j, a))
        rows = {}

        def row_of(i, beta):
            key = (i, beta)
            got = rows.get(key)
            if got is None:
                got = rows[key] = {}
            return got

        for j in range(solver.r):
            for a in support:
                col_base = idx[(j, a)] * K
                for i in range(solver.r):
                    for (s, coeff) in solver.terms0[i][j]:
                        beta = a + s
                        if beta >= pi_eq:
                            continue
                        cols = bctx.mult_cols(coeff)
                        row = row_of(i, beta)
                        for l in range(K):
                            col = col_base + l
                            for t, v in enumerate(cols[l]):
                                if v:
                                    key2 = (t, col)
                                    row[key2] = (row.get(key2, 0) + v) % p
                    for (s, coeff) in solver.terms1[i][j]:
                        beta = q * a + s
                        if beta >= pi_eq:
                            continue
                        comp = bctx.mult_frob_cols(coeff, p)
                        row = row_of(i, beta)
                        for l in range(K):
                            col = col_base + l
                            for t, v in enumerate(comp[l]):
                                if v:
                                    key2 = (t, col)
                                    row[key2] = (row.get(key2, 0) + v) % p
        self.row_keys = sorted(rows.keys(), key=lambda k: (k[1], k[0]))
        self.row_index = {}
        gauss = FqGauss(p, len(self.unknown_of) * K)
        for n, key in enumerate(self.row_keys):
            self.row_index[key] = n
            data = rows[key]
            for t in range(K):
                gauss.add_row({col: v for (tt, col), v in data.items() if tt == t})
        self.gauss = gauss
        gauss.factor()


# ---------------------------------------------------------------------------
# the full twisted system over T-degrees


class TwistedSystem:
    """L(T) y = R(T) y^(1) with polynomial matrices L, R over the series model.

    direction: H1_UPPER solves y = Q^t y^(1); H1_LOWER solves y^(1) = Q y.
    Rational Q (powers of (T-theta) in denominators) is cleared into L/R.
    """

    def __init__(self, ctx, Q, direction, horizon=24, window=6, precision=64,
                 branch_cap=64, field_degree="auto"):
        if window < 2 or horizon <= window:
            raise ValidationError("need horizon > window >= 2")
        self.ctx = ctx
        self.direction = direction
        self.horizon = horizon
        self.window = window
        self.branch_cap = branch_cap
        if isinstance(Q, RationalQ):
            num, den_exp, ring = Q.num, Q.den_exp, Q.ring
        else:
            num, den_exp, ring = Q, 0, None
        conv = _entry_converter(ctx, num)
        num_mats = _poly_matrix_coeffs(ctx, num, conv)
        r = num.nrows
        theta = ctx.theta()
        lin = [-theta, ctx.one]  # T - theta
        denom_mats = [Mat.identity(ctx, r)]
        for _ in range(den_exp):
            denom_mats = _poly_mat_mul_linear(ctx, denom_mats, lin, r)
        if direction == H1_UPPER:
            self.L = denom_mats
            self.R = [m.transpose() for m in num_mats]
        elif direction == H1_LOWER:
            self.L = num_mats
            self.R = denom_mats
        else:
            raise ValidationError(f"unknown direction {direction!r}")
        self.r = r
        # precision loss per step: the untwisted history terms L_m y (m >= 1)
        # lower a right-hand side's certified precision by at most this much
        # (the twisted side multiplies precision by q and never binds)
        loss = 0
        for mats in (self.L, self.R):
            for m in mats[1:]:
                for x in m.entries():
                    v = x.valuation()
                    if v is not None and v < 0:
                        loss = max(loss, -v)
        self.step_loss = loss
        # the top `spread` of the window is only weakly pinned (its rows also
        # involve other tail unknowns), so each step erodes certified output
        # precision by up to the exponent spread of the step matrices
        spread = Fraction(0)
        for m in (self.L[0], self.R[0]):
            exps = [a for x in m.entries() for a in x.terms]
            if exps:
                spread = max(spread, max(exps) - min(exps))
        self.spread = spread
        self.precision = Fraction(precision)
        self.work_precision = self.precision + horizon * (loss + spread) + 4
        probe = StepSolver(ctx, self.L[0], -self.R[0])
        if field_degree == "auto":
            hint = probe.base_degree_hint
            est = ((probe.pi_y_for(self.work_precision)
                    - probe._floor_for(None, probe.kernel_candidates))
                   * probe.den * probe.r * probe.field.k)
            field_degree = 1
            for d in range(hint, 0, -1):
                if est * d <= StepSolver.DENSE_CAP:
                    field_degree = d
                    break
        self.solver = (probe if field_degree == 1
                       else StepSolver(ctx, self.L[0], -self.R[0],
                                       field_degree=field_degree))

    def noise_threshold(self, pi_eq):
        return min(self.precision, pi_eq - self.spread)

    def rhs_for(self, history, i):
        """w_i = sum_{m>=1} R_m y^(1)_{i-m} - L_m y_{i-m}."""
        ctx = self.ctx
        out = [ctx.zero.with_precision(self.work_precision) for _ in range(self.r)]
        for m in range(1, max(len(self.L), len(self.R))):
            if i - m < 0:
                break
            y = history[i - m]
            if m < len(self.R):
                y1 = [x.frob(1) for x in y]
                out = _vec_add(out, _mat_vec(self.R[m], y1))
            if m < len(self.L):
                out = _vec_sub(out, _mat_vec(self.L[m], y))
        return out


def _entry_converter(ctx, poly_mat):
    sample = next(iter(poly_mat.entries()))
    coeff_ring = sample.ring
    if isinstance(coeff_ring, RatFuncField):
        return lambda c: ctx.from_ratfunc(c)
    return lambda c: ctx.coerce(c)


def _poly_matrix_coeffs(ctx, poly_mat, conv):
    deg = max((e.degree() for e in poly_mat.entries()), default=0)
    mats = []
    for d in range(deg + 1):
        mats.append(Mat(ctx, [[conv(poly_mat[i, j].coeff(d))
                               for j in range(poly_mat.ncols)]
                              for i in range(poly_mat.nrows)]))
    while len(mats) > 1 and all(not bool(x) for x in mats[-1].entries()):
        mats.pop()
    return mats


def _poly_mat_mul_linear(ctx, mats, lin, r):
    """Multiply a matrix polynomial (list of Mat) by the scalar poly c0 + c1*T."""
    c0, c1 = lin
    out = [Mat.zeros(ctx, r, r) for _ in range(len(mats) + 1)]
    for d, m in enumerate(mats):
        out[d] = out[d] + m * c0
        out[d + 1] = out[d + 1] + m * c1
    return out


def _mat_vec(M, vec):
    out = []
    for i in range(M.nrows):
        acc = None
        for j, x in enumerate(vec):
            term = M[i, j] * x
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def _vec_add(a, b):
    return [x + y for x, y in zip(a, b)]


def _vec_sub(a, b):
    return [x - y for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# branches, certificates, verdicts


class Candidate:
    """One explored solution y with its per-degree valuation profile."""

    __slots__ = ("coeffs", "profile", "verdict", "additions")

    def __init__(self, coeffs, profile, additions=0):
        self.coeffs = coeffs
        self.profile = profile
        self.verdict = None
        # count of non-canonical kernel choices after degree 0; such branches
        # are T-shift-redundant for the rank and get capped away first
        self.additions = additions

    def key(self):
        parts = []
        for vec in self.coeffs:
            for x in vec:
                parts.append(tuple(sorted((a, c.to_int()) for a, c in x.terms.items())))
        return tuple(parts)

    def is_zero(self):
        return all(not x.terms for vec in self.coeffs for x in vec)

    def as_series(self, ctx, order):
        mats = [Mat(ctx, [[x] for x in vec]) for vec in self.coeffs[:order]]
        return TauMatrix(ctx, len(self.coeffs[0]), 1, mats, order)


class SolutionCertificate:
    """Explored candidates with verdicts, the rank claim, and the parameters.

    rank_low counts F_q[T]-independent CONVERGENT candidates; rank_high adds
    unresolved ones.  status: 'exact' when low == high and exploration was
    complete, else 'lower-bound'/'bounds'.
    """

    def __init__(self, candidates, horizon, window, precision, capped,
                 step_errors, pruned_per_step, base_field, missing_kernel=0):
        self.candidates = candidates
        self.horizon = horizon
        self.window = window
        self.precision = precision
        self.capped = capped
        self.step_errors = step_errors
        self.pruned_per_step = pruned_per_step
        self.missing_kernel = missing_kernel
        conv = [c for c in candidates if c.verdict == CONVERGENT and not c.is_zero()]
        und = [c for c in candidates if c.verdict == UNDECIDED]
        self.rank_low = _fq_span_dim([c.coeffs[0] for c in conv], base_field)
        self.rank_high = self.rank_low + len(und)
        if capped or step_errors or missing_kernel:
            self.status = "lower-bound"
        elif self.rank_low == self.rank_high:
            self.status = "exact"
        else:
            self.status = "bounds"

    @property
    def rank(self):
        return self.rank_low

    def convergent(self):
        return [c for c in self.candidates if c.verdict == CONVERGENT and not c.is_zero()]

    def __repr__(self):
        return (f"Certificate(rank={self.rank_low}..{self.rank_high}, "
                f"{self.status}, horizon={self.horizon}, window={self.window})")


def _fq_span_dim(vectors, base_field):
    """F_q-dimension of the span of vectors of series-model elements."""
    if not vectors:
        return 0
    p = base_field.p
    cols = {}
    rows = []
    for vec in vectors:
        entries = {}
        for j, x in enumerate(vec):
            for a, c in x.terms.items():
                for l, v in enumerate(c.coeffs):
                    if v:
                        key = (j, a, l)
                        col = cols.setdefault(key, len(cols))
                        entries[col] = v
        rows.append(entries)
    g = FqGauss(p, len(cols))
    for r in rows:
        g.add_row(r)
    return g.rank()


def _profile_value(vec):
    vals = [x.valuation() for x in vec if x.terms]
    return min(vals) if vals else None


def _keep_after_prune(prev, new):
    """Monotone-tail rule: keep when the new coefficient strictly gains
    valuation (zero coefficients count as +infinity)."""
    if new is None:
        return True
    if prev is None:
        return False
    return new > prev


def twisted_solve(system):
    """Breadth-first consecutive-coefficient solve; returns the certificate."""
    ctx = system.ctx
    horizon = system.horizon
    cap = system.branch_cap
    solver = system.solver
    branches = [Candidate([], [])]
    capped = False
    step_errors = []
    pruned_per_step = []
    missing_kernel = 0
    for i in range(horizon):
        nxt = []
        seen = set()
        pruned = [0, 0]  # [nonzero stems, zero stems]
        pending = []
        pi_eq = system.work_precision
        for br in branches:
            w = system.rhs_for(br.coeffs, i)
            pending.append((br, w))
            for x in w:
                if x.precision is not None and x.precision < pi_eq:
                    pi_eq = x.precision
        threshold = system.noise_threshold(pi_eq)
        for br, w in pending:
            try:
                part, kernel, pi_out = solver.solve(w, pi_eq, threshold)
                if i == 0:
                    expected = solver.expected_kernel_dim()
                    if expected is not None and len(kernel) < expected:
                        missing_kernel = expected - len(kernel)
            except PrecisionError as exc:
                step_errors.append((i, str(exc)))
                part, kernel = None, []
            if part is None:
                continue  # branch dies: no continuation at this degree
            options = [part]
            if kernel:
                combos = _kernel_combos(ctx, kernel, cap)
                if combos is None:
                    capped = True
                    combos = []
                for combo in combos:
                    options.append(_vec_add(part, combo))
            prev = br.profile[-1] if br.profile else None
            stem = 1 if br.is_zero() else 0
            for oi, opt in enumerate(options):
                v_new = _profile_value(opt)
                if i >= 1 and oi > 0 and not _keep_after_prune(prev, v_new):
                    pruned[stem] += 1
                    continue
                extra = br.additions + (1 if (i >= 1 and oi > 0) else 0)
                cand = Candidate(br.coeffs + [opt], br.profile + [v_new], extra)
                k = cand.key()
                if k in seen:
                    continue
                seen.add(k)
                nxt.append(cand)
        pruned_per_step.append(tuple(pruned))
        if len(nxt) > cap:
            capped = True
            nxt.sort(key=lambda c: (c.additions, c.key()))
            nxt = nxt[:cap]
        branches = nxt
        if not branches:
            break
    for br in branches:
        br.verdict = _verdict(br, system)
    branches.sort(key=lambda c: (c.verdict != CONVERGENT, c.key()))
    if missing_kernel:
        solver.limitations.add(
            f"{missing_kernel} of the expected degree-0 kernel dimensions are "
            "not representable in the fractional-exponent model at the caps")
    cert = SolutionCertificate(branches, horizon, system.window, system.precision,
                               capped, step_errors, pruned_per_step,
                               ctx.base_field, missing_kernel=missing_kernel)
    cert.searched_degrees = solver.searched_degrees()
    cert.base_degree_hint = solver.base_degree_hint
    cert.limitations = sorted(solver.limitations)
    return cert


def _kernel_combos(ctx, kernel, cap):
    """All nonzero F_p-combinations of the kernel basis (None when too many)."""
    p = ctx.p
    d = len(kernel)
    total = p ** d - 1
    if total > cap:
        return None
    combos = []
    counters = [0] * d
    for n in range(1, p ** d):
        v = n
        digits = []
        for _ in range(d):
            digits.append(v % p)
            v //= p
        vec = None
        for ki, m in enumerate(digits):
            if m == 0:
                continue
            scaled = [x * ctx.from_ff(ctx.base_field.coerce(m)) for x in kernel[ki]]
            vec = scaled if vec is None else _vec_add(vec, scaled)
        combos.append(vec)
    return combos


def _verdict(cand, system):
    """CONVERGENT: strictly increasing finite valuations over the trailing
    window; zero coefficients after the last finite one count as consistent
    when their certified precision exceeds that valuation."""
    window = system.window
    prof = cand.profile
    if all(v is None for v in prof):
        return CONVERGENT  # the zero solution
    last = max(i for i, v in enumerate(prof) if v is not None)
    tail = prof[max(0, last - window + 1):last + 1]
    if any(v is None for v in tail):
        return UNDECIDED  # zero coefficient interior to the trailing window
    for a, b in zip(tail, tail[1:]):
        if b <= a:
            return DIVERGENT
    if last == len(prof) - 1:
        return CONVERGENT if len(tail) >= min(window, len(prof)) else UNDECIDED
    return CONVERGENT if _tail_known(cand, last, system) else UNDECIDED


def _tail_known(cand, last, system):
    """Zero coefficients after the last finite valuation must be known to a
    precision beyond that valuation."""
    v_last = cand.profile[last]
    for vec in cand.coeffs[last + 1:]:
        for x in vec:
            if x.precision is not None and v_last is not None and x.precision <= v_last:
                return False
    return True


# ---------------------------------------------------------------------------
# public entry points


def _analytic_Q(M, ctx):
    if isinstance(M, TMotive):
        return M.companion_Q()
    return M  # already a Q matrix or RationalQ


def make_system(M, direction, ctx=None, horizon=24, window=6, precision=64,
                branch_cap=64, field_degree="auto"):
    if ctx is None:
        if isinstance(M, TMotive) and isinstance(M.ring, CinfContext):
            ctx = M.ring
        elif isinstance(M, TMotive):
            f = M.field
            ctx = CinfContext(f.p, f.k, precision=precision)
        else:
            raise ValidationError("need a series context")
    Q = _analytic_Q(M, ctx)
    return TwistedSystem(ctx, Q, direction, horizon=horizon, window=window,
                         precision=precision, branch_cap=branch_cap,
                         field_degree=field_degree)


def h1_of(M, ctx=None, horizon=24, window=6, precision=64, branch_cap=64,
          field_degree="auto"):
    """(value, status, certificate) for h^1 = rank of the tau-fixed points."""
    cert = twisted_solve(make_system(M, H1_UPPER, ctx, horizon, window,
                                     precision, branch_cap, field_degree))
    return cert.rank_low, cert.status, cert


def h_1_of(M, ctx=None, horizon=24, window=6, precision=64, branch_cap=64,
           field_degree="auto"):
    """(value, status, certificate) for h_1 = rank of the lattice of M."""
    cert = twisted_solve(make_system(M, H1_LOWER, ctx, horizon, window,
                                     precision, branch_cap, field_degree))
    return cert.rank_low, cert.status, cert


UNIFORMIZABLE = "UNIFORMIZABLE"
NOT_UNIFORMIZABLE = "NOT_UNIFORMIZABLE"
UNDECIDED_VERDICT = "UNDECIDED"


def uniformizability(M, ctx=None, horizon=24, window=6, precision=64,
                     branch_cap=64):
    """Sufficient valuation bound for the rank-2n family, else the h_1 = r test."""
    if isinstance(M, TMotive) and is_m_of_a_shape(M):
        q = M.q
        bound = Fraction(q, q * q - 1)
        entries = list(M.A[1].entries())
        vals = []
        for x in entries:
            v = x.valuation() if hasattr(x, "valuation") else x.v_inf()
            vals.append(v)
        if all(v is None or v > bound for v in vals):
            return UNIFORMIZABLE, "entry-valuation bound", None
    r = M.rank_dim()[0] if isinstance(M, TMotive) else M.nrows
    value, status, cert = h_1_of(M, ctx, horizon, window, precision, branch_cap)
    if status == "exact" and value == r:
        return UNIFORMIZABLE, "h_1 = r (exact)", cert
    if status == "exact" and value < r:
        return NOT_UNIFORMIZABLE, f"h_1 = {value} < r = {r} (exact)", cert
    return UNDECIDED_VERDICT, f"h_1 in [{cert.rank_low}, {cert.rank_high}]", cert


def pairing_matrix(h1_cert, h_1_cert, M, ctx=None, order=None):
    """Gram matrix of the canonical pairing on the certificate bases, over
    F_q[T]; raises on inexact certificates, checks unit determinant."""
    if h1_cert.status != "exact" or h_1_cert.status != "exact":
        raise PrecisionError("pairing needs exact certificates")
    g_cands = h1_cert.convergent()
    l_cands = h_1_cert.convergent()
    if not g_cands or not l_cands:
        raise ValidationError("pairing needs convergent candidates on both sides")
    if ctx is None:
        ctx = g_cands[0].coeffs[0][0].ctx
    order = order or min(h1_cert.horizon, h_1_cert.horizon)
    field = ctx.base_field
    R = PolyRing(field, "T")
    rows = []
    for lc in l_cands:
        row = []
        for gc in g_cands:
            series = _pair_series(lc, gc, ctx, order)
            row.append(_extract_fq_poly(series, ctx, R))
        rows.append(row)
    gram = Mat(R, rows)
    det = gram.det()
    if det.degree() != 0 or not det.const_value():
        raise ValidationError("pairing matrix is not unimodular through truncation")
    return gram


def _pair_series(lc, gc, ctx, order):
    out = []
    for k in range(order):
        acc = ctx.zero
        for a in range(k + 1):
            b = k - a
            if a >= len(lc.coeffs) or b >= len(gc.coeffs):
                continue
            for lj, gj in zip(lc.coeffs[a], gc.coeffs[b]):
                acc = acc + lj * gj
        out.append(acc)
    return out


def _extract_fq_poly(series, ctx, R):
    """Series coefficients must be F_q constants modulo precision."""
    coeffs = []
    for x in series:
        c0 = x.coeff(Fraction(0))
        residual = [a for a in x.terms if a != 0]
        if residual and min(residual) <= 0:
            raise PrecisionError("pairing coefficient is not constant at this precision")
        for a in residual:
            pass  # positive-valuation noise is below the certified tail
        if c0 and c0.field.k > ctx.e and not _in_base(c0, ctx):
            raise PrecisionError("pairing value left F_q")
        coeffs.append(ctx.base_field.element_from_int(c0.to_int() % ctx.q)
                      if c0 else ctx.base_field.zero)
    return Poly(ctx.base_field, "T", coeffs)


def _in_base(c, ctx):
    return c ** ctx.q == c
