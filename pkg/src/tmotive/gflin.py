"""Dense F_p linear systems with a factor-once / solve-many interface.

The h1 step systems reuse one coefficient matrix for every T-degree, so the
RREF and the row transform are computed once; each right-hand side then costs
a matrix-vector pass.  Rows are packed into Python ints for p = 2 (XOR
elimination); odd small p uses plain integer lists.
"""


class FqGauss:
    def __init__(self, p, ncols):
        self.p = p
        self.ncols = ncols
        self._rows = []
        self._done = False

    def add_row(self, entries):
        """entries: dict col -> coefficient (ints mod p)."""
        if self._done:
            raise RuntimeError("system already factored")
        self._rows.append({c: v % self.p for c, v in entries.items() if v % self.p})

    @property
    def nrows(self):
        return len(self._rows)

    def factor(self):
        """Compute the RREF, pivots and the row transform E (E*A = R)."""
        if self._done:
            return
        p, nc = self.p, self.ncols
        nr = len(self._rows)
        if p == 2:
            rows = []
            for r in self._rows:
                v = 0
                for c in r:
                    v |= 1 << c
                rows.append(v)
            trans = [1 << i for i in range(nr)]
            pivots = []
            rank = 0
            for col in range(nc):
                bit = 1 << col
                piv = next((i for i in range(rank, nr) if rows[i] & bit), None)
                if piv is None:
                    continue
                rows[rank], rows[piv] = rows[piv], rows[rank]
                trans[rank], trans[piv] = trans[piv], trans[rank]
                for i in range(nr):
                    if i != rank and rows[i] & bit:
                        rows[i] ^= rows[rank]
                        trans[i] ^= trans[rank]
                pivots.append(col)
                rank += 1
                if rank == nr:
                    break
            self._R = rows
            self._E = trans
            self._pivots = pivots
            self._rank = rank
        else:
            rows = [[0] * nc for _ in range(nr)]
            for i, r in enumerate(self._rows):
                for c, v in r.items():
                    rows[i][c] = v
            trans = [[1 if j == i else 0 for j in range(nr)] for i in range(nr)]
            pivots = []
            rank = 0
            for col in range(nc):
                piv = next((i for i in range(rank, nr) if rows[i][col]), None)
                if piv is None:
                    continue
                rows[rank], rows[piv] = rows[piv], rows[rank]
                trans[rank], trans[piv] = trans[piv], trans[rank]
                inv = pow(rows[rank][col], p - 2, p)
                rows[rank] = [(x * inv) % p for x in rows[rank]]
                trans[rank] = [(x * inv) % p for x in trans[rank]]
                for i in range(nr):
                    if i != rank and rows[i][col]:
                        c0 = rows[i][col]
                        rows[i] = [(x - c0 * y) % p for x, y in zip(rows[i], rows[rank])]
                        trans[i] = [(x - c0 * y) % p for x, y in zip(trans[i], trans[rank])]
                pivots.append(col)
                rank += 1
                if rank == nr:
                    break
            self._R = rows
            self._E = trans
            self._pivots = pivots
            self._rank = rank
        self._pivot_set = set(self._pivots)
        self._done = True

    # -- queries ---------------------------------------------------------------

    def rank(self):
        self.factor()
        return self._rank

    def solve(self, rhs):
        """One solution of A x = rhs (dict col->val per unknown), free vars 0.

        rhs: dict row_index -> value.  Returns dict col -> value or None.
        """
        self.factor()
        p = self.p
        nr = len(self._rows)
        if p == 2:
            b = 0
            for i, v in rhs.items():
                if v % 2:
                    b |= 1 << i
            d = [(self._E[i] & b).bit_count() & 1 for i in range(nr)]
        else:
            bv = [0] * nr
            for i, v in rhs.items():
                bv[i] = v % p
            d = []
            for i in range(nr):
                acc = 0
                for j, v in rhs.items():
                    acc += self._E[i][j] * v
                d.append(acc % p)
        for i in range(self._rank, nr):
            if d[i]:
                return None
        out = {}
        for i, col in enumerate(self._pivots):
            if d[i]:
                out[col] = d[i]
        return out

    def kernel_basis(self):
        """Basis of the null space, one dict per free column (deterministic)."""
        self.factor()
        p = self.p
        out = []
        for f in range(self.ncols):
            if f in self._pivot_set:
                continue
            vec = {f: 1}
            for i, col in enumerate(self._pivots):
                if p == 2:
                    c = (self._R[i] >> f) & 1
                else:
                    c = self._R[i][f]
                if c:
                    vec[col] = (-c) % p
            out.append(vec)
        return out
