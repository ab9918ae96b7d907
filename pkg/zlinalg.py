"""
zlinalg.py
Exact integer matrix algebra: Hermite and Smith normal forms, reduction of
vectors modulo a row lattice, abelian invariants.

Relations are rows throughout. Entries are Python ints, so nothing overflows;
pivots are chosen with minimal absolute value to keep the entries small.
"""

from dataclasses import dataclass

from sympy.core.intfunc import igcdex

from config import HNF_BATCH_ROWS
from exceptions import DimensionError


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{self.rows}x{self.cols} matrix cannot hold {len(self.entries)} entries")

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        a, b = self.to_rows(), other.to_rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
               for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)

    def is_zero(self):
        return not any(self.entries)

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in r) for r in self.to_rows()) or "[]"


def _axpy(target, source, q, start=0):
    """target += q * source, from column ``start`` on."""
    if q:
        for k in range(start, len(target)):
            s = source[k]
            if s:
                target[k] += q * s


def _leading(row):
    for k, x in enumerate(row):
        if x:
            return k
    return None


def _hnf_in_place(rows, ncols, transform=None):
    """Row Hermite normal form of ``rows`` in place; returns the rank."""
    m = len(rows)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        found = False
        while True:
            piv = None
            for i in range(r, m):
                v = rows[i][c]
                if v and (piv is None or abs(v) < abs(rows[piv][c])):
                    piv = i
            if piv is None:
                break
            found = True
            if piv != r:
                rows[r], rows[piv] = rows[piv], rows[r]
                if transform is not None:
                    transform[r], transform[piv] = transform[piv], transform[r]
            p = rows[r][c]
            clean = True
            for i in range(r + 1, m):
                v = rows[i][c]
                if v:
                    q = -(v // p)
                    _axpy(rows[i], rows[r], q, c)
                    if transform is not None:
                        _axpy(transform[i], transform[r], q)
                    if rows[i][c]:
                        clean = False
            if clean:
                break
        if not found:
            continue
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            if transform is not None:
                transform[r] = [-x for x in transform[r]]
        p = rows[r][c]
        for i in range(r):
            q = rows[i][c] // p
            if q:
                _axpy(rows[i], rows[r], -q, c)
                if transform is not None:
                    _axpy(transform[i], transform[r], -q)
        r += 1
    return r


def hnf(A):
    """
    Row Hermite normal form. Returns (H, U) with U @ A == H and U unimodular:
    positive pivots in strictly increasing columns, entries above a pivot in
    [0, pivot), zero rows last.
    """
    rows = A.to_rows()
    transform = IntMatrix.identity(A.rows).to_rows()
    _hnf_in_place(rows, A.cols, transform)
    return IntMatrix.from_rows(rows, A.cols), IntMatrix.from_rows(transform, A.rows)


def hnf_rows(rows, ncols):
    """Nonzero rows of the HNF of a list of integer rows (no transform)."""
    work = [list(r) for r in rows]
    rank = _hnf_in_place(work, ncols)
    return work[:rank]


def snf(A):
    """
    Smith normal form. Returns (S, U, V) with U @ A @ V == S, S diagonal with
    d1 | d2 | ... | dr > 0 followed by zeros, U and V unimodular.
    """
    m, n = A.rows, A.cols
    S = A.to_rows()
    U = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_col(target, source, q):
        for row in S:
            row[target] += q * row[source]
        for row in V:
            row[target] += q * row[source]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = S[i][j]
                if v and (best is None or abs(v) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    q = -(S[i][t] // p)
                    _axpy(S[i], S[t], q)
                    _axpy(U[i], U[t], q)
                    dirty = dirty or bool(S[i][t])
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    dirty = dirty or bool(S[t][j])
            if dirty:
                best = (t, t)
                for i in range(t + 1, m):
                    if S[i][t] and abs(S[i][t]) < abs(S[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, n):
                    if S[t][j] and abs(S[t][j]) < abs(S[best[0]][best[1]]):
                        best = (t, j)
                swap_rows(t, best[0])
                swap_cols(t, best[1])
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % p), None)
            if bad is None:
                break
            _axpy(S[t], S[bad[0]], 1)
            _axpy(U[t], U[bad[0]], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return (IntMatrix.from_rows(S, n), IntMatrix.from_rows(U, m), IntMatrix.from_rows(V, n))


def pivot_columns(H):
    """(row index, pivot column) for every nonzero row of an HNF matrix."""
    out = []
    for i in range(H.rows):
        c = _leading(H.row(i))
        if c is not None:
            out.append((i, c))
    return out


def reduce_mod_rows(H, v):
    """
    Canonical representative of v modulo the row lattice of H (in HNF):
    every pivot-column entry ends up in [0, pivot).
    """
    if len(v) != H.cols:
        raise DimensionError(f"vector of length {len(v)} against {H.cols} columns")
    v = list(v)
    for i, c in pivot_columns(H):
        row = H.row(i)
        q = v[c] // row[c]
        if q:
            _axpy(v, row, -q, c)
    return v


def abelian_invariants(A, ambient_rank):
    """
    Invariants of Z^n / rowspace(A): (torsion divisors > 1 in divisibility
    order, free rank).
    """
    if A.cols != ambient_rank:
        raise DimensionError(f"relation matrix has {A.cols} columns, expected {ambient_rank}")
    if A.rows == 0 or A.is_zero():
        return [], ambient_rank
    S, _, _ = snf(A)
    diag = [S[i, i] for i in range(min(S.rows, S.cols)) if S[i, i]]
    return [d for d in diag if d > 1], ambient_rank - len(diag)


def kernel_lattice(images, relations, target_dim):
    """
    Basis rows of {x in Z^k : x @ images lies in rowspace(relations)}, where
    ``images`` has k rows of length target_dim.
    """
    k = len(images)
    width = target_dim + k
    stacked = []
    for i, img in enumerate(images):
        unit = [0] * k
        unit[i] = 1
        stacked.append(list(img) + unit)
    for rel in relations:
        stacked.append(list(rel) + [0] * k)
    basis = hnf_rows(stacked, width)
    return [row[target_dim:] for row in basis if not any(row[:target_dim])]


class HermiteLattice:
    """
    Row lattice in Hermite normal form, grown incrementally. Rows are buffered
    and merged in sorted batches so the result does not depend on the order
    in which rows arrive.
    """

    def __init__(self, ncols, batch_rows=HNF_BATCH_ROWS):
        self.ncols = ncols
        self.batch_rows = batch_rows
        self.pivots = {}
        self.pending = []
        self.rows_seen = 0

    def add(self, row):
        if len(row) != self.ncols:
            raise DimensionError(f"row of length {len(row)} against {self.ncols} columns")
        self.rows_seen += 1
        if any(row):
            self.pending.append(tuple(row))
            if len(self.pending) >= self.batch_rows:
                self.flush()

    def flush(self):
        batch, self.pending = sorted(set(self.pending)), []
        for row in batch:
            self._insert(list(row))
        self._reduce_above()

    def _insert(self, v):
        c = _leading(v)
        while c is not None:
            p = self.pivots.get(c)
            if p is None:
                if v[c] < 0:
                    v = [-x for x in v]
                self.pivots[c] = v
                return
            a, b = p[c], v[c]
            if b % a == 0:
                _axpy(v, p, -(b // a), c)
            else:
                s, t, g = igcdex(a, b)
                s, t, g = int(s), int(t), int(g)
                new_p = [s * x + t * y for x, y in zip(p, v)]
                v = [(b // g) * x - (a // g) * y for x, y in zip(p, v)]
                self.pivots[c] = new_p
            nxt = _leading(v[c + 1:])
            c = None if nxt is None else c + 1 + nxt

    def _reduce_above(self):
        cols = sorted(self.pivots)
        for idx, c in enumerate(cols):
            prow = self.pivots[c]
            p = prow[c]
            for above in cols[:idx]:
                row = self.pivots[above]
                q = row[c] // p
                if q:
                    _axpy(row, prow, -q, c)

    def matrix(self):
        if self.pending:
            self.flush()
        return IntMatrix.from_rows([self.pivots[c] for c in sorted(self.pivots)], self.ncols)

    def reduce(self, v):
        if self.pending:
            self.flush()
        v = list(v)
        for c in sorted(self.pivots):
            row = self.pivots[c]
            q = v[c] // row[c]
            if q:
                _axpy(v, row, -q, c)
        return v


def saturation(rows, ncols):
    """
    HNF rows of the saturation (Q-span intersected with Z^n) of a row
    lattice; Z^n modulo the result is the torsion-free part of Z^n / lattice.
    """
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    S, _, V = snf(IntMatrix.from_rows(rows, ncols))
    rank = sum(1 for i in range(min(S.rows, S.cols)) if S[i, i])
    # V is unimodular, so its HNF transform is its inverse
    _, V_inv = hnf(V)
    return hnf_rows([V_inv.row(i) for i in range(rank)], ncols)
