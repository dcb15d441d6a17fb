"""Exact integer and rational linear algebra on small dense matrices.

Everything here works on tuples of Python ints (arbitrary precision) or
fractions.Fraction, so no overflow or rounding is possible.  Matrices are
sequences of row tuples.
"""

from fractions import Fraction
from math import gcd


def vec_gcd(vec):
    g = 0
    for x in vec:
        g = gcd(g, x)
        if g == 1:
            return 1
    return g


def is_primitive(vec):
    return vec_gcd(vec) == 1


def mat_rank(rows):
    """Rank of an integer (or rational) matrix."""
    work = [list(map(Fraction, r)) for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(work)):
            if work[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pv = work[rank][col]
        prow = [x / pv for x in work[rank]]
        work[rank] = prow
        for i in range(len(work)):
            if i != rank and work[i][col] != 0:
                c = work[i][col]
                work[i] = [a - c * b for a, b in zip(work[i], prow)]
        rank += 1
        if rank == len(work):
            break
    return rank


def _int_row_echelon(work, ncols_left):
    """In-place integer row echelon on the left ncols_left columns of work.

    Uses repeated quotient subtraction (Euclid) so entries stay integral.
    Returns the number of pivot rows.
    """
    nrows = len(work)
    prow = 0
    for col in range(ncols_left):
        if prow == nrows:
            break
        while True:
            pivot = None
            best = None
            for i in range(prow, nrows):
                v = abs(work[i][col])
                if v and (best is None or v < best):
                    best = v
                    pivot = i
            if pivot is None:
                break
            work[prow], work[pivot] = work[pivot], work[prow]
            done = True
            pv = work[prow][col]
            for i in range(prow + 1, nrows):
                v = work[i][col]
                if v:
                    q = v // pv
                    if q:
                        work[i] = [a - q * b for a, b in zip(work[i], work[prow])]
                    if work[i][col]:
                        done = False
            if done:
                if pv < 0:
                    work[prow] = [-a for a in work[prow]]
                prow += 1
                break
    return prow


def kernel_lattice(rows, ncols):
    """Basis of the integer kernel {v : M v = 0} of an integer matrix.

    The kernel of an integer matrix is a saturated lattice, so the rows
    returned form a lattice basis whose rational span meets Z^n exactly in
    the lattice; each basis row is primitive.  The basis is lattice-reduced
    so downstream completion starts from short, sparse vectors.
    """
    m = len(rows)
    # rows of [M^T | I]: one row per variable
    work = [[rows[i][v] for i in range(m)] + [1 if w == v else 0 for w in range(ncols)]
            for v in range(ncols)]
    prow = _int_row_echelon(work, m)
    basis = [list(r[m:]) for r in work[prow:]]
    basis = lll_reduce(basis)
    out = []
    for row in basis:
        for x in row:
            if x:
                if x < 0:
                    row = [-a for a in row]
                break
        out.append(tuple(row))
    return sorted(out)


def lll_reduce(rows, delta=Fraction(3, 4)):
    """Lattice-reduce independent integer rows (exact rational LLL)."""
    basis = [list(map(int, r)) for r in rows]
    m = len(basis)
    if m <= 1:
        return basis

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    def gram():
        star = []
        mu = [[Fraction(0)] * m for _ in range(m)]
        norm = []
        for i in range(m):
            v = [Fraction(x) for x in basis[i]]
            for j in range(i):
                if norm[j]:
                    mu[i][j] = dot([Fraction(x) for x in basis[i]],
                                   star[j]) / norm[j]
                    v = [a - mu[i][j] * s for a, s in zip(v, star[j])]
            star.append(v)
            norm.append(dot(v, v))
        return star, mu, norm

    star, mu, norm = gram()
    k = 1
    while k < m:
        changed = False
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[j])]
                changed = True
        if changed:
            star, mu, norm = gram()
        if norm[k] >= (delta - mu[k][k - 1] ** 2) * norm[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            star, mu, norm = gram()
            k = max(k - 1, 1)
    return basis


def hermite_form(rows):
    """Row-style Hermite normal form as a canonical form for a lattice.

    Pivots positive, entries above a pivot reduced to [0, pivot); zero rows
    dropped.  Two row sets span the same lattice iff their forms agree.
    """
    work = [list(r) for r in rows if any(r)]
    if not work:
        return ()
    ncols = len(work[0])
    prow = _int_row_echelon(work, ncols)
    work = work[:prow]
    # reduce entries above each pivot
    pivots = []
    for r in work:
        c = next(i for i, x in enumerate(r) if x)
        pivots.append(c)
    for k in range(len(work) - 1, -1, -1):
        c = pivots[k]
        pv = work[k][c]
        for i in range(k):
            q = work[i][c] // pv
            if q:
                work[i] = [a - q * b for a, b in zip(work[i], work[k])]
    return tuple(tuple(r) for r in work)


def lattice_member(hnf, vec):
    """Integer membership of vec in the lattice given by its Hermite form."""
    v = list(vec)
    for row in hnf:
        c = next(i for i, x in enumerate(row) if x)
        if v[c] % row[c] != 0:
            return False
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def saturate_lattice(rows, ncols):
    """Basis of the saturation (rational span intersected with Z^n)."""
    if not any(any(r) for r in rows):
        return []
    # orthogonal complement of the row span, then its kernel again
    comp = kernel_lattice([tuple(r) for r in rows if any(r)], ncols)
    if not comp:
        # full rank: saturation is all of Z^n
        return [tuple(1 if j == i else 0 for j in range(ncols)) for i in range(ncols)]
    return kernel_lattice(comp, ncols)


def solve_rational(rows, rhs):
    """One rational solution x of M x = rhs, or None if inconsistent.

    Free variables are set to zero.
    """
    m = len(rows)
    if m == 0:
        return ()
    n = len(rows[0])
    work = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(m)]
    pivots = []
    prow = 0
    for col in range(n):
        pivot = None
        for i in range(prow, m):
            if work[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[prow], work[pivot] = work[pivot], work[prow]
        pv = work[prow][col]
        work[prow] = [x / pv for x in work[prow]]
        for i in range(m):
            if i != prow and work[i][col] != 0:
                c = work[i][col]
                work[i] = [a - c * b for a, b in zip(work[i], work[prow])]
        pivots.append(col)
        prow += 1
        if prow == m:
            break
    for i in range(prow, m):
        if work[i][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for k, col in enumerate(pivots):
        sol[col] = work[k][n]
    return tuple(sol)


def rref(rows):
    """Reduced row echelon form over the rationals; returns (rows, pivots)."""
    work = [list(map(Fraction, r)) for r in rows]
    work = [r for r in work if any(r)]
    if not work:
        return [], []
    n = len(work[0])
    pivots = []
    prow = 0
    for col in range(n):
        pivot = None
        for i in range(prow, len(work)):
            if work[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[prow], work[pivot] = work[pivot], work[prow]
        pv = work[prow][col]
        work[prow] = [x / pv for x in work[prow]]
        for i in range(len(work)):
            if i != prow and work[i][col] != 0:
                c = work[i][col]
                work[i] = [a - c * b for a, b in zip(work[i], work[prow])]
        pivots.append(col)
        prow += 1
        if prow == len(work):
            break
    return work[:prow], pivots


class RowSpace:
    """Incremental rational row space with membership and rank queries."""

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = []      # reduced rows, each a list of Fractions
        self.pivots = []    # pivot column per row

    def reduce(self, vec):
        v = list(map(Fraction, vec))
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                c = v[p]
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def add(self, vec):
        """Insert vec; returns True if it enlarged the space."""
        v = self.reduce(vec)
        for p in range(self.ncols):
            if v[p] != 0:
                pv = v[p]
                v = [x / pv for x in v]
                for i, row in enumerate(self.rows):
                    if row[p] != 0:
                        c = row[p]
                        self.rows[i] = [a - c * b for a, b in zip(row, v)]
                self.rows.append(v)
                self.pivots.append(p)
                return True
        return False

    def contains(self, vec):
        return not any(self.reduce(vec))

    def contains_space(self, other):
        return all(self.contains(r) for r in other.rows)

    @property
    def rank(self):
        return len(self.rows)
