"""Exact rational and integer-lattice linear algebra.

Everything here works on ``fractions.Fraction`` and Python ints, so the
polyhedral code built on top never sees a rounding error.  Matrices are plain
sequences of rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence]


class SingularMatrix(ValueError):
    pass


class ZeroVector(ValueError):
    pass


def _to_fraction_rows(M: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in M]


def _check_square(M: Matrix) -> int:
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    return n


def det(M: Matrix) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    n = _check_square(M)
    if n == 0:
        return Fraction(1)
    a = _to_fraction_rows(M)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor:
                row_r, row_c = a[r], a[col]
                for c in range(col, n):
                    row_r[c] -= factor * row_c[c]
    return sign * result


def solve(M: Matrix, b: Sequence) -> list[Fraction]:
    """Solve ``M x = b`` exactly; raise :class:`SingularMatrix` if det M = 0."""
    n = _check_square(M)
    if len(b) != n:
        raise ValueError("right-hand side has wrong length")
    a = [row + [Fraction(v)] for row, v in zip(_to_fraction_rows(M), b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        row_c = a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], row_c)]
    return [a[r][n] for r in range(n)]


def inverse(M: Matrix) -> list[list[Fraction]]:
    """Gauss-Jordan on [M | I]."""
    n = _check_square(M)
    a = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(_to_fraction_rows(M))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        row_c = a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], row_c)]
    return [row[n:] for row in a]


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix (Bareiss, fraction free)."""
    n = _check_square(M)
    a = [[int(x) for x in row] for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def adjugate(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integer adjugate: adj(M) @ M = det(M) * I."""
    n = _check_square(M)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for r, row in enumerate(M) if r != i]
            adj[j][i] = (-1) ** (i + j) * int_det(minor)
    return adj


def matmul(A: Matrix, B: Matrix) -> list[list]:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def transpose(M: Matrix) -> list[list]:
    return [list(col) for col in zip(*M)]


def rref(M: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = _to_fraction_rows(M)
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return len(rref(vectors)[1])


def nullspace(M: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel of ``M`` (rows of ``M`` are equations)."""
    if not M:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ncols = len(M[0])
    a, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(a, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def integer_direction(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector along it."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    return primitive([int(x * den) for x in fr])


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (direction kept)."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise ZeroVector("cannot normalise the zero vector")
    return tuple(int(x) // g for x in v)


def affine_dim(points: Sequence[Sequence], directions: Sequence[Sequence] = ()) -> int:
    """Dimension of the affine hull of ``points`` plus the span of ``directions``."""
    points = list(points)
    if not points:
        raise ValueError("affine_dim of an empty set is undefined")
    p0 = points[0]
    diffs = [[x - y for x, y in zip(p, p0)] for p in points[1:]]
    diffs.extend(list(d) for d in directions)
    return rank(diffs)


def smith_normal_form(M: Matrix):
    """Smith normal form of an integer matrix.

    Returns ``(U, D, V)`` with ``U @ M @ V == D``, ``U`` and ``V`` unimodular and
    ``D`` diagonal with d1 | d2 | ... (non-negative).
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(X, i, j):
        X[i], X[j] = X[j], X[i]

    def swap_cols(X, i, j):
        for row in X:
            row[i], row[j] = row[j], row[i]

    def add_row(X, src, dst, k):  # row_dst += k * row_src
        X[dst] = [a + k * b for a, b in zip(X[dst], X[src])]

    def add_col(X, src, dst, k):  # col_dst += k * col_src
        for row in X:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        # bring the smallest nonzero entry of the trailing block to (t, t)
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                return U, A, V
            _, i, j = min(nz)
            swap_rows(A, t, i), swap_rows(U, t, i)
            swap_cols(A, t, j), swap_cols(V, t, j)
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(A, t, i, -q), add_row(U, t, i, -q)
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(A, t, j, -q), add_col(V, t, j, -q)
                if A[t][j]:
                    done = False
            if not done:
                continue
            # divisibility: p must divide the whole trailing block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(A, bad[0], t, 1), add_row(U, bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def elementary_divisors(M: Matrix) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def is_simple(generators: Sequence[Sequence[int]]) -> bool:
    """True iff the (independent) generators extend to a basis of Z^n."""
    gens = [list(g) for g in generators]
    if not gens:
        return True
    if rank(gens) != len(gens):
        raise ValueError("generators are linearly dependent")
    return all(d == 1 for d in elementary_divisors(gens))


def saturation_basis(generators: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integer basis of Z^n intersected with the span of ``generators``."""
    gens = [list(g) for g in generators]
    _, D, V = smith_normal_form(gens)
    k = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    Vinv = [[int(x) for x in row] for row in inverse(V)]
    return [Vinv[i] for i in range(k)]


def multiplicity(generators: Sequence[Sequence[int]]) -> int:
    """Index of the sublattice spanned by ``generators`` in its saturation."""
    d = 1
    for x in elementary_divisors([list(g) for g in generators]):
        d *= x
    return d
