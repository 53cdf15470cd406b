"""Exact integer linear algebra on nested lists of Python ints.

Matrices are plain ``list[list[int]]`` (row-major).  Every routine accepts any
nested sequence of integers, including numpy integer arrays, and returns fresh
lists; nothing here ever touches fixed-width arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf
from typing import Sequence

from .errors import NegativePowerOfNonUnimodular, NonSquare

Matrix = list[list[int]]


def as_matrix(obj) -> Matrix:
    """Copy a nested integer sequence into a list-of-lists of Python ints."""
    rows = [[int(x) for x in row] for row in obj]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise NonSquare("ragged matrix")
    return rows


def as_square(obj) -> Matrix:
    M = as_matrix(obj)
    if not M or any(len(r) != len(M) for r in M):
        raise NonSquare(f"expected a non-empty square matrix, got {len(M)} rows")
    return M


def identity(d: int) -> Matrix:
    return [[int(i == j) for j in range(d)] for i in range(d)]


def zeros(m: int, n: int | None = None) -> Matrix:
    return [[0] * (m if n is None else n) for _ in range(m)]


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def matadd(A, B) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scalar_mul(k: int, A) -> Matrix:
    return [[k * a for a in row] for row in A]


def block_diag(*blocks) -> Matrix:
    d = sum(len(b) for b in blocks)
    out = zeros(d)
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = int(x)
        off += len(b)
    return out


def columns_to_matrix(cols: Sequence[Sequence[int]]) -> Matrix:
    return transpose(cols)


def is_identity(A) -> bool:
    return all(A[i][j] == (i == j) for i in range(len(A)) for j in range(len(A)))


def det(M) -> int:
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    A = as_square(M)
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        rk = A[k]
        for i in range(k + 1, n):
            ri = A[i]
            aik = ri[k]
            for j in range(k + 1, n):
                # exact: Sylvester's identity guarantees divisibility
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def rank_Q(M) -> int:
    """Rank over the rationals, fraction-free elimination."""
    A = as_matrix(M)
    if not A:
        return 0
    m, n = len(A), len(A[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, m):
            aic = A[i][c]
            A[i] = [(A[i][j] * p - aic * A[r][j]) // prev for j in range(n)]
        prev = p
        r += 1
        if r == m:
            break
    return r


def kernel_dim_Q(M) -> int:
    A = as_matrix(M)
    return len(A[0]) - rank_Q(A)


@dataclass
class HnfResult:
    H: Matrix
    U: Matrix


@dataclass
class SnfResult:
    D: Matrix
    U: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0])))]


def _row_op(A, i, j, q):
    # row_i -= q * row_j
    if q:
        ri, rj = A[i], A[j]
        for k in range(len(ri)):
            ri[k] -= q * rj[k]


def hnf(M) -> HnfResult:
    """Row-style Hermite normal form: ``U @ M == H``.

    H is in row echelon form with positive pivots and the entries above each
    pivot reduced into ``[0, pivot)``; zero rows sit at the bottom.  Works for
    rectangular input.
    """
    H = as_matrix(M)
    m = len(H)
    n = len(H[0]) if m else 0
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            if p != r:
                H[r], H[p] = H[p], H[r]
                U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    _row_op(H, i, r, q)
                    _row_op(U, i, r, q)
                    if H[i][c]:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            _row_op(H, i, r, q)
            _row_op(U, i, r, q)
        r += 1
    return HnfResult(H, U)


def snf(M) -> SnfResult:
    """Smith normal form ``U @ M @ V == D`` with ``d_i | d_{i+1}``, ``d_i >= 0``."""
    A = as_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for X in (A, V):
            for row in X:
                row[i], row[j] = row[j], row[i]

    def col_op(i, j, q):
        # col_i -= q * col_j
        if q:
            for X in (A, V):
                for row in X:
                    row[i] -= q * row[j]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    _row_op(A, i, t, q)
                    _row_op(U, i, t, q)
                    if A[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    col_op(j, t, q)
                    if A[t][j]:
                        changed = True
            if changed:
                # move the smallest remaining entry of row/column t to the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            piv = A[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            _row_op(A, t, bad, -1)
            _row_op(U, t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return SnfResult(A, U, V)


def lattice_index(A) -> int | float:
    """Index in Z^d of the lattice spanned by the columns of ``A``.

    Returns ``math.inf`` when the columns are dependent.
    """
    D = abs(det(A))
    return D if D else inf


def sublattice_index(gens: Sequence[Sequence[int]], d: int) -> tuple[int, int | float]:
    """(rank, index) of the subgroup of Z^d spanned by the vectors ``gens``."""
    if not gens:
        return 0, inf
    diag = [x for x in snf(columns_to_matrix(gens)).diagonal if x]
    if len(diag) < d:
        return len(diag), inf
    idx = 1
    for x in diag:
        idx *= x
    return d, idx


def adjugate(M) -> Matrix:
    A = as_square(M)
    n = len(A)
    if n == 1:
        return [[1]]
    adj = zeros(n)
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(A) if k != i]
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return adj


def inverse_unimodular(M) -> Matrix:
    d = det(M)
    if d not in (1, -1):
        raise NegativePowerOfNonUnimodular(f"determinant {d} is not a unit")
    return scalar_mul(d, adjugate(M))


def matpow(M, n: int) -> Matrix:
    """``M**n`` by binary exponentiation; negative ``n`` needs ``det M = ±1``."""
    A = as_square(M)
    if n < 0:
        A = inverse_unimodular(A)
        n = -n
    result = identity(len(A))
    while n:
        if n & 1:
            result = matmul(result, A)
        n >>= 1
        if n:
            A = matmul(A, A)
    return result


def poly_at_matrix(coeffs: Sequence[int], M) -> Matrix:
    """Evaluate the polynomial with ascending ``coeffs`` at ``M`` (Horner)."""
    A = as_square(M)
    d = len(A)
    R = zeros(d)
    for c in reversed(coeffs):
        R = matmul(R, A)
        for i in range(d):
            R[i][i] += c
    return R


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    """Ascending coefficients of the interpolating polynomial (Newton form)."""
    n = len(xs)
    dd = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # coeffs = coeffs * (x - xs[i]) + dd[i]
        shifted = [Fraction(0)] + coeffs[:-1]
        coeffs = [s - xs[i] * c for s, c in zip(shifted, coeffs)]
        coeffs[0] += dd[i]
    return coeffs


def charpoly(M) -> list[int]:
    """Characteristic polynomial ``det(xI - M)``, ascending integer coefficients.

    Evaluated at the d+1 points 0, 1, -1, 2, -2, ... and interpolated exactly.
    """
    A = as_square(M)
    d = len(A)
    xs = [0]
    k = 1
    while len(xs) < d + 1:
        xs += [k, -k]
        k += 1
    xs = xs[: d + 1]
    ys = []
    for x in xs:
        B = [[(x if i == j else 0) - A[i][j] for j in range(d)] for i in range(d)]
        ys.append(det(B))
    coeffs = _interpolate(xs, ys)
    if any(c.denominator != 1 for c in coeffs) or coeffs[-1] != 1:
        raise AssertionError(f"charpoly interpolation produced non-integral {coeffs}")
    return [int(c) for c in coeffs]


def solve_rational(A, b) -> list[Fraction] | None:
    """One solution of ``A x = b`` over Q (free variables set to 0), or None."""
    m = len(A)
    n = len(A[0]) if m else 0
    R = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(R[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = R[i][n]
    return x


def minpoly(M) -> list[int]:
    """Minimal polynomial over Q, ascending coefficients (monic, integral)."""
    A = as_square(M)
    d = len(A)
    powers = [identity(d)]
    for k in range(1, d + 1):
        Pk = matmul(powers[-1], A)
        cols = [[x for row in P for x in row] for P in powers]
        sol = solve_rational(transpose(cols), [x for row in Pk for x in row])
        if sol is not None:
            coeffs = [-c for c in sol] + [Fraction(1)]
            if any(c.denominator != 1 for c in coeffs):
                raise AssertionError("minimal polynomial of an integer matrix must be integral")
            return [int(c) for c in coeffs]
        powers.append(Pk)
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


def rank_mod_p(M, p: int) -> int:
    A = [[x % p for x in row] for row in as_matrix(M)]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return r
