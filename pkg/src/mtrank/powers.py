"""Index sequence of power mapping tori.

Fix a cyclic vector ``v`` of ``M``.  The subgroup generated by the
``M^n``-orbit of ``v`` has index

    delta_n = |det[v | M^n v | ... | M^((d-1) n) v]|

(infinite when the determinant vanishes), and ``Z^d x|_(M^n) Z`` has rank 2
exactly when ``delta_n == 1``.  Signed values ``c_n`` are the same determinant
in the orbit basis of ``v``; they form a linear recurrent sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Sequence

import mpmath

from . import kernels
from .errors import InsufficientData, InvalidWitness, NoWitnessFound, ToleranceExceeded
from .exact import (
    Matrix,
    as_square,
    charpoly,
    columns_to_matrix,
    det,
    matmul,
    matpow,
    matvec,
    snf,
)
from .rank2 import CyclicWitness, box_vectors, companion_of, cyclic_search, decide_rank2_d2, witness_for


@dataclass
class OrbitCoordinates:
    W: Matrix
    table: list[list[int]]  # table[i][k] = u_k(i)

    def column(self, k: int) -> list[int]:
        return [row[k] for row in self.table]


@dataclass
class DeltaSequence:
    ns: list[int]
    values: list[int | float]
    signed: list[int]
    witness: CyclicWitness

    @property
    def rank2_powers(self) -> list[int]:
        return [n for n, v in zip(self.ns, self.values) if v == 1]

    @property
    def largest_rank2_power(self) -> int | None:
        """Largest scanned n with delta_n = 1; says nothing beyond the scan."""
        return max(self.rank2_powers, default=None)

    def to_dict(self) -> dict:
        return {
            "n": self.ns,
            "delta": [v if v != inf else "inf" for v in self.values],
            "c": self.signed,
            "witness": self.witness.to_dict(),
            "rank2_powers": self.rank2_powers,
            "largest_rank2_power": self.largest_rank2_power,
        }


@dataclass
class LinearRecurrence:
    """``s_n = sum_{j=1..order} coefficients[j-1] * s_{n-j}``."""

    order: int
    coefficients: list[Fraction]
    initial: list[Fraction]

    @property
    def connection_polynomial(self) -> list[Fraction]:
        # monic characteristic polynomial, ascending
        return [-c for c in reversed(self.coefficients)] + [Fraction(1)]

    def extend(self, count: int) -> list[Fraction]:
        seq = list(self.initial)
        while len(seq) < count:
            seq.append(sum(c * seq[-1 - j] for j, c in enumerate(self.coefficients)))
        return seq[:count]


@dataclass(frozen=True)
class TraceParams2x2:
    tau: int
    eps: int

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be ±1")

    @property
    def matrix(self) -> Matrix:
        return [[0, self.eps], [1, self.tau]]


@dataclass
class MinIndexResult:
    value: int | None
    n: int
    m_max: int
    bound: int
    argmin: tuple[tuple[int, ...], int] | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value if self.value is not None else "Unknown",
            "n": self.n,
            "m_max": self.m_max,
            "box": self.bound,
            "argmin": [list(self.argmin[0]), self.argmin[1]] if self.argmin else None,
        }


def _check_witness(M: Matrix, w: CyclicWitness) -> None:
    if len(w.v) != len(M) or abs(det(w.W)) != 1 or w.W != columns_to_matrix(_orbit(M, w.v, 1)):
        raise InvalidWitness("witness is not a cyclic vector of this matrix")


def _orbit(M: Matrix, v: Sequence[int], n: int) -> list[list[int]]:
    """``v, M^n v, M^(2n) v, ...`` (d vectors)."""
    P = matpow(M, n)
    vecs = [list(v)]
    for _ in range(len(M) - 1):
        vecs.append(matvec(P, vecs[-1]))
    return vecs


def u_table(M, witness: CyclicWitness, i_max: int, verify: bool = True) -> OrbitCoordinates:
    """Coordinates ``u_k(i)`` of ``M^i v`` in the basis ``v, Mv, ..., M^(d-1) v``.

    In that basis ``M`` acts as the companion matrix of its characteristic
    polynomial, so each step is one companion product.
    """
    M = as_square(M)
    _check_witness(M, witness)
    d = len(M)
    C = companion_of(charpoly(M))
    u = [int(k == 0) for k in range(d)]
    table = []
    x = list(witness.v)
    for i in range(i_max + 1):
        table.append(u)
        if verify and matvec(witness.W, u) != x:
            raise AssertionError(f"orbit coordinates disagree at i={i}")
        u = matvec(C, u)
        x = matvec(M, x)
    return OrbitCoordinates(witness.W, table)


def delta_determinant(M, witness: CyclicWitness, n: int) -> int:
    """Signed ``c_n = det(u_k(n i))``; equals ``det[v | M^n v | ...] / det W``."""
    M = as_square(M)
    _check_witness(M, witness)
    return det(columns_to_matrix(_orbit(M, witness.v, n))) * witness.det_w


def delta(M, witness: CyclicWitness, n: int, cross_check: bool = True) -> int | float:
    """Index of the subgroup generated by the ``M^n``-orbit of the witness."""
    M = as_square(M)
    _check_witness(M, witness)
    if n < 1:
        raise ValueError("n must be >= 1")
    A = columns_to_matrix(_orbit(M, witness.v, n))
    D = abs(det(A))
    if cross_check:
        diag = snf(A).diagonal
        prod = 1
        for x in diag:
            prod *= x
        if prod != D:
            raise AssertionError(f"determinant {D} disagrees with SNF index {prod}")
    return D if D else inf


def find_witness(M, bound: int) -> CyclicWitness:
    M = as_square(M)
    w = cyclic_search(M, bound)
    if w is None and len(M) == 2:
        w = decide_rank2_d2(M).witness
    if w is None:
        raise NoWitnessFound(bound)
    return w


def delta_scan(M, n_max: int, bound: int = 5, witness: CyclicWitness | None = None,
               cross_check: bool = True) -> DeltaSequence:
    """``delta_n`` for ``1 <= n <= n_max``; powers one matrix product at a time."""
    M = as_square(M)
    w = witness if witness is not None else find_witness(M, bound)
    _check_witness(M, w)
    d = len(M)
    ns, vals, signed = [], [], []
    P = [row[:] for row in M]
    for n in range(1, n_max + 1):
        vecs = [list(w.v)]
        for _ in range(d - 1):
            vecs.append(matvec(P, vecs[-1]))
        A = columns_to_matrix(vecs)
        c = det(A)
        if cross_check:
            prod = 1
            for x in snf(A).diagonal:
                prod *= x
            if prod != abs(c):
                raise AssertionError(f"n={n}: determinant {c} vs SNF index {prod}")
        ns.append(n)
        vals.append(abs(c) if c else inf)
        signed.append(c * w.det_w)
        P = matmul(P, M)
    return DeltaSequence(ns, vals, signed, w)


def cn_2x2(params: TraceParams2x2, n: int) -> tuple[int, int]:
    """``(c_n, d_n)`` with ``M^n = c_n M + d_n I`` for ``M = [[0, eps], [1, tau]]``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    tau, eps = params.tau, params.eps
    c, c_next = 0, 1
    for _ in range(n):
        c, c_next = c_next, tau * c_next + eps * c
    d = 1 if n == 0 else eps * cn_2x2(params, n - 1)[0]
    return c, d


def chebyshev_U(k: int, tau: int) -> int:
    """``U_k(tau / 2)`` as an integer: U_0 = 1, U_1 = tau, U_(j+1) = tau U_j - U_(j-1)."""
    prev, cur = 0, 1  # U_(-1), U_0
    for _ in range(k):
        prev, cur = cur, tau * cur - prev
    return cur


@dataclass
class ProductCheck:
    tau: int
    eps: int
    n: int
    c_n: int
    product: complex
    rel_error: float
    chebyshev: int | None


def cn_product_check(params: TraceParams2x2, n: int, bits: int = 96, tol: float = 1e-9) -> ProductCheck:
    """Compare ``c_n`` with its trigonometric product form.

    eps = -1: prod (tau - 2 cos(k pi / n)), also equal to U_(n-1)(tau / 2).
    eps = +1: prod (tau - 2 i cos(k pi / n)), whose imaginary part must vanish.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    c, _ = cn_2x2(params, n)
    with mpmath.workprec(bits):
        prod = mpmath.mpc(1)
        for k in range(1, n):
            cosk = mpmath.cos(k * mpmath.pi / n)
            term = params.tau - 2 * cosk if params.eps == -1 else params.tau - 2j * cosk
            prod *= term
        err = abs(prod - c) / max(1, abs(c))
        imag = abs(prod.imag)
        rel = float(err)
    cheb = None
    if params.eps == -1:
        cheb = chebyshev_U(n - 1, params.tau)
        if cheb != c:
            raise ToleranceExceeded(f"U_(n-1)(tau/2) = {cheb} but c_n = {c}")
    if rel > tol or float(imag) > tol * max(1, abs(c)):
        raise ToleranceExceeded(f"product {prod} vs c_n = {c}: relative error {rel:.3g}")
    return ProductCheck(params.tau, params.eps, n, c, complex(prod), rel, cheb)


def min_recurrence(prefix: Sequence[int]) -> LinearRecurrence:
    """Shortest linear recurrence for ``prefix`` (Berlekamp-Massey over Q)."""
    s = [Fraction(x) for x in prefix]
    if len(s) < 2:
        raise InsufficientData("need at least two terms")
    C = [Fraction(1)]
    B = [Fraction(1)]
    L = 0
    m = 1
    b = Fraction(1)
    for n in range(len(s)):
        d = s[n] + sum(C[i] * s[n - i] for i in range(1, L + 1))
        if d == 0:
            m += 1
            continue
        T = C[:]
        coef = d / b
        if len(C) < len(B) + m:
            C += [Fraction(0)] * (len(B) + m - len(C))
        for i, x in enumerate(B):
            C[i + m] -= coef * x
        if 2 * L <= n:
            L = n + 1 - L
            B = T
            b = d
            m = 1
        else:
            m += 1
    if 2 * L > len(s):
        raise InsufficientData(f"prefix of length {len(s)} cannot pin down a recurrence of order {L}")
    coeffs = [-(C[i] if i < len(C) else Fraction(0)) for i in range(1, L + 1)]
    return LinearRecurrence(L, coeffs, s[:L])


def constant_progression_scan(seq: Sequence, value, start: int = 0) -> list[tuple[int, int]]:
    """Arithmetic progressions on which the observed sequence is constantly ``value``.

    Index of ``seq[i]`` is ``start + i``.  Returns the (modulus, residue)
    pairs with modulus <= len/4 not already implied by a smaller modulus.
    Observational only: nothing is claimed beyond the prefix.
    """
    if len(seq) < 20:
        raise InsufficientData("need a prefix of at least 20 terms")
    found: list[tuple[int, int]] = []
    for m in range(1, len(seq) // 4 + 1):
        for r in range(m):
            hits = [seq[i] == value for i in range(len(seq)) if (start + i) % m == r]
            if hits and all(hits):
                if not any(m % m2 == 0 and r % m2 == r2 for m2, r2 in found):
                    found.append((m, r))
    return found


def _orbit_det_exact(P: Matrix, a: Sequence[int]) -> int:
    vecs = [list(a)]
    for _ in range(len(P) - 1):
        vecs.append(matvec(P, vecs[-1]))
    return det(columns_to_matrix(vecs))


def min_2gen_index(M, n: int, m_max: int, bound: int) -> MinIndexResult:
    """Smallest index in G_n of a subgroup generated by ``(a, t^m)``.

    Search space: ``1 <= m <= m_max`` and ``a`` in the box of radius ``bound``
    (one of ``±a``).  The index is ``m * |det[a | P a | ...]|`` with
    ``P = M^(n m)``.  ``value`` is None when every candidate is infinite.
    """
    M = as_square(M)
    d = len(M)
    V = box_vectors(d, bound)
    half = [v for v in V if next(x for x in v if x) > 0]
    best: int | None = None
    arg = None
    for m in range(1, m_max + 1):
        if best is not None and m >= best:
            break
        P = matpow(M, n * m)
        pmax = max(abs(x) for row in P for x in row)
        col_bounds = [bound * (d * pmax) ** j for j in range(d)]
        if kernels.fits_int64(kernels.hadamard_bound(col_bounds)):
            dets = [int(x) for x in kernels.orbit_dets(P, half)]
        else:
            dets = [_orbit_det_exact(P, [int(x) for x in a]) for a in half]
        for a, D in zip(half, dets):
            if D:
                val = m * abs(D)
                if best is None or val < best:
                    best = val
                    arg = (tuple(int(x) for x in a), m)
    return MinIndexResult(best, n, m_max, bound, arg)
