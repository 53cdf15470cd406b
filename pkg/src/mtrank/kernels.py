"""Batched small-integer determinant kernels.

The exact layer works on Python ints.  The brute-force searches (cyclic vector
boxes, unit scans in commutant lattices) evaluate millions of tiny determinants
whose entries are known in advance to be small, so they run here in int64.

Two interchangeable backends compute bit-identical results:

* ``numba``: ``@njit`` loops with early exit.
* ``numpy``: vectorised fraction-free elimination over a whole batch.

``numba`` is used when importable unless ``MTRANK_DISABLE_NUMBA`` is set to a
non-empty value other than ``0``.  Callers must check :func:`fits_int64` on a
Hadamard-type bound before handing data over; every Bareiss intermediate is a
minor, and the update numerator is at most twice the square of a minor bound.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

# 2 * H**2 < 2**63 with margin
INT64_MINOR_LIMIT = 2**30

_CHUNK = 1 << 15


def _env_disabled() -> bool:
    flag = os.environ.get("MTRANK_DISABLE_NUMBA", "")
    return flag not in ("", "0")


BACKEND = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def fits_int64(minor_bound: int) -> bool:
    return minor_bound <= INT64_MINOR_LIMIT


def hadamard_bound(col_bounds) -> int:
    """Upper bound for every minor of a matrix whose column j has entries <= col_bounds[j]."""
    d = len(col_bounds)
    root = math.isqrt(d) + 1
    h = 1
    for b in col_bounds:
        h *= max(1, root * int(b))
    return h


# ---------------------------------------------------------------- numpy path


def _det_batch_np(A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=np.int64, copy=True)
    N, d, _ = A.shape
    if N == 0:
        return np.zeros(0, dtype=np.int64)
    idx = np.arange(N)
    sign = np.ones(N, dtype=np.int64)
    dead = np.zeros(N, dtype=bool)
    prev = np.ones(N, dtype=np.int64)
    for k in range(d):
        col = A[:, k:, k] != 0
        has = col.any(axis=1)
        dead |= ~has
        first = np.argmax(col, axis=1) + k
        swap = has & (first != k)
        if swap.any():
            s = idx[swap]
            rk = A[s, k, :].copy()
            A[s, k, :] = A[s, first[swap], :]
            A[s, first[swap], :] = rk
            sign[swap] = -sign[swap]
        piv = np.where(dead, 1, A[:, k, k])
        A[dead, k, k] = 1
        if k < d - 1:
            sub = (
                A[:, k + 1:, k + 1:] * piv[:, None, None]
                - A[:, k + 1:, k][:, :, None] * A[:, k, k + 1:][:, None, :]
            )
            A[:, k + 1:, k + 1:] = sub // prev[:, None, None]
            A[:, k + 1:, k] = 0
        prev = piv
    out = sign * A[:, d - 1, d - 1]
    out[dead] = 0
    return out


def _orbit_stack_np(M: np.ndarray, V: np.ndarray) -> np.ndarray:
    N, d = V.shape
    W = np.empty((N, d, d), dtype=np.int64)
    W[:, :, 0] = V
    for j in range(1, d):
        W[:, :, j] = W[:, :, j - 1] @ M.T
    return W


def _orbit_dets_np(M, V):
    out = np.empty(len(V), dtype=np.int64)
    for s in range(0, len(V), _CHUNK):
        out[s:s + _CHUNK] = _det_batch_np(_orbit_stack_np(M, V[s:s + _CHUNK]))
    return out


def _first_cyclic_np(M, V) -> int:
    for s in range(0, len(V), _CHUNK):
        dets = _det_batch_np(_orbit_stack_np(M, V[s:s + _CHUNK]))
        hit = np.flatnonzero(np.abs(dets) == 1)
        if hit.size:
            return int(s + hit[0])
    return -1


def _combination_dets_np(basis, coeffs):
    out = np.empty(len(coeffs), dtype=np.int64)
    for s in range(0, len(coeffs), _CHUNK):
        X = np.tensordot(coeffs[s:s + _CHUNK], basis, axes=(1, 0))
        out[s:s + _CHUNK] = _det_batch_np(X)
    return out


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _det_inplace_nb(A):
        d = A.shape[0]
        sign = 1
        prev = 1
        for k in range(d - 1):
            if A[k, k] == 0:
                p = -1
                for i in range(k + 1, d):
                    if A[i, k] != 0:
                        p = i
                        break
                if p < 0:
                    return 0
                for j in range(d):
                    t = A[k, j]
                    A[k, j] = A[p, j]
                    A[p, j] = t
                sign = -sign
            akk = A[k, k]
            for i in range(k + 1, d):
                aik = A[i, k]
                for j in range(k + 1, d):
                    A[i, j] = (A[i, j] * akk - aik * A[k, j]) // prev
            prev = akk
        return sign * A[d - 1, d - 1]

    @njit(cache=True)
    def _fill_orbit_nb(M, v, W):
        d = M.shape[0]
        for i in range(d):
            W[i, 0] = v[i]
        for j in range(1, d):
            for i in range(d):
                acc = 0
                for k in range(d):
                    acc += M[i, k] * W[k, j - 1]
                W[i, j] = acc

    @njit(cache=True)
    def _det_batch_nb(A):
        N = A.shape[0]
        out = np.empty(N, dtype=np.int64)
        W = np.empty(A.shape[1:], dtype=np.int64)
        for n in range(N):
            W[:, :] = A[n]
            out[n] = _det_inplace_nb(W)
        return out

    @njit(cache=True)
    def _orbit_dets_nb(M, V):
        N, d = V.shape
        out = np.empty(N, dtype=np.int64)
        W = np.empty((d, d), dtype=np.int64)
        for n in range(N):
            _fill_orbit_nb(M, V[n], W)
            out[n] = _det_inplace_nb(W)
        return out

    @njit(cache=True)
    def _first_cyclic_nb(M, V):
        N, d = V.shape
        W = np.empty((d, d), dtype=np.int64)
        for n in range(N):
            _fill_orbit_nb(M, V[n], W)
            D = _det_inplace_nb(W)
            if D == 1 or D == -1:
                return n
        return -1

    @njit(cache=True)
    def _combination_dets_nb(basis, coeffs):
        r, d, _ = basis.shape
        N = coeffs.shape[0]
        out = np.empty(N, dtype=np.int64)
        X = np.empty((d, d), dtype=np.int64)
        for n in range(N):
            X[:, :] = 0
            for t in range(r):
                c = coeffs[n, t]
                if c != 0:
                    for i in range(d):
                        for j in range(d):
                            X[i, j] += c * basis[t, i, j]
            out[n] = _det_inplace_nb(X)
        return out


_IMPLS = {
    "numpy": {
        "det_batch": _det_batch_np,
        "orbit_dets": _orbit_dets_np,
        "first_cyclic": _first_cyclic_np,
        "combination_dets": _combination_dets_np,
    }
}
if HAVE_NUMBA:
    _IMPLS["numba"] = {
        "det_batch": _det_batch_nb,
        "orbit_dets": _orbit_dets_nb,
        "first_cyclic": _first_cyclic_nb,
        "combination_dets": _combination_dets_nb,
    }


def available_backends() -> list[str]:
    return sorted(_IMPLS)


@contextmanager
def use_backend(name: str):
    """Temporarily switch the kernel backend (tests and benchmarks)."""
    global BACKEND
    if name not in _IMPLS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    old, BACKEND = BACKEND, name
    try:
        yield
    finally:
        BACKEND = old


def _i64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64))


def det_batch(A) -> np.ndarray:
    """Determinants of a stack ``(N, d, d)`` of int64 matrices."""
    return _IMPLS[BACKEND]["det_batch"](_i64(A))


def orbit_dets(M, V) -> np.ndarray:
    """``det[v | Mv | ... | M^(d-1) v]`` for every row ``v`` of ``V``."""
    return _IMPLS[BACKEND]["orbit_dets"](_i64(M), _i64(V))


def first_cyclic(M, V) -> int:
    """Index of the first row of ``V`` with orbit determinant ±1, else -1."""
    return int(_IMPLS[BACKEND]["first_cyclic"](_i64(M), _i64(V)))


def combination_dets(basis, coeffs) -> np.ndarray:
    """``det(sum_t coeffs[n, t] * basis[t])`` for every row of ``coeffs``."""
    return _IMPLS[BACKEND]["combination_dets"](_i64(basis), _i64(coeffs))
