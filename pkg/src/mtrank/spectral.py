"""Numerical eigenvalue checks of the determinant asymptotics.

Multiplicities always come from exact factorisation; only the roots of each
squarefree irreducible factor are approximated (Aberth-Ehrlich iteration in
mpmath) and every approximation carries an a-posteriori inclusion radius.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .errors import ModuliNotDistinct, PrecisionExhausted, RepeatedEigenvalue, ToleranceExceeded
from .exact import as_square, charpoly
from .polynomials import degree, factor_Z
from .powers import CyclicWitness, delta_determinant

MAX_BITS = 512


@dataclass
class Root:
    value: mpmath.mpc
    multiplicity: int
    radius: mpmath.mpf

    @property
    def modulus(self) -> mpmath.mpf:
        return abs(self.value)


@dataclass
class Spectrum:
    roots: list[Root]
    bits: int

    def eigenvalues(self) -> list[mpmath.mpc]:
        """Eigenvalues with repetition, modulus ascending then argument."""
        out = []
        for r in self.roots:
            out += [r.value] * r.multiplicity
        return out

    @property
    def degree(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    @property
    def simple(self) -> bool:
        return all(r.multiplicity == 1 for r in self.roots)

    def moduli_distinct(self) -> bool:
        """True when all eigenvalues (with repetition) have certifiably distinct moduli."""
        if not self.simple:
            return False
        iv = sorted((r.modulus - r.radius, r.modulus + r.radius) for r in self.roots)
        return all(hi < lo2 for (_, hi), (lo2, _) in zip(iv, iv[1:]))


@dataclass
class GrowthReport:
    K: float
    moduli_distinct: bool
    log_ratio_errors: dict[int, float] = field(default_factory=dict)


def _horner(p, z):
    acc = mpmath.mpc(0)
    for c in reversed(p):
        acc = acc * z + c
    return acc


def _inclusion_radii(p, zs):
    """``n |p(z_i)| / (|a_n| prod |z_i - z_j|)``, each disk holds a root.

    ``|p(z_i)|`` is padded by a Horner rounding bound so an evaluation that
    happens to round to zero still yields an honest radius.
    """
    n = len(zs)
    lead = abs(p[-1])
    unit = 4 * len(p) * mpmath.ldexp(1, -mpmath.mp.prec)
    radii = []
    for i, z in enumerate(zs):
        denom = lead
        for j, w in enumerate(zs):
            if j != i:
                denom *= abs(z - w)
        slack = unit * _horner([abs(c) for c in p], abs(z)).real
        radii.append(n * (abs(_horner(p, z)) + slack) / denom if denom else mpmath.inf)
    return radii


def _disjoint(zs, radii) -> bool:
    for i, j in itertools.combinations(range(len(zs)), 2):
        if abs(zs[i] - zs[j]) <= radii[i] + radii[j]:
            return False
    return True


def aberth(p: Sequence[int], bits: int, zs=None, max_iter: int = 500):
    """Simultaneous approximation of all roots of the squarefree polynomial ``p``."""
    n = len(p) - 1
    dp = [i * c for i, c in enumerate(p)][1:]
    with mpmath.workprec(bits + 16):
        if zs is None:
            # Fujiwara-type radius, angles offset to break symmetry
            R = max(abs(mpmath.mpf(p[k]) / p[-1]) ** (mpmath.mpf(1) / (n - k)) for k in range(n)) or 1
            zs = [R * mpmath.expj(2 * mpmath.pi * k / n + 0.4) for k in range(n)]
        else:
            zs = [mpmath.mpc(z) for z in zs]
        eps = mpmath.ldexp(1, -bits)
        for _ in range(max_iter):
            worst = mpmath.mpf(0)
            for i in range(n):
                z = zs[i]
                pz = _horner(p, z)
                if pz == 0:
                    continue
                ratio = pz / _horner(dp, z)
                s = mpmath.fsum(1 / (z - zs[j]) for j in range(n) if j != i)
                w = ratio / (1 - ratio * s)
                zs[i] = z - w
                worst = max(worst, abs(w) / max(1, abs(zs[i])))
            if worst < eps:
                break
        radii = _inclusion_radii(p, zs)
    return zs, radii


def _sort_key(z):
    return (abs(z), mpmath.arg(z))


def roots(p: Sequence[int], bits: int = 96) -> Spectrum:
    """Certified spectrum of an integer polynomial.

    Refines until every inclusion radius is below ``2**(-bits/2)`` and the
    disks are pairwise disjoint, doubling the working precision up to 512 bits.
    """
    fac = factor_Z(p)
    out: list[Root] = []
    for f, mult in fac.factors:
        k = degree(f)
        if k < 1:
            continue
        if k == 1:
            out.append(Root(mpmath.mpc(mpmath.mpf(-f[0]) / f[1]), mult, mpmath.mpf(0)))
            continue
        prec = bits
        zs = None
        while True:
            zs, radii = aberth(f, prec, zs)
            target = mpmath.ldexp(1, -(bits // 2))
            if max(radii) < target and _disjoint(zs, radii):
                break
            prec *= 2
            if prec > MAX_BITS:
                raise PrecisionExhausted(f"roots of {f} not certified at {MAX_BITS} bits")
        out += [Root(z, mult, r) for z, r in zip(zs, radii)]
    with mpmath.workprec(bits):
        out.sort(key=lambda r: _sort_key(r.value))
    return Spectrum(out, bits)


def matrix_spectrum(M, bits: int = 96) -> Spectrum:
    return roots(charpoly(as_square(M)), bits)


def vandermonde_Dn(spec: Spectrum, n: int):
    """``prod_{k<m} (lambda_m^n - lambda_k^n)`` over the ordered simple spectrum."""
    if not spec.simple:
        raise RepeatedEigenvalue("Vandermonde form needs distinct eigenvalues")
    lam = spec.eigenvalues()
    with mpmath.workprec(spec.bits):
        pw = [z**n for z in lam]
        D = mpmath.mpc(1)
        for k, m in itertools.combinations(range(len(lam)), 2):
            D *= pw[m] - pw[k]
    return D


@dataclass
class RatioReport:
    ratios: list
    max_rel_spread: float


def ratio_constancy_check(M, witness: CyclicWitness, n_max: int, tol: float = 1e-6,
                          bits: int = 96) -> RatioReport:
    """``D_n / c_n`` must not depend on n (both are determinants of one basis change)."""
    spec = matrix_spectrum(M, bits)
    ratios = []
    with mpmath.workprec(bits):
        for n in range(1, n_max + 1):
            c = delta_determinant(M, witness, n)
            if c == 0:
                raise ToleranceExceeded(f"c_{n} = 0: orbit determinant vanished")
            ratios.append(vandermonde_Dn(spec, n) / c)
        spread = max(abs(r - ratios[0]) for r in ratios) / abs(ratios[0])
    if spread > tol:
        raise ToleranceExceeded(f"ratio varies by {float(spread):.3g} > {tol}")
    return RatioReport(ratios, float(spread))


def growth_K(spec: Spectrum, deltas: dict[int, int] | None = None) -> GrowthReport:
    """``K = |lambda_2 lambda_3^2 ... lambda_d^(d-1)|`` for moduli in ascending order.

    ``deltas`` (n -> delta_n) only feeds the diagnostic
    ``log(delta_n)/n - log K``, computed when the moduli are distinct.
    """
    lam = spec.eigenvalues()
    with mpmath.workprec(spec.bits):
        mods = sorted(abs(z) for z in lam)
        logK = mpmath.fsum(k * mpmath.log(m) for k, m in enumerate(mods))
        K = float(mpmath.exp(logK))
        distinct = spec.moduli_distinct()
        errs = {}
        if distinct and deltas:
            for n, dv in deltas.items():
                errs[n] = float(mpmath.log(dv) / n - logK)
    return GrowthReport(K, distinct, errs)


@dataclass
class DominanceReport:
    n: int
    terms: int
    diagonal_log_modulus: float
    runner_up_log_modulus: float


def dominance_check(spec: Spectrum, n: int) -> DominanceReport:
    """Expand the Vandermonde product into signed monomials and check that the
    all-larger-index choice ``lambda_2^n lambda_3^(2n) ...`` dominates strictly.
    """
    if not spec.moduli_distinct():
        raise ModuliNotDistinct("eigenvalue moduli are not certifiably distinct")
    lam = spec.eigenvalues()
    d = len(lam)
    if d > 5:
        raise ValueError("monomial expansion is limited to d <= 5")
    pairs = list(itertools.combinations(range(d), 2))
    with mpmath.workprec(spec.bits):
        logs = [mpmath.log(abs(z)) for z in lam]
        diag = None
        others = []
        for choice in itertools.product((0, 1), repeat=len(pairs)):
            # 1 picks lambda_m (larger index) from the pair (k, m)
            lm = n * mpmath.fsum(logs[m] if c else logs[k] for (k, m), c in zip(pairs, choice))
            if all(choice):
                diag = lm
            else:
                others.append(lm)
        runner = max(others) if others else mpmath.ninf
        if not diag > runner:
            raise AssertionError("diagonal term is not strictly dominant")
    return DominanceReport(n, 2 ** len(pairs), float(diag), float(runner))


@dataclass
class ConfluentCheck:
    n: int
    determinant: mpmath.mpc
    closed_form: mpmath.mpc
    rel_error: float


def confluent_matrix(l1, l4, n: int):
    """The 4x4 determinant for eigenvalue l1 of multiplicity 3 and simple l4."""
    a = [l1 ** (n * i) for i in range(4)]
    b = [l4 ** (n * i) for i in range(4)]
    return mpmath.matrix([[a[i], i * n * a[i], (i * n) ** 2 * a[i], b[i]] for i in range(4)])


def confluent_example_check(l1, l4, n_max: int, tol: float = 1e-6, bits: int = 96) -> list[ConfluentCheck]:
    """Check ``det = 2 n^3 l1^(3n) (l4^n - l1^n)^3`` for ``1 <= n <= n_max``."""
    with mpmath.workprec(bits):
        l1 = mpmath.mpmathify(l1)
        l4 = mpmath.mpmathify(l4)
        if l1 == l4 or l1 == 0 or l4 == 0:
            raise ValueError("need distinct nonzero eigenvalues")
        out = []
        for n in range(1, n_max + 1):
            D = mpmath.det(confluent_matrix(l1, l4, n))
            closed = 2 * n**3 * l1 ** (3 * n) * (l4**n - l1**n) ** 3
            err = abs(D - closed) / max(abs(closed), mpmath.mpf(1))
            if err > tol:
                raise ToleranceExceeded(f"n={n}: det {D} vs closed form {closed}")
            out.append(ConfluentCheck(n, mpmath.mpc(D), mpmath.mpc(closed), float(err)))
    return out
