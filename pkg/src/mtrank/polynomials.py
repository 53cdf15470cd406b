"""Integer polynomials as ascending coefficient lists.

``[c0, c1, ..., cn]`` stands for ``c0 + c1 x + ... + cn x^n``; the zero
polynomial is ``[]``.  Factorisation over Z is delegated to sympy; the rest is
small enough to do by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

import sympy

from .errors import MtrankError, NotUnimodular
from .exact import as_square, det, is_identity, matpow, minpoly

Poly = list[int]

MAX_FACTOR_DEGREE = 24


def trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def mul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def power(p: Sequence, k: int) -> list:
    out = [1]
    for _ in range(k):
        out = mul(out, p)
    return out


def derivative(p: Sequence) -> list:
    return trim([i * c for i, c in enumerate(p)][1:])


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def content(p: Sequence[int]) -> int:
    g = 0
    for c in p:
        g = gcd(g, int(c))
    return g


def primitive_part(p: Sequence) -> Poly:
    """Primitive integer polynomial with positive leading coefficient.

    Accepts rational coefficients; denominators are cleared first.
    """
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in p]
    g = content(ints)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def divmod_Q(p: Sequence, q: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    p = [Fraction(c) for c in trim(p)]
    q = [Fraction(c) for c in trim(q)]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and p:
        k = len(p) - len(q)
        f = p[-1] / q[-1]
        quot[k] = f
        for i, c in enumerate(q):
            p[i + k] -= f * c
        p = trim(p)
    return trim(quot), p


def exact_divide(p: Sequence[int], q: Sequence[int]) -> Poly:
    """Quotient ``p / q`` in Z[x]; raises if the division is not exact."""
    quot, rem = divmod_Q(p, q)
    if rem or any(c.denominator != 1 for c in quot):
        raise ArithmeticError("inexact polynomial division")
    return [int(c) for c in quot]


def poly_gcd(p: Sequence[int], q: Sequence[int]) -> Poly:
    """Primitive gcd over Q (Euclid on rationals), positive leading coefficient."""
    a, b = trim(p), trim(q)
    if not a and not b:
        raise MtrankError("gcd(0, 0) is undefined")
    while b:
        _, r = divmod_Q(a, b)
        a, b = b, r
    return primitive_part(a)


def is_squarefree(p: Sequence[int]) -> bool:
    return degree(poly_gcd(p, derivative(p))) == 0


@dataclass
class Factorization:
    unit: int
    factors: list[tuple[Poly, int]] = field(default_factory=list)

    def expand(self) -> Poly:
        out = [self.unit]
        for f, k in self.factors:
            out = mul(out, power(f, k))
        return out


_X = sympy.Symbol("x")


def _to_sympy(p: Sequence[int]) -> sympy.Poly:
    return sympy.Poly(list(reversed([int(c) for c in p])), _X, domain="ZZ")


def _from_sympy(P: sympy.Poly) -> Poly:
    return [int(c) for c in reversed(P.all_coeffs())]


def factor_Z(p: Sequence[int]) -> Factorization:
    """Complete factorisation over Z.

    Irreducible factors are primitive with positive leading coefficient;
    prime factors of the content appear as constant factors.  Backed by sympy's
    Zassenhaus implementation.
    """
    p = trim(p)
    if not p:
        raise MtrankError("cannot factor the zero polynomial")
    if degree(p) > MAX_FACTOR_DEGREE:
        raise MtrankError(f"degree {degree(p)} exceeds the factorisation cap {MAX_FACTOR_DEGREE}")
    cont, facs = _to_sympy(p).factor_list()
    cont = int(cont)
    unit = -1 if cont < 0 else 1
    out: list[tuple[Poly, int]] = []
    for prime, k in sorted(sympy.factorint(abs(cont)).items()):
        out.append(([int(prime)], int(k)))
    polys = []
    for f, k in facs:
        f = _from_sympy(f)
        if f[-1] < 0:
            f = [-c for c in f]
            if k % 2:
                unit = -unit
        polys.append((f, int(k)))
    polys.sort(key=lambda fk: (len(fk[0]), fk[0]))
    return Factorization(unit, out + polys)


def factor_mod_p(p: Sequence[int], prime: int) -> list[tuple[Poly, int]]:
    """Monic irreducible factors of ``p`` over GF(prime), coefficients in [0, prime)."""
    P = sympy.Poly(list(reversed([int(c) for c in p])), _X, modulus=prime)
    _, facs = P.factor_list()
    out = []
    for f, k in facs:
        coeffs = [int(c) % prime for c in reversed(f.all_coeffs())]
        out.append((coeffs, int(k)))
    return out


def totient(n: int) -> int:
    result = n
    m = n
    q = 2
    while q * q <= m:
        if m % q == 0:
            while m % q == 0:
                m //= q
            result -= result // q
        q += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple[int, ...]:
    num = [-1] + [0] * (n - 1) + [1]
    for k in range(1, n):
        if n % k == 0:
            num = exact_divide(num, list(_cyclotomic(k)))
    return tuple(num)


def cyclotomic(n: int) -> Poly:
    """The n-th cyclotomic polynomial."""
    if n < 1:
        raise MtrankError("cyclotomic index must be positive")
    return list(_cyclotomic(n))


def is_cyclotomic(p: Sequence[int]) -> int | None:
    """Index n with ``p == Phi_n``, or None.

    Candidates are all n with Euler phi(n) = deg p; phi(n) >= sqrt(n/2) bounds
    the search by n <= 2 deg(p)^2.
    """
    p = trim(p)
    k = degree(p)
    if k < 1 or p[-1] != 1:
        return None
    for n in range(1, 2 * k * k + 3):
        if totient(n) == k and list(_cyclotomic(n)) == p:
            return n
    return None


def finite_order(M) -> int | None:
    """Order of ``M`` in GL(d, Z), or None when it is infinite."""
    A = as_square(M)
    if det(A) not in (1, -1):
        raise NotUnimodular("finite_order needs det = ±1")
    mp = minpoly(A)
    if not is_squarefree(mp):
        return None
    k = 1
    for f, _ in factor_Z(mp).factors:
        n = is_cyclotomic(f)
        if n is None:
            return None
        k = lcm(k, n)
    if not is_identity(matpow(A, k)):
        raise AssertionError("cyclotomic minimal polynomial but M^k != I")
    return k


def format_poly(p: Sequence, var: str = "x") -> str:
    p = trim(p)
    if not p:
        return "0"
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
