"""Binary quadratic forms and the question "does Q represent +1 or -1?".

For a 2x2 matrix ``M = [[A, B], [C, D]]`` the form
``Q_M(x, y) = det[v | Mv] = C x^2 + (D - A) x y - B y^2`` with ``v = (x, y)``
represents ±1 exactly when ``v`` is a cyclic vector of ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

Vec2 = tuple[int, int]


@dataclass(frozen=True)
class BinaryQuadraticForm:
    """``a x^2 + b x y + c y^2``."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    def transform(self, T) -> "BinaryQuadraticForm":
        """The form ``(X, Y) -> Q(T (X, Y))``."""
        (p, q), (r, s) = T
        return BinaryQuadraticForm(
            self(p, r),
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self(q, s),
        )

    @classmethod
    def of_matrix(cls, M) -> "BinaryQuadraticForm":
        (A, B), (C, D) = M
        return cls(C, D - A, -B)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _unit_definite(Q: BinaryQuadraticForm) -> Vec2 | None:
    a, b, c = Q.a, Q.b, Q.c
    target = 1
    if a < 0:
        a, b, c, target = -a, -b, -c, -1
    D = -Q.disc
    # 4a Q = (2ax + by)^2 + D y^2, so D y^2 <= 4a
    ymax = isqrt(4 * a // D)
    for y in sorted(range(-ymax, ymax + 1), key=lambda t: (abs(t), -t)):
        # a x^2 + (b y) x + (c y^2 - 1) = 0
        disc = (b * y) ** 2 - 4 * a * (c * y * y - 1)
        if disc < 0:
            continue
        r = isqrt(disc)
        if r * r != disc:
            continue
        for num in (-b * y + r, -b * y - r):
            if num % (2 * a) == 0:
                x = num // (2 * a)
                if Q(x, y) == target:
                    return x, y
    return None


def _unit_parabolic(Q: BinaryQuadraticForm) -> Vec2 | None:
    if Q.content != 1:
        return None
    # primitive, disc 0: Q = s (alpha x + beta y)^2
    s = 1 if (Q.a > 0 or (Q.a == 0 and Q.c > 0)) else -1
    alpha = isqrt(s * Q.a)
    beta = isqrt(s * Q.c)
    if 2 * s * alpha * beta != Q.b:
        beta = -beta
    _, x, y = _ext_gcd(alpha, beta)
    return x, y


def _solve2(m11, m12, m21, m22, r1, r2) -> Vec2 | None:
    dt = m11 * m22 - m12 * m21
    x = Fraction(r1 * m22 - m12 * r2, dt)
    y = Fraction(m11 * r2 - r1 * m21, dt)
    if x.denominator == 1 and y.denominator == 1:
        return int(x), int(y)
    return None


def _unit_split(Q: BinaryQuadraticForm) -> Vec2 | None:
    """Positive square discriminant: Q factors into two integer linear forms."""
    a, b, c = Q.a, Q.b, Q.c
    r = isqrt(Q.disc)
    if a == 0:
        # Q = y (b x + c y)
        for e in (1, -1):
            for eps in (1, -1):
                num = eps * e - c * e  # b x + c e = eps / e = eps * e
                if num % b == 0:
                    return num // b, e
        return None
    t1 = Fraction(-b + r, 2 * a)
    t2 = Fraction(-b - r, 2 * a)
    n1, m1 = t1.numerator, t1.denominator
    n2, m2 = t2.numerator, t2.denominator
    k = Fraction(a, m1 * m2)
    if k not in (1, -1):
        return None
    k = int(k)
    # Q = k (m1 x - n1 y)(m2 x - n2 y)
    for e in (1, -1):
        for eps in (1, -1):
            sol = _solve2(m1, -n1, m2, -n2, e, eps * k * e)
            if sol is not None:
                return sol
    return None


def _is_reduced(a: int, b: int, D: int, s: int) -> bool:
    if not 0 < b <= s:
        return False
    aa = 2 * abs(a)
    if (aa + b) ** 2 <= D:
        return False
    return aa - b <= 0 or (aa - b) ** 2 < D


def _rho(a: int, b: int, c: int, D: int, s: int) -> tuple[int, int, int, int]:
    """One reduction step; returns the new form and the shift of ``[[0,-1],[1,t]]``."""
    ac = abs(c)
    if c * c > D:
        nb = (-b) % (2 * ac)
        if nb > ac:
            nb -= 2 * ac
    else:
        nb = s - ((s + b) % (2 * ac))
    t = (nb + b) // (2 * c)
    return c, nb, (nb * nb - D) // (4 * c), t


def _unit_indefinite(Q: BinaryQuadraticForm, max_steps: int = 100_000) -> Vec2 | None:
    """Reduction-cycle search for a form with leading coefficient ±1.

    Valid because a primitive form of nonsquare discriminant D > 4 properly
    representing m with |m| < sqrt(D)/2 has a reduced form (m, *, *) in its
    cycle.  Transformations are accumulated so the witness comes out directly.
    """
    if Q.content != 1:
        return None
    D = Q.disc
    s = isqrt(D)
    a, b, c = Q.a, Q.b, Q.c
    T = ((1, 0), (0, 1))
    seen: set[tuple[int, int, int]] = set()
    for _ in range(max_steps):
        if a in (1, -1):
            return T[0][0], T[1][0]
        if _is_reduced(a, b, D, s):
            if (a, b, c) in seen:
                return None
            seen.add((a, b, c))
        a, b, c, t = _rho(a, b, c, D, s)
        (p, q), (r, u) = T
        T = ((q, -p + t * q), (u, -r + t * u))
    raise RuntimeError("reduction cycle did not close")  # pragma: no cover


def represent_unit(Q: BinaryQuadraticForm) -> Vec2 | None:
    """A vector with ``Q(v) = ±1``, or None when no such vector exists."""
    if Q.a == 0 and Q.b == 0 and Q.c == 0:
        return None
    D = Q.disc
    if D < 0:
        v = _unit_definite(Q)
    elif D == 0:
        v = _unit_parabolic(Q)
    elif isqrt(D) ** 2 == D:
        v = _unit_split(Q)
    else:
        v = _unit_indefinite(Q)
    if v is not None and Q(*v) not in (1, -1):
        raise AssertionError(f"bad unit witness {v} for {Q}")
    return v
