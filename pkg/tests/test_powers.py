import math
import random
from fractions import Fraction

import pytest

from mtrank.errors import InsufficientData, InvalidWitness, NoWitnessFound
from mtrank.exact import block_diag, det, matpow, snf
from mtrank.powers import (
    TraceParams2x2,
    chebyshev_U,
    cn_2x2,
    cn_product_check,
    constant_progression_scan,
    delta,
    delta_scan,
    min_2gen_index,
    min_recurrence,
    u_table,
)
from mtrank.rank2 import CyclicWitness, companion_of, orbit_matrix, witness_for

FIB = [[0, 1], [1, 1]]
CUBIC = companion_of([-1, -1, 0, 1])  # x^3 - x - 1


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_u_table():
    w = witness_for(CUBIC, [1, 0, 0])
    t = u_table(CUBIC, w, 5)
    for i in range(3):
        assert t.table[i] == [int(i == k) for k in range(3)]
    assert t.table[3] == [1, 1, 0]
    bad = CyclicWitness((0, 0, 0), orbit_matrix(CUBIC, [0, 0, 0]), 0)
    with pytest.raises(InvalidWitness):
        u_table(CUBIC, bad, 3)


def test_delta_examples():
    w = witness_for(FIB, [1, 0])
    assert delta(FIB, w, 1) == 1
    assert delta(FIB, w, 3) == 2
    assert delta(FIB, w, 5) == 5
    # SNF oracle on [v | M^3 v]
    A = orbit_matrix(matpow(FIB, 3), [1, 0])
    assert math.prod(snf(A).diagonal) == 2


def test_delta_scan_examples():
    seq = delta_scan(FIB, 6)
    assert seq.values == [1, 1, 2, 3, 5, 8]
    assert seq.rank2_powers == [1, 2] and seq.largest_rank2_power == 2
    assert delta_scan(companion_of([1, -3, 1]), 4).values == [1, 3, 8, 21]
    assert delta_scan([[1]], 5).values == [1] * 5


def test_delta_first_is_one_for_any_witness():
    r = random.Random(2)
    for p in ([1, -3, 1], [-1, -1, 0, 1], [1, 2, -3, 1], [-1, 4, 0, -2, 1]):
        C = companion_of(p)
        assert delta_scan(C, 1).values == [1]


def test_delta_infinite_when_singular():
    # x^2 + 1 has order 4: M^4 = I makes the orbit matrix singular
    M = [[0, -1], [1, 0]]
    vals = delta_scan(M, 4).values
    assert vals[1] == math.inf and vals[3] == math.inf


def test_no_witness():
    with pytest.raises(NoWitnessFound):
        delta_scan(block_diag(FIB, FIB), 3, bound=1)


def test_signed_values_are_independent_of_witness():
    """c_n uses the orbit basis, so any cyclic vector gives the same sequence."""
    M = [[2, 1], [1, 1]]
    a = delta_scan(M, 12, witness=witness_for(M, [1, 0])).signed
    b = delta_scan(M, 12, witness=witness_for(M, [0, 1])).signed
    assert a == b


def test_cn_2x2():
    assert cn_2x2(TraceParams2x2(1, 1), 3)[0] == 2
    for tau in range(-4, 5):
        for eps in (1, -1):
            assert cn_2x2(TraceParams2x2(tau, eps), 2)[0] == tau
    assert cn_2x2(TraceParams2x2(3, -1), 3)[0] == 8
    with pytest.raises(ValueError):
        TraceParams2x2(1, 2)


def test_cn_matches_matrix_power():
    for tau in range(-4, 5):
        for eps in (1, -1):
            P = TraceParams2x2(tau, eps)
            M = P.matrix
            for n in range(0, 12):
                c, d = cn_2x2(P, n)
                Mn = matpow(M, n)
                assert Mn == [[c * M[i][j] + d * (i == j) for j in range(2)] for i in range(2)]


def test_chebyshev():
    for n in range(1, 15):
        assert chebyshev_U(n - 1, 2) == n
        assert cn_2x2(TraceParams2x2(2, -1), n)[0] == n


def test_product_check_examples():
    r = cn_product_check(TraceParams2x2(3, -1), 3)
    assert r.c_n == 8 and abs(r.product - 8) < 1e-12
    r = cn_product_check(TraceParams2x2(1, 1), 3)
    assert abs(r.product - 2) < 1e-12


def test_min_recurrence():
    r = min_recurrence([fib(n) for n in range(1, 13)])
    assert r.order == 2 and r.coefficients == [1, 1]
    r = min_recurrence([1] * 10)
    assert r.order == 1 and r.coefficients == [1]
    with pytest.raises(InsufficientData):
        min_recurrence([1, 2, 4, 9])


def test_min_recurrence_predicts_3x3():
    C = companion_of([-1, 6, -5, 1])
    vals = delta_scan(C, 34).values
    r = min_recurrence(vals[:24])
    assert r.extend(34)[24:] == [Fraction(v) for v in vals[24:]]


def test_constant_progression_scan():
    vals = delta_scan(FIB, 30).values
    assert constant_progression_scan(vals, 1) == []
    assert constant_progression_scan([4] * 25, 4) == [(1, 0)]
    alt = [1 if n % 3 == 0 else 7 for n in range(30)]
    assert constant_progression_scan(alt, 1) == [(3, 0)]


def test_min_2gen_index():
    assert min_2gen_index(FIB, 1, 3, 2).value == 1
    assert min_2gen_index(FIB, 3, 3, 3).value == 2
    assert min_2gen_index([[-1, 0], [0, -1]], 1, 3, 3).value is None


def test_min_2gen_index_exact_fallback_agrees():
    # n = 40 pushes the Fibonacci entries past the int64 gate
    r = min_2gen_index(FIB, 40, 1, 2)
    assert r.value == fib(40)


def test_signed_sequence_recurrent_for_cubic():
    """For x^3 - x - 1 the signed c_n satisfy an order-6 recurrence, while
    |c_n| (which changes sign irregularly) does not recur at low order."""
    seq = delta_scan(CUBIC, 34)
    r = min_recurrence(seq.signed[:24])
    assert r.order == 6
    assert r.extend(34)[24:] == [Fraction(c) for c in seq.signed[24:]]
    assert seq.signed[:10] == [1, -1, 1, -1, -1, 5, -8, 7, 1, -19]
