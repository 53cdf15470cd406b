import random

import pytest

from mtrank.errors import PreconditionViolated
from mtrank.exact import block_diag, det, identity, inverse_unimodular, matmul, matpow, scalar_mul, snf
from mtrank.nielsen import (
    NielsenVerdict,
    commutant,
    generating_pair_classes,
    infinite_nielsen_probe,
    nielsen_count_d2,
    unit_search,
)
from mtrank.rank2 import cyclic_search, witness_for

from oracles import random_gl

FIB = [[0, 1], [1, 1]]


def test_commutant_examples():
    cb = commutant(FIB)
    assert cb.rank == 2
    assert cb.basis == [identity(2), FIB]
    cb = commutant([[1, 1], [0, 1]])
    assert cb.basis == [identity(2), [[0, 1], [0, 0]]]
    assert commutant(identity(3)).rank == 9


def test_commutant_saturated():
    for M in (FIB, [[2, 1], [1, 1]], [[1, 2], [0, 1]], block_diag(FIB, FIB), [[3, 0], [0, 3]]):
        cb = commutant(M)
        rows = [[x for row in B for x in row] for B in cb.basis]
        assert all(x == 1 for x in snf(rows).diagonal)
        for B in cb.basis:
            assert matmul(M, B) == matmul(B, M)


def test_commutant_of_fib_spans_powers():
    cb = commutant(FIB)
    for k in range(-5, 6):
        assert cb.coordinates(matpow(FIB, k)) is not None


def test_unit_search_examples():
    units = unit_search(commutant(FIB), 2, dedupe=False)
    keys = [tuple(map(tuple, u)) for u in units]
    for X in (identity(2), FIB, inverse_unimodular(FIB)):
        for s in (1, -1):
            assert tuple(map(tuple, scalar_mul(s, X))) in keys
    units = unit_search(commutant([[1, 1], [0, 1]]), 1, dedupe=False)
    assert len(units) == 6
    assert unit_search(commutant(FIB), 0) == [identity(2)]


def test_unit_search_properties():
    for M, H in ((FIB, 3), ([[2, 1], [1, 1]], 3), (block_diag(FIB, FIB), 1)):
        for u in unit_search(commutant(M), H):
            assert det(u) in (1, -1)
            assert matmul(M, u) == matmul(u, M)


@pytest.mark.parametrize("M, count", [(FIB, 1), ([[2, 1], [1, 1]], 2), ([[1, 1], [0, 1]], 1)])
def test_nielsen_count_d2(M, count):
    assert nielsen_count_d2(M).count == count


def test_nielsen_count_more():
    assert nielsen_count_d2(matpow(FIB, 2)).count == 2
    assert nielsen_count_d2(matpow(FIB, -1)).count == 1
    assert nielsen_count_d2([[-1, -1], [0, -1]]).count == 1
    # x^2 - 4x - 1: the order Z[sqrt5] has fundamental unit 2 + sqrt5 itself
    assert nielsen_count_d2([[0, 1], [1, 4]]).count == 1
    rep = nielsen_count_d2(FIB)
    assert rep.detail["fundamental_unit"] == FIB


def test_nielsen_preconditions():
    with pytest.raises(PreconditionViolated):
        nielsen_count_d2([[1, 2], [0, 1]])  # rank 3
    with pytest.raises(PreconditionViolated):
        nielsen_count_d2([[0, -1], [1, 0]])  # finite order


def test_nielsen_conjugation_invariant():
    r = random.Random(8)
    for M, count in ((FIB, 1), ([[2, 1], [1, 1]], 2)):
        for _ in range(5):
            U = random_gl(r, 2, 6)
            N = matmul(matmul(U, M), inverse_unimodular(U))
            assert nielsen_count_d2(N).count == count


def test_infinite_probe_block_example():
    M = block_diag(FIB, FIB)
    rep = infinite_nielsen_probe(M, height=3, R=12)
    assert rep.verdict is NielsenVerdict.INFINITE
    h = rep.witness
    assert det(h) in (1, -1) and matmul(M, h) == matmul(h, M)
    # exact relation scan, independent of the probe's own code path
    for a in range(-12, 13):
        for b in range(-12, 13):
            if (a, b) != (0, 0):
                ha, mb = matpow(h, a), matpow(M, b)
                assert ha != mb and ha != scalar_mul(-1, mb)


def test_infinite_probe_unknowns():
    assert infinite_nielsen_probe(FIB, height=4).verdict is NielsenVerdict.UNKNOWN
    rep = infinite_nielsen_probe([[-1, 0], [0, -1]])
    assert rep.verdict is NielsenVerdict.UNKNOWN and "finite order" in rep.detail["note"]


def test_generating_pair_classes():
    pc = generating_pair_classes(FIB, witness_for(FIB, [1, 0]), height=3)
    assert pc.count == 1 == pc.expected
    M = [[2, 1], [1, 1]]
    pc = generating_pair_classes(M, witness_for(M, [1, 0]), height=3)
    assert pc.count == 2 == pc.expected
    M = [[1, 1], [0, 1]]
    pc = generating_pair_classes(M, witness_for(M, [0, 1]), height=3)
    assert pc.count == 1 == pc.expected


def test_fib_swap_block_has_four_classes():
    """block-diag(Fib, swap): the centraliser is block diagonal, {±F^a} x {±I, ±S},
    so <M, -I> has index 4 and the class count stabilises at 4."""
    M = block_diag(FIB, [[0, 1], [1, 0]])
    w = cyclic_search(M, 2)
    assert w is not None
    counts = [generating_pair_classes(M, w, height=H).count for H in (1, 2, 3)]
    assert counts == [4, 4, 4]
    assert infinite_nielsen_probe(M, height=4).verdict is NielsenVerdict.UNKNOWN


def test_rank2_block_with_infinitely_many_classes():
    # resultant of x^2-x-1 and x^2-2x-1 is -1, so the sum is rank 2;
    # the two independent fundamental units give an infinite-index centraliser
    M = block_diag(FIB, [[0, 1], [1, 2]])
    w = cyclic_search(M, 2)
    assert w is not None
    rep = infinite_nielsen_probe(M, height=3)
    assert rep.verdict is NielsenVerdict.INFINITE
    a = generating_pair_classes(M, w, height=1)
    b = generating_pair_classes(M, w, height=2)
    assert b.count > a.count and b.flagged_infinite
