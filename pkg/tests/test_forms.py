import itertools

import pytest

from mtrank.forms import BinaryQuadraticForm, represent_unit


def brute_unit(Q, B=60):
    return any(Q(x, y) in (1, -1) for x, y in itertools.product(range(-B, B + 1), repeat=2))


def test_form_of_matrix():
    Q = BinaryQuadraticForm.of_matrix([[0, 1], [1, 1]])
    assert (Q.a, Q.b, Q.c) == (1, 1, -1)
    assert Q.disc == 5


def test_transform_preserves_disc():
    Q = BinaryQuadraticForm(3, 5, -7)
    R = Q.transform(((2, 1), (1, 1)))
    assert R.disc == Q.disc
    assert R(1, 0) == Q(2, 1)


@pytest.mark.parametrize("abc, expected", [
    ((1, 1, -1), True),
    ((2, 0, -3), True),      # (1, 1)
    ((3, 0, -5), False),     # 3x^2 = ±1 has no solution mod 5
    ((5, 0, -7), False),     # 3y^2 = ±1 has no solution mod 5
    ((2, 2, -1), True),      # 2x^2+2xy-y^2 at (0,1)
    ((3, 0, 3), False),      # content 3
    ((2, 0, 1), True),       # definite
    ((2, 1, 2), False),      # definite, min value 2
    ((1, -2, 1), True),      # parabolic
    ((2, 0, 0), False),      # parabolic, imprimitive-like values 2x^2
    ((0, 2, 1), True),       # split: y(2x + y)
    ((0, 2, 0), False),      # 2xy
    ((3, 1, -2), False),     # split: (3x - 2y)(x + y)
    ((2, 3, -2), False),     # split: (2x - y)(x + 2y), values never ±1
    ((5, 9, -5), True),
])
def test_represent_unit_examples(abc, expected):
    Q = BinaryQuadraticForm(*abc)
    v = represent_unit(Q)
    assert (v is not None) == expected == brute_unit(Q)
    if v is not None:
        assert Q(*v) in (1, -1)


def test_represent_unit_exhaustive_small():
    """Every small form agrees with a brute-force box (answers found within 60)."""
    for a, b, c in itertools.product(range(-5, 6), repeat=3):
        Q = BinaryQuadraticForm(a, b, c)
        v = represent_unit(Q)
        if v is not None:
            assert Q(*v) in (1, -1)
        else:
            assert not brute_unit(Q, 25), (a, b, c)


def test_pell_type_large_solution():
    # x^2 - 61 y^2 = -1 has its smallest solution at y = 3805
    Q = BinaryQuadraticForm(1, 0, -61)
    assert represent_unit(Q) is not None
    Q = BinaryQuadraticForm(61, 0, -1)
    v = represent_unit(Q)
    assert Q(*v) in (1, -1)
