"""Truncated-operator algebra: builders, adjoints, products, sandwiches."""

import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posinorm import (
    DiagonalOperator,
    TruncatedOperator,
    adjoint,
    build_factorable,
    build_shift,
    make_family,
    make_shift,
    multiply,
    sandwich,
)
from posinorm.matrixcore import EXACT, FLOAT

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=12)


def rand_matrix(rng, n, lo=-5, hi=5, den=9):
    rows = [[F(rng.randint(lo, hi), rng.randint(1, den)) for _ in range(n)]
            for _ in range(n)]
    return TruncatedOperator.from_rows(rows)


def test_build_factorable_cesaro():
    op = build_factorable(make_family("cesaro", {"k": "1"}), 3)
    expect = [[F(1), 0, 0], [F(1, 2), F(1, 2), 0], [F(1, 3), F(1, 3), F(1, 3)]]
    assert op.equals(TruncatedOperator.from_rows(expect))


def test_build_factorable_single_entry():
    fam = make_family("q-cesaro", {"q": "3/2"})
    op = build_factorable(fam, 1)
    assert op.entry(0, 0) == fam.a(0) * fam.c(0)


def test_build_factorable_fibonacci_head():
    op = build_factorable(make_family("fibonacci"), 2)
    assert op.entry(1, 0) == F(1, 2) and op.entry(1, 1) == F(1, 2)
    assert op.entry(0, 1) == 0


def test_build_factorable_lower_triangular():
    op = build_factorable(make_family("toeplitz", {"r": "1/2"}), 6)
    for i in range(6):
        for j in range(i + 1, 6):
            assert op.entry(i, j) == 0


def test_build_shift_patterns():
    ones = build_shift(make_shift("ones"), 3)
    assert [ones.entry(i + 1, i) for i in range(2)] == [1, 1]
    ex1 = build_shift(make_shift("zero-prefix-ones"), 4)
    assert [ex1.entry(i + 1, i) for i in range(3)] == [0, 1, 1]
    ex2 = build_shift(make_shift("alternating-zero"), 4)
    assert [ex2.entry(i + 1, i) for i in range(3)] == [1, 0, 1]


def test_adjoint_involution_and_shift_adjoint():
    ex1 = build_shift(make_shift("zero-prefix-ones"), 3)
    assert adjoint(adjoint(ex1)).equals(ex1)
    up = adjoint(ex1)
    assert [up.entry(i, i + 1) for i in range(2)] == [0, 1]


def test_product_adjoint_seeded_16():
    rng = random.Random(1234)
    a = rand_matrix(rng, 16)
    b = rand_matrix(rng, 16)
    assert multiply(a, b).adjoint().equals(multiply(b.adjoint(), a.adjoint()))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.data())
def test_product_adjoint_property(n, data):
    grid = data.draw(st.lists(st.lists(rationals, min_size=n, max_size=n),
                              min_size=n, max_size=n))
    grid2 = data.draw(st.lists(st.lists(rationals, min_size=n, max_size=n),
                               min_size=n, max_size=n))
    a = TruncatedOperator.from_rows(grid)
    b = TruncatedOperator.from_rows(grid2)
    assert multiply(a, b).adjoint().equals(multiply(b.adjoint(), a.adjoint()))


@settings(max_examples=50, deadline=None)
@given(rationals, rationals, rationals)
def test_scalar_smoke(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) + z == x + (y + z)


@pytest.mark.parametrize("name,params", [
    ("cesaro", {"k": "2"}), ("fibonacci", {}), ("toeplitz", {"r": "3/4"}),
    ("q-cesaro", {"q": "1/3"}),
])
def test_truncation_consistency(name, params):
    fam = make_family(name, params)
    small = build_factorable(fam, 5)
    for m in (6, 9, 12):
        big = build_factorable(fam, m)
        assert big.compression(5).equals(small)


def test_multiply_mismatch():
    a = rand_matrix(random.Random(0), 3)
    b = rand_matrix(random.Random(1), 4)
    with pytest.raises(ValueError):
        multiply(a, b)
    with pytest.raises(ValueError):
        multiply(a, a.to_float())


def test_sandwich_identity():
    fam = make_family("cesaro", {"k": "1"})
    op = build_factorable(fam, 4)
    out = sandwich(DiagonalOperator.identity(), op)
    assert out.backend == EXACT and out.equals(op)


def test_sandwich_perfect_square_exact():
    op = build_factorable(make_family("cesaro", {"k": "1"}), 2)
    d = DiagonalOperator.from_values([F(4), F(1)])
    out = sandwich(d, op, 2)
    assert out.backend == EXACT
    assert out.entry(1, 0) == 1  # sqrt(4) * sqrt(1) * 1/2


def test_sandwich_irrational_falls_back_to_float():
    op = build_factorable(make_family("cesaro", {"k": "1"}), 2)
    d = DiagonalOperator.from_values([F(2), F(1)])
    out = sandwich(d, op, 2)
    assert out.backend == FLOAT
    assert out.entries[1, 0] == pytest.approx(np.sqrt(2.0) * 0.5)


def test_sandwich_rejects_negative_diag():
    op = build_factorable(make_family("cesaro", {"k": "1"}), 2)
    d = DiagonalOperator.from_values([F(-1), F(1)])
    with pytest.raises(ValueError):
        sandwich(d, op, 2)


def test_diagonal_operator_modes():
    strict = DiagonalOperator(lambda k: F(k), "strict")
    with pytest.raises(ValueError):
        strict[0]
    assert strict[3] == 3
    soft = DiagonalOperator(lambda k: F(k))
    assert soft[0] == 0
    patched = soft.with_override(5, F(7, 2))
    assert patched[5] == F(7, 2) and patched[4] == 4
    assert patched.override_indices == (5,)
    table = DiagonalOperator.from_values([1, 2])
    with pytest.raises(IndexError):
        table[2]


def test_compression_and_float_roundtrip():
    op = build_factorable(make_family("toeplitz", {"r": "1/2"}), 4)
    f = op.to_float()
    assert f.backend == FLOAT
    assert f.entries[2, 1] == pytest.approx(float(op.entry(2, 1)))
    with pytest.raises(ValueError):
        op.compression(9)
