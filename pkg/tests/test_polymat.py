from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matbochner.builtins import context_3x3
from matbochner.polymat import (NEG_INF, ExpPolyMatrix, NotUnimodularError, PolyMatrix, XPoly,
                                exp_derivative, parse_xpoly, unimodular_inverse)

from _strategies import CTX, polymatrices, simple_scalars, xpolys

a, b = CTX.syms("a", "b")


def P(rows, ctx=CTX):
    return PolyMatrix(ctx, [[parse_xpoly(e, ctx) for e in row] for row in rows])


def test_xpoly_basics():
    h2 = parse_xpoly("x^2 - 1/2", CTX)
    assert h2.derivative() == parse_xpoly("2*x", CTX)
    assert XPoly(CTX).degree() == NEG_INF
    assert h2.eval(2) == CTX.const(Fraction(7, 2))
    assert XPoly.const(CTX, 5).derivative().is_zero()


def test_transpose_of_t():
    T = P([["1", "a*x"], ["0", "1"]])
    assert T.T == P([["1", "0"], ["a*x", "1"]])
    assert PolyMatrix.identity(CTX, 2) * T == T


def test_matrix_derivative():
    assert P([["x", "x^2"], ["0", "1"]]).derivative() == P([["1", "2*x"], ["0", "0"]])


def test_size_mismatch():
    with pytest.raises(ValueError):
        PolyMatrix.identity(CTX, 2) + PolyMatrix.identity(CTX, 3)


def test_unimodular_inverse_examples():
    assert unimodular_inverse(P([["1", "a*x"], ["0", "1"]])) == P([["1", "-a*x"], ["0", "1"]])
    I = PolyMatrix.identity(CTX, 2)
    assert unimodular_inverse(I) == I
    c3 = context_3x3()
    T = P([["1", "a1*x", "0"], ["0", "1", "0"], ["0", "a2*x", "1"]], c3)
    assert unimodular_inverse(T) == P([["1", "-a1*x", "0"], ["0", "1", "0"], ["0", "-a2*x", "1"]], c3)


def test_not_unimodular():
    with pytest.raises(NotUnimodularError):
        unimodular_inverse(P([["x", "0"], ["0", "1"]]))
    with pytest.raises(NotUnimodularError):
        unimodular_inverse(P([["0", "0"], ["0", "1"]]))


def test_exp_derivative_and_cancellation():
    I = PolyMatrix.identity(CTX, 2)
    two_b = b * 2
    M = ExpPolyMatrix(CTX, 2, {two_b: I})
    assert exp_derivative(M) == ExpPolyMatrix(CTX, 2, {two_b: I * two_b})
    A, B = P([["x", "1"], ["0", "a"]]), P([["1", "0"], ["x", "x^2"]])
    prod = ExpPolyMatrix(CTX, 2, {two_b: A}) * ExpPolyMatrix(CTX, 2, {-two_b: B})
    assert prod.is_polynomial() and prod.poly_part() == A * B
    assert exp_derivative(ExpPolyMatrix.from_poly(A)) == ExpPolyMatrix.from_poly(A.derivative())


def test_frequency_zero_slot_always_present():
    M = ExpPolyMatrix.zeros(CTX, 2)
    assert M.poly_part().is_zero() and M.nonzero_frequencies() == []


# -- properties ---------------------------------------------------------------------

@settings(max_examples=200)
@given(xpolys(), xpolys())
def test_leibniz_xpoly(f, g):
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()


@settings(max_examples=200)
@given(polymatrices(), polymatrices())
def test_leibniz_and_transpose_polymatrix(A, B):
    assert (A * B).derivative() == A.derivative() * B + A * B.derivative()
    assert (A * B).T == B.T * A.T


@st.composite
def unipotent(draw):
    n = draw(st.sampled_from([2, 3]))
    upper = draw(st.booleans())
    rows = [[XPoly.const(CTX, int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if (i < j) if upper else (i > j):
                rows[i][j] = draw(xpolys(CTX, 2))
    return PolyMatrix(CTX, rows)


@settings(max_examples=100)
@given(unipotent())
def test_unimodular_round_trip(T):
    Ti = unimodular_inverse(T)
    I = PolyMatrix.identity(CTX, T.size)
    assert T * Ti == I and Ti * T == I


@settings(max_examples=100)
@given(polymatrices(), polymatrices())
def test_frequency_zero_isomorphism(A, B):
    eA, eB = ExpPolyMatrix.from_poly(A), ExpPolyMatrix.from_poly(B)
    assert (eA * eB).to_polymatrix() == A * B
    assert (eA + eB).to_polymatrix() == A + B


@settings(max_examples=100)
@given(xpolys(), simple_scalars())
def test_text_round_trip(f, c):
    g = f * c
    assert parse_xpoly(g.to_text(), CTX) == g
