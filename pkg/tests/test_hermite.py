from fractions import Fraction

import numpy as np
import pytest

from matbochner.bochner.moments import monic_ops_from_moments
from matbochner.builtins import cg2x2
from matbochner.hermite import ClosedFormFamily, monic_hermite, shifted_hermite
from matbochner.polymat import PolyMatrix, XPoly, parse_xpoly
from matbochner.weight import inner_product

from _strategies import CTX

a, b, E = CTX.syms("a", "b", "E")
FAM = ClosedFormFamily(CTX)
W = cg2x2()


def M(rows):
    return PolyMatrix(CTX, [[parse_xpoly(e, CTX) for e in row] for row in rows])


def test_first_hermite_polynomials():
    assert monic_hermite(0, CTX) == XPoly.const(CTX, 1)
    assert monic_hermite(2, CTX) == parse_xpoly("x^2 - 1/2", CTX)
    assert monic_hermite(3, CTX) == parse_xpoly("x^3 - 3/2*x", CTX)
    assert monic_hermite(-1, CTX).is_zero()


@pytest.mark.parametrize("n", range(12))
def test_hermite_against_numpy(n):
    # physicists' H_n has leading coefficient 2^n
    want = np.polynomial.hermite.herm2poly([0] * n + [1]) / 2.0 ** n
    got = [float(c.as_fraction()) for c in monic_hermite(n, CTX).coeffs]
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-9 * max(1.0, np.max(np.abs(want))))


def test_shifted_hermite():
    assert shifted_hermite(1, b) == XPoly(CTX, [-b, 1])
    h2 = shifted_hermite(2, b)
    assert h2 == XPoly(CTX, [b * b - Fraction(1, 2), -b * 2, 1])


def test_q_at_zero_and_m_matrices():
    assert FAM.q_polynomial(0) == M([["1", "0"], ["0", "2*E"]])
    assert FAM.m_matrix(0) == M([["1", "0"], ["0", "2*E"]])
    assert FAM.m_matrix(1) == M([["1", "a*b"], ["0", "2*E + a^2"]])


@pytest.mark.parametrize("n", range(7))
def test_q_leading_coefficient_is_m(n):
    Q = FAM.q_polynomial(n)
    lead = PolyMatrix(CTX, [[XPoly.const(CTX, Q[i, j].coeff(n)) for j in range(2)] for i in range(2)])
    assert lead == FAM.m_matrix(n)
    assert Q.degree_max() == n


def test_q_orthogonality_by_exact_integration():
    for n in range(5):
        for m in range(n):
            assert inner_product(FAM.q_polynomial(n), FAM.q_polynomial(m), W).is_zero()


def test_monic_p_matches_gram_schmidt():
    gs = monic_ops_from_moments(W, 4)
    for n in range(5):
        assert FAM.monic_p(n) == gs[n]


@pytest.mark.parametrize("n", range(8))
def test_tilde_recursion(n):
    assert FAM.tilde_residual(n).is_zero()


@pytest.mark.parametrize("n", range(8))
def test_monic_recursion(n):
    assert FAM.monic_residual(n).is_zero()


@pytest.mark.parametrize("n", range(1, 8))
def test_monic_recursion_equals_conjugated(n):
    r, c = FAM.monic_recursion(n), FAM.conjugated_recursion(n)
    assert c.A == PolyMatrix.identity(CTX, 2)
    assert r.B == c.B and r.C == c.C


def test_corrected_b12_entry_at_n1():
    # the E^2 term needs coefficient 4 for the recursion to hold
    n = 1
    d0, d1 = E * 2 + a * a * n, E * 2 + a * a * (n + 1)
    num = (a ** 5 * 2 * (b * b * 2 - 1) + a ** 3 * E * 2 * (b * b * 2 - 3)
           - a * E * E * 4 * (b * b * 2 + 1))
    assert FAM.monic_recursion(n).B[0, 1].coeff(0) == num / (d0 * d1 * -2)


@pytest.mark.parametrize("n", range(6))
def test_tilde_c22_and_a_entries(n):
    t = FAM.tilde_recursion(n)
    assert t.C[1, 1].coeff(0) == CTX.const(Fraction(n, 2))
    assert t.A[0, 0].coeff(0) == CTX.one and t.A[1, 0].is_zero()
