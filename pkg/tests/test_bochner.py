import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matbochner.bochner import (AdmissibilityError, ansatz_solve, centralizer_checks, dw_membership,
                                eigenvalue_map, eigenvalue_poly, fullness_probe,
                                monic_ops_from_moments, poly_in_d, representation_check)
from matbochner.bochner.ansatz import OperatorSpace, ansatz_unknowns, default_n_max
from matbochner.bochner.structure import double_falling
from matbochner.builtins import builtin_operator, cg2x2, ex3x3, wtilde
from matbochner.diffop import DiffOp, commutator, compose
from matbochner.hermite import monic_hermite, shifted_hermite
from matbochner.polymat import PolyMatrix, XPoly, parse_xpoly
from matbochner.weight import is_w_symmetric

from _strategies import CTX, diffops, small_fractions

a, b, E = CTX.syms("a", "b", "E")
D = builtin_operator("d_cg2x2")
I2 = DiffOp.identity(CTX, 2)
W = cg2x2()


def M(rows, ctx=CTX):
    return PolyMatrix(ctx, [[parse_xpoly(e, ctx) for e in row] for row in rows])


@pytest.fixture(scope="module")
def spaces():
    return {s: ansatz_solve(W, s) for s in (0, 1, 2, 3, 4)}


# -- eigenvalue maps -------------------------------------------------------------------

@pytest.mark.parametrize("n", range(6))
def test_eigenvalue_map_of_d(n):
    want = M([[f"{-2 * n - 2}", f"{-2 * n}*a*b"], ["0", f"{-2 * n}"]])
    assert eigenvalue_map(D, n) == want
    assert eigenvalue_poly(D).at(n) == want


def test_eigenvalue_map_identity_and_admissibility():
    assert eigenvalue_map(I2, 7) == PolyMatrix.identity(CTX, 2)
    with pytest.raises(AdmissibilityError):
        eigenvalue_map(builtin_operator("dtilde2_conjugated"), 1)


def test_eigen_criterion_for_d():
    lam = eigenvalue_poly(D)
    n = XPoly(CTX, [0, 1], "n")
    assert lam[0, 1] == n * (a * b) * (lam[0, 0] - lam[1, 1])


# -- membership ------------------------------------------------------------------------

def test_d_is_member():
    res = dw_membership(D, W, 10)
    assert res and res.verified_up_to == 10
    assert "verified up to n_max = 10" in res.label


def test_conjugated_dtilde2_not_member():
    res = dw_membership(builtin_operator("dtilde2_conjugated"), W, 6)
    assert not res and res.witness_n == 0


def test_zero_operator_member():
    assert dw_membership(DiffOp.zero(CTX, 2), W, 4)


def test_perturbed_operator_not_member():
    res = dw_membership(builtin_operator("d_cg2x2_perturbed"), W, 4)
    assert not res and res.witness_n is not None


def test_3x3_operator_member():
    assert dw_membership(builtin_operator("d_3x3"), ex3x3(), 6)


# -- moment oracle -----------------------------------------------------------------------

def test_diagonal_weight_moment_oracle():
    zero = XPoly(CTX)
    for n, P in enumerate(monic_ops_from_moments(wtilde(), 5)):
        assert P == PolyMatrix(CTX, [[shifted_hermite(n, b), zero], [zero, monic_hermite(n, CTX)]])


def test_gram_schmidt_output_orthogonal_3x3():
    from matbochner.weight import inner_product

    Ps = monic_ops_from_moments(ex3x3(), 3)
    for n in range(4):
        for m in range(n):
            assert inner_product(Ps[n], Ps[m], ex3x3()).is_zero()


# -- ansatz ------------------------------------------------------------------------------

def test_unknown_count_and_n_max():
    assert len(ansatz_unknowns(2, 2)) == 4 * (1 + 2 + 3)
    assert default_n_max(4) == 6
    with pytest.raises(ValueError):
        ansatz_solve(W, 2, n_max=3)
    with pytest.raises(ValueError):
        ansatz_solve(W, -1)


def test_dimensions(spaces):
    assert [spaces[s].dimension for s in (0, 1, 2, 3, 4)] == [1, 1, 2, 2, 3]
    for s in (2, 3, 4):
        assert len(set(spaces[s].sample_dims)) == 1


def test_no_odd_order_elements(spaces):
    assert all(B.order % 2 == 0 for B in spaces[3].basis)


def test_strategies_agree():
    for s in (1, 2):
        assert ansatz_solve(W, s, strategy="symbolic").basis == ansatz_solve(W, s).basis


def test_s4_span_contains_powers_of_d(spaces):
    # every basis element is a polynomial of degree <= 2 in D, and there are three of them
    for B in spaces[4].basis:
        dec = poly_in_d(B, D)
        assert dec and len(dec.coefficients) <= 3
    assert dw_membership(compose(D, D), W, 11)


def test_centralizer_checks(spaces):
    for s in (2, 3, 4):
        for rep in centralizer_checks(spaces[s], D):
            assert rep.passed, (s, rep.results, rep.notes)


def test_identity_passes_trivially():
    space = OperatorSpace("cg2x2", 0, 2, [I2], "specialize", [0, 1, 2], [3])
    (rep,) = centralizer_checks(space, D)
    assert rep.passed


def test_poly_in_d_examples():
    assert poly_in_d(compose(D, D) + D * 3 - I2, D).coefficients == [-1, 3, 1]
    bad = poly_in_d(builtin_operator("dtilde2_conjugated"), D)
    assert not bad and bad.remainder is not None
    assert not poly_in_d(DiffOp.d(CTX, 2, 1), D)


def test_fullness(spaces):
    v = fullness_probe(spaces[4])
    assert v.verdict == "not full (desk-scale, order ≤ 4)"
    w = fullness_probe(ansatz_solve(wtilde(), 2))
    assert w.verdict == "fullness witnesses found"
    assert sorted(x.coeff(0).to_nested_text() for x in w.witnesses) == [
        [["0", "0"], ["0", "1"]], [["1", "0"], ["0", "0"]]]
    assert compose(*w.witnesses).is_zero()
    empty = OperatorSpace("cg2x2", 2, 4, [], "specialize", [], [])
    assert fullness_probe(empty).verdict.startswith("inconclusive")


def test_representation(spaces):
    assert representation_check(spaces[4], range(8)).passed
    pair = OperatorSpace("cg2x2", 2, 4, [D, D * 2], "specialize", [], [])
    rec = representation_check(pair, range(3))
    assert not rec.passed and rec.details["rank"] == 1
    assert eigenvalue_map(compose(D, D), 3) == eigenvalue_map(D, 3) * eigenvalue_map(D, 3)
    assert eigenvalue_map(D * 2, 1) != eigenvalue_map(D, 1)


def test_3x3_slice():
    W3 = ex3x3()
    D3 = builtin_operator("d_3x3")
    space = ansatz_solve(W3, 2)
    assert space.dimension == 2
    for B in space.basis:
        dec = poly_in_d(B, D3)
        assert dec and len(dec.coefficients) <= 2
    assert is_w_symmetric(D3, W3)


def test_double_falling():
    assert double_falling(5, 0) == 1
    assert double_falling(5, 2) == 5 * 3


# -- properties --------------------------------------------------------------------------------

@settings(max_examples=200)
@given(diffops(2, max_order=3, admissible=True), diffops(2, max_order=3, admissible=True),
       st.integers(0, 8))
def test_eigenvalue_map_multiplicative(D1, D2, n):
    assert eigenvalue_map(compose(D1, D2), n) == eigenvalue_map(D1, n) * eigenvalue_map(D2, n)
    assert eigenvalue_map(D1 + D2, n) == eigenvalue_map(D1, n) + eigenvalue_map(D2, n)


@settings(max_examples=200)
@given(diffops(3, max_order=3, admissible=True), st.integers(0, 10))
def test_eigenvalue_poly_matches_map(op, n):
    assert eigenvalue_poly(op).at(n) == eigenvalue_map(op, n)


@settings(max_examples=50, deadline=None)
@given(st.lists(small_fractions, min_size=1, max_size=3))
def test_polynomials_in_d_are_members_and_decompose(cs):
    op = DiffOp.zero(CTX, 2)
    power = I2
    for c in cs:
        op = op + power * CTX.const(c)
        power = compose(power, D)
    assert dw_membership(op, W, 4)
    assert commutator(op, D).is_zero()
    if not op.is_zero():
        dec = poly_in_d(op, D)
        assert dec
        back = DiffOp.zero(CTX, 2)
        power = I2
        for c in dec.coefficients:
            back = back + power * c
            power = compose(power, D)
        assert back == op
