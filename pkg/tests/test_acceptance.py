"""Acceptance gate: one test per criterion, each timed against its budget.

Results are printed as one line per criterion in the terminal summary.
"""
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from matbochner.bochner import (ansatz_solve, centralizer_checks, dw_membership, eigenvalue_map,
                                fullness_probe, monic_ops_from_moments, poly_in_d)
from matbochner.builtins import builtin_operator, cg2x2, ex3x3, wtilde
from matbochner.diffop import DiffOp, apply, compose, formal_adjoint
from matbochner.hermite import ClosedFormFamily
from matbochner.polymat import PolyMatrix, XPoly, const_inverse
from matbochner.quadrature import quadrature_inner_product, required_nodes
from matbochner.weight import (dagger, fourier_form_2x2, fourier_membership, inner_product,
                               symmetry_residuals_2x2)

from _strategies import CTX, diffops, fourier_family, polymatrices

pytestmark = pytest.mark.acceptance
a, b, E = CTX.syms("a", "b", "E")
W = cg2x2()
D = builtin_operator("d_cg2x2")
FAM = ClosedFormFamily(CTX)


@contextmanager
def criterion(acceptance, k, title, budget):
    state = {"ok": False}
    t0 = time.perf_counter()
    try:
        yield state
        state["ok"] = True
    finally:
        elapsed = time.perf_counter() - t0
        ok = state["ok"] and elapsed < budget
        acceptance[k] = (title, ok, elapsed, budget)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'} in {elapsed:.2f}s", flush=True)
    assert elapsed < budget, f"criterion {k} over budget: {elapsed:.1f}s >= {budget}s"


def test_c01_symmetry(acceptance):
    with criterion(acceptance, 1, "W-symmetry of D (dagger and residual routes)", 5):
        assert dagger(D, W) == D.to_exp()
        assert symmetry_residuals_2x2(D, W).all_zero()


def test_c02_symmetry_3x3(acceptance):
    D3 = builtin_operator("d_3x3")
    with criterion(acceptance, 2, "3x3 symmetry", 30):
        assert dagger(D3, ex3x3()) == D3.to_exp()


def test_c03_orthogonality(acceptance):
    with criterion(acceptance, 3, "orthogonality of Q(x,n), n != m <= 8; leading coefficients", 60):
        Qs = [FAM.q_polynomial(n) for n in range(9)]
        for n in range(9):
            for m in range(n):
                assert inner_product(Qs[n], Qs[m], W).is_zero(), (n, m)
                assert inner_product(Qs[m], Qs[n], W).is_zero(), (m, n)
            lead = Qs[n].map(lambda p, n=n: XPoly.const(CTX, p.coeff(n)))
            assert lead == FAM.m_matrix(n)


def test_c04_recursions(acceptance):
    I = PolyMatrix.identity(CTX, 2)
    with criterion(acceptance, 4, "three-term recursions for n <= 8", 60):
        for n in range(9):
            assert FAM.tilde_residual(n).is_zero(), n
            assert FAM.monic_residual(n).is_zero(), n
            r, c = FAM.monic_recursion(n), FAM.conjugated_recursion(n)
            assert r.A == I and c.A == I
            assert r.B == c.B
            if n > 0:
                assert r.C == c.C


def test_c05_eigenfunctions(acceptance):
    with criterion(acceptance, 5, "P(x,n) D = Lambda_n P(x,n) for n <= 15", 120):
        for n in range(16):
            lam = PolyMatrix(CTX, [[XPoly.const(CTX, -2 * n - 2), XPoly.const(CTX, a * b * (-2 * n))],
                                   [XPoly(CTX), XPoly.const(CTX, -2 * n)]])
            assert eigenvalue_map(D, n) == lam
            P = FAM.monic_p(n)
            assert apply(P, D) == lam * P, n
        assert dw_membership(D, W, 15)


def test_c06_structure(acceptance):
    with criterion(acceptance, 6, "ansatz dimensions and structure at s = 2, 3, 4", 600):
        dims = {}
        for s in (2, 3, 4):
            space = ansatz_solve(W, s, strategy="specialize")
            dims[s] = space.dimension
            assert len(set(space.sample_dims)) == 1 and space.sample_dims[0] == space.dimension
            for B in space.basis:
                assert B.is_upper_triangular()
                assert poly_in_d(B, D), B
            for rep in centralizer_checks(space, D):
                assert rep.passed, (s, rep.results, rep.notes)
        assert dims == {2: 2, 3: 2, 4: 3}


def test_c07_fullness(acceptance):
    with criterion(acceptance, 7, "fullness verdicts for cg2x2 and wtilde", 120):
        assert fullness_probe(ansatz_solve(W, 4)).verdict == "not full (desk-scale, order ≤ 4)"
        v = fullness_probe(ansatz_solve(wtilde(), 2))
        assert v.verdict == "fullness witnesses found"
        got = sorted(x.coeff(0).to_nested_text() for x in v.witnesses)
        assert got == [[["0", "0"], ["0", "1"]], [["1", "0"], ["0", "0"]]]


def _random_member(rng):
    order = rng.randint(0, 4)
    poly = lambda: XPoly(CTX, [rng.randint(-3, 3) for _ in range(rng.randint(0, 3))])
    return fourier_form_2x2([poly() for _ in range(order + 1)], [poly() for _ in range(order + 1)], a)


def _perturb(op, rng):
    c = rng.choice([-3, -2, -1, 1, 2, 3])
    g = XPoly(CTX, [0] * rng.randint(0, 2) + [c])
    bump = PolyMatrix(CTX, [[XPoly(CTX), XPoly(CTX)], [g, XPoly(CTX)]])
    return op + DiffOp(CTX, 2, {rng.randint(0, 2): bump})


def test_c08_fourier(acceptance):
    rng = random.Random(8)
    conj = builtin_operator("dtilde2_conjugated")
    with criterion(acceptance, 8, "Fourier algebra membership (200 accepted, 200 rejected)", 300):
        assert fourier_membership(D, W)
        assert fourier_membership(conj, W)
        assert not dw_membership(conj, W, 6)
        for _ in range(200):
            op = _random_member(rng)
            assert fourier_membership(op, W), op
            bad = fourier_membership(_perturb(op, rng), W)
            assert not bad and bad.witness is not None and not bad.witness.is_zero()


def test_c09_oracle_equivalence(acceptance):
    with criterion(acceptance, 9, "moment Gram-Schmidt equals M_n^-1 Q(x,n), n <= 6", 60):
        gs = monic_ops_from_moments(W, 6)
        for n in range(7):
            assert gs[n] == const_inverse(FAM.m_matrix(n)) * FAM.q_polynomial(n), n


def test_c10_numeric_cross_check(acceptance):
    with criterion(acceptance, 10, "Gauss-Hermite agrees with exact inner products to 1e-8", 60):
        Qs = [FAM.q_polynomial(n) for n in range(7)]
        for point in ({"a": Fraction(1), "b": Fraction(1)}, {"a": Fraction(2), "b": Fraction(1, 2)}):
            num = CTX.numeric({k: float(v) for k, v in point.items()})
            for n in range(7):
                for m in range(7):
                    exact = inner_product(Qs[n], Qs[m], W)
                    ref = np.array([[e.coeff(0).specialize(num).value for e in row] for row in exact.rows])
                    got = quadrature_inner_product(Qs[n], Qs[m], W, num, required_nodes(Qs[n], Qs[m], W))
                    assert np.max(np.abs(got - ref)) < 1e-8, (point, n, m)
                    if n == m:
                        assert np.all(np.linalg.eigvalsh((got + got.T) / 2) > 0)


def test_c11_property_suites(acceptance):
    counts = {}

    def tick(name):
        counts[name] = counts.get(name, 0) + 1

    @settings(max_examples=200)
    @given(polymatrices(max_deg=3), diffops(max_order=3), diffops(max_order=3))
    def action(P, D1, D2):
        tick("action")
        assert apply(P, compose(D1, D2)) == apply(apply(P, D1), D2)

    @settings(max_examples=200)
    @given(diffops(), diffops())
    def adjoint(D1, D2):
        tick("adjoint")
        prod = compose(D1, D2)
        assert formal_adjoint(prod) == compose(formal_adjoint(D2), formal_adjoint(D1))
        assert formal_adjoint(formal_adjoint(D1)) == D1

    @settings(max_examples=200)
    @given(fourier_family())
    def dagger_involution(op):
        tick("dagger")
        d = dagger(op, W)
        assert d.is_polynomial()
        assert dagger(d.to_diffop(), W).to_diffop() == op

    @settings(max_examples=200)
    @given(diffops(max_order=3, admissible=True), diffops(max_order=3, admissible=True))
    def multiplicative(D1, D2):
        tick("lambda")
        for n in range(6):
            assert eigenvalue_map(compose(D1, D2), n) == eigenvalue_map(D1, n) * eigenvalue_map(D2, n)

    with criterion(acceptance, 11, "property suites, >= 200 instances each", 600):
        for suite in (action, adjoint, dagger_involution, multiplicative):
            suite()
        assert min(counts.values()) >= 200 and len(counts) == 4, counts
