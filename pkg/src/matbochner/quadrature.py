"""Gauss-Hermite quadrature as a numeric oracle for exact inner products."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .field import ParamContext, specialize
from .polymat import PolyMatrix
from .weight import Weight, inner_product

__all__ = ["QuadratureError", "gauss_hermite", "numeric_polymatrix", "quadrature_inner_product",
           "gauss_hermite_check", "required_nodes"]


class QuadratureError(RuntimeError):
    pass


def _monic_values(m: int, x: float) -> tuple[float, float]:
    """(h_m(x), h_{m-1}(x)) from ``h_{k+1} = x h_k - (k/2) h_{k-1}``."""
    prev, cur = 0.0, 1.0
    for k in range(m):
        prev, cur = cur, x * cur - 0.5 * k * prev
    return cur, prev


@lru_cache(maxsize=64)
def gauss_hermite(m: int, max_iter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights (in units of sqrt(pi)) for ``exp(-x^2)`` with m nodes."""
    if m < 1:
        raise ValueError("need at least one node")
    log_norm = math.lgamma(m) - (m - 1) * math.log(2.0)  # ||h_{m-1}||^2 / sqrt(pi)
    nodes = np.empty(m)
    weights = np.empty(m)
    half = (m + 1) // 2
    z = 0.0
    for i in range(half):
        # classical asymptotic starting guesses, largest root first
        if i == 0:
            z = math.sqrt(2 * m + 1) - 1.85575 * (2 * m + 1) ** (-1 / 6)
        elif i == 1:
            z -= 1.14 * m ** 0.426 / z
        elif i == 2:
            z = 1.86 * z - 0.86 * nodes[0]
        elif i == 3:
            z = 1.91 * z - 0.91 * nodes[1]
        else:
            z = 2.0 * z - nodes[i - 2]
        for _ in range(max_iter):
            hm, hm1 = _monic_values(m, z)
            step = hm / (m * hm1)
            z -= step
            if abs(step) <= 1e-15 * max(1.0, abs(z)):
                break
        else:
            raise QuadratureError(f"Newton iteration for node {i} of {m} did not converge")
        _, hm1 = _monic_values(m, z)
        w = math.exp(log_norm) / (m * hm1 * hm1)
        nodes[i], nodes[m - 1 - i] = z, -z
        weights[i] = weights[m - 1 - i] = w
    if m % 2:
        nodes[half - 1] = 0.0
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def numeric_polymatrix(A: PolyMatrix, num_ctx: ParamContext) -> np.ndarray:
    """Coefficient array of shape (rows, cols, degree + 1), low degree first."""
    r, c = A.shape
    d = max(A.degree_max(), 0)
    out = np.zeros((r, c, d + 1))
    for i, j, p in A.entries():
        for k, coef in enumerate(p.coeffs):
            out[i, j, k] = specialize(coef, num_ctx)
    return out


def _eval_array(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    # returns shape (len(x), rows, cols)
    # polyval wants the degree axis first
    return np.polynomial.polynomial.polyval(x, np.moveaxis(coeffs, 2, 0)).transpose(2, 0, 1)


def quadrature_inner_product(P: PolyMatrix, Q: PolyMatrix, W: Weight, num_ctx: ParamContext,
                             m: int) -> np.ndarray:
    """``int P W Q^T dx / sqrt(pi)`` by m-point Gauss-Hermite per diagonal slot."""
    y, w = gauss_hermite(m)
    PT = numeric_polymatrix(P * W.T, num_ctx)
    QT = numeric_polymatrix(Q * W.T, num_ctx)
    total = np.zeros((P.shape[0], Q.shape[0]))
    for i, c in enumerate(W.shifts):
        cf = specialize(c, num_ctx)
        x = y + cf
        u = _eval_array(PT, x)[:, :, i]
        v = _eval_array(QT, x)[:, :, i]
        total += math.exp(cf * cf) * np.einsum("k,kr,ks->rs", w, u, v)
    return total


def gauss_hermite_check(P: PolyMatrix, Q: PolyMatrix, W: Weight, num_ctx: ParamContext,
                        m: int) -> float:
    """Max-abs gap between quadrature and the specialised exact inner product.

    The rule is exact once ``2m - 1`` reaches the degree of the integrand;
    smaller m gives a plain (possibly large) deviation, never a silent pass.
    """
    exact = inner_product(P, Q, W)
    ref = np.array([[specialize(e.coeff(0), num_ctx) for e in row] for row in exact.rows])
    got = quadrature_inner_product(P, Q, W, num_ctx, m)
    return float(np.max(np.abs(got - ref))) if ref.size else 0.0


def required_nodes(P: PolyMatrix, Q: PolyMatrix, W: Weight) -> int:
    """Smallest m for which the rule integrates ``(PT)(QT)^T`` exactly."""
    deg = max((P * W.T).degree_max(), 0) + max((Q * W.T).degree_max(), 0)
    return deg // 2 + 1
