"""
Matrix orthogonal polynomials in closed form
============================================

Q(x, n) is built from monic Hermite polynomials.  We check orthogonality
exactly, then compare against Gauss-Hermite quadrature at a numeric point.
"""
import numpy as np

from matbochner.builtins import cg2x2
from matbochner.hermite import ClosedFormFamily
from matbochner.quadrature import quadrature_inner_product, required_nodes
from matbochner.weight import inner_product

W = cg2x2()
fam = ClosedFormFamily(W.ctx)
for n in range(3):
    print(n, fam.q_polynomial(n).to_nested_text())

#%%
# exact Gram matrix: zero off the diagonal, M-dependent norms on it
print(inner_product(fam.q_polynomial(3), fam.q_polynomial(1), W).to_nested_text())
print(inner_product(fam.q_polynomial(2), fam.q_polynomial(2), W).to_nested_text())

#%%
# numeric cross-check at a = 2, b = 1/2
num = W.ctx.numeric({"a": 2.0, "b": 0.5})
gram = np.zeros((5, 5))
for n in range(5):
    for m in range(5):
        P, Q = fam.q_polynomial(n), fam.q_polynomial(m)
        G = quadrature_inner_product(P, Q, W, num, required_nodes(P, Q, W))
        gram[n, m] = np.max(np.abs(G))
np.set_printoptions(precision=3, suppress=True)
print(gram)

#%%
# the monic recursion x P_n = P_{n+1} + B_n P_n + C_n P_{n-1}
rec = fam.monic_recursion(2)
print(rec.B.to_nested_text())
print("residual zero:", fam.monic_residual(2).is_zero())
