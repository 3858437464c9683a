"""
The algebra of operators with the polynomials as eigenfunctions
===============================================================

Solve for every operator up to order 4 having the monic sequence as
eigenfunctions, then inspect the structure of the solution space.
"""
from matbochner.bochner import (ansatz_solve, centralizer_checks, eigenvalue_poly, fullness_probe,
                                poly_in_d)
from matbochner.builtins import builtin_operator, cg2x2, wtilde

W = cg2x2()
D = builtin_operator("d_cg2x2")

for s in (2, 3, 4):
    space = ansatz_solve(W, s)
    print(s, space.dimension, space.sample_dims)

#%%
# every element is a polynomial in D, upper triangular, with a scalar leading term
for B in space.basis:
    print(B.order, [c.to_text() for c in poly_in_d(B, D).coefficients])
for rep in centralizer_checks(space, D):
    print(rep.index, rep.results)

#%%
# eigenvalues as polynomials in n
print(eigenvalue_poly(D).entries.to_nested_text())

#%%
# no zero divisors here; the diagonal weight has orthogonal idempotents
print(fullness_probe(space).verdict)
print(fullness_probe(ansatz_solve(wtilde(), 2)).verdict)
