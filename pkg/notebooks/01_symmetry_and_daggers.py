"""
The weight, its operator and the W-adjoint
==========================================

Build the 2x2 conjugated-Hermite weight, check that the second-order
operator D is W-symmetric, and look at an operator whose W-adjoint
picks up exponential terms.
"""
import numpy as np

from matbochner.builtins import builtin_operator, cg2x2
from matbochner.weight import dagger, fourier_membership, is_w_symmetric

W = cg2x2()
print(W.to_json())

# W(x) is positive definite; sample it at a few points for a = 1.5, b = 0.7
for x0 in np.linspace(-2, 2, 5):
    print(x0, np.linalg.eigvalsh(W.numeric_matrix(x0, {"a": 1.5, "b": 0.7})))

#%%
# The operator ships as a data file; its dagger is computed in the
# diagonal frame and conjugated back.
D = builtin_operator("d_cg2x2")
print(D)
print("symmetric:", bool(is_w_symmetric(D, W)))

#%%
# A constant lower-left entry is not adjointable with polynomial
# coefficients: the dagger carries exp(-2 b x).
L = builtin_operator("lower_left_unit")
res = fourier_membership(L, W)
print("member:", res.member, "witness frequency:", res.witness)
print(dagger(L, W))
