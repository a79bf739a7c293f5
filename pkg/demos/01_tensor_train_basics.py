"""Tensor-train basics: build, reconstruct, and watch Hadamard ranks grow.

Run with: python demos/01_tensor_train_basics.py
"""

import numpy as np

from hatt import (
    gaussian_tt,
    hadamard_dense,
    relative_error,
    tt_add,
    tt_dot,
    tt_hadamard,
    tt_norm,
    tt_rounding,
    tt_to_dense,
)

# Two random TT tensors on a 4 x 4 x 4 x 4 grid with modest ranks.
shape = (4, 4, 4, 4)
y = gaussian_tt(shape, (1, 3, 3, 3, 1), seed=1)
z = gaussian_tt(shape, (1, 2, 2, 2, 1), seed=2)
print("Y ranks:", y.ranks)
print("Z ranks:", z.ranks)

# TT arithmetic maps to core operations: sums concatenate ranks,
# elementwise products multiply them.
total = tt_add(y, z)
product = tt_hadamard(y, z)
print("Y + Z ranks:", total.ranks)
print("Y ⊙ Z ranks:", product.ranks, "(rank growth is the whole problem)")

# Desk-scale densification doubles as an oracle.
dense_product = hadamard_dense(tt_to_dense(y), tt_to_dense(z))
err = np.max(np.abs(tt_to_dense(product).values - dense_product.values))
print(f"TT Hadamard vs dense oracle, max abs difference: {err:.2e}")

# Inner products and norms contract in TT form without densifying.
print(f"<Y, Z> = {tt_dot(y, z):+.6f}   ||Y|| = {tt_norm(y):.6f}")

# Deterministic rounding: compress the product back to rank 3.
rounded = tt_rounding(product, 3)
print("rounded ranks:", rounded.ranks)
print(f"rounding relative error: {relative_error(rounded, dense_product):.3e}")
