"""1-based multi-index arithmetic and column-major vector folding.

Two distinct layout conventions coexist in this package and are kept
deliberately separate:

* tensor multi-indexing is *last-index-fastest*:
  ``(i_1, ..., i_d) -> i_d + (i_{d-1}-1) n_d + ... + (i_1-1) n_2...n_d``,
  which coincides with C-order flattening of a numpy array (plus 1);
* matrix vectorization is *column-major*: ``vec`` stacks columns, and
  ``mat_vector`` is its inverse, filling an m x n matrix column by column.

All indices entering or leaving this module are 1-based.
"""

import numpy as np


def check_shape(shape):
    """Validate mode sizes and return them as a tuple of ints."""
    dims = tuple(int(n) for n in shape)
    if len(dims) < 1:
        raise ValueError("shape needs at least one mode")
    if any(n < 1 for n in dims):
        raise ValueError(f"mode sizes must be positive, got {dims}")
    return dims


def multi_index(indices, shape):
    """Map a 1-based multi-index to its 1-based flat position (last index fastest)."""
    dims = check_shape(shape)
    idx = tuple(int(i) for i in indices)
    if len(idx) != len(dims):
        raise IndexError(f"expected {len(dims)} indices, got {len(idx)}")
    for i, n in zip(idx, dims):
        if not 1 <= i <= n:
            raise IndexError(f"index {i} out of range 1..{n}")
    flat = idx[-1]
    stride = 1
    for k in range(len(dims) - 2, -1, -1):
        stride *= dims[k + 1]
        flat += (idx[k] - 1) * stride
    return flat


def multi_index_inv(flat, shape):
    """Inverse of :func:`multi_index`: 1-based flat position to 1-based indices."""
    dims = check_shape(shape)
    total = int(np.prod(dims))
    flat = int(flat)
    if not 1 <= flat <= total:
        raise IndexError(f"flat index {flat} out of range 1..{total}")
    rem = flat - 1
    idx = []
    for n in reversed(dims):
        idx.append(rem % n + 1)
        rem //= n
    return tuple(reversed(idx))


def vec(mat):
    """Stack the columns of a matrix into a vector (column 1 first)."""
    mat = np.asarray(mat)
    if mat.ndim != 2:
        raise ValueError("vec expects a matrix")
    return mat.ravel(order="F")


def mat_vector(v, m, n):
    """Fold a length-m*n vector into an m x n matrix, filling column by column."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size != m * n:
        raise ValueError(f"cannot fold vector of size {v.size} into {m} x {n}")
    return v.reshape((m, n), order="F")
