"""Dense d-way tensors and their products; the brute-force oracle layer.

Values are stored in C order, which matches the package's last-index-fastest
multi-index convention: element ``(i_1, ..., i_d)`` (1-based) sits at C-order
flat position ``multi_index(i, shape) - 1``.
"""

import numpy as np

from .indexing import check_shape, multi_index
from .limits import check_dense


class DenseTensor:
    """Explicit d-way real array with 1-based element access.

    Construction enforces the dense element-count cap and finiteness;
    instances are immutable.
    """

    def __init__(self, values, copy=True):
        values = np.array(values, dtype=float, copy=copy)
        if values.ndim < 1:
            values = values.reshape(1)
        check_shape(values.shape)
        check_dense(values.size)
        if not np.all(np.isfinite(values)):
            raise ValueError("dense tensor contains non-finite values")
        values.setflags(write=False)
        self.values = values

    @property
    def shape(self):
        return self.values.shape

    @property
    def order(self):
        return self.values.ndim

    @property
    def size(self):
        return self.values.size

    def value_at(self, indices):
        """Element at a 1-based multi-index."""
        multi_index(indices, self.shape)  # bounds check
        return float(self.values[tuple(i - 1 for i in indices)])

    def norm(self):
        return float(np.linalg.norm(self.values))

    def __repr__(self):
        return f"DenseTensor(shape={self.shape})"


def unfold(x, k):
    """Matricize a tensor at split position k.

    Rows are indexed by the multi-index over modes 1..k, columns by the
    multi-index over modes k+1..d (both last-index-fastest), so the result is
    a plain C-order reshape.
    """
    values = x.values if isinstance(x, DenseTensor) else np.asarray(x)
    d = values.ndim
    if not 1 <= k <= d - 1:
        raise IndexError(f"split position {k} out of range 1..{d - 1}")
    rows = int(np.prod(values.shape[:k]))
    return values.reshape(rows, -1)


def refold(mat, shape):
    """Inverse of :func:`unfold`: reshape a matricization back to a tensor."""
    shape = check_shape(shape)
    mat = np.asarray(mat)
    if mat.size != np.prod(shape):
        raise ValueError(f"cannot refold {mat.size} elements into shape {shape}")
    return DenseTensor(mat.reshape(shape))


def hadamard_dense(y, z):
    """Elementwise product of two equal-shape dense tensors."""
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {z.shape}")
    return DenseTensor(y.values * z.values, copy=False)


def kron_dense(y, q):
    """Kronecker product of two order-d dense tensors.

    The entry at interleaved multi-index (i_1 j_1, ..., i_d j_d) is the
    product of the factor entries; np.kron implements exactly this blockwise
    layout for n-d arrays.
    """
    if y.order != q.order:
        raise ValueError(f"order mismatch {y.order} vs {q.order}")
    out_size = y.size * q.size
    check_dense(out_size, "Kronecker product")
    return DenseTensor(np.kron(y.values, q.values), copy=False)


def brute_force_max(x):
    """Exhaustive maximum of a dense tensor.

    Returns ``(value, index)`` with a 1-based multi-index; ties break toward
    the first index in multi-index order.
    """
    flat = int(np.argmax(x.values))
    idx = np.unravel_index(flat, x.shape)
    return float(x.values[idx]), tuple(int(i) + 1 for i in idx)
