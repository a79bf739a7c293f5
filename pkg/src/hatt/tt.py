"""Tensor trains: cores, contraction, arithmetic, and serialization.

A TT tensor is a chain of order-3 cores ``G_k`` of extent
``r_{k-1} x n_k x r_k`` with boundary ranks ``r_0 = r_d = 1``; element
``(i_1, ..., i_d)`` of the represented tensor is the product of matrix
slices ``G_1(i_1) G_2(i_2) ... G_d(i_d)``.

Core arrays are C-ordered, so the horizontal matricization ``H<G>`` of a
core (mode-1 unfolding, size ``r_{k-1} x n_k r_k``) and the vertical
matricization ``V<G>`` (size ``r_{k-1} n_k x r_k``) are plain reshapes.
"""

import numpy as np

from .dense import DenseTensor
from .indexing import check_shape
from .limits import check_core, check_dense


class TTCore:
    """One order-3 TT core; immutable after construction."""

    def __init__(self, values, copy=True):
        values = np.array(values, dtype=float, copy=copy)
        if values.ndim != 3:
            raise ValueError(f"a TT core must be a 3-way array, got ndim={values.ndim}")
        check_core(values.size)
        if not np.all(np.isfinite(values)):
            raise ValueError("TT core contains non-finite values")
        values.setflags(write=False)
        self.values = values

    @property
    def left_rank(self):
        return self.values.shape[0]

    @property
    def mode_size(self):
        return self.values.shape[1]

    @property
    def right_rank(self):
        return self.values.shape[2]

    def slice(self, i):
        """The i-th lateral matrix (left_rank x right_rank), i is 1-based."""
        if not 1 <= i <= self.mode_size:
            raise IndexError(f"slice index {i} out of range 1..{self.mode_size}")
        return self.values[:, i - 1, :]

    def __repr__(self):
        return f"TTCore({self.left_rank} x {self.mode_size} x {self.right_rank})"


def h_unfold(core):
    """Horizontal matricization: r_{k-1} x (n_k r_k)."""
    v = core.values if isinstance(core, TTCore) else np.asarray(core)
    return v.reshape(v.shape[0], -1)


def v_unfold(core):
    """Vertical matricization: (r_{k-1} n_k) x r_k."""
    v = core.values if isinstance(core, TTCore) else np.asarray(core)
    return v.reshape(-1, v.shape[2])


class TTTensor:
    """A sequence of compatible TT cores."""

    def __init__(self, cores):
        cores = tuple(c if isinstance(c, TTCore) else TTCore(c) for c in cores)
        if not cores:
            raise ValueError("a TT tensor needs at least one core")
        if cores[0].left_rank != 1 or cores[-1].right_rank != 1:
            raise ValueError("boundary ranks must be 1")
        for k in range(len(cores) - 1):
            if cores[k].right_rank != cores[k + 1].left_rank:
                raise ValueError(
                    f"rank mismatch between cores {k + 1} and {k + 2}: "
                    f"{cores[k].right_rank} vs {cores[k + 1].left_rank}"
                )
        self.cores = cores

    @property
    def d(self):
        return len(self.cores)

    @property
    def shape(self):
        return tuple(c.mode_size for c in self.cores)

    @property
    def ranks(self):
        """Full rank chain (r_0, r_1, ..., r_d), boundary entries are 1."""
        return (1,) + tuple(c.right_rank for c in self.cores)

    @property
    def size(self):
        return int(np.prod(self.shape, dtype=np.int64))

    def __repr__(self):
        return f"TTTensor(shape={self.shape}, ranks={self.ranks})"


def pkp_cores(y, z):
    """Partial Kronecker product of two cores sharing a mode size.

    The result has ranks (r1*s1, n, r2*s2) and its i-th slice is
    ``kron(Y(i), Z(i))``; rows and columns pair the Y index (slow) with the
    Z index (fast).  The boundary conveniences (first cores with left ranks
    1, last cores with right ranks 1) are this same operation.
    """
    if y.mode_size != z.mode_size:
        raise ValueError(f"mode mismatch {y.mode_size} vs {z.mode_size}")
    check_core(y.values.size * z.values.size // y.mode_size)
    out = np.einsum("aic,bid->abicd", y.values, z.values)
    out = out.reshape(y.left_rank * z.left_rank, y.mode_size, y.right_rank * z.right_rank)
    return TTCore(out, copy=False)


def contract_mode1(a, b, k=1):
    """Contract the trailing k modes of `a` against the leading k modes of `b`."""
    a = np.asarray(a)
    b = np.asarray(b)
    if k < 1 or k > min(a.ndim, b.ndim):
        raise ValueError(f"cannot contract {k} modes")
    if a.shape[a.ndim - k:] != b.shape[:k]:
        raise ValueError(
            f"mode mismatch: trailing {a.shape[a.ndim - k:]} vs leading {b.shape[:k]}"
        )
    return np.tensordot(a, b, axes=k)


def partial_contracted_product(x, k, l):
    """Contract cores k..l (1-based, inclusive) into one array.

    The result has shape (r_{k-1}, n_k, ..., n_l, r_l).
    """
    if not 1 <= k <= l <= x.d:
        raise IndexError(f"core range {k}..{l} out of range 1..{x.d}")
    out = x.cores[k - 1].values
    for j in range(k, l):
        out = contract_mode1(out, x.cores[j].values)
        check_dense(out.size, "partial contracted product")
    return out


def tt_to_dense(x):
    """Materialize a TT tensor as a DenseTensor (dense cap enforced)."""
    check_dense(x.size, "TT reconstruction")
    out = partial_contracted_product(x, 1, x.d)
    return DenseTensor(out.reshape(x.shape), copy=False)


def tt_hadamard(y, z):
    """Elementwise product of two TT tensors of identical shape.

    Core k of the result is the partial Kronecker product of the factors'
    cores, so the rank chain is the elementwise product of the factors'
    chains.  This materializes the product cores; the sketching sweeps in
    :mod:`hatt.recompress` exist to avoid exactly that.
    """
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {z.shape}")
    return TTTensor([pkp_cores(cy, cz) for cy, cz in zip(y.cores, z.cores)])


def tt_add(y, z):
    """Sum of two TT tensors by block-core concatenation (no rounding).

    Interior ranks add exactly; boundary ranks stay 1.
    """
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {z.shape}")
    if y.d == 1:
        return TTTensor([y.cores[0].values + z.cores[0].values])
    cores = []
    for k, (cy, cz) in enumerate(zip(y.cores, z.cores)):
        n = cy.mode_size
        if k == 0:
            block = np.concatenate([cy.values, cz.values], axis=2)
        elif k == y.d - 1:
            block = np.concatenate([cy.values, cz.values], axis=0)
        else:
            r1, r2 = cy.left_rank, cy.right_rank
            s1, s2 = cz.left_rank, cz.right_rank
            block = np.zeros((r1 + s1, n, r2 + s2))
            block[:r1, :, :r2] = cy.values
            block[r1:, :, r2:] = cz.values
        cores.append(TTCore(block, copy=False))
    return TTTensor(cores)


def tt_scale(y, c):
    """Multiply a TT tensor by a scalar (absorbed into the first core)."""
    cores = [TTCore(y.cores[0].values * float(c), copy=False)]
    cores.extend(y.cores[1:])
    return TTTensor(cores)


def tt_ones(shape):
    """Rank-1 TT tensor of all ones."""
    shape = check_shape(shape)
    return TTTensor([np.ones((1, n, 1)) for n in shape])


def tt_dot(y, z):
    """Inner product of two TT tensors, contracted core by core."""
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {z.shape}")
    c = np.ones((1, 1))
    for cy, cz in zip(y.cores, z.cores):
        c = np.einsum("ab,aic,bid->cd", c, cy.values, cz.values)
    return float(c[0, 0])


def tt_norm(y):
    """Frobenius norm computed in TT form."""
    return float(np.sqrt(max(tt_dot(y, y), 0.0)))


def relative_error(x_approx, x_ref, method="auto"):
    """Relative Frobenius error ||approx - ref||_F / ||ref||_F.

    `x_ref` may be a TT tensor or a DenseTensor.  With method="auto" the
    dense path is used whenever the element count fits the dense cap (it is
    the numerically safer route for very small errors); method="tt" forces
    the TT-difference path.
    """
    from .limits import dense_cap

    ref_dense = isinstance(x_ref, DenseTensor)
    shape = x_ref.shape if ref_dense else x_ref.shape
    if x_approx.shape != shape:
        raise ValueError(f"shape mismatch {x_approx.shape} vs {shape}")
    if method not in ("auto", "dense", "tt"):
        raise ValueError(f"unknown method {method!r}")
    size = int(np.prod(shape, dtype=np.int64))
    if method == "auto":
        cap = dense_cap()
        method = "dense" if (ref_dense or cap is None or size <= cap) else "tt"
    if method == "dense":
        ref = x_ref if ref_dense else tt_to_dense(x_ref)
        ref_norm = ref.norm()
        if ref_norm == 0.0:
            raise ZeroDivisionError("reference tensor has zero norm")
        diff = tt_to_dense(x_approx).values - ref.values
        return float(np.linalg.norm(diff) / ref_norm)
    if ref_dense:
        raise ValueError("TT-path relative error needs a TT reference")
    ref_norm = tt_norm(x_ref)
    if ref_norm == 0.0:
        raise ZeroDivisionError("reference tensor has zero norm")
    diff = tt_add(x_approx, tt_scale(x_ref, -1.0))
    return tt_norm(diff) / ref_norm


class OrthFlag:
    """Orthogonality classification of a TT tensor.

    kind is one of 'none', 'left_orthogonal_up_to', 'right_orthogonal_from';
    k is the last left-orthogonal core (resp. first right-orthogonal core).
    A core j is left-orthogonal when V<G_j> has orthonormal columns and
    right-orthogonal when H<G_j> has orthonormal rows.
    """

    def __init__(self, kind, k=None):
        if kind not in ("none", "left_orthogonal_up_to", "right_orthogonal_from"):
            raise ValueError(f"unknown orthogonality kind {kind!r}")
        self.kind = kind
        self.k = k

    def __eq__(self, other):
        return isinstance(other, OrthFlag) and (self.kind, self.k) == (other.kind, other.k)

    def __repr__(self):
        return f"OrthFlag({self.kind!r}, k={self.k})"


def _core_is_left_orthogonal(core, tol):
    v = v_unfold(core)
    return float(np.max(np.abs(v.T @ v - np.eye(v.shape[1])))) <= tol


def _core_is_right_orthogonal(core, tol):
    h = h_unfold(core)
    return float(np.max(np.abs(h @ h.T - np.eye(h.shape[0])))) <= tol


def orth_flag(x, tol=1e-10):
    """Classify a TT tensor's orthogonality by scanning its cores."""
    k_left = 0
    for core in x.cores[:-1]:
        if not _core_is_left_orthogonal(core, tol):
            break
        k_left += 1
    if k_left > 0:
        return OrthFlag("left_orthogonal_up_to", k_left)
    k_right = x.d + 1
    for j in range(x.d, 1, -1):
        if not _core_is_right_orthogonal(x.cores[j - 1], tol):
            break
        k_right = j
    if k_right <= x.d:
        return OrthFlag("right_orthogonal_from", k_right)
    return OrthFlag("none")


def left_orthogonality_defect(x):
    """max_k ||V<G_k>^T V<G_k> - I||_max over cores 1..d-1 (0 for d = 1)."""
    defect = 0.0
    for core in x.cores[:-1]:
        v = v_unfold(core)
        g = v.T @ v
        defect = max(defect, float(np.max(np.abs(g - np.eye(g.shape[0])))))
    return defect


def right_orthogonality_defect(x):
    """max_k ||H<G_k> H<G_k>^T - I||_max over cores 2..d (0 for d = 1)."""
    defect = 0.0
    for core in x.cores[1:]:
        h = h_unfold(core)
        g = h @ h.T
        defect = max(defect, float(np.max(np.abs(g - np.eye(g.shape[0])))))
    return defect


# --- serialization ---------------------------------------------------------

_TT_HEADER = "# hatt tt-tensor v1"


def save_tt(x, path):
    """Write a TT tensor to a simple self-describing text container.

    Layout (documented in the file header): order d, mode sizes, rank chain,
    then the cores in order k = 1..d, each as a flat C-ordered block (left
    rank slowest, mode index middle, right rank fastest), one value per line.
    """
    with open(path, "w") as fh:
        fh.write(_TT_HEADER + "\n")
        fh.write("# d; mode sizes n_1..n_d; rank chain r_0..r_d; then cores k=1..d\n")
        fh.write("# core values are C-ordered: left rank slowest, right rank fastest\n")
        fh.write(f"d {x.d}\n")
        fh.write("n " + " ".join(str(n) for n in x.shape) + "\n")
        fh.write("r " + " ".join(str(r) for r in x.ranks) + "\n")
        for k, core in enumerate(x.cores, start=1):
            fh.write(f"core {k}\n")
            for v in core.values.ravel():
                fh.write(f"{v:.17g}\n")


def load_tt(path):
    """Read a TT tensor written by :func:`save_tt`."""
    with open(path) as fh:
        tokens = []
        first = fh.readline()
        if first.strip() != _TT_HEADER:
            raise ValueError(f"{path} is not a hatt tt-tensor container")
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    it = iter(tokens)

    def expect(tag):
        got = next(it)
        if got != tag:
            raise ValueError(f"malformed container: expected {tag!r}, got {got!r}")

    expect("d")
    d = int(next(it))
    expect("n")
    shape = [int(next(it)) for _ in range(d)]
    expect("r")
    ranks = [int(next(it)) for _ in range(d + 1)]
    cores = []
    for k in range(1, d + 1):
        expect("core")
        if int(next(it)) != k:
            raise ValueError("malformed container: core blocks out of order")
        count = ranks[k - 1] * shape[k - 1] * ranks[k]
        vals = np.array([float(next(it)) for _ in range(count)])
        cores.append(vals.reshape(ranks[k - 1], shape[k - 1], ranks[k]))
    return TTTensor(cores)
