"""TT recompression algorithms and their flop model.

Given a TT tensor (or an implicit Hadamard product of two TT tensors) and a
target rank chain, the algorithms here produce a left-orthogonal TT tensor
with the target ranks:

* :func:`tt_rounding`: deterministic two-sweep rounding: right-to-left LQ
  orthogonalization, then left-to-right QR + truncated-SVD compression;
* :func:`rand_orth`: randomized rounding driven by sketches from
  :func:`partial_contraction_rl` against a random gaussian TT tensor;
* :func:`hatt`: the Hadamard-avoiding variant of rand_orth: it consumes the
  two factors directly, building the sketches with :func:`hpcrl` and updating
  cores with :func:`contract_m_onto_pkp`, so no product core of size
  (r_k s_k) x n x (r_{k+1} s_{k+1}) is ever materialized.

`hatt` comes in two flavours selected by a :class:`Rank1Variant`: the
"svd" flavour (HaTT-1) re-expresses each sketch as a truncated rank-1 sum
before the recursion step, the "direct" flavour (HaTT-2) uses the sketch
columns as they are.

:func:`flop_model` gives leading-order operation counts for these algorithms
(plus two non-implemented baselines kept for comparison) so measured ledgers
can be checked against predictions.
"""

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import (
    SVD_COST_FACTOR,
    FlopLedger,
    econ_qr,
    matmul,
    scale_columns,
    tri_matmul,
    truncated_svd,
)
from .rand_tt import RandomSpec, check_rank_chain, random_tt
from .tt import (
    TTCore,
    TTTensor,
    h_unfold,
    pkp_cores,
    relative_error,
    tt_hadamard,
    v_unfold,
)


class TargetRankWarning(UserWarning):
    """A requested target rank was clamped to a feasible value."""


@dataclass
class SketchSet:
    """Partial-contraction matrices W^(1)..W^(d-1); mats[k-1] is W^(k)."""

    mats: list

    def __len__(self):
        return len(self.mats)

    def __getitem__(self, k):
        """W^(k), 1-based."""
        return self.mats[k - 1]


@dataclass(frozen=True)
class Rank1Variant:
    """How a sketch matrix is written as a sum of rank-1 terms.

    kind="direct": columns of W themselves (free, l_k terms).
    kind="svd": truncated SVD; keep singular values above rel_tol * sigma_1,
    capped at max_terms.
    """

    kind: str = "direct"
    max_terms: int = None
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.kind not in ("direct", "svd"):
            raise ValueError(f"variant kind must be 'direct' or 'svd', got {self.kind!r}")
        if self.max_terms is not None and self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DIRECT = Rank1Variant("direct")


def svd_variant(max_terms=None, rel_tol=1e-10):
    return Rank1Variant("svd", max_terms, rel_tol)


@dataclass
class Rank1Rep:
    """W ~= u @ diag(sigma) @ v.T with n_terms retained terms."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    n_terms: int


def rank1_decompose(w, variant, ledger=None):
    """Express a sketch matrix as a weighted sum of rank-1 terms.

    The direct variant returns u = w, unit weights and v = I exactly, at zero
    cost.  The svd variant returns the leading singular triplets; the dropped
    tail is the only approximation in the whole sketch recursion.
    """
    w = np.asarray(w)
    if variant.kind == "direct":
        ell = w.shape[1]
        return Rank1Rep(w, np.ones(ell), np.eye(ell), ell)
    res = truncated_svd(w, max_terms=variant.max_terms, ledger=ledger,
                        rank_tol=variant.rel_tol)
    return Rank1Rep(res.u, res.s, res.v, res.n_terms)


# --- sketches ---------------------------------------------------------------


def partial_contraction_rl(a, r, ledger=None):
    """Right-to-left partial contractions of a TT tensor against a sketch.

    W^(k) contracts cores k+1..d of `a` with cores k+1..d of `r`; the
    recursion per core is: fold W^(k) into the k-th core of `a` from the
    right (one product against the vertical matricization), then contract
    the mode against the k-th core of `r` (one product against the
    horizontal matricization of `r`).  The temporary folded core exists only
    as a matrix.
    """
    if a.shape != r.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {r.shape}")
    d = a.d
    if d < 2:
        return SketchSet([])
    mats = [None] * (d - 1)
    mats[d - 2] = matmul(h_unfold(a.cores[d - 1]), h_unfold(r.cores[d - 1]).T, ledger)
    for k in range(d - 1, 1, -1):
        core = a.cores[k - 1]
        b = matmul(v_unfold(core), mats[k - 1], ledger)
        bh = b.reshape(core.left_rank, -1)
        mats[k - 2] = matmul(bh, h_unfold(r.cores[k - 1]).T, ledger)
    return SketchSet(mats)


def hpcrl(y, z, r, variant=DIRECT, ledger=None):
    """Sketches of the Hadamard product y ⊙ z without forming its cores.

    Produces exactly the matrices :func:`partial_contraction_rl` would give
    for the materialized product (the rank-1 re-expression step is an
    identity unless the svd variant truncates).  Per mode slice the recursion
    applies the Kronecker-times-vector trick to pairs of factor slices, so
    the work scales with r + s instead of r * s.
    """
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {z.shape}")
    if y.shape != r.shape:
        raise ValueError(f"shape mismatch against sketch tensor: {y.shape} vs {r.shape}")
    d = y.d
    if d < 2:
        return SketchSet([])
    mats = [None] * (d - 1)
    # last pair of cores: right ranks are 1, so the product's horizontal
    # matricization is an outer product of the factors' slices
    y_last = y.cores[d - 1].values[:, :, 0]
    z_last = z.cores[d - 1].values[:, :, 0]
    h_last = np.einsum("ai,bi->abi", y_last, z_last).reshape(-1, y.shape[d - 1])
    mats[d - 2] = matmul(h_last, h_unfold(r.cores[d - 1]).T, ledger)
    for k in range(d - 1, 1, -1):
        yc, zc, rc = y.cores[k - 1], z.cores[k - 1], r.cores[k - 1]
        n = yc.mode_size
        rep = rank1_decompose(mats[k - 1], variant, ledger)
        terms = rep.n_terms
        r1, r2 = yc.left_rank, yc.right_rank
        s1, s2 = zc.left_rank, zc.right_rank
        # column g of rep.u folded column-major into an s2 x r2 matrix
        u_fold = rep.u.T.reshape(terms, r2, s2).transpose(0, 2, 1)
        w_left = np.empty((r1 * s1, n * terms))
        w_right = np.empty((rc.left_rank, n * terms))
        for i in range(1, n + 1):
            ys, zs = yc.slice(i), zc.slice(i)
            block = slice((i - 1) * terms, i * terms)
            if variant.kind == "direct":
                w_right[:, block] = rc.slice(i)
            else:
                w_right[:, block] = matmul(rc.slice(i), rep.v, ledger)
            # vec(Z(i) @ u_fold[g] @ Y(i)^T) over all g: the Kronecker-apply
            # trick, batched via broadcast products
            t = (zs @ u_fold) @ ys.T
            w_left[:, block] = t.transpose(0, 2, 1).reshape(terms, r1 * s1).T
            if ledger is not None:
                ledger.add_matmul(terms * (s1 * (2 * s2 - 1) * r2
                                           + s1 * (2 * r2 - 1) * r1))
        if variant.kind == "svd":
            w_right = scale_columns(w_right, np.tile(rep.sigma, n), ledger)
        mats[k - 2] = matmul(w_left, w_right.T, ledger)
    return SketchSet(mats)


# --- core update without the product core -----------------------------------


def contract_m_onto_pkp(m, ycore, zcore, ledger=None):
    """Contract an l x (r1 s1) matrix onto the implicit product core.

    Returns the TT core with slices ``m @ kron(Y(i), Z(i))`` computed row by
    row through the Kronecker-times-vector trick; neither the Kronecker slice
    nor the product core is formed.
    """
    m = np.asarray(m)
    if ycore.mode_size != zcore.mode_size:
        raise ValueError(f"mode mismatch {ycore.mode_size} vs {zcore.mode_size}")
    r1, s1 = ycore.left_rank, zcore.left_rank
    r2, s2 = ycore.right_rank, zcore.right_rank
    if m.ndim != 2 or m.shape[1] != r1 * s1:
        raise ValueError(f"matrix columns {m.shape} incompatible with ranks {r1}*{s1}")
    n = ycore.mode_size
    rows = m.shape[0]
    # row g of m folded column-major into an s1 x r1 matrix
    m_fold = m.reshape(rows, r1, s1).transpose(0, 2, 1)
    out = np.empty((rows, n, r2 * s2))
    for i in range(1, n + 1):
        ys, zs = ycore.slice(i), zcore.slice(i)
        # row g of m times kron(Y(i), Z(i)) == vec(Z(i)^T @ m_fold[g] @ Y(i)),
        # batched over the rows via broadcast products
        t = (zs.T @ m_fold) @ ys
        out[:, i - 1, :] = t.transpose(0, 2, 1).reshape(rows, r2 * s2)
        if ledger is not None:
            ledger.add_matmul(rows * (s2 * (2 * s1 - 1) * r1
                                      + s2 * (2 * r1 - 1) * r2))
    return TTCore(out, copy=False)


# --- target chains ----------------------------------------------------------


def normalize_targets(targets, d):
    """Accept a scalar, an interior list (length d-1), or a full chain."""
    if targets is None:
        raise ValueError("target ranks are required (or pass an explicit sketch tensor)")
    if np.isscalar(targets):
        chain = (1,) + (int(targets),) * (d - 1) + (1,) if d > 1 else (1, 1)
    else:
        targets = tuple(int(t) for t in targets)
        if len(targets) == d - 1:
            chain = (1,) + targets + (1,)
        else:
            chain = targets
    return check_rank_chain(chain, d)


def _clamp_targets(targets, shape, rank_products=None):
    """Clamp a target chain to what a left-orthogonal sweep can realize.

    Interior rank l_k cannot exceed l_{k-1} * n_k (QR width), nor the rank
    r_k s_k of the implicit product when given; clamping warns.
    """
    d = len(shape)
    out = [1]
    clamped = []
    for k in range(1, d):
        t = targets[k]
        if rank_products is not None and t > rank_products[k]:
            t = rank_products[k]
        t = min(t, out[k - 1] * shape[k - 1])
        if t != targets[k]:
            clamped.append((k, targets[k], t))
        out.append(t)
    out.append(1)
    if clamped:
        desc = ", ".join(f"l_{k}: {a} -> {b}" for k, a, b in clamped)
        warnings.warn(f"target ranks clamped to feasible values ({desc})",
                      TargetRankWarning, stacklevel=3)
    return tuple(out)


def _draw_sketch_tensor(shape, targets, seed):
    if seed is None:
        raise ValueError("a seed (or an explicit sketch tensor) is required")
    return random_tt(RandomSpec(tuple(shape), tuple(targets), "gaussian", int(seed)))


# --- the three sweeps -------------------------------------------------------


def tt_rounding(a, targets, ledger=None):
    """Deterministic TT rounding to a target rank chain.

    Sweep 1 (right to left) makes cores 2..d right-orthogonal via LQ,
    passing the triangular factor into the next core.  Sweep 2 (left to
    right) QR-factorizes each vertical matricization, truncates the
    triangular factor by SVD at the bond target, keeps Q @ U as the new core
    and pushes sigma V^T into the next core.  Output ranks are
    min(target, feasible) per bond and cores 1..d-1 are left-orthogonal.
    """
    d = a.d
    targets = normalize_targets(targets, d)
    if d == 1:
        return TTTensor([c.values for c in a.cores])
    cores = [c.values for c in a.cores]
    # right-to-left orthogonalization
    for k in range(d, 1, -1):
        core = cores[k - 1]
        r1, n, r2 = core.shape
        res = econ_qr(core.reshape(r1, n * r2).T, ledger=ledger)
        q_rows, l_factor = res.q.T, res.r.T
        new_r1 = q_rows.shape[0]
        cores[k - 1] = q_rows.reshape(new_r1, n, r2)
        prev = cores[k - 2]
        p1, pn, _ = prev.shape
        prev_mat = prev.reshape(p1 * pn, r1)
        if l_factor.shape[0] == l_factor.shape[1]:
            updated = tri_matmul(prev_mat, l_factor, ledger)
        else:
            updated = matmul(prev_mat, l_factor, ledger)
        cores[k - 2] = updated.reshape(p1, pn, new_r1)
    # left-to-right compression
    for k in range(1, d):
        core = cores[k - 1]
        r1, n, r2 = core.shape
        res = econ_qr(core.reshape(r1 * n, r2), ledger=ledger)
        q, rmat = res.q, res.r
        bond = min(targets[k], min(rmat.shape))
        svd = truncated_svd(rmat, target_rank=bond, ledger=ledger)
        cores[k - 1] = matmul(q, svd.u, ledger).reshape(r1, n, bond)
        carry = scale_columns(svd.v, svd.s, ledger).T
        nxt = cores[k]
        cores[k] = matmul(carry, nxt.reshape(r2, -1), ledger).reshape(
            bond, nxt.shape[1], nxt.shape[2]
        )
    return TTTensor(cores)


def _orthogonalize_sweep(first_core, sketches, next_core_fn, d, ledger):
    """Shared left-to-right randomized sweep.

    `next_core_fn(k, m)` must return the (k+1)-th core contracted against m
    (an array of shape (rows(m), n_{k+1}, tail ranks)).  Returns the output
    cores; every core except the last has orthonormal vertical matricization.
    """
    cores = []
    cur = first_core
    for k in range(1, d):
        r1, n, r2 = cur.shape
        cur_mat = cur.reshape(r1 * n, r2)
        sketched = matmul(cur_mat, sketches[k], ledger)
        q = econ_qr(sketched, q_only=True, ledger=ledger).q
        cores.append(q.reshape(r1, n, q.shape[1]))
        m = matmul(q.T, cur_mat, ledger)
        cur = next_core_fn(k, m)
    cores.append(cur)
    return TTTensor(cores)


def rand_orth(a, targets=None, seed=None, sketch_tt=None, ledger=None):
    """Randomize-then-orthogonalize rounding of a TT tensor.

    Sketches come from :func:`partial_contraction_rl` against a gaussian TT
    tensor with the target ranks (drawn from `seed`, or supplied explicitly
    via `sketch_tt`).  If a sketched matrix is rank deficient the QR keeps
    its full width; ranks are only reduced where the matrix itself is wider
    than tall.
    """
    d = a.d
    if sketch_tt is None:
        targets = _clamp_targets(normalize_targets(targets, d), a.shape)
        sketch = _draw_sketch_tensor(a.shape, targets, seed)
    else:
        sketch = sketch_tt
    if d == 1:
        return TTTensor([c.values for c in a.cores])
    sketches = partial_contraction_rl(a, sketch, ledger)

    def next_core(k, m):
        nxt = a.cores[k]
        out = matmul(m, h_unfold(nxt), ledger)
        return out.reshape(m.shape[0], nxt.mode_size, nxt.right_rank)

    return _orthogonalize_sweep(a.cores[0].values, sketches, next_core, d, ledger)


def hatt(y, z, targets=None, variant=DIRECT, seed=None, sketch_tt=None, ledger=None):
    """Recompress the Hadamard product y ⊙ z without materializing it.

    Identical in exact arithmetic to :func:`rand_orth` applied to the
    materialized product with the same sketch tensor; the sketches come from
    :func:`hpcrl` and the core updates from :func:`contract_m_onto_pkp`, so
    the only product-sized object ever formed is the first core
    (1 x n_1 x r_1 s_1).  Target ranks above the product rank r_k s_k are
    clamped with a :class:`TargetRankWarning`.
    """
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch {y.shape} vs {z.shape}")
    d = y.d
    products = tuple(ry * rz for ry, rz in zip(y.ranks, z.ranks))
    if sketch_tt is None:
        targets = _clamp_targets(normalize_targets(targets, d), y.shape, products)
        sketch = _draw_sketch_tensor(y.shape, targets, seed)
    else:
        sketch = sketch_tt
    if d == 1:
        return TTTensor([pkp_cores(y.cores[0], z.cores[0])])
    sketches = hpcrl(y, z, sketch, variant, ledger)
    first = np.einsum("ic,id->icd", y.cores[0].values[0], z.cores[0].values[0])
    first = first.reshape(1, y.shape[0], products[1])

    def next_core(k, m):
        return contract_m_onto_pkp(m, y.cores[k], z.cores[k], ledger).values

    return _orthogonalize_sweep(first, sketches, next_core, d, ledger)


# --- flop model --------------------------------------------------------------

MODEL_ALGORITHMS = (
    "tt-rounding",
    "orth-rand",
    "rand-orth",
    "two-sided",
    "hatt-1",
    "hatt-2",
    "partial-contraction-rl",
    "hpcrl-1",
    "hpcrl-2",
)


def flop_model(algorithm, d, n, r, s, ell, n_terms=None):
    """Leading-order flop count for recompressing a rank-(r, s) Hadamard
    product of d-way, mode-n TT tensors to target rank ell.

    `n_terms` is the retained rank-1 term count of the svd sketch variant
    (required for hatt-1 / hpcrl-1); their ell^2-order SVD term uses the
    calibrated bucket constant and is approximate by nature.  orth-rand and
    two-sided are modeled for comparison only and have no implementation
    here.
    """
    if min(d, n, r, s, ell) < 1:
        raise ValueError("flop model arguments must be positive")
    name = algorithm.lower().replace("_", "-")
    if name in ("hatt-1", "hpcrl-1"):
        if n_terms is None:
            raise ValueError(f"{algorithm} needs n_terms (retained rank-1 terms)")
        big_r = int(n_terms)
    if name == "tt-rounding":
        val = (d - 2) * n * (5 * r**3 * s**3 + 6 * r**2 * s**2 * ell + 2 * r * s * ell**2)
    elif name == "orth-rand":
        val = (d - 2) * n * (5 * r**3 * s**3 + 2 * r**2 * s**2 * ell + 4 * r * s * ell**2)
    elif name == "rand-orth":
        val = (d - 2) * n * (4 * r**2 * s**2 * ell + 6 * r * s * ell**2)
    elif name == "two-sided":
        val = (d - 2) * n * (6 * r**2 * s**2 * ell + 6 * r * s * ell**2)
    elif name == "hatt-2":
        val = (d - 2) * n * r * s * ell * (4 * r + 4 * s + 6 * ell)
    elif name == "hatt-1":
        r_hat = (big_r + ell) / 2
        val = (d - 2) * (
            n * r * s * (r_hat * (4 * r + 4 * s + 4 * ell) + 2 * ell**2)
            + SVD_COST_FACTOR * r * s * ell**2
        )
    elif name == "partial-contraction-rl":
        val = (d - 2) * n * (2 * r * s * ell**2 + 2 * r**2 * s**2 * ell)
    elif name == "hpcrl-1":
        val = (d - 2) * (
            n * big_r * (2 * r**2 * s + 2 * s**2 * r + 2 * r * s * ell + 2 * ell**2 - 2 * r * s)
            - r * s * ell
            + SVD_COST_FACTOR * r * s * ell**2
        )
    elif name == "hpcrl-2":
        val = (d - 2) * (
            n * ell * (2 * r**2 * s + 2 * s**2 * r + 2 * r * s * ell + ell - 2 * r * s)
            - r * s * ell
        )
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}; known: {MODEL_ALGORITHMS}")
    return int(round(val))


# --- reporting ---------------------------------------------------------------

ALGORITHMS = ("tt-rounding", "rand-orth", "hatt-1", "hatt-2")


@dataclass
class RecompressReport:
    """Per-run record: ranks, error, timing, measured and predicted flops."""

    algorithm: str
    output_ranks: tuple
    rel_error: float
    wall_time_s: float
    flops_measured: FlopLedger
    flops_predicted: int
    seed: int = None


def recompress_hadamard(algorithm, y, z, targets, seed=None, max_terms=None,
                        rel_tol=1e-10, reference=None):
    """Run one recompression of y ⊙ z and report on it.

    The baselines (tt-rounding, rand-orth) materialize the Hadamard product
    first; that step is part of their timed region, mirroring how they would
    actually be used.  `reference` (a DenseTensor, or a TT tensor) enables
    the relative-error column; pass None to skip it.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; known: {ALGORITHMS}")
    ledger = FlopLedger()
    d, n = y.d, max(y.shape)
    r, s = max(y.ranks), max(z.ranks)
    ell_chain = normalize_targets(targets, d)
    ell = max(ell_chain)
    start = time.perf_counter()
    if algorithm == "hatt-2":
        out = hatt(y, z, targets, DIRECT, seed=seed, ledger=ledger)
    elif algorithm == "hatt-1":
        out = hatt(y, z, targets, svd_variant(max_terms, rel_tol), seed=seed,
                   ledger=ledger)
    else:
        product = tt_hadamard(y, z)
        if algorithm == "tt-rounding":
            out = tt_rounding(product, targets, ledger=ledger)
        else:
            out = rand_orth(product, targets, seed=seed, ledger=ledger)
    elapsed = time.perf_counter() - start
    if algorithm == "hatt-1":
        terms = min(max_terms or ell, ell)
        predicted = flop_model("hatt-1", d, n, r, s, ell, n_terms=terms)
    else:
        predicted = flop_model(algorithm, d, n, r, s, ell)
    err = None
    if reference is not None:
        err = relative_error(out, reference)
    return out, RecompressReport(algorithm, out.ranks, err, elapsed, ledger,
                                 predicted, seed)
