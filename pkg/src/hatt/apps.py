"""Experiment generators and the Hadamard power iteration.

Everything here is desk scale by construction: the generators produce TT
tensors small enough for the dense brute-force oracles in :mod:`hatt.dense`
to verify results exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dense import DenseTensor, brute_force_max  # noqa: F401  (re-exported oracle)
from .indexing import check_shape
from .linalg import scale_columns, truncated_svd
from .recompress import DIRECT, hatt, normalize_targets, rand_orth, svd_variant, tt_rounding
from .tt import TTTensor, tt_dot, tt_hadamard, tt_norm, tt_add, tt_ones, tt_scale


def tt_svd(x, targets=None, rel_tol=None, ledger=None):
    """Convert a dense tensor to TT form by a sequential SVD sweep.

    Exactly one of `targets` (rank chain) or `rel_tol` must be given.  With
    `rel_tol`, each of the d-1 truncations drops a tail of Frobenius norm at
    most rel_tol / sqrt(d-1) * ||x||_F, so the reconstruction error is at
    most rel_tol * ||x||_F.
    """
    if (targets is None) == (rel_tol is None):
        raise ValueError("give exactly one of targets or rel_tol")
    values = x.values if isinstance(x, DenseTensor) else np.asarray(x, dtype=float)
    shape = values.shape
    d = len(shape)
    if d == 1:
        return TTTensor([values.reshape(1, -1, 1)])
    chain = None if targets is None else normalize_targets(targets, d)
    budget = None if rel_tol is None else rel_tol / math.sqrt(d - 1) * np.linalg.norm(values)
    cores = []
    rank = 1
    rest = values.reshape(rank * shape[0], -1)
    for k in range(1, d):
        svd = truncated_svd(rest, ledger=ledger, rank_tol=0.0)
        if chain is not None:
            keep = min(chain[k], svd.n_terms)
        else:
            tails = np.sqrt(np.cumsum(svd.s[::-1] ** 2))[::-1]  # tails[j] = ||s[j:]||
            above = np.nonzero(tails > budget)[0]
            keep = int(above[-1]) + 1 if above.size else 1
        cores.append(svd.u[:, :keep].reshape(rank, shape[k - 1], keep))
        rest = scale_columns(svd.v[:, :keep], svd.s[:keep]).T
        rank = keep
        rest = rest.reshape(rank * shape[k], -1)
    cores.append(rest.reshape(rank, shape[d - 1], 1))
    return TTTensor(cores)


# --- trigonometric-series products -------------------------------------------


@dataclass(frozen=True)
class FourierSpec:
    """Sampling recipe for the sine/cosine series pair.

    y(t) = sum_j a_j sin(j t) and z(t) = sum_j b_j cos(j t) are sampled at
    t_i = 2 pi i / N, i = 1..N with N = prod(shape), then folded into d-way
    tensors by the multi-index convention.  Coefficients default to seeded
    uniform draws from [0.1, 10.1]; pass explicit `a`, `b` to override.
    """

    shape: tuple
    n_terms: int = 60
    a: tuple = None
    b: tuple = None
    coeff_low: float = 0.1
    coeff_high: float = 10.1
    svd_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "shape", check_shape(self.shape))
        if self.n_terms < 1:
            raise ValueError("n_terms must be >= 1")

    @property
    def num_samples(self):
        return int(np.prod(self.shape, dtype=np.int64))


def fourier_coefficients(spec, seed=0):
    """The (a, b) coefficient pair for a spec, drawing seeded ones if unset."""
    if spec.a is not None and spec.b is not None:
        a = np.asarray(spec.a, dtype=float)
        b = np.asarray(spec.b, dtype=float)
        return a, b
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(777,)))
    a = rng.uniform(spec.coeff_low, spec.coeff_high, size=spec.n_terms)
    b = rng.uniform(spec.coeff_low, spec.coeff_high, size=spec.n_terms)
    return a, b


def fourier_tt(spec, seed=0, ledger=None):
    """Sample the series pair, fold, and convert to TT form.

    Returns (Y, Z); reconstruction of each matches its samples to svd_tol.
    """
    a, b = fourier_coefficients(spec, seed)
    n = spec.num_samples
    t = 2.0 * np.pi * np.arange(1, n + 1) / n
    harmonics = np.arange(1, len(a) + 1)
    y = np.sin(np.outer(t, harmonics)) @ a
    z = np.cos(np.outer(t, harmonics)) @ b
    y_tt = tt_svd(DenseTensor(y.reshape(spec.shape)), rel_tol=spec.svd_tol, ledger=ledger)
    z_tt = tt_svd(DenseTensor(z.reshape(spec.shape)), rel_tol=spec.svd_tol, ledger=ledger)
    return y_tt, z_tt


# --- separable benchmark functions -------------------------------------------

QING_DOMAIN = (-500.0, 500.0)
ALPINE_DOMAIN = (-2.5 * np.pi, 2.5 * np.pi)

FUNCTION_KINDS = ("qing", "alpine")


@dataclass(frozen=True)
class SeparableFunctionSpec:
    """A sum-of-univariate-terms function on a uniform d-way grid.

    qing:   f(x) = sum_i (x_i - i)^2        on [-500, 500]^d
    alpine: f(x) = sum_i |x_i sin x_i + 0.1 x_i|  on [-2.5 pi, 2.5 pi]^d
    """

    kind: str
    d: int
    n: int

    def __post_init__(self):
        if self.kind not in FUNCTION_KINDS:
            raise ValueError(f"kind must be one of {FUNCTION_KINDS}, got {self.kind!r}")
        if self.d < 1 or self.n < 2:
            raise ValueError("need d >= 1 and n >= 2")

    @property
    def domain(self):
        return QING_DOMAIN if self.kind == "qing" else ALPINE_DOMAIN

    def grid(self):
        """n uniform mesh points with spacing (hi - lo) / n, starting at lo."""
        lo, hi = self.domain
        return lo + (hi - lo) * np.arange(self.n) / self.n

    def term(self, i, x):
        """The i-th univariate term (i is 1-based) evaluated on x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "qing":
            return (x - i) ** 2
        return np.abs(x * np.sin(x) + 0.1 * x)


def separable_tt(spec):
    """TT tensor of a separable-sum function on its uniform grid.

    Built as the unrounded sum of d rank-1 terms (term i carries its
    univariate factor on mode i and ones elsewhere), so the rank chain is
    exactly (1, d, ..., d, 1).
    """
    grid = spec.grid()
    total = None
    for i in range(1, spec.d + 1):
        cores = []
        for mode in range(1, spec.d + 1):
            if mode == i:
                cores.append(spec.term(i, grid).reshape(1, spec.n, 1))
            else:
                cores.append(np.ones((1, spec.n, 1)))
        term = TTTensor(cores)
        total = term if total is None else tt_add(total, term)
    return total


def separable_dense(spec):
    """Dense oracle for :func:`separable_tt` by direct evaluation."""
    grid = spec.grid()
    values = np.zeros((spec.n,) * spec.d)
    for i in range(1, spec.d + 1):
        axis_vals = spec.term(i, grid)
        sl = [np.newaxis] * spec.d
        sl[i - 1] = slice(None)
        values = values + axis_vals[tuple(sl)]
    return DenseTensor(values, copy=False)


def hilbert_tt(d, n, r):
    """Hilbert-type TT tensor: core entries 1 / (alpha + i + beta - 1).

    All indices 1-based; boundary cores use rank 1 on their outer side.
    Entries lie in (0, 1] and the sketch matrices it produces have rapidly
    decaying singular values.
    """
    if min(d, n, r) < 1:
        raise ValueError("d, n, r must be positive")
    ranks = [1] + [r] * (d - 1) + [1] if d > 1 else [1, 1]
    cores = []
    for k in range(1, d + 1):
        r1, r2 = ranks[k - 1], ranks[k]
        alpha = np.arange(1, r1 + 1)[:, None, None]
        i = np.arange(1, n + 1)[None, :, None]
        beta = np.arange(1, r2 + 1)[None, None, :]
        cores.append(1.0 / (alpha + i + beta - 1.0))
    return TTTensor(cores)


# --- power iteration for the largest element ---------------------------------

RECOMPRESSORS = ("tt-rounding", "rand-orth", "hatt-1", "hatt-2")


@dataclass
class PowerIterResult:
    estimate: float
    iterations_used: int
    history: list


def _iteration_seed(seed, t):
    return int(np.random.SeedSequence(entropy=int(seed), spawn_key=(t,)).generate_state(1)[0])


def power_iteration_max(y, ell, max_iter=100, recompressor="tt-rounding", seed=0,
                        max_terms=None, rel_change_tol=1e-12, ledger=None):
    """Estimate the largest element of a nonnegative-dominant TT tensor.

    Iterates v <- recompress(y ⊙ v, ell) / ||...||, starting from the all-ones
    rank-1 tensor; the estimate is the Rayleigh-style readout
    <v, y ⊙ v> / <v, v>, which converges to the dominant element when it is
    positive and separated.  The hatt recompressors consume (y, v) directly;
    the baselines materialize the product first.  Stops after `max_iter`
    iterations or when the estimate's relative change drops below
    `rel_change_tol`.
    """
    if recompressor not in RECOMPRESSORS:
        raise ValueError(f"unknown recompressor {recompressor!r}; known: {RECOMPRESSORS}")
    v = tt_ones(y.shape)
    history = []
    prev = None
    for t in range(1, max_iter + 1):
        # effective targets never exceed the product's rank chain
        chain = normalize_targets(ell, y.d)
        products = tuple(a * b for a, b in zip(y.ranks, v.ranks))
        eff = [1]
        for k in range(1, y.d):
            eff.append(min(chain[k], products[k], eff[k - 1] * y.shape[k - 1]))
        eff.append(1)
        step_seed = _iteration_seed(seed, t)
        if recompressor == "hatt-2":
            w = hatt(y, v, tuple(eff), DIRECT, seed=step_seed, ledger=ledger)
        elif recompressor == "hatt-1":
            w = hatt(y, v, tuple(eff), svd_variant(max_terms), seed=step_seed,
                     ledger=ledger)
        else:
            product = tt_hadamard(y, v)
            if recompressor == "tt-rounding":
                w = tt_rounding(product, tuple(eff), ledger=ledger)
            else:
                w = rand_orth(product, tuple(eff), seed=step_seed, ledger=ledger)
        denom = tt_dot(v, v)
        estimate = tt_dot(v, tt_hadamard(y, v)) / denom
        history.append(estimate)
        norm = tt_norm(w)
        if norm == 0.0:
            raise ArithmeticError("power iteration collapsed to a zero iterate")
        v = tt_scale(w, 1.0 / norm)
        if prev is not None and abs(estimate - prev) <= rel_change_tol * abs(prev):
            return PowerIterResult(estimate, t, history)
        prev = estimate
    return PowerIterResult(history[-1], max_iter, history)
