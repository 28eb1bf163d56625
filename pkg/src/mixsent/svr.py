"""Epsilon-insensitive support vector regression with an SMO dual solver.

The solver maximizes the dual

    W(beta) = -1/2 sum_ij beta_i beta_j K(x_i, x_j)
              - epsilon * sum_i |beta_i| + sum_i y_i beta_i

subject to sum_i beta_i = 0 and |beta_i| <= C, by repeatedly picking a
two-index working set and solving its subproblem exactly. With
E_i = y_i - (K beta)_i, the bias b must satisfy

    b >= up(i)  = E_i - eps if beta_i >= 0 else E_i + eps   while beta_i < C
    b <= low(j) = E_j - eps if beta_j > 0  else E_j + eps   while beta_j > -C

so optimality at tolerance tol is max(up) - min(low) <= tol. The first
working index is the maximal violator (ties broken by lowest index); its
partner maximizes |E_i - E_j| among indices that can move the opposite
way with positive pair violation. Each two-index subproblem is a concave
piecewise quadratic in the transfer delta and is solved exactly over its
breakpoints, so every update strictly increases the dual objective and
keeps sum(beta) = 0 to rounding error.

Kernel rows are computed on demand and kept in a least-recently-used
cache bounded by ``cache_size_mb``.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse as sp

from .corpus import LABEL_ORDER, SentimentLabel
from .features import FeatureVector

__all__ = [
    "KERNELS",
    "SvrHyperParams",
    "SvrModel",
    "LABEL_CODEC",
    "kernel_eval",
    "encode_label",
    "decode_label",
    "fit",
    "predict",
    "dual_objective",
]

KERNELS = ("linear", "rbf")

# Coefficients at or below this magnitude do not count as support vectors.
SUPPORT_COEF_EPS = 1e-12

# Safety cap standing in for max_iter = -1; guarantees termination.
_UNBOUNDED_ITER_CAP = 10_000_000


@dataclass(frozen=True)
class SvrHyperParams:
    """Hyperparameters for one epsilon-SVR fit.

    coef0, shrinking, probability, decision_function_shape, class_weight
    and degree are accepted and persisted for interface fidelity but have
    no effect on linear/rbf epsilon-SVR.
    """

    c: float
    epsilon: float
    gamma: float
    kernel: str
    tol: float = 0.001
    cache_size_mb: int = 200
    coef0: float = 0.1
    max_iter: int = -1
    shrinking: bool = True
    probability: bool = False
    decision_function_shape: str = "ovr"
    class_weight: str | None = None
    degree: int = 3

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.cache_size_mb < 1:
            raise ValueError(f"cache_size_mb must be positive, got {self.cache_size_mb}")


@dataclass(frozen=True, eq=False)
class SvrModel:
    """A fitted model: support vectors, their dual coefficients, and the bias."""

    params: SvrHyperParams
    support_vectors: tuple[FeatureVector, ...]
    dual_coef: tuple[float, ...]
    bias: float
    n_iterations: int
    converged: bool
    support_indices: tuple[int, ...]
    dual_objective: float


def kernel_eval(params: SvrHyperParams, x: FeatureVector, z: FeatureVector) -> float:
    """linear: <x, z>; rbf: exp(-gamma * ||x - z||^2)."""
    if params.kernel == "linear":
        return x.dot(z)
    return math.exp(-params.gamma * x.squared_distance(z))


# Regression targets for the three sentiment classes, in label order.
LABEL_CODEC = {
    SentimentLabel.NEGATIVE: -1.0,
    SentimentLabel.NEUTRAL: 0.0,
    SentimentLabel.POSITIVE: 1.0,
}


def encode_label(label: SentimentLabel) -> float:
    return LABEL_CODEC[label]


def decode_label(v: float) -> SentimentLabel:
    """Nearest of {-1, 0, +1}; exact midpoints break toward neutral."""
    if not math.isfinite(v):
        raise ValueError(f"cannot decode non-finite value {v}")
    if v < -0.5:
        return SentimentLabel.NEGATIVE
    if v > 0.5:
        return SentimentLabel.POSITIVE
    return SentimentLabel.NEUTRAL


def _design_matrix(xs: Sequence[FeatureVector]) -> sp.csr_matrix:
    dims = xs[0].block_dims
    for k, x in enumerate(xs):
        if x.block_dims != dims:
            raise ValueError(
                f"inconsistent feature dimensions: point {k} has {x.block_dims}, expected {dims}"
            )
    n_tfidf, d_emb, d_aux = dims
    rows, cols, data = [], [], []
    for r, x in enumerate(xs):
        for i, v in x.tfidf.items():
            rows.append(r)
            cols.append(i)
            data.append(v)
    tfidf_block = sp.coo_matrix((data, (rows, cols)), shape=(len(xs), n_tfidf))
    blocks = [tfidf_block]
    if d_emb:
        blocks.append(sp.csr_matrix(np.vstack([x.embedding for x in xs])))
    if d_aux:
        blocks.append(sp.csr_matrix(np.vstack([x.aux for x in xs])))
    return sp.hstack(blocks, format="csr") if len(blocks) > 1 else tfidf_block.tocsr()


class _KernelRowCache:
    """LRU cache of full kernel rows, bounded by a byte budget."""

    def __init__(self, mat: sp.csr_matrix, params: SvrHyperParams):
        self._mat = mat
        self._params = params
        self._sqn = np.asarray(mat.multiply(mat).sum(axis=1)).ravel()
        row_bytes = 8 * mat.shape[0]
        self._capacity = max(2, (params.cache_size_mb * 2**20) // max(row_bytes, 1))
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        lin = (self._mat @ self._mat.getrow(i).T).toarray().ravel()
        if self._params.kernel == "linear":
            row = lin
        else:
            dist2 = np.maximum(self._sqn + self._sqn[i] - 2.0 * lin, 0.0)
            row = np.exp(-self._params.gamma * dist2)
        self._rows[i] = row
        while len(self._rows) > self._capacity:
            self._rows.popitem(last=False)
        return row


def _solve_two_index(
    bi: float, bj: float, ei: float, ej: float, eta: float, eps: float, c: float
) -> float:
    """Exact maximizer of the two-index subproblem.

    Returns the transfer delta applied as beta_i += delta, beta_j -= delta.
    The objective change is

        phi(d) = (E_i - E_j) d - eta d^2 / 2
                 - eps (|beta_i + d| - |beta_i|) - eps (|beta_j - d| - |beta_j|)

    which is concave piecewise quadratic; the maximum over the box
    [lo, hi] sits at a box end, a kink, or a per-segment stationary point.
    """
    lo = max(-c - bi, bj - c)
    hi = min(c - bi, bj + c)
    if not lo < hi:
        return 0.0
    g0 = ei - ej

    def phi(d: float) -> float:
        return (
            g0 * d
            - 0.5 * eta * d * d
            - eps * (abs(bi + d) - abs(bi))
            - eps * (abs(bj - d) - abs(bj))
        )

    points = {lo, hi}
    for kink in (-bi, bj):
        if lo < kink < hi:
            points.add(kink)
    bounds = sorted(points)
    candidates = list(bounds)
    if eta > 0.0:
        for a, b in zip(bounds, bounds[1:]):
            mid = 0.5 * (a + b)
            s_i = 1.0 if bi + mid >= 0 else -1.0
            s_j = 1.0 if bj - mid >= 0 else -1.0
            stationary = (g0 - eps * s_i + eps * s_j) / eta
            if a < stationary < b:
                candidates.append(stationary)

    best_d, best_val = 0.0, 0.0
    for d in sorted(candidates):
        val = phi(d)
        if val > best_val:
            best_d, best_val = d, val
    return best_d


def fit(params: SvrHyperParams, X: Sequence[FeatureVector], y: Sequence[float]) -> SvrModel:
    """Train epsilon-SVR on (X, y) by SMO; see the module docstring.

    Raises ValueError on empty or non-finite input. Hitting the iteration
    cap is not an error: the model is returned with converged=False.
    """
    xs = list(X)
    targets = np.asarray(list(y), dtype=float)
    if len(xs) == 0 or len(xs) != len(targets):
        raise ValueError(f"need matching nonempty X and y, got {len(xs)} and {len(targets)}")
    if not np.isfinite(targets).all():
        raise ValueError("targets must be finite")
    n = len(xs)
    mat = _design_matrix(xs)
    if not np.isfinite(mat.data).all():
        raise ValueError("feature values must be finite")

    c, eps, tol = params.c, params.epsilon, params.tol
    cache = _KernelRowCache(mat, params)
    beta = np.zeros(n)
    errors = targets.copy()  # E_i = y_i - (K beta)_i, maintained incrementally
    bound_tol = 1e-12 * max(1.0, c)
    iter_cap = params.max_iter if params.max_iter >= 0 else _UNBOUNDED_ITER_CAP

    iterations = 0
    converged = False
    while True:
        up = np.where(beta >= 0.0, errors - eps, errors + eps)
        low = np.where(beta > 0.0, errors - eps, errors + eps)
        can_up = beta < c - bound_tol
        can_dn = beta > -c + bound_tol
        m = np.max(up[can_up]) if can_up.any() else -np.inf
        mm = np.min(low[can_dn]) if can_dn.any() else np.inf
        if m - mm <= tol:
            converged = True
            break
        if iterations >= iter_cap:
            break

        viol_up = np.where(can_up, up - mm, -np.inf)
        viol_dn = np.where(can_dn, m - low, -np.inf)
        violation = np.maximum(viol_up, viol_dn)
        i = int(np.argmax(violation))
        go_up = viol_up[i] >= viol_dn[i]

        # Partners must carry at least half the maximal pair violation
        # (a constant-factor violating pair guarantees finite convergence);
        # the |E| gap heuristic chooses among the qualified ones.
        floor = 0.5 * (m - mm)
        if go_up:
            partners = can_dn & (up[i] - low >= floor)
        else:
            partners = can_up & (up - low[i] >= floor)
        partners[i] = False
        if not partners.any():
            break
        row_i = cache.row(i)

        def try_partner(j: int) -> tuple[float, np.ndarray]:
            row_j = cache.row(j)
            eta = max(row_i[i] + row_j[j] - 2.0 * row_i[j], 0.0)
            delta = _solve_two_index(beta[i], beta[j], errors[i], errors[j], eta, eps, c)
            # a transfer that moves neither coefficient in float is a no-op
            if beta[i] + delta == beta[i] and beta[j] - delta == beta[j]:
                delta = 0.0
            return delta, row_j

        gap = np.where(partners, np.abs(errors[i] - errors), -np.inf)
        j = int(np.argmax(gap))
        delta, row_j = try_partner(j)
        if delta == 0.0:
            # The maximal |E| gap partner can carry a negligible pair
            # violation; fall back to the extreme of the opposite side,
            # whose violation is the full m - M.
            j = int(np.argmin(np.where(partners, low, np.inf))) if go_up else int(
                np.argmax(np.where(partners, up, -np.inf))
            )
            delta, row_j = try_partner(j)
            if delta == 0.0:
                break
        beta[i] = min(max(beta[i] + delta, -c), c)
        beta[j] = min(max(beta[j] - delta, -c), c)
        errors -= delta * (row_i - row_j)
        iterations += 1

    abs_beta = np.abs(beta)
    free = (abs_beta > SUPPORT_COEF_EPS) & (abs_beta < c - bound_tol)
    if free.any():
        bias = float(np.mean(errors[free] - eps * np.sign(beta[free])))
    else:
        up = np.where(beta >= 0.0, errors - eps, errors + eps)
        low = np.where(beta > 0.0, errors - eps, errors + eps)
        can_up = beta < c - bound_tol
        can_dn = beta > -c + bound_tol
        m = np.max(up[can_up]) if can_up.any() else None
        mm = np.min(low[can_dn]) if can_dn.any() else None
        if m is not None and mm is not None:
            bias = float(0.5 * (m + mm))
        else:
            bias = float(m if m is not None else (mm if mm is not None else 0.0))

    sv_mask = abs_beta > SUPPORT_COEF_EPS
    sv_indices = tuple(int(k) for k in np.flatnonzero(sv_mask))
    # K beta equals y - E by maintenance, giving the quadratic term cheaply.
    quad = float(beta @ (targets - errors))
    objective = float(targets @ beta) - 0.5 * quad - eps * float(np.sum(abs_beta))
    return SvrModel(
        params=params,
        support_vectors=tuple(xs[k] for k in sv_indices),
        dual_coef=tuple(float(beta[k]) for k in sv_indices),
        bias=bias,
        n_iterations=iterations,
        converged=converged,
        support_indices=sv_indices,
        dual_objective=objective,
    )


def predict(model: SvrModel, x: FeatureVector) -> float:
    """sum_i dual_coef[i] * K(sv_i, x) + bias."""
    if model.support_vectors and x.block_dims != model.support_vectors[0].block_dims:
        raise ValueError(
            f"dimension mismatch: {x.block_dims} vs model {model.support_vectors[0].block_dims}"
        )
    acc = 0.0
    for coef, sv in zip(model.dual_coef, model.support_vectors):
        acc += coef * kernel_eval(model.params, sv, x)
    return acc + model.bias


def dual_objective(
    params: SvrHyperParams, X: Sequence[FeatureVector], y: Sequence[float], beta: Sequence[float]
) -> float:
    """Dual objective W(beta) evaluated from scratch (used by diagnostics)."""
    xs = list(X)
    b = np.asarray(list(beta), dtype=float)
    targets = np.asarray(list(y), dtype=float)
    quad = 0.0
    for i in range(len(xs)):
        for j in range(len(xs)):
            if b[i] != 0.0 and b[j] != 0.0:
                quad += b[i] * b[j] * kernel_eval(params, xs[i], xs[j])
    return float(targets @ b) - 0.5 * quad - params.epsilon * float(np.abs(b).sum())
