"""Brute-force oracle for the epsilon-SVR dual, independent of the solver.

Maximizes

    W(beta) = y.beta - 0.5 beta.K.beta - eps * sum|beta|
    s.t. sum(beta) = 0, |beta_i| <= C

by enumerating every bound/sign assignment: each index is fixed at -C, 0,
or +C, or free with a fixed sign. For a given free set F the stationarity
conditions plus the equality constraint form a linear system

    [ K_FF  1 ] [ beta_F ]   [ y_F - eps * s_F - K_FG beta_G ]
    [ 1^T   0 ] [   b    ] = [ -sum(beta_G)                  ]

solved once per F against all sign/bound combinations as a batched
right-hand side. Feasible candidates (signs consistent, box respected)
are scored with the exact objective; the best one is the optimum, because
the assignment matching the true optimum is always enumerated.

Also provides an independent KKT violation measure used by the tests.
"""

from __future__ import annotations

import itertools

import numpy as np

_FEAS_TOL = 1e-9


def dual_objective(K: np.ndarray, y: np.ndarray, eps: float, beta: np.ndarray) -> float:
    return float(y @ beta - 0.5 * beta @ K @ beta - eps * np.abs(beta).sum())


def solve_dual(K: np.ndarray, y: np.ndarray, c: float, eps: float) -> tuple[float, np.ndarray]:
    """Return (objective, beta) at the dual optimum by exhaustive enumeration."""
    n = len(y)
    best_obj = 0.0
    best_beta = np.zeros(n)

    indices = np.arange(n)
    for free_mask in itertools.product([False, True], repeat=n):
        free = indices[np.array(free_mask)]
        fixed = indices[~np.array(free_mask)]
        nf = len(free)

        fixed_choices = list(itertools.product([-c, 0.0, c], repeat=len(fixed)))
        sign_choices = list(itertools.product([-1.0, 1.0], repeat=nf))

        if nf == 0:
            for choice in fixed_choices:
                beta = np.array(choice)
                if abs(beta.sum()) < _FEAS_TOL:
                    full = np.zeros(n)
                    full[fixed] = beta
                    obj = dual_objective(K, y, eps, full)
                    if obj > best_obj:
                        best_obj, best_beta = obj, full
            continue

        A = np.zeros((nf + 1, nf + 1))
        A[:nf, :nf] = K[np.ix_(free, free)]
        A[:nf, nf] = 1.0
        A[nf, :nf] = 1.0

        rhs_cols = []
        col_meta = []
        for choice in fixed_choices:
            beta_g = np.array(choice)
            base_head = y[free] - (K[np.ix_(free, fixed)] @ beta_g if len(fixed) else 0.0)
            for signs in sign_choices:
                s = np.array(signs)
                rhs = np.empty(nf + 1)
                rhs[:nf] = base_head - eps * s
                rhs[nf] = -beta_g.sum()
                rhs_cols.append(rhs)
                col_meta.append((beta_g, s))
        B = np.stack(rhs_cols, axis=1)
        try:
            solutions = np.linalg.solve(A, B)
        except np.linalg.LinAlgError:
            solutions = np.linalg.lstsq(A, B, rcond=None)[0]

        for col, (beta_g, s) in enumerate(col_meta):
            beta_f = solutions[:nf, col]
            if not np.isfinite(beta_f).all():
                continue
            if np.any(beta_f * s < -_FEAS_TOL):
                continue
            if np.any(np.abs(beta_f) > c + _FEAS_TOL):
                continue
            full = np.zeros(n)
            full[free] = np.clip(beta_f, -c, c)
            full[fixed] = beta_g
            if abs(full.sum()) > 1e-8:
                continue
            obj = dual_objective(K, y, eps, full)
            if obj > best_obj:
                best_obj, best_beta = obj, full
    return best_obj, best_beta


def kkt_violation(K: np.ndarray, y: np.ndarray, c: float, eps: float, beta: np.ndarray) -> float:
    """max(up) - min(low): <= 0 at exact optimality, <= tol at tolerance tol."""
    errors = y - K @ beta
    up = np.where(beta >= 0.0, errors - eps, errors + eps)
    low = np.where(beta > 0.0, errors - eps, errors + eps)
    guard = 1e-9 * max(1.0, c)
    can_up = beta < c - guard
    can_dn = beta > -c + guard
    m = np.max(up[can_up]) if can_up.any() else -np.inf
    mm = np.min(low[can_dn]) if can_dn.any() else np.inf
    return float(m - mm)


def kernel_matrix(points: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return points @ points.T
    sq = np.sum(points**2, axis=1)
    dist2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * points @ points.T, 0.0)
    return np.exp(-gamma * dist2)
