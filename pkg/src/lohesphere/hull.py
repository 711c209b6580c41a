"""Minimum-norm point in the convex hull of a finite point set.

This is the computational core of the dispersal test: a configuration is
dispersed exactly when the origin lies in the convex hull of its points,
i.e. when the minimum-norm point has norm zero.

The solver runs Frank-Wolfe style major iterations (pick the vertex most
opposed to the current point) and resolves each candidate support set
exactly with affine minimization minor cycles, dropping vertices whose
affine weight goes nonpositive. The minor cycles terminate finitely, so
the overall method reaches the optimum to solver precision instead of
stalling at the O(1/k) rate of pure vertex steps.
"""

from __future__ import annotations

import numpy as np

MAX_ITER = 10_000
# Weights at or below this are treated as zero when pruning the support.
WEIGHT_FLOOR = 1e-13


def _affine_min_norm(A: np.ndarray) -> np.ndarray:
    """Affine-combination weights minimizing |lam @ A| with sum(lam) = 1.

    Solves the KKT system of the equality-constrained least squares
    problem; falls back to least squares if the Gram matrix is singular
    (affinely dependent support).
    """
    m = A.shape[0]
    G = A @ A.T
    kkt = np.zeros((m + 1, m + 1))
    kkt[0, 1:] = 1.0
    kkt[1:, 0] = 1.0
    kkt[1:, 1:] = G
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[1:]


def min_norm_point(points: np.ndarray, max_iter: int = MAX_ITER, tol: float = 1e-12):
    """Minimum-norm point of the convex hull of the rows of points.

    Parameters
    ----------
    points : (N, d) array, N >= 1
    max_iter : cap on major iterations
    tol : optimality slack, relative to max(1, |p|^2)

    Returns
    -------
    (p, iterations) : the optimal point and the major iteration count.

    The optimality certificate is min_i <x_i, p> >= |p|^2 - tol, which
    for p = 0 is exact membership of the origin.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError(f"expected a nonempty (N, d) array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")

    start = int(np.argmin(np.einsum("nd,nd->n", X, X)))
    support = [start]
    weights = np.array([1.0])
    p = X[start].copy()

    iterations = 0
    for iterations in range(1, max_iter + 1):
        scores = X @ p
        s = int(np.argmin(scores))
        pp = float(p @ p)
        if scores[s] >= pp - tol * max(1.0, pp):
            break
        if s in support:
            # p already affine-optimal over its support, no progress possible
            break
        support.append(s)
        weights = np.append(weights, 0.0)

        # Minor cycles: affine-minimize over the support, step back toward
        # the previous feasible weights whenever a weight leaves the
        # simplex, and drop the vertex that hit zero.
        while True:
            A = X[support]
            lam = _affine_min_norm(A)
            if np.all(lam > WEIGHT_FLOOR):
                weights = lam
                p = lam @ A
                break
            mask = lam <= WEIGHT_FLOOR
            denom = weights - lam
            with np.errstate(divide="ignore", invalid="ignore"):
                steps = np.where(mask & (denom > 0), weights / denom, np.inf)
            theta = float(np.min(steps))
            if not np.isfinite(theta):
                # weights already on the boundary in every blocked slot
                theta = 0.0
            weights = (1.0 - theta) * weights + theta * lam
            weights[weights <= WEIGHT_FLOOR] = 0.0
            keep = weights > 0
            if not np.any(keep):
                # Numerical corner: keep the single best vertex
                keep[int(np.argmax(lam))] = True
                weights[keep] = 1.0
            support = [v for v, k in zip(support, keep) if k]
            weights = weights[keep]
            weights = weights / weights.sum()
            if len(support) == 1:
                p = X[support[0]].copy()
                weights = np.array([1.0])
                break

    return p, iterations
