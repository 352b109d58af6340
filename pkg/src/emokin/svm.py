"""Soft-margin linear SVM trained in the dual with an explicit bias.

Minimizes 1/2 |w|^2 + C * sum hinge(y * (w.x + b)) by SMO-style pairwise
coordinate updates on the dual (the unregularized bias shows up as the
equality constraint sum(alpha * y) = 0, which single-coordinate steps cannot
preserve).  The working pair is the maximal KKT violator, so the run is
deterministic for a fixed input ordering.

Termination is certified: the solver stops once the KKT violation or the
relative duality gap drops below tol, and both certificates are recorded in
the training report.  The bias returned is the exact minimizer of the hinge
loss given w (midpoint of the flat region when the minimizer is an interval),
which makes the reported primal objective a valid upper bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFinite, SingleClassInput

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 200_000


@dataclass
class SolverReport:
    iterations: int
    converged: bool
    objective: float
    duality_gap: float
    kkt_violation: float
    objective_trace: list[float] = field(default_factory=list)


@dataclass
class BinarySvm:
    w: np.ndarray
    b: float
    C: float
    report: SolverReport | None = None

    def decision(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ self.w + self.b


def hinge_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float) -> float:
    """Primal objective 1/2|w|^2 + C * sum of hinge losses."""
    margins = y * (X @ w + b)
    return 0.5 * float(w @ w) + C * float(np.maximum(0.0, 1.0 - margins).sum())


def optimal_bias(scores: np.ndarray, y: np.ndarray) -> float:
    """Exact minimizer of sum hinge(y * (scores + b)) over b.

    The loss is piecewise linear in b with breakpoints at y_i - scores_i, so
    the minimum is attained at a breakpoint; when a whole interval is optimal
    the midpoint of its breakpoints is returned for determinism.
    """
    candidates = y - scores
    # loss of every candidate bias, vectorized over candidates x examples
    margins = y[None, :] * (scores[None, :] + candidates[:, None])
    losses = np.maximum(0.0, 1.0 - margins).sum(axis=1)
    best = losses.min()
    flat = candidates[losses <= best + 1e-12 * (1.0 + abs(best))]
    return float((flat.min() + flat.max()) / 2.0)


def train_binary(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> BinarySvm:
    """Train one binary machine; `seed` is accepted for interface stability
    (maximal-violating-pair selection needs no randomized ordering)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise NonFinite(f"X shape {X.shape} inconsistent with {len(y)} labels")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise NonFinite("non-finite value in training data")
    if not np.all(np.abs(y) == 1.0):
        raise SingleClassInput("labels must be +1/-1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise SingleClassInput("need at least one example of each sign")
    if C <= 0 or tol <= 0:
        raise NonFinite("C and tol must be positive")

    n = len(X)
    K = X @ X.T
    Q = K * np.outer(y, y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a'Qa - sum(a)

    check_every = max(10, n)
    trace: list[float] = []
    best = {"gap": np.inf, "kkt": np.inf, "primal": np.inf}
    it = 0
    converged = False
    w = np.zeros(X.shape[1])
    b = 0.0

    def certificate() -> tuple[float, float]:
        nonlocal w, b
        w = X.T @ (alpha * y)
        scores = X @ w
        b = optimal_bias(scores, y)
        primal = 0.5 * float(w @ w) + C * float(
            np.maximum(0.0, 1.0 - y * (scores + b)).sum()
        )
        dual = float(alpha.sum()) - 0.5 * float(alpha @ (Q @ alpha))
        best["primal"] = primal
        return primal - dual, primal

    while it < max_iter:
        minus_yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        up_vals = np.where(up, minus_yg, -np.inf)
        low_vals = np.where(low, minus_yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m, M = up_vals[i], low_vals[j]
        violation = m - M
        best["kkt"] = violation
        if violation <= tol:
            gap, primal = certificate()
            best["gap"] = gap
            trace.append(0.5 * float(alpha @ (Q @ alpha)) - float(alpha.sum()))
            converged = True
            break
        if it % check_every == 0:
            gap, primal = certificate()
            best["gap"] = gap
            trace.append(0.5 * float(alpha @ (Q @ alpha)) - float(alpha.sum()))
            if gap <= tol * max(1.0, abs(primal)):
                converged = True
                break

        a = Q[i, i] + Q[j, j] - 2.0 * y[i] * y[j] * Q[i, j]
        if a <= 0:
            a = 1e-12
        d = violation / a
        d = min(d, C - alpha[i] if y[i] > 0 else alpha[i])
        d = min(d, alpha[j] if y[j] > 0 else C - alpha[j])
        if d <= 0:
            # numerically stuck pair; the violation bound still certifies
            gap, primal = certificate()
            best["gap"] = gap
            converged = gap <= tol * max(1.0, abs(primal)) or violation <= tol
            break
        dai = y[i] * d
        daj = -y[j] * d
        alpha[i] += dai
        alpha[j] += daj
        grad += Q[:, i] * dai + Q[:, j] * daj
        it += 1

    if not converged:
        gap, primal = certificate()
        best["gap"] = gap
        trace.append(0.5 * float(alpha @ (Q @ alpha)) - float(alpha.sum()))
        converged = gap <= tol * max(1.0, abs(primal)) or best["kkt"] <= tol

    report = SolverReport(
        iterations=it,
        converged=converged,
        objective=float(best["primal"]),
        duality_gap=float(best["gap"]),
        kkt_violation=float(best["kkt"]),
        objective_trace=trace,
    )
    return BinarySvm(w=w, b=b, C=C, report=report)
