"""Independent brute-force oracles the solver tests are checked against.

These deliberately share no code with the implementations they verify.
"""
import numpy as np


def svm_primal(w, b, X, y, C):
    margins = y * (X @ w + b)
    return 0.5 * float(np.dot(w, w)) + C * float(np.maximum(0.0, 1.0 - margins).sum())


def _best_bias_losses(scores, y):
    """min over b of the total hinge loss, exact, for a batch of score rows.

    For fixed scores the loss is piecewise linear in b with breakpoints at
    y_i - scores_i, so scanning the breakpoints is exhaustive.
    """
    cands = y[None, :] - scores  # (m, n) candidate biases
    margins = y[None, None, :] * (scores[:, None, :] + cands[:, :, None])
    return np.maximum(0.0, 1.0 - margins).sum(axis=2).min(axis=1)


def _refine_1d(f, radius, rounds=12, pts=21):
    """Grid-refined minimum of a 1-D convex function on [-radius, radius].

    Convexity in one dimension guarantees the true minimizer lies within one
    cell of the grid argmin, so keeping +-2 cells per round is exhaustive.
    """
    center, val = 0.0, np.inf
    arg = 0.0
    for _ in range(rounds):
        grid = np.linspace(center - radius, center + radius, pts)
        vals = f(grid)
        k = int(np.argmin(vals))
        if vals[k] < val:
            val = float(vals[k])
            arg = float(grid[k])
        center = float(grid[k])
        radius = 4.0 * radius / (pts - 1)  # +-2 cells
    return val, arg


def grid_refined_minimum(X, y, C):
    """Brute-force minimum of the soft-margin primal for 1-D or 2-D inputs.

    Nested 1-D grid refinements: the bias is eliminated exactly per point,
    the last weight coordinate is minimized by 1-D refinement for each value
    of the first, and the first by 1-D refinement of that partial minimum.
    Partial minimization keeps every level convex, where 1-D grid refinement
    is safe (unlike joint multi-dimensional boxes, which can lose anisotropic
    valleys).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    assert d in (1, 2), "oracle supports 1-D and 2-D problems"
    radius = 2.0 * np.sqrt(2.0 * C * n) + 1.0

    if d == 1:
        def value(w1_grid):
            scores = np.outer(w1_grid, X[:, 0])
            return 0.5 * w1_grid**2 + C * _best_bias_losses(scores, y)

        val, _ = _refine_1d(value, radius)
        return val, None

    def value_given_w1(w1):
        def inner(w2_grid):
            W = np.stack([np.full_like(w2_grid, w1), w2_grid], axis=1)
            scores = W @ X.T
            return 0.5 * np.sum(W * W, axis=1) + C * _best_bias_losses(scores, y)

        val, _ = _refine_1d(inner, radius)
        return val

    def outer(w1_grid):
        return np.array([value_given_w1(w1) for w1 in w1_grid])

    val, _ = _refine_1d(outer, radius)
    return val, None


def ecoc_enumerate(margins, code):
    """Exhaustive argmin of the hinge decoding loss with the documented
    tie-breaks (larger code-weighted margin sum, then lower index)."""
    margins = np.asarray(margins, dtype=float)
    losses = []
    for row in code:
        loss = 0.0
        for m_entry, f in zip(row, margins):
            if m_entry != 0:
                loss += max(0.0, 1.0 - m_entry * f)
        losses.append(loss)
    losses = np.array(losses)
    best = losses.min()
    tied = [k for k in range(len(code)) if losses[k] == best]
    if len(tied) > 1:
        scores = [float(np.sum(code[k] * margins)) for k in tied]
        top = max(scores)
        tied = [k for k, s in zip(tied, scores) if s == top]
    return tied[0], losses


def vote_count(margins, code):
    """Majority votes per class: a machine votes for the pair member on the
    winning side of its margin."""
    votes = np.zeros(len(code), dtype=int)
    for s, f in enumerate(margins):
        for k in range(len(code)):
            if code[k][s] != 0 and code[k][s] * f > 0:
                votes[k] += 1
    return votes
