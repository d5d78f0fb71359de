"""Kernel SVM trained from a precomputed Gram matrix.

The binary solver is an SMO-style coordinate-pair method on the dual
(maximal-violating-pair selection, the working-set rule used by libsvm).
Multi-class aggregation is one-vs-one: each class pair is solved on the
principal submatrix of the precomputed Gram, so no kernel value is ever
recomputed, and prediction is by majority vote.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError
from .kernel import CrossBlock, GramMatrix

_SV_EPS = 1e-14  # below this an alpha is treated as exactly zero


@dataclass
class BinarySvm:
    dual_coefs: np.ndarray  # alpha_i * y_i per support vector
    support_indices: np.ndarray  # indices into the training set of the fit
    bias: float
    C: float
    n_train: int


@dataclass
class MultiClassSvm:
    classes: list[int]  # ascending label order
    pairs: list[tuple[int, int]]  # (class_a, class_b) with a < b, one per model
    models: list[BinarySvm]
    kernel_id: str
    C: float
    tol: float
    jitter: float


def solve_binary(
    kernel_matrix: np.ndarray,
    labels: np.ndarray,
    C: float = 1.0,
    tol: float = 1e-3,
    max_iter: int = 10000,
) -> BinarySvm:
    """Solve the two-class dual on a precomputed kernel submatrix.

    `labels` must be +-1 with both classes present. The kernel matrix is
    assumed symmetric with unit diagonal; apply jitter beforehand if it came
    from shot estimation. Raises ConvergenceError with the worst remaining
    KKT violation if the pair budget runs out.
    """
    K = np.asarray(kernel_matrix, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    m = y.shape[0]
    if K.shape != (m, m):
        raise ValueError(f"kernel matrix shape {K.shape} does not match {m} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1/-1")
    if np.all(y == y[0]):
        raise ValueError("labels contain a single class")
    if C <= 0:
        raise ConfigError(f"C must be positive, got {C}")

    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(m)
    grad = -np.ones(m)  # gradient of 1/2 a'Qa - sum(a) at alpha = 0

    for _ in range(max_iter):
        crit = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))

        crit_up = np.where(up, crit, -np.inf)
        crit_low = np.where(low, crit, np.inf)
        i = int(np.argmax(crit_up))
        j = int(np.argmin(crit_low))
        gap = crit_up[i] - crit_low[j]
        if gap <= tol:
            break

        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        eta = max(eta, 1e-12)
        delta = gap / eta

        # step bounds keeping both alphas inside [0, C]
        hi = min(
            C - alpha[i] if y[i] > 0 else alpha[i],
            alpha[j] if y[j] > 0 else C - alpha[j],
        )
        delta = min(delta, hi)

        new_i = np.clip(alpha[i] + y[i] * delta, 0.0, C)
        new_j = np.clip(alpha[j] - y[j] * delta, 0.0, C)
        grad += Q[:, i] * (new_i - alpha[i]) + Q[:, j] * (new_j - alpha[j])
        alpha[i], alpha[j] = new_i, new_j
    else:
        raise ConvergenceError(
            f"SMO did not converge within {max_iter} pair updates", float(gap)
        )

    bias = _compute_bias(alpha, y, grad, C)
    sv = np.flatnonzero(alpha > _SV_EPS)
    return BinarySvm(
        dual_coefs=alpha[sv] * y[sv],
        support_indices=sv,
        bias=bias,
        C=float(C),
        n_train=m,
    )


def _compute_bias(alpha: np.ndarray, y: np.ndarray, grad: np.ndarray, C: float) -> float:
    """Average -y*grad over free support vectors; midpoint of the bound
    margin estimates when none are free."""
    yg = y * grad
    eps = 1e-9 * C
    free = (alpha > eps) & (alpha < C - eps)
    if free.any():
        return float(-yg[free].mean())
    upper = ((alpha <= eps) & (y > 0)) | ((alpha >= C - eps) & (y < 0))
    lower = ((alpha <= eps) & (y < 0)) | ((alpha >= C - eps) & (y > 0))
    ub = yg[upper].min() if upper.any() else None
    lb = yg[lower].max() if lower.any() else None
    if ub is None and lb is None:
        return 0.0
    if ub is None:
        return float(-lb)
    if lb is None:
        return float(-ub)
    return float(-(ub + lb) / 2.0)


def decision_value(model: BinarySvm, kernel_row: np.ndarray) -> float:
    """sum_i dual_coef_i * k(x, sv_i) + b for one kernel row over the training set."""
    kernel_row = np.asarray(kernel_row, dtype=np.float64)
    if kernel_row.shape != (model.n_train,):
        raise ValueError(
            f"kernel row has shape {kernel_row.shape}, model was fit on {model.n_train} points"
        )
    return float(kernel_row[model.support_indices] @ model.dual_coefs + model.bias)


def fit_multiclass(
    gram: GramMatrix,
    labels: np.ndarray,
    C: float = 1.0,
    tol: float = 1e-3,
    max_iter: int = 10000,
    threads: int = 1,
) -> MultiClassSvm:
    """One binary solve per class pair on the pair's principal submatrix.

    Shot-estimated Gram matrices may be indefinite; they get a diagonal
    jitter of max(0, -lambda_min) + 1e-8 before solving. The sign convention
    per pair (a, b): decision value >= 0 votes for the lower label a.
    """
    labels = np.asarray(labels)
    if labels.shape[0] != gram.size:
        raise ValueError(f"{labels.shape[0]} labels for a {gram.size}x{gram.size} Gram")
    classes = sorted(int(c) for c in np.unique(labels))
    if len(classes) < 2:
        raise ValueError("need at least 2 distinct classes")

    values = gram.values
    jitter = 0.0
    if gram.mode == "shots":
        lam_min = float(np.linalg.eigvalsh(values).min())
        jitter = max(0.0, -lam_min) + 1e-8
        values = values + jitter * np.eye(gram.size)

    pairs = [(a, b) for k, a in enumerate(classes) for b in classes[k + 1 :]]

    def solve_pair(pair):
        a, b = pair
        idx = np.flatnonzero((labels == a) | (labels == b))
        y = np.where(labels[idx] == a, 1.0, -1.0)
        try:
            local = solve_binary(values[np.ix_(idx, idx)], y, C=C, tol=tol, max_iter=max_iter)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"pair ({a}, {b}): {exc.message}", exc.worst_violation
            ) from exc
        except ValueError as exc:
            raise type(exc)(f"pair ({a}, {b}): {exc}") from exc
        return BinarySvm(
            dual_coefs=local.dual_coefs,
            support_indices=idx[local.support_indices],
            bias=local.bias,
            C=local.C,
            n_train=gram.size,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            models = list(pool.map(solve_pair, pairs))
    else:
        models = [solve_pair(p) for p in pairs]

    return MultiClassSvm(
        classes=classes,
        pairs=pairs,
        models=models,
        kernel_id=gram.kernel_id,
        C=float(C),
        tol=float(tol),
        jitter=jitter,
    )


def predict(model: MultiClassSvm, cross: CrossBlock) -> tuple[np.ndarray, np.ndarray]:
    """Majority vote over the pairwise models.

    Returns (labels, votes) where votes is an (n_test, n_classes) tally.
    Ties break by the summed magnitude of the winning decision values, then
    by the lowest class index.
    """
    if cross.kernel_id != model.kernel_id:
        raise ConfigError(
            f"kernel mismatch: model has {model.kernel_id!r}, block has {cross.kernel_id!r}"
        )
    rows = np.asarray(cross.values, dtype=np.float64)
    n_train = model.models[0].n_train
    if rows.ndim != 2 or rows.shape[1] != n_train:
        raise ValueError(f"cross block must be (n_test, {n_train}), got {rows.shape}")

    n_test = rows.shape[0]
    n_classes = len(model.classes)
    col = {c: k for k, c in enumerate(model.classes)}
    votes = np.zeros((n_test, n_classes), dtype=np.int64)
    magnitude = np.zeros((n_test, n_classes))

    for (a, b), bm in zip(model.pairs, model.models):
        d = rows[:, bm.support_indices] @ bm.dual_coefs + bm.bias
        toward_a = d >= 0
        votes[toward_a, col[a]] += 1
        votes[~toward_a, col[b]] += 1
        magnitude[toward_a, col[a]] += np.abs(d[toward_a])
        magnitude[~toward_a, col[b]] += np.abs(d[~toward_a])

    labels = np.empty(n_test, dtype=np.int64)
    for r in range(n_test):
        best = np.flatnonzero(votes[r] == votes[r].max())
        if best.size > 1:
            top_mag = magnitude[r, best].max()
            best = best[magnitude[r, best] == top_mag]
        labels[r] = model.classes[best[0]]
    return labels, votes
