"""Kernel SVM trained with sequential minimal optimization (SMO).

The dual problem per binary task is

    max_a  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0

solved by pairwise analytic updates with Platt's working-set heuristics.
Multi-class is one-vs-rest; prediction takes the largest decision value with
ties broken by class order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin

from .validation import check_fitted, check_labels


def linear_kernel(X, Z) -> np.ndarray:
    K = X @ Z.T
    return np.asarray(K.todense()) if sp.issparse(K) else np.asarray(K)


def rbf_kernel(X, Z, gamma: float) -> np.ndarray:
    """exp(-gamma * ||x - z||^2), computed via the inner-product expansion."""
    if sp.issparse(X):
        x2 = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        z2 = np.asarray(Z.multiply(Z).sum(axis=1)).ravel()
        cross = np.asarray((X @ Z.T).todense())
    else:
        X = np.asarray(X, dtype=np.float64)
        Z = np.asarray(Z, dtype=np.float64)
        x2 = np.sum(X * X, axis=1)
        z2 = np.sum(Z * Z, axis=1)
        cross = X @ Z.T
    d2 = x2[:, None] + z2[None, :] - 2.0 * cross
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


def compute_kernel(X, Z, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return linear_kernel(X, Z)
    if kernel == "rbf":
        return rbf_kernel(X, Z, gamma)
    raise ValueError(f"unknown kernel {kernel!r}")


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def kkt_violation(K: np.ndarray, y: np.ndarray, alpha: np.ndarray, b: float, C: float) -> float:
    """Largest violation of the optimality conditions over all points."""
    margins = y * ((alpha * y) @ K + b)  # y_i * f(x_i)
    viol = np.zeros_like(margins)
    lower = alpha <= 1e-12
    upper = alpha >= C - 1e-12
    free = ~lower & ~upper
    viol[lower] = np.maximum(0.0, 1.0 - margins[lower])
    viol[upper] = np.maximum(0.0, margins[upper] - 1.0)
    viol[free] = np.abs(margins[free] - 1.0)
    return float(viol.max(initial=0.0))


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float = 1e-3,
    max_updates: Optional[int] = None,
    random_state: int = 0,
) -> tuple[np.ndarray, float]:
    """Solve one binary dual problem; returns (alpha, bias).

    Deterministic for a given random_state (the RNG only seeds scan starts).
    """
    n = len(y)
    y = np.asarray(y, dtype=np.float64)
    alpha = np.zeros(n)
    b = 0.0
    # E_i = f(x_i) - y_i; with alpha = 0 and b = 0, f = 0 everywhere.
    E = -y.copy()
    rng = np.random.default_rng(random_state)
    if max_updates is None:
        max_updates = max(200_000, 2_000 * n)
    updates = 0

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, updates
        if i1 == i2:
            return False
        a1o, a2o = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = E[i1], E[i2]
        s = y1 * y2
        if s > 0:
            lo, hi = max(0.0, a1o + a2o - C), min(C, a1o + a2o)
        else:
            lo, hi = max(0.0, a2o - a1o), min(C, C + a2o - a1o)
        if hi - lo < 1e-15:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 1e-15:
            a2 = a2o + y2 * (e1 - e2) / eta
            a2 = min(max(a2, lo), hi)
        else:
            # Degenerate curvature: compare the objective at both ends.
            dlo, dhi = lo - a2o, hi - a2o
            obj_lo = dlo * y2 * (e1 - e2) - 0.5 * eta * dlo * dlo
            obj_hi = dhi * y2 * (e1 - e2) - 0.5 * eta * dhi * dhi
            if obj_lo > obj_hi + 1e-12:
                a2 = lo
            elif obj_hi > obj_lo + 1e-12:
                a2 = hi
            else:
                return False
        if abs(a2 - a2o) < 1e-14 * (a2 + a2o + 1e-14):
            return False
        a1 = a1o + s * (a2o - a2)
        a1 = min(max(a1, 0.0), C)  # guards float drift only
        d1 = y1 * (a1 - a1o)
        d2 = y2 * (a2 - a2o)
        b1 = b - e1 - d1 * k11 - d2 * k12
        b2 = b - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1 < C:
            b_new = b1
        elif 0.0 < a2 < C:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0
        E[:] += d1 * K[i1, :] + d2 * K[i2, :] + (b_new - b)
        alpha[i1], alpha[i2] = a1, a2
        b = b_new
        updates += 1
        return True

    def examine(i2: int) -> bool:
        r2 = E[i2] * y[i2]
        if not ((r2 < -tol and alpha[i2] < C) or (r2 > tol and alpha[i2] > 0)):
            return False
        nonbound = np.flatnonzero((alpha > 0) & (alpha < C))
        if len(nonbound) > 1:
            i1 = int(nonbound[np.argmax(np.abs(E[nonbound] - E[i2]))])
            if take_step(i1, i2):
                return True
        if len(nonbound):
            start = int(rng.integers(len(nonbound)))
            for k in range(len(nonbound)):
                if take_step(int(nonbound[(start + k) % len(nonbound)]), i2):
                    return True
        start = int(rng.integers(n))
        for k in range(n):
            if take_step((start + k) % n, i2):
                return True
        return False

    examine_all = True
    num_changed = 1
    while (num_changed > 0 or examine_all) and updates < max_updates:
        num_changed = 0
        if examine_all:
            candidates: Sequence[int] = range(n)
        else:
            candidates = np.flatnonzero((alpha > 0) & (alpha < C))
        for i2 in candidates:
            num_changed += examine(int(i2))
        if examine_all:
            examine_all = False
        elif num_changed == 0:
            examine_all = True
    if updates >= max_updates:
        warnings.warn(f"SMO hit the update cap ({max_updates}); result may be loose", stacklevel=2)

    # Final bias from the optimality interval; free points pin it exactly.
    f0 = (alpha * y) @ K
    free = (alpha > 1e-12) & (alpha < C - 1e-12)
    if free.any():
        b = float(np.mean(y[free] - f0[free]))
    else:
        # No free points: b may sit anywhere in the interval the bound
        # points allow (y_i f_i >= 1 at alpha=0, <= 1 at alpha=C).
        lo_candidates = [y[i] - f0[i] for i in range(n)
                         if (alpha[i] <= 1e-12 and y[i] > 0) or (alpha[i] >= C - 1e-12 and y[i] < 0)]
        hi_candidates = [y[i] - f0[i] for i in range(n)
                         if (alpha[i] <= 1e-12 and y[i] < 0) or (alpha[i] >= C - 1e-12 and y[i] > 0)]
        lo = max(lo_candidates, default=-1.0)
        hi = min(hi_candidates, default=1.0)
        b = float((lo + hi) / 2.0)
    return alpha, b


@dataclass
class BinarySvm:
    """One one-vs-rest problem: support vectors live in the classifier."""

    support_idx: np.ndarray  # indices into the training set
    dual_coef: np.ndarray    # alpha_i * y_i at the support vectors
    intercept: float


class SmoSvmClassifier(BaseEstimator, ClassifierMixin):
    """One-vs-rest kernel SVM with the SMO solver above.

    Parameters follow the usual convention: C is the box constraint, gamma
    the RBF width (ignored for the linear kernel), tol the KKT tolerance.
    """

    def __init__(
        self,
        C: float = 1.0,
        gamma: float = 1.0,
        kernel: str = "rbf",
        tol: float = 1e-3,
        random_state: int = 0,
    ):
        self.C = C
        self.gamma = gamma
        self.kernel = kernel
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y) -> "SmoSvmClassifier":
        n = X.shape[0] if hasattr(X, "shape") else len(X)
        labels = check_labels(y, n)
        self.classes_ = sorted(set(labels))
        if len(self.classes_) < 2:
            raise ValueError("training data contains a single class")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.kernel == "rbf" and self.gamma <= 0:
            raise ValueError("gamma must be positive for the rbf kernel")
        self._X = X.tocsr() if sp.issparse(X) else np.asarray(X, dtype=np.float64)
        K = compute_kernel(self._X, self._X, self.kernel, self.gamma)
        self.models_: list[BinarySvm] = []
        y_arr = np.array(labels)
        for cls in self.classes_:
            y_bin = np.where(y_arr == cls, 1.0, -1.0)
            alpha, b = smo_solve(
                K, y_bin, self.C, tol=self.tol, random_state=self.random_state
            )
            support = np.flatnonzero(alpha > 1e-12)
            self.models_.append(
                BinarySvm(
                    support_idx=support,
                    dual_coef=alpha[support] * y_bin[support],
                    intercept=b,
                )
            )
        return self

    def decision_function(self, X) -> np.ndarray:
        check_fitted(self, "models_")
        X = X.tocsr() if sp.issparse(X) else np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], len(self.classes_)))
        for j, model in enumerate(self.models_):
            sv = self._X[model.support_idx]
            K = compute_kernel(X, sv, self.kernel, self.gamma)
            out[:, j] = K @ model.dual_coef + model.intercept
        return out

    def predict(self, X) -> list[str]:
        scores = self.decision_function(X)
        # argmax returns the first maximum: ties go to the earliest class.
        return [self.classes_[j] for j in np.argmax(scores, axis=1)]

    def to_json_dict(self) -> dict:
        """Serializable state: only the support vectors are kept."""
        check_fitted(self, "models_")
        used = sorted({int(i) for m in self.models_ for i in m.support_idx})
        remap = {old: new for new, old in enumerate(used)}
        sub = self._X[used] if used else self._X[:0]
        if sp.issparse(sub):
            sub = sub.tocsr()
            rows = [
                [[int(c), float(v)] for c, v in zip(sub[i].indices, sub[i].data)]
                for i in range(sub.shape[0])
            ]
            vectors = {"format": "sparse", "n_features": int(self._X.shape[1]), "rows": rows}
        else:
            vectors = {"format": "dense", "rows": np.asarray(sub).tolist()}
        return {
            "params": self.get_params(),
            "classes": list(self.classes_),
            "support_vectors": vectors,
            "models": [
                {
                    "support": [remap[int(i)] for i in m.support_idx],
                    "dual_coef": m.dual_coef.tolist(),
                    "intercept": m.intercept,
                }
                for m in self.models_
            ],
        }

    @classmethod
    def from_json_dict(cls, d) -> "SmoSvmClassifier":
        model = cls(**d["params"])
        model.classes_ = list(d["classes"])
        vectors = d["support_vectors"]
        if vectors["format"] == "sparse":
            n_features = vectors["n_features"]
            rows, cols, vals = [], [], []
            for r, row in enumerate(vectors["rows"]):
                for c, v in row:
                    rows.append(r)
                    cols.append(c)
                    vals.append(v)
            model._X = sp.csr_matrix(
                (vals, (rows, cols)), shape=(len(vectors["rows"]), n_features), dtype=np.float64
            )
        else:
            model._X = np.asarray(vectors["rows"], dtype=np.float64)
        model.models_ = [
            BinarySvm(
                support_idx=np.asarray(m["support"], dtype=np.intp),
                dual_coef=np.asarray(m["dual_coef"], dtype=np.float64),
                intercept=float(m["intercept"]),
            )
            for m in d["models"]
        ]
        return model
