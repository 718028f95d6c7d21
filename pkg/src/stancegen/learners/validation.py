"""Small input-validation helpers shared by the estimators."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.exceptions import NotFittedError


def check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def check_token_docs(docs: Sequence[Sequence[str]]) -> list[list[str]]:
    """Validate a list of token lists (the unit every text estimator consumes)."""
    if isinstance(docs, str):
        raise TypeError("expected a sequence of token lists, got a single string")
    out: list[list[str]] = []
    for i, doc in enumerate(docs):
        if isinstance(doc, str):
            raise TypeError(f"doc {i} is a raw string; tokenize it first")
        out.append([str(t) for t in doc])
    return out


def check_labels(y, n: int) -> list[str]:
    labels = [str(v) for v in y]
    if len(labels) != n:
        raise ValueError(f"got {n} documents but {len(labels)} labels")
    return labels


def as_float_matrix(X) -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("feature matrix contains non-finite values")
    return arr
