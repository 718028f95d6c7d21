"""TF-IDF vectorization with entropy-based feature selection.

The weighting is pinned to one variant: tf is the raw in-document count,
idf(t) = ln((1 + N) / (1 + df(t))) + 1, and vectors are L2-normalized.
Feature selection scores each term's information gain over the class
variable (binary presence, entropies in bits) and keeps strictly positive
scores.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin

from .validation import check_fitted, check_labels, check_token_docs


class TfidfVectorizer(BaseEstimator, TransformerMixin):
    """Unigram TF-IDF over pre-tokenized documents.

    Attributes set by fit: ``vocabulary_`` (token -> column), ``idf_``
    (aligned weights, all > 0) and optionally ``selected_`` (a boolean mask
    over columns, applied before normalization at transform time).
    """

    def fit(self, X: Sequence[Sequence[str]], y=None) -> "TfidfVectorizer":
        docs = check_token_docs(X)
        if not docs:
            raise ValueError("cannot fit on an empty document list")
        df: Counter[str] = Counter()
        for doc in docs:
            df.update(set(doc))
        if not df:
            raise ValueError("empty vocabulary: no tokens in any document")
        self.vocabulary_ = {tok: i for i, tok in enumerate(sorted(df))}
        n = len(docs)
        idf = np.empty(len(self.vocabulary_))
        for tok, i in self.vocabulary_.items():
            idf[i] = math.log((1 + n) / (1 + df[tok])) + 1.0
        self.idf_ = idf
        self.selected_: Optional[np.ndarray] = None
        return self

    def transform(self, X: Sequence[Sequence[str]]) -> sp.csr_matrix:
        check_fitted(self, "vocabulary_")
        docs = check_token_docs(X)
        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        for r, doc in enumerate(docs):
            counts = Counter(doc)
            for tok, tf in counts.items():
                col = self.vocabulary_.get(tok)
                if col is None:  # out-of-vocabulary tokens are ignored
                    continue
                if self.selected_ is not None and not self.selected_[col]:
                    continue
                rows.append(r)
                cols.append(col)
                vals.append(tf * self.idf_[col])
        mat = sp.csr_matrix(
            (vals, (rows, cols)), shape=(len(docs), len(self.vocabulary_)), dtype=np.float64
        )
        norms = sp.linalg.norm(mat, axis=1)
        nonzero = norms > 0
        scale = np.ones_like(norms)
        scale[nonzero] = 1.0 / norms[nonzero]
        return sp.diags(scale) @ mat

    def to_json_dict(self) -> dict:
        check_fitted(self, "vocabulary_")
        return {
            "vocabulary": self.vocabulary_,
            "idf": self.idf_.tolist(),
            "selected": None if self.selected_ is None else self.selected_.astype(int).tolist(),
        }

    @classmethod
    def from_json_dict(cls, d) -> "TfidfVectorizer":
        vec = cls()
        vec.vocabulary_ = dict(d["vocabulary"])
        vec.idf_ = np.asarray(d["idf"], dtype=np.float64)
        vec.selected_ = None if d["selected"] is None else np.asarray(d["selected"], dtype=bool)
        return vec

    def restrict(self, mask: np.ndarray) -> "TfidfVectorizer":
        """Copy of this vectorizer transforming only the masked features."""
        check_fitted(self, "vocabulary_")
        if mask.shape != (len(self.vocabulary_),):
            raise ValueError("mask length must equal the vocabulary size")
        out = TfidfVectorizer()
        out.vocabulary_ = dict(self.vocabulary_)
        out.idf_ = self.idf_.copy()
        base = np.ones(len(self.vocabulary_), dtype=bool) if self.selected_ is None else self.selected_
        out.selected_ = base & mask
        return out


def _entropy_bits(counts: Counter) -> float:
    total = sum(counts.values())
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts.values():
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def information_gain(
    docs: Sequence[Sequence[str]], labels: Sequence[str]
) -> dict[str, float]:
    """Entropy reduction of the class variable given each term's presence."""
    docs = check_token_docs(docs)
    labels = check_labels(labels, len(docs))
    if len(set(labels)) < 2:
        warnings.warn("single-class corpus: every information gain is zero", stacklevel=2)
        vocab = {t for doc in docs for t in doc}
        return {t: 0.0 for t in vocab}
    n = len(docs)
    class_counts = Counter(labels)
    h_class = _entropy_bits(class_counts)
    present: dict[str, Counter] = {}
    for doc, lab in zip(docs, labels):
        for tok in set(doc):
            present.setdefault(tok, Counter())[lab] += 1
    scores: dict[str, float] = {}
    for tok, with_tok in present.items():
        n_with = sum(with_tok.values())
        without_tok = class_counts - with_tok
        p_with = n_with / n
        cond = p_with * _entropy_bits(with_tok) + (1 - p_with) * _entropy_bits(without_tok)
        scores[tok] = h_class - cond
    return scores


def normalize_scores(scores: Mapping[str, float]) -> dict[str, float]:
    """Max-scale scores into [0, 1] for reporting; selection uses raw > 0."""
    top = max(scores.values(), default=0.0)
    if top <= 0:
        return {t: 0.0 for t in scores}
    return {t: s / top for t, s in scores.items()}


def select_positive(
    vectorizer: TfidfVectorizer, scores: Mapping[str, float]
) -> TfidfVectorizer:
    """Keep only features with strictly positive information gain."""
    check_fitted(vectorizer, "vocabulary_")
    mask = np.zeros(len(vectorizer.vocabulary_), dtype=bool)
    for tok, col in vectorizer.vocabulary_.items():
        if scores.get(tok, 0.0) > 0.0:
            mask[col] = True
    return vectorizer.restrict(mask)
