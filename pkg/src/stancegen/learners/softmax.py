"""Linear softmax text classifier over averaged word vectors.

The document representation is the mean of its word vectors (a trainable
lookup table, or a frozen pre-trained one); a single linear layer plus
softmax produces class probabilities. Training is plain SGD on cross-entropy
with a linearly decaying learning rate, deterministic for a fixed seed.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .embeddings import EmbeddingTable
from .validation import check_fitted, check_labels, check_token_docs


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


class LinearSoftmaxClassifier(BaseEstimator, ClassifierMixin):
    """Averaged-embedding linear classifier.

    With ``embeddings=None`` a word table of ``dim`` columns is initialized
    uniformly in [-1/dim, 1/dim] and trained together with the output layer.
    With a pre-trained table, ``freeze_embeddings`` controls whether word
    vectors receive gradient updates (frozen by default).
    """

    def __init__(
        self,
        epochs: int = 20,
        lr0: float = 0.1,
        dim: int = 100,
        embeddings: Optional[EmbeddingTable] = None,
        freeze_embeddings: bool = True,
        random_state: int = 0,
    ):
        self.epochs = epochs
        self.lr0 = lr0
        self.dim = dim
        self.embeddings = embeddings
        self.freeze_embeddings = freeze_embeddings
        self.random_state = random_state

    # -- representation -----------------------------------------------------

    def _doc_rows(self, doc: Sequence[str]) -> np.ndarray:
        return np.array([self.vocab_[t] for t in doc if t in self.vocab_], dtype=np.intp)

    def _hidden(self, rows: np.ndarray) -> np.ndarray:
        if len(rows) == 0:
            return np.zeros(self.input_.shape[1])
        return self.input_[rows].mean(axis=0)

    # -- training -----------------------------------------------------------

    def fit(self, X: Sequence[Sequence[str]], y) -> "LinearSoftmaxClassifier":
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.lr0 <= 0:
            raise ValueError("lr0 must be positive")
        docs = check_token_docs(X)
        if not docs:
            raise ValueError("cannot fit on an empty corpus")
        labels = check_labels(y, len(docs))
        self.classes_ = sorted(set(labels))
        rng = np.random.default_rng(self.random_state)

        if self.embeddings is None:
            vocab = sorted({t for doc in docs for t in doc})
            self.vocab_ = {t: i for i, t in enumerate(vocab)}
            self.input_ = rng.uniform(-1.0 / self.dim, 1.0 / self.dim, size=(len(vocab), self.dim))
            self._trainable = True
        else:
            words = sorted(self.embeddings.vectors)
            self.vocab_ = {t: i for i, t in enumerate(words)}
            self.input_ = np.vstack([self.embeddings.vectors[w] for w in words]).astype(np.float64)
            self._trainable = not self.freeze_embeddings
        dim = self.input_.shape[1]

        n_classes = len(self.classes_)
        class_index = {c: i for i, c in enumerate(self.classes_)}
        targets = np.array([class_index[lab] for lab in labels])
        doc_rows = [self._doc_rows(doc) for doc in docs]

        self.output_ = np.zeros((n_classes, dim))
        self.bias_ = np.zeros(n_classes)

        total_steps = self.epochs * len(docs)
        step = 0
        for _ in range(self.epochs):
            order = rng.permutation(len(docs))
            for idx in order:
                lr = self.lr0 * (1.0 - step / total_steps)
                step += 1
                rows = doc_rows[idx]
                hidden = self._hidden(rows)
                probs = softmax(self.output_ @ hidden + self.bias_)
                grad_logits = probs
                grad_logits[targets[idx]] -= 1.0
                if self._trainable and len(rows):
                    grad_hidden = self.output_.T @ grad_logits
                    np.add.at(self.input_, rows, -lr * grad_hidden / len(rows))
                self.output_ -= lr * np.outer(grad_logits, hidden)
                self.bias_ -= lr * grad_logits
        return self

    # -- inference ----------------------------------------------------------

    def predict_proba(self, X: Sequence[Sequence[str]]) -> np.ndarray:
        check_fitted(self, "output_")
        docs = check_token_docs(X)
        out = np.empty((len(docs), len(self.classes_)))
        for i, doc in enumerate(docs):
            hidden = self._hidden(self._doc_rows(doc))
            out[i] = softmax(self.output_ @ hidden + self.bias_)
        return out

    def predict(self, X: Sequence[Sequence[str]]) -> list[str]:
        probs = self.predict_proba(X)
        return [self.classes_[j] for j in np.argmax(probs, axis=1)]

    # -- persistence ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        check_fitted(self, "output_")
        params = self.get_params()
        params.pop("embeddings")  # the trained table is stored explicitly
        return {
            "params": params,
            "classes": list(self.classes_),
            "vocab": self.vocab_,
            "input": self.input_.tolist(),
            "output": self.output_.tolist(),
            "bias": self.bias_.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d) -> "LinearSoftmaxClassifier":
        model = cls(**d["params"])
        model.classes_ = list(d["classes"])
        model.vocab_ = dict(d["vocab"])
        model.input_ = np.asarray(d["input"], dtype=np.float64)
        model.output_ = np.asarray(d["output"], dtype=np.float64)
        model.bias_ = np.asarray(d["bias"], dtype=np.float64)
        model._trainable = False
        return model

    # -- diagnostics ---------------------------------------------------------

    def loss_and_gradients(
        self, X: Sequence[Sequence[str]], y
    ) -> tuple[float, np.ndarray, np.ndarray]:
        """Mean cross-entropy and its full-batch gradients w.r.t. the output
        layer and bias. Used by the finite-difference gradient checks."""
        check_fitted(self, "output_")
        docs = check_token_docs(X)
        labels = check_labels(y, len(docs))
        class_index = {c: i for i, c in enumerate(self.classes_)}
        grad_w = np.zeros_like(self.output_)
        grad_b = np.zeros_like(self.bias_)
        loss = 0.0
        for doc, lab in zip(docs, labels):
            hidden = self._hidden(self._doc_rows(doc))
            probs = softmax(self.output_ @ hidden + self.bias_)
            target = class_index[lab]
            loss -= float(np.log(max(probs[target], 1e-300)))
            grad_logits = probs.copy()
            grad_logits[target] -= 1.0
            grad_w += np.outer(grad_logits, hidden)
            grad_b += grad_logits
        n = len(docs)
        return loss / n, grad_w / n, grad_b / n
