"""Latent Dirichlet Allocation by collapsed Gibbs sampling.

Used to recover extra on-topic tweets for under-populated classes: train on
the labeled pool, review topics by their top words, then keep documents
dominated by the accepted topics.

Sampling state is exact integer counts; a token's topic is resampled from

    p(z = k) ∝ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)

with the token's own assignment removed. The RNG is numpy's PCG64; one
uniform draw per token through the inverse CDF, so equal seeds give
bit-identical count matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import lgamma
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .corpus import Corpus


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 20
    alpha: Optional[float] = None  # defaults to 50/K, the classic heuristic
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_topics < 2:
            raise ValueError("num_topics must be >= 2")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")

    @property
    def effective_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 50.0 / self.num_topics

    def to_json_dict(self) -> dict:
        return {
            "num_topics": self.num_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, d) -> "LdaConfig":
        return cls(**d)


class TopicModel:
    """Trained LDA state: vocabulary, count matrices and token assignments."""

    def __init__(
        self,
        vocabulary: dict[str, int],
        topic_word_counts: np.ndarray,
        doc_topic_counts: np.ndarray,
        topic_totals: np.ndarray,
        assignments: list[np.ndarray],
        config: LdaConfig,
        log_likelihoods: Optional[list[float]] = None,
    ):
        self.vocabulary = vocabulary
        self.topic_word_counts = topic_word_counts
        self.doc_topic_counts = doc_topic_counts
        self.topic_totals = topic_totals
        self.assignments = assignments
        self.config = config
        self.log_likelihoods = log_likelihoods or []

    @property
    def num_topics(self) -> int:
        return self.config.num_topics

    @property
    def num_docs(self) -> int:
        return self.doc_topic_counts.shape[0]

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def check_invariants(self) -> None:
        if not np.array_equal(self.topic_word_counts.sum(axis=1), self.topic_totals):
            raise AssertionError("topic_word_counts rows do not sum to topic_totals")
        doc_lengths = np.array([len(z) for z in self.assignments])
        if not np.array_equal(self.doc_topic_counts.sum(axis=1), doc_lengths):
            raise AssertionError("doc_topic_counts rows do not sum to document lengths")
        for z in self.assignments:
            if len(z) and (z.min() < 0 or z.max() >= self.num_topics):
                raise AssertionError("assignment outside [0, K)")
        if (self.topic_word_counts < 0).any() or (self.doc_topic_counts < 0).any():
            raise AssertionError("negative count")

    def top_words(self, topic: int, n: int) -> list[tuple[str, float]]:
        """The n most probable tokens of a topic, ties broken lexicographically."""
        if not 0 <= topic < self.num_topics:
            raise IndexError(f"topic {topic} out of range [0, {self.num_topics})")
        if n <= 0:
            return []
        beta = self.config.beta
        denom = self.topic_totals[topic] + self.vocab_size * beta
        inv_vocab = sorted(self.vocabulary.items(), key=lambda kv: kv[1])
        scored = [
            (token, (self.topic_word_counts[topic, idx] + beta) / denom)
            for token, idx in inv_vocab
        ]
        scored.sort(key=lambda ts: (-ts[1], ts[0]))
        return scored[: min(n, self.vocab_size)]

    def dominant_topic(self, doc_index: int) -> tuple[int, float]:
        """(argmax topic, its share of the document); ties pick the lowest id."""
        if not 0 <= doc_index < self.num_docs:
            raise IndexError(f"doc index {doc_index} out of range")
        row = self.doc_topic_counts[doc_index]
        topic = int(np.argmax(row))
        length = int(row.sum())
        share = float(row[topic] / length) if length else 0.0
        return topic, share

    def log_likelihood(self) -> float:
        """Collapsed log joint p(w, z); useful as a convergence diagnostic."""
        k, v = self.num_topics, self.vocab_size
        alpha, beta = self.config.effective_alpha, self.config.beta
        d = self.num_docs
        lengths = self.doc_topic_counts.sum(axis=1)
        ll = k * (lgamma(v * beta) - v * lgamma(beta))
        ll += float(gammaln(self.topic_word_counts + beta).sum())
        ll -= float(gammaln(self.topic_totals + v * beta).sum())
        ll += d * (lgamma(k * alpha) - k * lgamma(alpha))
        ll += float(gammaln(self.doc_topic_counts + alpha).sum())
        ll -= float(gammaln(lengths + k * alpha).sum())
        return ll

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "vocabulary": self.vocabulary,
            "topic_word_counts": self.topic_word_counts.tolist(),
            "doc_topic_counts": self.doc_topic_counts.tolist(),
            "topic_totals": self.topic_totals.tolist(),
            "assignments": [z.tolist() for z in self.assignments],
            "config": self.config.to_json_dict(),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()), encoding="utf-8")

    @classmethod
    def from_json_dict(cls, d) -> "TopicModel":
        return cls(
            vocabulary=d["vocabulary"],
            topic_word_counts=np.array(d["topic_word_counts"], dtype=np.int64),
            doc_topic_counts=np.array(d["doc_topic_counts"], dtype=np.int64),
            topic_totals=np.array(d["topic_totals"], dtype=np.int64),
            assignments=[np.array(z, dtype=np.int64) for z in d["assignments"]],
            config=LdaConfig.from_json_dict(d["config"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train_lda(
    docs: Sequence[Sequence[str]],
    config: LdaConfig,
    validate_every_sweep: bool = False,
    track_likelihood: bool = True,
) -> TopicModel:
    """Run collapsed Gibbs sampling for config.iterations full sweeps."""
    if not docs:
        raise ValueError("no documents")
    if any(len(doc) == 0 for doc in docs):
        raise ValueError("every document needs at least one token")
    vocabulary: dict[str, int] = {}
    for doc in docs:
        for token in doc:
            vocabulary.setdefault(token, len(vocabulary))
    if not vocabulary:
        raise ValueError("empty vocabulary")

    k = config.num_topics
    v = len(vocabulary)
    alpha = config.effective_alpha
    beta = config.beta
    rng = np.random.Generator(np.random.PCG64(config.seed))

    word_ids = [np.array([vocabulary[t] for t in doc], dtype=np.int64) for doc in docs]
    topic_word = np.zeros((k, v), dtype=np.int64)
    doc_topic = np.zeros((len(docs), k), dtype=np.int64)
    totals = np.zeros(k, dtype=np.int64)
    assignments: list[np.ndarray] = []
    for d, ids in enumerate(word_ids):
        z = rng.integers(0, k, size=len(ids))
        assignments.append(z)
        for w, t in zip(ids, z):
            topic_word[t, w] += 1
            doc_topic[d, t] += 1
            totals[t] += 1

    model = TopicModel(
        vocabulary=vocabulary,
        topic_word_counts=topic_word,
        doc_topic_counts=doc_topic,
        topic_totals=totals,
        assignments=assignments,
        config=config,
    )
    vbeta = v * beta
    for _ in range(config.iterations):
        for d, ids in enumerate(word_ids):
            z = assignments[d]
            dt = doc_topic[d]
            for i in range(len(ids)):
                w = ids[i]
                t = z[i]
                dt[t] -= 1
                topic_word[t, w] -= 1
                totals[t] -= 1
                weights = (dt + alpha) * (topic_word[:, w] + beta) / (totals + vbeta)
                cumulative = np.cumsum(weights)
                t_new = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
                if t_new >= k:  # guards the exact-upper-edge draw
                    t_new = k - 1
                z[i] = t_new
                dt[t_new] += 1
                topic_word[t_new, w] += 1
                totals[t_new] += 1
        if validate_every_sweep:
            model.check_invariants()
        if track_likelihood:
            model.log_likelihoods.append(model.log_likelihood())
    model.check_invariants()
    return model


def select_by_topics(
    corpus: Corpus,
    model: TopicModel,
    accepted_topics: set[int],
    min_share: float = 0.0,
) -> Corpus:
    """Keep tweets whose dominant topic is accepted with at least min_share.

    The model must have been trained on exactly this corpus's documents, in
    order (index alignment is all that ties them together).
    """
    if len(corpus) != model.num_docs:
        raise ValueError(
            f"corpus size {len(corpus)} does not match the model's {model.num_docs} documents"
        )
    bad = [t for t in accepted_topics if not 0 <= t < model.num_topics]
    if bad:
        raise IndexError(f"topics out of range: {sorted(bad)}")
    keep = []
    for i, item in enumerate(corpus):
        topic, share = model.dominant_topic(i)
        if topic in accepted_topics and share >= min_share:
            keep.append(item)
    return corpus.subset(keep, name=f"{corpus.name}-topics")
