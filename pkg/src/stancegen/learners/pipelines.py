"""End-to-end text classification pipelines and grid search.

Three systems, each bound to the preprocessing recipe it was designed for:

* tfidf-svm: Type A text, unigram TF-IDF, information-gain selection, RBF SVM.
* embedding-svm: Type B text, averaged pre-trained vectors, RBF SVM.
* softmax: Type B text, averaged vectors (trainable or loaded) + linear softmax.

Grid search scores F1_avg on a development corpus, or the mean over
stratified folds of the training set when no development split exists.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from ..corpus import Corpus, StanceLabel
from ..evaluation import PredictionSet, score
from ..textprep import PreprocessResources, PreprocessType, preprocess
from .embeddings import EmbeddingTable, embed_matrix
from .softmax import LinearSoftmaxClassifier
from .svm import SmoSvmClassifier
from .tfidf import TfidfVectorizer, information_gain, select_positive

# Superset of every optimum used by the reference experiments.
DEFAULT_C_GRID = (10.0, 100.0, 300.0, 500.0, 700.0, 1000.0)
DEFAULT_GAMMA_GRID = (0.0001, 0.001, 0.01, 0.1, 0.75, 1.0)


def tokenize_corpus(
    corpus: Corpus,
    recipe: PreprocessType,
    resources: Optional[PreprocessResources],
    language: Optional[str] = None,
) -> list[list[str]]:
    lang = language or corpus.language
    return [
        preprocess(item.tweet.text, recipe, resources, lang).split()
        for item in corpus
    ]


def corpus_labels(corpus: Corpus) -> list[str]:
    labels = []
    for item in corpus:
        if item.label is None:
            raise ValueError(f"item {item.tweet.id!r} is unlabeled")
        labels.append(item.label.value)
    return labels


class TfidfSvmPipeline:
    """Type A text -> TF-IDF -> IG selection -> RBF (or linear) SVM."""

    recipe = PreprocessType.A

    def __init__(
        self,
        resources: PreprocessResources,
        C: float = 500.0,
        gamma: float = 0.001,
        kernel: str = "rbf",
        use_information_gain: bool = True,
        language: Optional[str] = None,
        random_state: int = 0,
    ):
        self.resources = resources
        self.C = C
        self.gamma = gamma
        self.kernel = kernel
        self.use_information_gain = use_information_gain
        self.language = language
        self.random_state = random_state

    def fit(self, train: Corpus) -> "TfidfSvmPipeline":
        docs = tokenize_corpus(train, self.recipe, self.resources, self.language)
        labels = corpus_labels(train)
        vec = TfidfVectorizer().fit(docs)
        if self.use_information_gain:
            vec = select_positive(vec, information_gain(docs, labels))
        self.vectorizer_ = vec
        self.model_ = SmoSvmClassifier(
            C=self.C, gamma=self.gamma, kernel=self.kernel, random_state=self.random_state
        ).fit(vec.transform(docs), labels)
        return self

    def predict_corpus(self, corpus: Corpus, system: Optional[str] = None) -> PredictionSet:
        docs = tokenize_corpus(corpus, self.recipe, self.resources, self.language)
        predicted = self.model_.predict(self.vectorizer_.transform(docs))
        return PredictionSet(
            system=system or "tfidf-svm",
            predictions={tid: StanceLabel(p) for tid, p in zip(corpus.ids(), predicted)},
        )


class EmbeddingSvmPipeline:
    """Type B text -> averaged pre-trained vectors -> RBF SVM."""

    recipe = PreprocessType.B

    def __init__(
        self,
        resources: PreprocessResources,
        table: EmbeddingTable,
        C: float = 100.0,
        gamma: float = 1.0,
        kernel: str = "rbf",
        language: Optional[str] = None,
        random_state: int = 0,
    ):
        self.resources = resources
        self.table = table
        self.C = C
        self.gamma = gamma
        self.kernel = kernel
        self.language = language
        self.random_state = random_state

    def fit(self, train: Corpus) -> "EmbeddingSvmPipeline":
        docs = tokenize_corpus(train, self.recipe, self.resources, self.language)
        self.model_ = SmoSvmClassifier(
            C=self.C, gamma=self.gamma, kernel=self.kernel, random_state=self.random_state
        ).fit(embed_matrix(docs, self.table), corpus_labels(train))
        return self

    def predict_corpus(self, corpus: Corpus, system: Optional[str] = None) -> PredictionSet:
        docs = tokenize_corpus(corpus, self.recipe, self.resources, self.language)
        predicted = self.model_.predict(embed_matrix(docs, self.table))
        return PredictionSet(
            system=system or "embedding-svm",
            predictions={tid: StanceLabel(p) for tid, p in zip(corpus.ids(), predicted)},
        )


class SoftmaxPipeline:
    """Type B text -> averaged vectors -> linear softmax classifier."""

    recipe = PreprocessType.B

    def __init__(
        self,
        resources: PreprocessResources,
        table: Optional[EmbeddingTable] = None,
        epochs: int = 20,
        lr0: float = 0.1,
        dim: int = 100,
        freeze_embeddings: bool = True,
        language: Optional[str] = None,
        random_state: int = 0,
    ):
        self.resources = resources
        self.table = table
        self.epochs = epochs
        self.lr0 = lr0
        self.dim = dim
        self.freeze_embeddings = freeze_embeddings
        self.language = language
        self.random_state = random_state

    def fit(self, train: Corpus) -> "SoftmaxPipeline":
        docs = tokenize_corpus(train, self.recipe, self.resources, self.language)
        self.model_ = LinearSoftmaxClassifier(
            epochs=self.epochs,
            lr0=self.lr0,
            dim=self.dim,
            embeddings=self.table,
            freeze_embeddings=self.freeze_embeddings,
            random_state=self.random_state,
        ).fit(docs, corpus_labels(train))
        return self

    def predict_corpus(self, corpus: Corpus, system: Optional[str] = None) -> PredictionSet:
        docs = tokenize_corpus(corpus, self.recipe, self.resources, self.language)
        predicted = self.model_.predict(docs)
        return PredictionSet(
            system=system or "softmax",
            predictions={tid: StanceLabel(p) for tid, p in zip(corpus.ids(), predicted)},
        )


# ---------------------------------------------------------------------------
# Model files: a versioned JSON envelope carrying the trained state, the
# preprocessing recipe and the hashes of the resource files used, so stored
# predictions stay reproducible.

PIPELINE_KINDS = {
    "tfidf-svm": TfidfSvmPipeline,
    "embedding-svm": EmbeddingSvmPipeline,
    "softmax": SoftmaxPipeline,
}


def save_pipeline(pipeline, path: str | Path) -> None:
    if isinstance(pipeline, TfidfSvmPipeline):
        kind = "tfidf-svm"
        model = {
            "vectorizer": pipeline.vectorizer_.to_json_dict(),
            "svm": pipeline.model_.to_json_dict(),
        }
        params = {
            "C": pipeline.C,
            "gamma": pipeline.gamma,
            "kernel": pipeline.kernel,
            "use_information_gain": pipeline.use_information_gain,
            "language": pipeline.language,
            "random_state": pipeline.random_state,
        }
    elif isinstance(pipeline, EmbeddingSvmPipeline):
        kind = "embedding-svm"
        model = {"table": pipeline.table.to_json_dict(), "svm": pipeline.model_.to_json_dict()}
        params = {
            "C": pipeline.C,
            "gamma": pipeline.gamma,
            "kernel": pipeline.kernel,
            "language": pipeline.language,
            "random_state": pipeline.random_state,
        }
    elif isinstance(pipeline, SoftmaxPipeline):
        kind = "softmax"
        model = {"classifier": pipeline.model_.to_json_dict()}
        params = {
            "epochs": pipeline.epochs,
            "lr0": pipeline.lr0,
            "dim": pipeline.dim,
            "freeze_embeddings": pipeline.freeze_embeddings,
            "language": pipeline.language,
            "random_state": pipeline.random_state,
        }
    else:
        raise TypeError(f"cannot serialize {type(pipeline).__name__}")
    payload = {
        "schema_version": 1,
        "kind": kind,
        "recipe": pipeline.recipe.value,
        "resource_hashes": dict(sorted(pipeline.resources.source_hashes.items())),
        "params": params,
        "model": model,
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_pipeline(path: str | Path, resources: PreprocessResources):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("schema_version") != 1:
        raise ValueError(f"unsupported model file version {payload.get('schema_version')!r}")
    kind = payload["kind"]
    params = payload["params"]
    if kind == "tfidf-svm":
        pipeline = TfidfSvmPipeline(resources=resources, **params)
        pipeline.vectorizer_ = TfidfVectorizer.from_json_dict(payload["model"]["vectorizer"])
        pipeline.model_ = SmoSvmClassifier.from_json_dict(payload["model"]["svm"])
    elif kind == "embedding-svm":
        table = EmbeddingTable.from_json_dict(payload["model"]["table"])
        pipeline = EmbeddingSvmPipeline(resources=resources, table=table, **params)
        pipeline.model_ = SmoSvmClassifier.from_json_dict(payload["model"]["svm"])
    elif kind == "softmax":
        pipeline = SoftmaxPipeline(resources=resources, **params)
        pipeline.model_ = LinearSoftmaxClassifier.from_json_dict(payload["model"]["classifier"])
    else:
        raise ValueError(f"unknown pipeline kind {kind!r}")
    stored = payload["resource_hashes"]
    current = resources.source_hashes
    stale = {k for k in stored if k in current and current[k] != stored[k]}
    if stale:
        warnings.warn(f"resource files changed since training: {sorted(stale)}", stacklevel=2)
    return pipeline


# ---------------------------------------------------------------------------
# Grid search.


@dataclass(frozen=True)
class KFoldSpec:
    """Stratified k-fold over the training corpus, for datasets with no dev split."""

    k: int = 5
    seed: int = 0


@dataclass
class GridResult:
    best_c: float
    best_gamma: float
    best_score: float
    cells: list[dict] = field(default_factory=list)


def _stratified_folds(corpus: Corpus, spec: KFoldSpec) -> list[tuple[Corpus, Corpus]]:
    rng = np.random.default_rng(spec.seed)
    by_label: dict[str, list[int]] = {}
    for i, item in enumerate(corpus):
        by_label.setdefault(item.label.value if item.label else "", []).append(i)
    fold_of = np.empty(len(corpus), dtype=int)
    for indices in by_label.values():
        order = rng.permutation(len(indices))
        for pos, j in enumerate(order):
            fold_of[indices[j]] = pos % spec.k
    folds = []
    for f in range(spec.k):
        train_items = [it for i, it in enumerate(corpus.items) if fold_of[i] != f]
        dev_items = [it for i, it in enumerate(corpus.items) if fold_of[i] == f]
        if not dev_items or not train_items:
            continue
        folds.append((corpus.subset(train_items, name=f"fold{f}-train"),
                      corpus.subset(dev_items, name=f"fold{f}-dev")))
    return folds


def grid_search(
    train: Corpus,
    dev: Corpus | KFoldSpec,
    factory: Callable[[float, float], object],
    c_values: Sequence[float] = DEFAULT_C_GRID,
    gamma_values: Sequence[float] = DEFAULT_GAMMA_GRID,
) -> GridResult:
    """Train one pipeline per (C, gamma) cell and keep the best dev F1_avg.

    Ties resolve to the smaller C, then the smaller gamma, which the
    iteration order guarantees with a strict improvement test.
    """
    if not c_values or not gamma_values:
        raise ValueError("the grid must contain at least one cell")
    if isinstance(dev, KFoldSpec):
        folds = _stratified_folds(train, dev)
    else:
        folds = [(train, dev)]
    result = GridResult(best_c=float("nan"), best_gamma=float("nan"), best_score=-1.0)
    for c in sorted(c_values):
        for gamma in sorted(gamma_values):
            scores = []
            for fold_train, fold_dev in folds:
                pipeline = factory(c, gamma)
                pipeline.fit(fold_train)
                report = score(fold_dev, pipeline.predict_corpus(fold_dev))
                scores.append(report.f1_avg)
            mean_score = float(np.mean(scores))
            result.cells.append({"C": c, "gamma": gamma, "f1_avg": mean_score})
            if mean_score > result.best_score:
                result.best_c, result.best_gamma, result.best_score = c, gamma, mean_score
    return result
