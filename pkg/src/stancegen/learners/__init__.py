from .embeddings import EmbeddingTable, embed_average, embed_matrix, load_embeddings
from .pipelines import (
    DEFAULT_C_GRID,
    DEFAULT_GAMMA_GRID,
    EmbeddingSvmPipeline,
    GridResult,
    KFoldSpec,
    SoftmaxPipeline,
    TfidfSvmPipeline,
    grid_search,
    tokenize_corpus,
)
from .softmax import LinearSoftmaxClassifier, softmax
from .svm import SmoSvmClassifier, dual_objective, kkt_violation, smo_solve
from .tfidf import TfidfVectorizer, information_gain, normalize_scores, select_positive

__all__ = [
    "DEFAULT_C_GRID",
    "DEFAULT_GAMMA_GRID",
    "EmbeddingTable",
    "EmbeddingSvmPipeline",
    "GridResult",
    "KFoldSpec",
    "LinearSoftmaxClassifier",
    "SmoSvmClassifier",
    "SoftmaxPipeline",
    "TfidfSvmPipeline",
    "TfidfVectorizer",
    "dual_objective",
    "embed_average",
    "embed_matrix",
    "grid_search",
    "information_gain",
    "kkt_violation",
    "load_embeddings",
    "normalize_scores",
    "select_positive",
    "smo_solve",
    "softmax",
    "tokenize_corpus",
]
