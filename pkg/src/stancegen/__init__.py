"""stancegen: semi-automatic stance-detection corpus generation and benchmarking.

The package covers the whole workflow: ingesting raw tweet dumps, expanding
a handful of manually labeled accounts along retweet edges, topic filtering
by curated hashtags and by LDA, balanced corpus assembly with proportional
and user-disjoint splits, classical classifier baselines, and the
FAVOR/AGAINST-averaged F1 evaluation with error-analysis tooling. A CLI
(`stancegen`) drives reproducible pipeline runs; an HTTP service hosts the
human-in-the-loop curation steps.
"""

from .corpus import (
    AccountLabel,
    ClassDistribution,
    ColumnSchema,
    Corpus,
    LabeledTweet,
    StanceLabel,
    Tweet,
    distribution,
    load_corpus,
    save_corpus,
)
from .evaluation import PredictionSet, ScoreReport, majority_error_set, score, upperbound
from .ingest import IngestReport, dedup_and_filter, detect_language
from .lda import LdaConfig, TopicModel, select_by_topics, train_lda
from .lexicon import TopicLexicon, extract_hashtags, filter_on_topic, match_topic
from .propagation import PropagationConfig, RetweetGraph, build_retweet_graph, project_labels, propagate
from .splits import DatasetSplit, SplitSpec, assemble_balanced, split_proportional, split_user_disjoint
from .textprep import PreprocessResources, PreprocessType, preprocess

__version__ = "0.1.0"

__all__ = [
    "AccountLabel",
    "ClassDistribution",
    "ColumnSchema",
    "Corpus",
    "DatasetSplit",
    "IngestReport",
    "LabeledTweet",
    "LdaConfig",
    "PredictionSet",
    "PreprocessResources",
    "PreprocessType",
    "PropagationConfig",
    "RetweetGraph",
    "ScoreReport",
    "SplitSpec",
    "StanceLabel",
    "TopicLexicon",
    "TopicModel",
    "Tweet",
    "assemble_balanced",
    "build_retweet_graph",
    "dedup_and_filter",
    "detect_language",
    "distribution",
    "extract_hashtags",
    "filter_on_topic",
    "load_corpus",
    "majority_error_set",
    "match_topic",
    "preprocess",
    "project_labels",
    "propagate",
    "save_corpus",
    "score",
    "select_by_topics",
    "split_proportional",
    "split_user_disjoint",
    "train_lda",
    "upperbound",
]
