"""Declarative pipeline runner: one config file reproduces one corpus build.

Stages run in a fixed order, each consuming the previous stages' artifacts
from the workspace and writing its own plus a manifest. All randomness
derives from the config seed, so a clean run is reproducible byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import yaml

from . import ingest as ingest_mod
from .corpus import PIPELINE_SCHEMA, Corpus, load_corpus, save_corpus
from .evaluation import PredictionSet, score
from .lda import LdaConfig, select_by_topics, train_lda
from .learners import (
    DEFAULT_C_GRID,
    DEFAULT_GAMMA_GRID,
    EmbeddingSvmPipeline,
    SoftmaxPipeline,
    TfidfSvmPipeline,
    grid_search,
    load_embeddings,
)
from .learners.pipelines import save_pipeline
from .lexicon import confirm_sources, extract_hashtags, filter_on_topic, load_lexicon
from .propagation import build_retweet_graph, load_seeds, propagate, project_labels, save_accounts
from .propagation import PropagationConfig
from .splits import SplitSpec, save_split, split_proportional, split_user_disjoint
from .textprep import PreprocessResources, PreprocessType, load_default_resources, preprocess
from .workspace import Manifest, Workspace

STAGE_ORDER = ("ingest", "propagate", "filter", "lda", "assemble", "split", "preprocess", "train", "score")
STAGE_DEPS = {
    "ingest": (),
    "propagate": ("ingest",),
    "filter": ("propagate",),
    "lda": ("filter",),
    "assemble": ("filter",),
    "split": ("assemble",),
    "preprocess": ("split",),
    "train": ("split",),
    "score": ("train",),
}


class ConfigError(Exception):
    """The run config is malformed; maps to exit code 2."""


class StageError(Exception):
    """A stage failed; maps to exit code 3."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {message}")


@dataclass
class RunConfig:
    workspace: Path
    seed: int
    languages: list[str]
    stages: dict[str, dict]
    resume: bool = False
    resources: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def resolve(self, value: str) -> Path:
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path


def load_run_config(
    path: str | Path,
    workspace: Optional[str | Path] = None,
    seed: Optional[int] = None,
    resume: Optional[bool] = None,
) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    stages = raw.get("stages")
    if not isinstance(stages, dict) or not stages:
        raise ConfigError("config needs a non-empty 'stages' mapping")
    unknown = sorted(set(stages) - set(STAGE_ORDER))
    if unknown:
        raise ConfigError(f"unknown stages: {unknown}")
    for stage in stages:
        for dep in STAGE_DEPS[stage]:
            if dep not in stages:
                raise ConfigError(f"stage {stage!r} requires stage {dep!r}")
        if stages[stage] is None:
            stages[stage] = {}
        elif not isinstance(stages[stage], dict):
            raise ConfigError(f"stage {stage!r} parameters must be a mapping")
    languages = raw.get("languages", ["es"])
    if not isinstance(languages, list) or not languages:
        raise ConfigError("'languages' must be a non-empty list")
    cfg = RunConfig(
        workspace=Path(workspace) if workspace else Path(raw.get("workspace", "workspace")),
        seed=int(seed if seed is not None else raw.get("seed", 0)),
        languages=[str(lang) for lang in languages],
        stages=stages,
        resume=bool(resume if resume is not None else raw.get("resume", False)),
        resources=raw.get("resources", {}) or {},
        base_dir=path.parent,
    )
    return cfg


def load_config_resources(cfg: RunConfig) -> PreprocessResources:
    resources = load_default_resources()
    for lang, p in (cfg.resources.get("stopwords") or {}).items():
        resources.load_stopwords_file(lang, cfg.resolve(p))
    for lang, p in (cfg.resources.get("lemmas") or {}).items():
        resources.load_lemmas_file(lang, cfg.resolve(p))
    return resources


# ---------------------------------------------------------------------------
# Stage implementations. Each returns (input_paths, output_paths).


def _load_lang_corpus(path: Path, language: str) -> Corpus:
    return load_corpus(path, PIPELINE_SCHEMA, language=language).corpus


def stage_ingest(cfg: RunConfig, ws: Workspace, params: dict):
    raw = cfg.resolve(params["raw"])
    if not raw.exists():
        raise StageError("ingest", f"raw input {raw} does not exist")
    out = ws.stage_dir("ingest")
    tweets = ingest_mod.parse_jsonl_tweets(raw)
    tweets = ingest_mod.assign_languages(tweets, min_confidence=float(params.get("min_confidence", 0.0)))
    from .corpus import LabeledTweet

    all_corpus = Corpus.from_items((LabeledTweet(t) for t in tweets), name="raw", language="mixed")
    save_corpus(all_corpus, out / "raw_tweets.tsv", PIPELINE_SCHEMA)
    kept, report = ingest_mod.dedup_and_filter(tweets, min_words=int(params.get("min_words", 3)))
    outputs = [out / "raw_tweets.tsv", out / "report.json"]
    for lang in cfg.languages:
        corpus = Corpus.from_items(
            (LabeledTweet(t) for t in kept if t.language == lang),
            name=f"clean-{lang}",
            language=lang,
        )
        path = out / f"clean_{lang}.tsv"
        save_corpus(corpus, path, PIPELINE_SCHEMA)
        outputs.append(path)
    (out / "report.json").write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    return [raw], outputs


def stage_propagate(cfg: RunConfig, ws: Workspace, params: dict):
    seeds_path = cfg.resolve(params["seeds"])
    if not seeds_path.exists():
        raise StageError("propagate", f"seeds file {seeds_path} does not exist")
    ingest_dir = ws.stage_dir("ingest")
    raw_path = ingest_dir / "raw_tweets.tsv"
    out = ws.stage_dir("propagate")
    # Relations come from the full dump: duplicates carry retweet edges too.
    raw = load_corpus(raw_path, PIPELINE_SCHEMA).corpus
    graph = build_retweet_graph(raw.tweets())
    seeds = load_seeds(seeds_path)
    prop_cfg = PropagationConfig(
        max_hops=int(params.get("max_hops", 1)),
        min_margin=float(params.get("min_margin", 0.6)),
        min_evidence=int(params.get("min_evidence", 1)),
    )
    accounts = propagate(graph, seeds, prop_cfg)
    save_accounts(accounts, out / "accounts.tsv")
    inputs = [seeds_path, raw_path]
    outputs = [out / "accounts.tsv"]
    for lang in cfg.languages:
        clean_path = ingest_dir / f"clean_{lang}.tsv"
        inputs.append(clean_path)
        clean = _load_lang_corpus(clean_path, lang)
        labeled = project_labels(clean.tweets(), accounts)
        corpus = Corpus.from_items(labeled, name=f"labeled-{lang}", language=lang)
        path = out / f"labeled_{lang}.tsv"
        save_corpus(corpus, path, PIPELINE_SCHEMA)
        outputs.append(path)
    return inputs, outputs


def stage_filter(cfg: RunConfig, ws: Workspace, params: dict):
    lexicon_path = cfg.resolve(params["lexicon"])
    if not lexicon_path.exists():
        raise StageError("filter", f"lexicon file {lexicon_path} does not exist")
    lexicon = load_lexicon(lexicon_path)
    out = ws.stage_dir("filter")
    inputs = [lexicon_path]
    outputs = []
    summary = {}
    for lang in cfg.languages:
        labeled_path = ws.stage_dir("propagate") / f"labeled_{lang}.tsv"
        inputs.append(labeled_path)
        labeled = _load_lang_corpus(labeled_path, lang)
        ontopic, dist = filter_on_topic(labeled, lexicon)
        ontopic = confirm_sources(ontopic, "hashtag-confirmed")
        path = out / f"ontopic_{lang}.tsv"
        save_corpus(ontopic, path, PIPELINE_SCHEMA)
        outputs.append(path)
        candidates = extract_hashtags(labeled)[: int(params.get("max_candidates", 500))]
        summary[lang] = {
            "distribution": dist.to_json_dict(),
            "candidate_hashtags": [[tag, count] for tag, count in candidates],
        }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
    outputs.append(out / "summary.json")
    return inputs, outputs


def _nonempty_token_corpus(corpus: Corpus, resources: PreprocessResources, language: str):
    docs, kept = [], []
    for item in corpus:
        tokens = preprocess(item.tweet.text, PreprocessType.A, resources, language).split()
        if tokens:
            docs.append(tokens)
            kept.append(item)
    return corpus.subset(kept), docs


def stage_lda(cfg: RunConfig, ws: Workspace, params: dict, resources: PreprocessResources):
    out = ws.stage_dir("lda")
    inputs, outputs = [], []
    summary = {}
    top_n = int(params.get("top_words", 15))
    min_share = float(params.get("min_share", 0.5))
    for lang in cfg.languages:
        labeled_path = ws.stage_dir("propagate") / f"labeled_{lang}.tsv"
        ontopic_path = ws.stage_dir("filter") / f"ontopic_{lang}.tsv"
        inputs += [labeled_path, ontopic_path]
        labeled = _load_lang_corpus(labeled_path, lang)
        ontopic = _load_lang_corpus(ontopic_path, lang)
        pool, docs = _nonempty_token_corpus(labeled, resources, lang)
        if not docs:
            raise StageError("lda", f"no usable documents for language {lang!r}")
        lda_cfg = LdaConfig(
            num_topics=int(params.get("num_topics", 20)),
            alpha=params.get("alpha"),
            beta=float(params.get("beta", 0.01)),
            iterations=int(params.get("iterations", 1000)),
            burn_in=int(params.get("burn_in", 200)),
            seed=cfg.seed,
        )
        model = train_lda(docs, lda_cfg, track_likelihood=False)
        model_path = out / f"model_{lang}.json"
        model.save(model_path)
        outputs.append(model_path)

        topics = {
            k: [[w, p] for w, p in model.top_words(k, top_n)] for k in range(model.num_topics)
        }
        accepted = params.get("accepted_topics")
        if accepted is None:
            anchors = {a.casefold() for a in params.get("anchors", [])}
            accepted = [
                k for k, words in topics.items() if {w for w, _ in words} & anchors
            ]
        accepted = sorted(int(k) for k in accepted)

        from .corpus import distribution as dist_fn

        ontopic_dist = dist_fn(ontopic) if len(ontopic) else None
        if ontopic_dist and ontopic_dist.total:
            max_count = max(ontopic_dist.counts.values())
            under = {lab for lab in ontopic_dist.counts if ontopic_dist.get(lab) < max_count}
        else:
            under = set(params.get("underrepresented", []))
        selected = select_by_topics(pool, model, set(accepted), min_share=min_share)
        known = set(ontopic.ids())
        extra = [
            item for item in selected
            if item.tweet.id not in known and (not under or item.label in under)
        ]
        extra_corpus = confirm_sources(pool.subset(extra, name=f"lda-{lang}"), "lda-confirmed")
        sel_path = out / f"selected_{lang}.tsv"
        save_corpus(extra_corpus, sel_path, PIPELINE_SCHEMA)
        outputs.append(sel_path)
        summary[lang] = {
            "topics": {str(k): words for k, words in topics.items()},
            "accepted_topics": accepted,
            "selected_count": len(extra_corpus),
        }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
    outputs.append(out / "summary.json")
    return inputs, outputs


def stage_assemble(cfg: RunConfig, ws: Workspace, params: dict):
    from .corpus import distribution as dist_fn
    from .splits import assemble_balanced

    out = ws.stage_dir("assemble")
    inputs, outputs = [], []
    summary = {}
    for lang in cfg.languages:
        ontopic_path = ws.stage_dir("filter") / f"ontopic_{lang}.tsv"
        inputs.append(ontopic_path)
        pool_items = list(_load_lang_corpus(ontopic_path, lang).items)
        lda_path = ws.stage_dir("lda") / f"selected_{lang}.tsv"
        if "lda" in cfg.stages and lda_path.exists():
            inputs.append(lda_path)
            pool_items += list(_load_lang_corpus(lda_path, lang).items)
        pool = Corpus.from_items(pool_items, name=f"pool-{lang}", language=lang)
        balanced = assemble_balanced(
            pool,
            target_total=int(params.get("target_total", 10000)),
            min_words=int(params.get("min_words", 4)),
            seed=cfg.seed,
        )
        path = out / f"balanced_{lang}.tsv"
        save_corpus(balanced, path, PIPELINE_SCHEMA)
        outputs.append(path)
        summary[lang] = {"pool": len(pool), "distribution": dist_fn(balanced).to_json_dict()}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
    outputs.append(out / "summary.json")
    return inputs, outputs


def stage_split(cfg: RunConfig, ws: Workspace, params: dict):
    out = ws.stage_dir("split")
    method = params.get("method", "user_disjoint")
    if method not in ("proportional", "user_disjoint"):
        raise StageError("split", f"unknown method {method!r}")
    spec = SplitSpec(
        ratios=tuple(params.get("ratios", (0.6, 0.2, 0.2))),
        seed=cfg.seed,
        size_tolerance=float(params.get("size_tolerance", 0.02)),
        label_tolerance=float(params.get("label_tolerance", 0.05)),
    )
    inputs, outputs = [], []
    for lang in cfg.languages:
        balanced_path = ws.stage_dir("assemble") / f"balanced_{lang}.tsv"
        inputs.append(balanced_path)
        corpus = _load_lang_corpus(balanced_path, lang)
        split = (split_user_disjoint if method == "user_disjoint" else split_proportional)(corpus, spec)
        lang_dir = out / lang
        save_split(split, lang_dir, PIPELINE_SCHEMA, save_corpus)
        outputs += [lang_dir / f"{part}.tsv" for part in ("train", "dev", "test")]
        outputs.append(lang_dir / "audit.json")
    return inputs, outputs


def stage_preprocess(cfg: RunConfig, ws: Workspace, params: dict, resources: PreprocessResources):
    out = ws.stage_dir("preprocess")
    types = [PreprocessType(t) for t in params.get("types", ["A", "B", "C", "D"])]
    inputs, outputs = [], []
    for lang in cfg.languages:
        for part in ("train", "dev", "test"):
            src = ws.stage_dir("split") / lang / f"{part}.tsv"
            inputs.append(src)
            corpus = _load_lang_corpus(src, lang)
            for recipe in types:
                rows = ["id\tlabel\ttext"]
                for item in corpus:
                    cleaned = preprocess(item.tweet.text, recipe, resources, lang)
                    rows.append(
                        "\t".join(
                            (
                                item.tweet.id,
                                item.label.value if item.label else "",
                                cleaned.replace("\t", " ").replace("\n", " "),
                            )
                        )
                    )
                path = out / lang / f"{part}_type{recipe.value}.tsv"
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text("\n".join(rows) + "\n", encoding="utf-8")
                outputs.append(path)
    return inputs, outputs


def _build_pipeline_factory(system: str, params: dict, resources: PreprocessResources, lang: str, seed: int):
    if system == "tfidf-svm":
        def factory(c, g):
            return TfidfSvmPipeline(
                resources,
                C=c,
                gamma=g,
                kernel=params.get("kernel", "rbf"),
                use_information_gain=bool(params.get("use_information_gain", True)),
                language=lang,
                random_state=seed,
            )
        return factory
    if system == "embedding-svm":
        table = load_embeddings(params["embeddings"])
        def factory(c, g):
            return EmbeddingSvmPipeline(
                resources, table, C=c, gamma=g, kernel=params.get("kernel", "rbf"),
                language=lang, random_state=seed,
            )
        return factory
    if system == "softmax":
        if params.get("bigrams"):
            # Config stub only: hashed bigram buckets are deliberately not
            # implemented (three classes, unigram averaging suffices).
            raise StageError("train", "bigram features are not supported; remove 'bigrams'")
        table = load_embeddings(params["embeddings"]) if params.get("embeddings") else None
        def factory(c, g):
            return SoftmaxPipeline(
                resources,
                table=table,
                epochs=int(params.get("epochs", 20)),
                lr0=float(params.get("lr0", 0.1)),
                dim=int(params.get("dim", 100)),
                freeze_embeddings=bool(params.get("freeze_embeddings", True)),
                language=lang,
                random_state=seed,
            )
        return factory
    raise StageError("train", f"unknown system {system!r}")


def stage_train(cfg: RunConfig, ws: Workspace, params: dict, resources: PreprocessResources):
    out = ws.stage_dir("train")
    lang = params.get("language", cfg.languages[0])
    split_dir = ws.stage_dir("split") / lang
    train = _load_lang_corpus(split_dir / "train.tsv", lang)
    dev = _load_lang_corpus(split_dir / "dev.tsv", lang)
    test = _load_lang_corpus(split_dir / "test.tsv", lang)
    system = params.get("system", "tfidf-svm")
    factory = _build_pipeline_factory(system, params, resources, lang, cfg.seed)
    inputs = [split_dir / "train.tsv", split_dir / "dev.tsv", split_dir / "test.tsv"]
    outputs = []
    if params.get("grid"):
        grid_params = params["grid"] if isinstance(params["grid"], dict) else {}
        result = grid_search(
            train,
            dev,
            factory,
            c_values=tuple(grid_params.get("c_values", DEFAULT_C_GRID)),
            gamma_values=tuple(grid_params.get("gamma_values", DEFAULT_GAMMA_GRID)),
        )
        best_c, best_gamma = result.best_c, result.best_gamma
        (out / "grid_report.json").write_text(
            json.dumps(
                {"best_c": best_c, "best_gamma": best_gamma, "cells": result.cells},
                indent=2,
                sort_keys=True,
            ),
            encoding="utf-8",
        )
        outputs.append(out / "grid_report.json")
    else:
        best_c = float(params.get("C", 500.0))
        best_gamma = float(params.get("gamma", 0.001))
    pipeline = factory(best_c, best_gamma)
    pipeline.fit(train)
    save_pipeline(pipeline, out / "model.json")
    predictions = pipeline.predict_corpus(test, system=system)
    predictions.to_tsv(out / "predictions_test.tsv")
    outputs += [out / "model.json", out / "predictions_test.tsv"]
    return inputs, outputs


def stage_score(cfg: RunConfig, ws: Workspace, params: dict):
    out = ws.stage_dir("score")
    lang = params.get("language") or cfg.stages.get("train", {}).get("language", cfg.languages[0])
    gold_path = ws.stage_dir("split") / lang / "test.tsv"
    pred_path = ws.stage_dir("train") / "predictions_test.tsv"
    gold = _load_lang_corpus(gold_path, lang)
    predictions = PredictionSet.from_tsv(pred_path)
    report = score(gold, predictions)
    (out / "report.json").write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    (out / "report.txt").write_text(report.to_text_table() + "\n", encoding="utf-8")
    return [gold_path, pred_path], [out / "report.json", out / "report.txt"]


def run(cfg: RunConfig, log: Callable[[str], None] = lambda msg: None) -> dict:
    """Execute the configured stages in order; returns a run report."""
    ws = Workspace(cfg.workspace)
    resources = load_config_resources(cfg)
    executed, skipped = [], []
    for stage in STAGE_ORDER:
        if stage not in cfg.stages:
            continue
        params = cfg.stages[stage]
        probe_inputs = _probe_inputs(cfg, ws, stage, params)
        if cfg.resume and ws.stage_is_fresh(stage, cfg.seed, params, probe_inputs):
            log(f"[{stage}] unchanged, skipping")
            skipped.append(stage)
            continue
        log(f"[{stage}] running")
        try:
            if stage == "ingest":
                inputs, outputs = stage_ingest(cfg, ws, params)
            elif stage == "propagate":
                inputs, outputs = stage_propagate(cfg, ws, params)
            elif stage == "filter":
                inputs, outputs = stage_filter(cfg, ws, params)
            elif stage == "lda":
                inputs, outputs = stage_lda(cfg, ws, params, resources)
            elif stage == "assemble":
                inputs, outputs = stage_assemble(cfg, ws, params)
            elif stage == "split":
                inputs, outputs = stage_split(cfg, ws, params)
            elif stage == "preprocess":
                inputs, outputs = stage_preprocess(cfg, ws, params, resources)
            elif stage == "train":
                inputs, outputs = stage_train(cfg, ws, params, resources)
            else:
                inputs, outputs = stage_score(cfg, ws, params)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, str(exc)) from exc
        manifest = Manifest(
            stage=stage,
            seed=cfg.seed,
            params=dict(params),
            inputs=ws.hash_inputs(inputs),
            outputs=ws.hash_inputs(outputs),
        )
        ws.write_manifest(manifest)
        executed.append(stage)
    return {"executed": executed, "skipped": skipped, "workspace": str(cfg.workspace)}


def _probe_inputs(cfg: RunConfig, ws: Workspace, stage: str, params: dict) -> list[Path]:
    """The input files a stage WOULD read, for freshness checks."""
    paths: list[Path] = []
    if stage == "ingest":
        paths.append(cfg.resolve(params["raw"]))
    elif stage == "propagate":
        paths.append(cfg.resolve(params["seeds"]))
        paths.append(ws.stage_dir("ingest") / "raw_tweets.tsv")
        paths += [ws.stage_dir("ingest") / f"clean_{lang}.tsv" for lang in cfg.languages]
    elif stage == "filter":
        paths.append(cfg.resolve(params["lexicon"]))
        paths += [ws.stage_dir("propagate") / f"labeled_{lang}.tsv" for lang in cfg.languages]
    elif stage == "lda":
        for lang in cfg.languages:
            paths.append(ws.stage_dir("propagate") / f"labeled_{lang}.tsv")
            paths.append(ws.stage_dir("filter") / f"ontopic_{lang}.tsv")
    elif stage == "assemble":
        for lang in cfg.languages:
            paths.append(ws.stage_dir("filter") / f"ontopic_{lang}.tsv")
            if "lda" in cfg.stages:
                paths.append(ws.stage_dir("lda") / f"selected_{lang}.tsv")
    elif stage == "split":
        paths += [ws.stage_dir("assemble") / f"balanced_{lang}.tsv" for lang in cfg.languages]
    elif stage == "preprocess":
        for lang in cfg.languages:
            paths += [ws.stage_dir("split") / lang / f"{part}.tsv" for part in ("train", "dev", "test")]
    elif stage == "train":
        lang = params.get("language", cfg.languages[0])
        paths += [ws.stage_dir("split") / lang / f"{part}.tsv" for part in ("train", "dev", "test")]
    elif stage == "score":
        lang = params.get("language") or cfg.stages.get("train", {}).get("language", cfg.languages[0])
        paths.append(ws.stage_dir("split") / lang / "test.tsv")
        paths.append(ws.stage_dir("train") / "predictions_test.tsv")
    return [p for p in paths if Path(p).exists()]
