"""Curation state: the three human decision points plus live projections.

State is reconstructed from a workspace (tweets, retweet graph, optional
topic model) plus an append-only event log of curator decisions. Every
mutation is persisted and fsynced before it is acknowledged, so a crash
restores exactly the acknowledged state.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..corpus import (
    AccountLabel,
    Corpus,
    PIPELINE_SCHEMA,
    StanceLabel,
    distribution,
    load_corpus,
    parse_label,
)
from ..lda import TopicModel, select_by_topics
from ..lexicon import TopicLexicon, extract_hashtags, filter_on_topic
from ..propagation import PropagationConfig, build_retweet_graph, project_labels, propagate
from ..splits import assemble_balanced
from ..textprep import PreprocessType, load_default_resources, preprocess

SNAPSHOT_EVERY = 100
PREVIEW_CAP = 200_000


class StateError(Exception):
    def __init__(self, code: int, message: str, details: Optional[list] = None):
        self.code = code
        self.message = message
        self.details = details or []
        super().__init__(message)


@dataclass
class UserCard:
    author_id: str
    tweet_count: int
    retweeted_by_count: int
    sample: list[str]
    label: Optional[str]

    def to_json_dict(self) -> dict:
        return {
            "author_id": self.author_id,
            "tweet_count": self.tweet_count,
            "retweeted_by_count": self.retweeted_by_count,
            "sample": self.sample,
            "label": self.label,
        }


class CurationState:
    def __init__(self, workspace: Path):
        self.workspace = Path(workspace)
        raw_path = self.workspace / "ingest" / "raw_tweets.tsv"
        if not raw_path.exists():
            raise StateError(409, f"workspace has no ingested tweets at {raw_path}")
        self.corpus = load_corpus(raw_path, PIPELINE_SCHEMA).corpus
        self.tweets = self.corpus.tweets()
        self.graph = build_retweet_graph(self.tweets)
        self.by_author: dict[str, list] = {}
        for tweet in self.tweets:
            if tweet.author_id:
                self.by_author.setdefault(tweet.author_id, []).append(tweet)
        self.resources = load_default_resources()
        self._load_topic_models()

        self.version = 0
        self.labels: dict[str, StanceLabel] = {}
        self.accepted_hashtags: list[str] = []
        self.accepted_topics: dict[str, list[int]] = {}
        self.min_share: float = 0.5
        self._lock = threading.Lock()
        self._curation_dir = self.workspace / "curation"
        self._curation_dir.mkdir(parents=True, exist_ok=True)
        self._events_path = self._curation_dir / "events.jsonl"
        self._snapshot_path = self._curation_dir / "snapshot.json"
        self._replay()

    # -- persistence ---------------------------------------------------------

    def _replay(self) -> None:
        if self._snapshot_path.exists():
            snap = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            self._restore(snap)
        if self._events_path.exists():
            for line in self._events_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["version"] > self.version:
                    self._apply(event)

    def _restore(self, snap: dict) -> None:
        self.version = snap["version"]
        self.labels = {a: parse_label(l) for a, l in snap["labels"].items()}
        self.accepted_hashtags = list(snap["accepted_hashtags"])
        self.accepted_topics = {k: list(v) for k, v in snap["accepted_topics"].items()}
        self.min_share = snap.get("min_share", 0.5)

    def _snapshot_dict(self) -> dict:
        return {
            "version": self.version,
            "labels": {a: l.value for a, l in sorted(self.labels.items())},
            "accepted_hashtags": list(self.accepted_hashtags),
            "accepted_topics": self.accepted_topics,
            "min_share": self.min_share,
        }

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        payload = event["payload"]
        if kind == "user-label":
            self.labels[payload["author_id"]] = parse_label(payload["label"])
        elif kind == "hashtag-selection":
            self.accepted_hashtags = list(payload["accepted"])
        elif kind == "topic-selection":
            self.accepted_topics[payload["language"]] = [int(k) for k in payload["accepted"]]
            self.min_share = float(payload.get("min_share", self.min_share))
        else:
            raise StateError(500, f"unknown event type {kind!r}")
        self.version = event["version"]

    def _commit(self, kind: str, payload: dict) -> int:
        event = {"version": self.version + 1, "type": kind, "payload": payload}
        with self._events_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._apply(event)
        if self.version % SNAPSHOT_EVERY == 0:
            self._snapshot_path.write_text(
                json.dumps(self._snapshot_dict(), indent=1, sort_keys=True), encoding="utf-8"
            )
        return self.version

    # -- topic models ----------------------------------------------------------

    def _load_topic_models(self) -> None:
        """Load per-language models plus the index-aligned training pools."""
        self.topic_models: dict[str, TopicModel] = {}
        self.topic_pools: dict[str, Corpus] = {}
        lda_dir = self.workspace / "lda"
        prop_dir = self.workspace / "propagate"
        if not lda_dir.exists():
            return
        for model_path in sorted(lda_dir.glob("model_*.json")):
            lang = model_path.stem.split("_", 1)[1]
            labeled_path = prop_dir / f"labeled_{lang}.tsv"
            if not labeled_path.exists():
                continue
            model = TopicModel.load(model_path)
            labeled = load_corpus(labeled_path, PIPELINE_SCHEMA, language=lang).corpus
            kept = []
            for item in labeled:
                tokens = preprocess(item.tweet.text, PreprocessType.A, self.resources, lang).split()
                if tokens:
                    kept.append(item)
            pool = labeled.subset(kept)
            if len(pool) == model.num_docs:
                self.topic_models[lang] = model
                self.topic_pools[lang] = pool

    # -- projections -----------------------------------------------------------

    def current_lexicon(self) -> Optional[TopicLexicon]:
        if not self.accepted_hashtags:
            return None
        return TopicLexicon.build(hashtags=self.accepted_hashtags)

    def _labeled_accounts(self) -> list[AccountLabel]:
        seeds = [AccountLabel(author_id=a, label=l) for a, l in sorted(self.labels.items())]
        if not seeds:
            return []
        return propagate(self.graph, seeds, PropagationConfig(max_hops=1))

    def propagation_preview(self) -> dict[str, int]:
        """Accounts reachable by one propagation hop, per resulting label."""
        counts = {lab.value: 0 for lab in StanceLabel}
        for account in self._labeled_accounts():
            if account.provenance == "propagated":
                counts[account.label.value] += 1
        return counts

    def labeled_corpus(self) -> Corpus:
        accounts = self._labeled_accounts()
        items = project_labels(self.tweets[:PREVIEW_CAP], accounts)
        return Corpus.from_items(items, name="projection", language="mixed")

    def distribution_projection(self) -> dict:
        """Label counts of the corpus as it would be assembled right now:
        projected labels, restricted to the accepted lexicon."""
        labeled = self.labeled_corpus()
        lexicon = self.current_lexicon()
        if lexicon is None or not len(labeled):
            zero = {lab.value: 0 for lab in StanceLabel}
            return {"counts": zero, "total": 0}
        ontopic, dist = filter_on_topic(labeled, lexicon)
        return dist.to_json_dict()

    # -- queries ---------------------------------------------------------------

    def state_summary(self) -> dict:
        return {
            "version": self.version,
            "tweets": len(self.tweets),
            "authors": len(self.by_author),
            "manual_labels": len(self.labels),
            "accepted_hashtags": list(self.accepted_hashtags),
            "accepted_topics": self.accepted_topics,
            "topic_model_languages": sorted(self.topic_models),
        }

    def user_queue(self, limit: int, offset: int) -> list[UserCard]:
        lexicon = self.current_lexicon()
        ranked = sorted(
            self.by_author.items(), key=lambda kv: (-len(kv[1]), kv[0])
        )
        out = []
        for author, tweets in ranked[offset : offset + max(limit, 0)]:
            sample_pool = tweets
            if lexicon is not None:
                from ..lexicon import match_topic

                ontopic = [t for t in tweets if match_topic(t, lexicon)]
                if ontopic:
                    sample_pool = ontopic
            recent = sorted(sample_pool, key=lambda t: t.created_at or "", reverse=True)[:20]
            sample = [preprocess(t.text, PreprocessType.D) for t in recent]
            label = self.labels.get(author)
            out.append(
                UserCard(
                    author_id=author,
                    tweet_count=len(tweets),
                    retweeted_by_count=self.graph.in_degree(author),
                    sample=sample,
                    label=label.value if label else None,
                )
            )
        return out

    def hashtag_candidates(self, min_freq: int) -> list[dict]:
        accepted = set(self.accepted_hashtags)
        ranked = extract_hashtags(self.corpus)
        return [
            {"tag": tag, "count": count, "accepted": tag in accepted}
            for tag, count in ranked
            if count >= min_freq
        ]

    def topics_view(self) -> dict:
        if not self.topic_models:
            raise StateError(409, "no topic model in the workspace")
        out = {}
        for lang, model in sorted(self.topic_models.items()):
            accepted = set(self.accepted_topics.get(lang, []))
            out[lang] = [
                {
                    "topic": k,
                    "top_words": [[w, p] for w, p in model.top_words(k, 15)],
                    "accepted": k in accepted,
                }
                for k in range(model.num_topics)
            ]
        return out

    def topic_preview(self) -> dict:
        """Tweets recoverable per label under the accepted topics, counted
        only for the labels currently under-represented on topic."""
        preview = {lab.value: 0 for lab in StanceLabel}
        lexicon = self.current_lexicon()
        for lang, model in self.topic_models.items():
            accepted = set(self.accepted_topics.get(lang, []))
            if not accepted:
                continue
            pool = self.topic_pools[lang]
            selected = select_by_topics(pool, model, accepted, min_share=self.min_share)
            known = set()
            under = set(StanceLabel)
            if lexicon is not None and len(pool):
                ontopic, dist = filter_on_topic(pool, lexicon)
                known = set(ontopic.ids())
                if dist.total:
                    top = max(dist.counts.values())
                    under = {lab for lab in StanceLabel if dist.get(lab) < top}
            for item in selected:
                if item.tweet.id not in known and item.label in under:
                    preview[item.label.value] += 1
        return preview

    def assemble_preview(self, target_total: int, min_words: int) -> dict:
        labeled = self.labeled_corpus()
        lexicon = self.current_lexicon()
        if lexicon is None or not len(labeled):
            return {"counts": {lab.value: 0 for lab in StanceLabel}, "total": 0}
        ontopic, _ = filter_on_topic(labeled, lexicon)
        if len(ontopic) < 3 or target_total < 3:
            return {"counts": {lab.value: 0 for lab in StanceLabel}, "total": 0}
        balanced = assemble_balanced(ontopic, target_total=target_total, min_words=min_words)
        return distribution(balanced).to_json_dict()

    # -- mutations ---------------------------------------------------------------

    def set_user_label(self, author_id: str, label_token: str) -> dict:
        with self._lock:
            if author_id not in self.by_author:
                raise StateError(404, f"unknown author {author_id!r}")
            try:
                label = parse_label(label_token)
            except ValueError as exc:
                raise StateError(422, str(exc)) from exc
            version = self._commit("user-label", {"author_id": author_id, "label": label.value})
            return {
                "author_id": author_id,
                "label": label.value,
                "state_version": version,
                "propagation_preview": self.propagation_preview(),
                "distribution": self.distribution_projection(),
            }

    def set_hashtag_selection(self, accepted: list[str]) -> dict:
        with self._lock:
            known = {tag for tag, _ in extract_hashtags(self.corpus)}
            normalized = [TopicLexicon.build(hashtags=[t]).hashtags for t in accepted]
            flat = sorted({tag for s in normalized for tag in s})
            unknown = sorted(set(flat) - known)
            if unknown:
                raise StateError(422, "unknown hashtags", details=unknown)
            version = self._commit("hashtag-selection", {"accepted": flat})
            return {
                "state_version": version,
                "lexicon": {"hashtags": flat, "keywords": []},
                "distribution": self.distribution_projection(),
            }

    def set_topic_selection(self, language: str, accepted: list[int], min_share: float) -> dict:
        with self._lock:
            if language not in self.topic_models:
                raise StateError(409, f"no topic model for language {language!r}")
            model = self.topic_models[language]
            bad = [k for k in accepted if not 0 <= int(k) < model.num_topics]
            if bad:
                raise StateError(422, "invalid topic ids", details=[str(b) for b in bad])
            version = self._commit(
                "topic-selection",
                {"language": language, "accepted": [int(k) for k in accepted], "min_share": min_share},
            )
            return {
                "state_version": version,
                "preview": self.topic_preview(),
            }
