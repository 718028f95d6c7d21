"""Seeded generators for synthetic fixtures.

Everything here is deterministic for a given seed: monolingual sentence
samples (from bundled word-frequency lists), planted-topic corpora for the
LDA oracle, homophilous two-community retweet graphs for the propagation
oracle, and the full demo dump that exercises the pipeline end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import StanceLabel
from .propagation import RetweetGraph

_WORDFREQ_DIR = Path(__file__).parent / "resources" / "wordfreq"

TOPIC_WORDS = {
    "es": (
        "independencia referendum republica cataluna constitucion tribunal "
        "presos urnas votar autodeterminacion amnistia soberania"
    ).split(),
    "ca": (
        "independencia referendum republica catalunya constitucio tribunal "
        "presos urnes votar autodeterminacio amnistia sobirania"
    ).split(),
}
OFFTOPIC_WORDS = {
    "es": "futbol cine lluvia playa cocina receta musica concierto gatos perros cafe libros".split(),
    "ca": "futbol cinema pluja platja cuina recepta musica concert gats gossos cafe llibres".split(),
}
FAVOR_TAGS = ("#independencia", "#republicacatalana", "#1oct", "#votarem")
AGAINST_TAGS = ("#tabarnia", "#catalunaesespana", "#golpedeestado", "#espanaunida")
NEUTRAL_TAGS = ("#barcelona", "#bondia", "#meteo")


def load_wordfreq(language: str) -> tuple[list[str], np.ndarray]:
    path = _WORDFREQ_DIR / f"{language}.txt"
    words: list[str] = []
    weights: list[float] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        word, weight = line.rsplit(" ", 1)
        words.append(word)
        weights.append(float(weight))
    w = np.asarray(weights)
    return words, w / w.sum()


def sample_sentences(
    language: str,
    n: int,
    seed: int = 0,
    min_words: int = 4,
    max_words: int = 12,
    rng: Optional[np.random.Generator] = None,
) -> list[str]:
    """Draw sentences from the language's word-frequency fixture."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    words, probs = load_wordfreq(language)
    out = []
    for _ in range(n):
        k = int(rng.integers(min_words, max_words + 1))
        idx = rng.choice(len(words), size=k, p=probs)
        out.append(" ".join(words[i] for i in idx))
    return out


# ---------------------------------------------------------------------------
# Planted-topic corpus (the LDA oracle).


@dataclass
class PlantedTopics:
    docs: list[list[str]]
    topic_of_doc: list[int]
    vocabularies: list[list[str]]


def planted_topic_corpus(
    n_docs: int = 200,
    doc_len: int = 30,
    vocab_size: int = 20,
    n_topics: int = 2,
    seed: int = 0,
) -> PlantedTopics:
    """Documents drawn from disjoint per-topic vocabularies.

    Each document picks one planted topic and samples all its tokens
    uniformly from that topic's vocabulary, which makes recovery easy to
    verify: a learned topic's top words must fall inside one vocabulary.
    """
    rng = np.random.default_rng(seed)
    vocabularies = [
        [f"t{t}w{i:02d}" for i in range(vocab_size)] for t in range(n_topics)
    ]
    docs: list[list[str]] = []
    topic_of_doc: list[int] = []
    for d in range(n_docs):
        topic = d % n_topics
        topic_of_doc.append(topic)
        vocab = vocabularies[topic]
        docs.append([vocab[i] for i in rng.integers(0, vocab_size, size=doc_len)])
    return PlantedTopics(docs=docs, topic_of_doc=topic_of_doc, vocabularies=vocabularies)


# ---------------------------------------------------------------------------
# Homophilous two-community retweet graph (the propagation oracle).


@dataclass
class PlantedCommunities:
    graph: RetweetGraph
    community_of: dict[str, int]
    seeds_per_community: list[list[str]]


def homophily_graph(
    n_nodes: int = 200,
    seeds_per_community: int = 10,
    p_within: float = 0.9,
    p_cross: float = 0.1,
    seed: int = 0,
) -> PlantedCommunities:
    """Two equal communities; u retweets v with probability p_within inside
    its community and p_cross across."""
    rng = np.random.default_rng(seed)
    names = [f"u{i:04d}" for i in range(n_nodes)]
    community_of = {name: (0 if i < n_nodes // 2 else 1) for i, name in enumerate(names)}
    graph = RetweetGraph()
    for u in names:
        for v in names:
            if u == v:
                continue
            p = p_within if community_of[u] == community_of[v] else p_cross
            if rng.random() < p:
                graph.add_retweet(u, v)
    seeds = [names[:seeds_per_community], names[n_nodes // 2 : n_nodes // 2 + seeds_per_community]]
    return PlantedCommunities(graph=graph, community_of=community_of, seeds_per_community=seeds)


# ---------------------------------------------------------------------------
# Demo dump: a small two-community bilingual Twitter collection.


@dataclass
class DemoSpec:
    n_authors_per_side: int = 45
    n_neutral_authors: int = 10
    tweets_per_author: int = 20
    n_seed_accounts_per_side: int = 4
    n_seed_neutral: int = 2
    seed: int = 20190301


def _author_name(side: str, i: int) -> str:
    return f"{side}{i:03d}"


def build_demo_dump(out_dir: str | Path, spec: DemoSpec = DemoSpec()) -> dict:
    """Write raw.jsonl, seeds.tsv and lexicon.txt under out_dir.

    The dump contains two stance communities (FAVOR skewing Catalan,
    AGAINST skewing Spanish), neutral accounts, homophilous retweets,
    injected duplicates and too-short messages.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    sides = {
        "fav": (StanceLabel.FAVOR, FAVOR_TAGS, "ca", 0.75),
        "agt": (StanceLabel.AGAINST, AGAINST_TAGS, "es", 0.75),
        "neu": (StanceLabel.NONE, NEUTRAL_TAGS, "es", 0.5),
    }
    authors: dict[str, str] = {}
    for i in range(spec.n_authors_per_side):
        authors[_author_name("fav", i)] = "fav"
        authors[_author_name("agt", i)] = "agt"
    for i in range(spec.n_neutral_authors):
        authors[_author_name("neu", i)] = "neu"
    names = sorted(authors)

    def sentence(language: str, topical: bool, tags: Sequence[str]) -> str:
        words, probs = load_wordfreq(language)
        k = int(rng.integers(5, 11))
        idx = rng.choice(len(words), size=k, p=probs)
        tokens = [words[i] for i in idx]
        if topical:
            extra = TOPIC_WORDS[language]
            tokens.extend(extra[i] for i in rng.integers(0, len(extra), size=3))
            tokens.append(tags[int(rng.integers(0, len(tags)))])
        else:
            extra = OFFTOPIC_WORDS[language]
            tokens.extend(extra[i] for i in rng.integers(0, len(extra), size=3))
        order = rng.permutation(len(tokens))
        return " ".join(tokens[i] for i in order)

    records: list[dict] = []
    texts_by_author: dict[str, list[str]] = {a: [] for a in names}
    tid = 0

    def add(author: str, text: str, retweet_of: Optional[str] = None) -> None:
        nonlocal tid
        tid += 1
        rec = {
            "id": f"{1000000000 + tid}",
            "user": {"id": author},
            "text": text,
            "created_at": f"2019-03-{1 + tid % 28:02d}T{tid % 24:02d}:00:00Z",
        }
        if retweet_of is not None:
            rec["retweeted_status"] = {"user": {"id": retweet_of}}
        records.append(rec)

    for author in names:
        side = authors[author]
        label, tags, main_lang, main_lang_p = sides[side]
        same = [a for a in names if authors[a] == side and a != author]
        other = [a for a in names if authors[a] != side]
        for j in range(spec.tweets_per_author):
            language = main_lang if rng.random() < main_lang_p else ("es" if main_lang == "ca" else "ca")
            roll = rng.random()
            if roll < 0.5:
                add(author, sentence(language, topical=True, tags=tags))
                texts_by_author[author].append(records[-1]["text"])
            elif roll < 0.8 and (same or other):
                pool = same if (rng.random() < 0.9 and same) else other
                target = pool[int(rng.integers(0, len(pool)))]
                quoted = texts_by_author[target]
                base = quoted[int(rng.integers(0, len(quoted)))] if quoted else sentence(language, True, tags)
                add(author, f"RT @{target}: {base}", retweet_of=target)
            else:
                add(author, sentence(language, topical=False, tags=tags))

    # Ingest fodder: exact duplicates and sub-3-word messages.
    for i in range(20):
        src = records[int(rng.integers(0, len(records)))]
        add(src["user"]["id"], src["text"])
    for i in range(15):
        author = names[int(rng.integers(0, len(names)))]
        add(author, "bon dia" if i % 2 else "hola")

    raw_path = out_dir / "raw.jsonl"
    with raw_path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    seed_rows = []
    for i in range(spec.n_seed_accounts_per_side):
        seed_rows.append((_author_name("fav", i), "FAVOR"))
        seed_rows.append((_author_name("agt", i), "AGAINST"))
    for i in range(spec.n_seed_neutral):
        seed_rows.append((_author_name("neu", i), "NONE"))
    (out_dir / "seeds.tsv").write_text(
        "\n".join(f"{a}\t{lab}" for a, lab in seed_rows) + "\n", encoding="utf-8"
    )

    lexicon_lines = list(FAVOR_TAGS + AGAINST_TAGS)
    lexicon_lines += ["referendum ilegal", "urnas", "urnes"]
    (out_dir / "lexicon.txt").write_text("\n".join(lexicon_lines) + "\n", encoding="utf-8")

    labels = {a: sides[s][0].value for a, s in authors.items()}
    (out_dir / "truth.json").write_text(
        json.dumps({"labels": labels}, indent=1, sort_keys=True), encoding="utf-8"
    )
    return {"tweets": len(records), "authors": len(names), "raw": str(raw_path)}


DEMO_CONFIG = """\
# Full-pipeline demo over the bundled synthetic dump.
workspace: workspace
seed: 7
languages: [es, ca]
stages:
  ingest:
    raw: raw.jsonl
    min_words: 3
  propagate:
    seeds: seeds.tsv
    max_hops: 2
    min_margin: 0.6
    min_evidence: 1
  filter:
    lexicon: lexicon.txt
  lda:
    num_topics: 4
    alpha: 0.5
    beta: 0.01
    iterations: 120
    burn_in: 40
    anchors: [independencia, republica, referendum]
    min_share: 0.5
  assemble:
    target_total: 360
    min_words: 4
  split:
    method: user_disjoint
    ratios: [0.6, 0.2, 0.2]
  preprocess:
    types: [A, B, C, D]
  train:
    language: es
    system: tfidf-svm
    C: 10
    gamma: 0.01
  score: {}
"""


def write_demo_config(out_dir: str | Path, name: str = "config.yaml") -> Path:
    path = Path(out_dir) / name
    path.write_text(DEMO_CONFIG, encoding="utf-8")
    return path
