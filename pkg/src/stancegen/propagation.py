"""Expand manually labeled seed accounts along retweet edges.

Retweeting overwhelmingly signals agreement in polarized political talk, so
an unlabeled account inherits the label its retweet weight concentrates on,
provided the winning share clears a margin and a minimum amount of evidence
exists. Ties and weak margins yield no label: absence of evidence is not the
NONE stance.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import AccountLabel, LabeledTweet, StanceLabel, Tweet, parse_label


@dataclass
class RetweetGraph:
    """Directed weighted edges: retweeter -> retweeted account, weight = count."""

    edges: dict[str, dict[str, int]] = field(default_factory=dict)

    def add_retweet(self, retweeter: str, retweetee: str, weight: int = 1) -> None:
        if retweeter == retweetee:
            return  # self-retweets carry no signal
        if weight < 1:
            raise ValueError("edge weight must be >= 1")
        self.edges.setdefault(retweeter, {})
        self.edges[retweeter][retweetee] = self.edges[retweeter].get(retweetee, 0) + weight

    def out_edges(self, node: str) -> Mapping[str, int]:
        return self.edges.get(node, {})

    def nodes(self) -> set[str]:
        out = set(self.edges)
        for targets in self.edges.values():
            out.update(targets)
        return out

    def num_edges(self) -> int:
        return sum(len(t) for t in self.edges.values())

    def in_degree(self, node: str) -> int:
        return sum(1 for targets in self.edges.values() if node in targets)

    def to_json_dict(self) -> dict:
        return {"edges": {u: dict(sorted(vs.items())) for u, vs in sorted(self.edges.items())}}

    @classmethod
    def from_json_dict(cls, d) -> "RetweetGraph":
        graph = cls()
        for u, targets in d["edges"].items():
            for v, w in targets.items():
                graph.add_retweet(u, v, int(w))
        return graph


def build_retweet_graph(tweets: Sequence[Tweet]) -> RetweetGraph:
    """One edge per (retweeter, retweetee) pair, weights aggregated."""
    graph = RetweetGraph()
    for tweet in tweets:
        if tweet.retweet_of_author and tweet.author_id:
            graph.add_retweet(tweet.author_id, tweet.retweet_of_author)
    return graph


@dataclass(frozen=True)
class PropagationConfig:
    max_hops: int = 1
    min_margin: float = 0.6   # share of retweet weight the winner must hold
    min_evidence: int = 1     # total retweets of labeled accounts required

    def __post_init__(self) -> None:
        if self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")
        if not 0 < self.min_margin <= 1:
            raise ValueError("min_margin must be in (0, 1]")
        if self.min_evidence < 1:
            raise ValueError("min_evidence must be >= 1")


def propagate(
    graph: RetweetGraph,
    seeds: Sequence[AccountLabel],
    config: PropagationConfig = PropagationConfig(),
) -> list[AccountLabel]:
    """Weighted-majority label spreading from the seed accounts.

    Per hop, every unlabeled account with outgoing edges to labeled accounts
    tallies retweet weight per label; the argmax label is assigned iff its
    share of the tallied weight reaches min_margin and the tallied weight
    reaches min_evidence. Hop commits are barriers; seeds never change.
    """
    if not seeds:
        raise ValueError("empty seed set")
    for s in seeds:
        if s.provenance != "seed-manual" or s.hop != 0:
            raise ValueError(f"seed {s.author_id!r} must have provenance seed-manual and hop 0")
    labeled: dict[str, AccountLabel] = {}
    for s in seeds:
        if s.author_id in labeled and labeled[s.author_id].label is not s.label:
            raise ValueError(f"conflicting seed labels for {s.author_id!r}")
        labeled[s.author_id] = s

    for _ in range(config.max_hops):
        additions: dict[str, AccountLabel] = {}
        for node in sorted(graph.edges):
            if node in labeled:
                continue
            mass: dict[StanceLabel, int] = defaultdict(int)
            hop_of_label: dict[StanceLabel, int] = {}
            for target, weight in graph.out_edges(node).items():
                acc = labeled.get(target)
                if acc is None:
                    continue
                mass[acc.label] += weight
                prev = hop_of_label.get(acc.label)
                hop_of_label[acc.label] = acc.hop if prev is None else min(prev, acc.hop)
            total = sum(mass.values())
            if total < config.min_evidence or not mass:
                continue
            best = max(mass.values())
            winners = [lab for lab, m in mass.items() if m == best]
            if len(winners) != 1 or best / total < config.min_margin:
                continue
            winner = winners[0]
            additions[node] = AccountLabel(
                author_id=node,
                label=winner,
                provenance="propagated",
                hop=hop_of_label[winner] + 1,
            )
        if not additions:
            break
        labeled.update(additions)
    return sorted(labeled.values(), key=lambda a: a.author_id)


def project_labels(
    tweets: Sequence[Tweet], accounts: Sequence[AccountLabel]
) -> list[LabeledTweet]:
    """Label each tweet with its author's account label; others are omitted."""
    by_author: dict[str, AccountLabel] = {}
    for acc in accounts:
        existing = by_author.get(acc.author_id)
        if existing is not None and existing.label is not acc.label:
            raise ValueError(f"conflicting labels for author {acc.author_id!r}")
        by_author.setdefault(acc.author_id, acc)
    out: list[LabeledTweet] = []
    for tweet in tweets:
        acc = by_author.get(tweet.author_id)
        if acc is None:
            continue
        source = "manual-user" if acc.provenance == "seed-manual" else "propagated-user"
        out.append(LabeledTweet(tweet=tweet, label=acc.label, label_source=source))
    return out


# ---------------------------------------------------------------------------
# On-disk formats: seeds as author<TAB>label, accounts with provenance + hop.


def load_seeds(path: str | Path) -> list[AccountLabel]:
    seeds: list[AccountLabel] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'author_id<TAB>label'")
        seeds.append(AccountLabel(author_id=parts[0], label=parse_label(parts[1])))
    return seeds


def save_accounts(accounts: Sequence[AccountLabel], path: str | Path) -> None:
    lines = [f"{a.author_id}\t{a.label.value}\t{a.provenance}\t{a.hop}" for a in accounts]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_accounts(path: str | Path) -> list[AccountLabel]:
    accounts: list[AccountLabel] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 columns")
        accounts.append(
            AccountLabel(
                author_id=parts[0],
                label=parse_label(parts[1]),
                provenance=parts[2],
                hop=int(parts[3]),
            )
        )
    return accounts
