"""Balanced corpus assembly and train/dev/test split generation.

Two splitters exist on purpose. The proportional one stratifies by label and
lets the same author span several splits (the original corpus behaved that
way). The user-disjoint one assigns whole authors to splits so no author
crosses a split boundary, trading exact label balance for that guarantee.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import Corpus, LabeledTweet, StanceLabel, distribution
from .textutils import word_count

SPLIT_NAMES = ("train", "dev", "test")


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0
    size_tolerance: float = 0.02
    label_tolerance: float = 0.05
    restarts: int = 50

    def __post_init__(self) -> None:
        if any(r <= 0 for r in self.ratios):
            raise ValueError("every split ratio must be positive")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError("split ratios must sum to 1")
        for tol in (self.size_tolerance, self.label_tolerance):
            if not 0 < tol <= 0.2:
                raise ValueError("tolerances must be in (0, 0.2]")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class SplitViolation:
    kind: str
    detail: str

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


@dataclass
class DatasetSplit:
    train: Corpus
    dev: Corpus
    test: Corpus
    seed: int
    violations: list[SplitViolation] = field(default_factory=list)

    def parts(self) -> dict[str, Corpus]:
        return {"train": self.train, "dev": self.dev, "test": self.test}

    def audit(self) -> dict:
        out: dict = {"seed": self.seed, "splits": {}, "violations": [v.to_json_dict() for v in self.violations]}
        for name, part in self.parts().items():
            users = sorted({item.tweet.author_id for item in part})
            out["splits"][name] = {
                "size": len(part),
                "distribution": distribution(part).to_json_dict(),
                "num_users": len(users),
                "users": users,
            }
        return out


def largest_remainder(total: int, ratios: Sequence[float]) -> list[int]:
    """Integer allocation of ``total`` by the given ratios; remainders
    resolve to the largest fractional part, ties to the earliest bucket."""
    raw = [total * r for r in ratios]
    floors = [int(x) for x in raw]
    leftover = total - sum(floors)
    order = sorted(range(len(ratios)), key=lambda i: (-(raw[i] - floors[i]), i))
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def _items_by_label(corpus: Corpus) -> dict[StanceLabel, list[LabeledTweet]]:
    groups: dict[StanceLabel, list[LabeledTweet]] = {}
    for item in corpus:
        if item.label is None:
            raise ValueError(f"item {item.tweet.id!r} is unlabeled")
        groups.setdefault(item.label, []).append(item)
    return groups


def assemble_balanced(
    candidates: Corpus,
    target_total: int,
    min_words: int = 4,
    seed: int = 0,
) -> Corpus:
    """Pick up to ``target_total`` tweets, as label-balanced as availability
    allows, sampling each label stratified by author.

    Per-label quotas start equal; a label short of its quota is capped at
    its availability and the deficit is split evenly over the others
    (largest-remainder on the even shares). Within a label, authors receive
    quotas proportional to their share of that label's pool.
    """
    if target_total < 3:
        raise ValueError("target_total must be >= 3")
    rng = np.random.default_rng(seed)
    eligible = [item for item in candidates if word_count(item.tweet.text) >= min_words]
    pool = _items_by_label(candidates.subset(eligible))
    labels = sorted(pool, key=lambda lab: lab.value)

    # Per-label quotas: equalize, then redistribute capped labels' deficit.
    quotas = {lab: q for lab, q in zip(labels, largest_remainder(target_total, [1 / len(labels)] * len(labels)))}
    while True:
        over = {lab: quotas[lab] - len(pool[lab]) for lab in labels if quotas[lab] > len(pool[lab])}
        if not over:
            break
        deficit = sum(over.values())
        for lab in over:
            quotas[lab] = len(pool[lab])
        open_labels = [lab for lab in labels if quotas[lab] < len(pool[lab])]
        if not open_labels:
            break
        extra = largest_remainder(deficit, [1 / len(open_labels)] * len(open_labels))
        for lab, e in zip(open_labels, extra):
            quotas[lab] += e

    chosen: list[LabeledTweet] = []
    for lab in labels:
        items = pool[lab]
        quota = min(quotas[lab], len(items))
        by_author: dict[str, list[LabeledTweet]] = {}
        for item in items:
            by_author.setdefault(item.tweet.author_id, []).append(item)
        authors = sorted(by_author, key=lambda a: (-len(by_author[a]), a))
        weights = [len(by_author[a]) / len(items) for a in authors]
        author_quota = largest_remainder(quota, weights)
        short = 0
        picked: list[LabeledTweet] = []
        spare: list[LabeledTweet] = []
        for author, q in zip(authors, author_quota):
            mine = by_author[author]
            take = min(q, len(mine))
            short += q - take
            order = rng.permutation(len(mine))
            picked.extend(mine[i] for i in order[:take])
            spare.extend(mine[i] for i in order[take:])
        if short and spare:
            order = rng.permutation(len(spare))
            picked.extend(spare[i] for i in order[:short])
        chosen.extend(picked)

    by_position = {item.tweet.id: i for i, item in enumerate(candidates)}
    chosen.sort(key=lambda item: by_position[item.tweet.id])
    return candidates.subset(chosen, name=f"{candidates.name}-balanced")


def split_proportional(corpus: Corpus, spec: SplitSpec) -> DatasetSplit:
    """Seeded label-stratified shuffle split; authors MAY span splits."""
    if len(corpus) < 5:
        raise ValueError("corpus too small to split (need >= 5 items)")
    rng = np.random.default_rng(spec.seed)
    buckets: dict[str, list[LabeledTweet]] = {name: [] for name in SPLIT_NAMES}
    for lab in sorted(_items_by_label(corpus), key=lambda l: l.value):
        items = _items_by_label(corpus)[lab]
        order = rng.permutation(len(items))
        sizes = largest_remainder(len(items), spec.ratios)
        cursor = 0
        for name, size in zip(SPLIT_NAMES, sizes):
            buckets[name].extend(items[i] for i in order[cursor : cursor + size])
            cursor += size
    by_position = {item.tweet.id: i for i, item in enumerate(corpus)}
    parts = {}
    for name in SPLIT_NAMES:
        buckets[name].sort(key=lambda item: by_position[item.tweet.id])
        parts[name] = corpus.subset(buckets[name], name=f"{corpus.name}-{name}")
    return DatasetSplit(train=parts["train"], dev=parts["dev"], test=parts["test"], seed=spec.seed)


def _greedy_user_assignment(
    users: list[str],
    user_items: dict[str, list[LabeledTweet]],
    spec: SplitSpec,
    order_seed: int,
    global_props: dict[StanceLabel, float],
    total: int,
) -> dict[str, int]:
    rng = np.random.default_rng(order_seed)
    order = rng.permutation(len(users))
    sizes = [0, 0, 0]
    label_counts = [dict.fromkeys(global_props, 0) for _ in range(3)]
    # Targets in absolute tweets: deficits in count units keep large and
    # small splits comparable (proportion-based penalties starve dev/test).
    size_target = [r * total for r in spec.ratios]
    label_target = [
        {lab: r * p * total for lab, p in global_props.items()} for r in spec.ratios
    ]
    assignment: dict[str, int] = {}
    for idx in order:
        user = users[idx]
        items = user_items[user]
        mine = dict.fromkeys(global_props, 0)
        for item in items:
            mine[item.label] += 1
        best_split, best_penalty = 0, None
        for s in range(3):
            penalty = 0.0
            for t in range(3):
                extra = len(items) if t == s else 0
                penalty += abs(sizes[t] + extra - size_target[t])
                for lab, c in mine.items():
                    count = label_counts[t][lab] + (c if t == s else 0)
                    penalty += abs(count - label_target[t][lab])
            if best_penalty is None or penalty < best_penalty - 1e-9:
                best_split, best_penalty = s, penalty
        assignment[user] = best_split
        sizes[best_split] += len(items)
        for lab, c in mine.items():
            label_counts[best_split][lab] += c
    return assignment


def split_user_disjoint(corpus: Corpus, spec: SplitSpec) -> DatasetSplit:
    """Assign whole users to splits: randomized greedy plus restarts.

    User-disjointness is a hard constraint; size and label balance are
    steered by a penalty and verified afterwards. If no restart satisfies
    the tolerances the best-effort split is returned with its violations
    attached.
    """
    user_items: dict[str, list[LabeledTweet]] = {}
    for item in corpus:
        if item.label is None:
            raise ValueError(f"item {item.tweet.id!r} is unlabeled")
        user_items.setdefault(item.tweet.author_id, []).append(item)
    users = sorted(user_items)
    if len(users) < 2:
        raise ValueError("a single user cannot be split disjointly across three sets")
    total = len(corpus)
    global_props = distribution(corpus).proportions()

    best: Optional[tuple[int, float, dict[str, int]]] = None
    for attempt in range(spec.restarts):
        order_seed = spec.seed + attempt
        assignment = _greedy_user_assignment(users, user_items, spec, order_seed, global_props, total)
        split = _materialize(corpus, user_items, assignment, spec)
        violations = verify_split(split, spec, require_user_disjoint=True)
        penalty = _overall_penalty(split, spec, global_props)
        if best is None or (len(violations), penalty) < (best[0], best[1]):
            best = (len(violations), penalty, assignment)
        if not violations:
            break
    assert best is not None
    split = _materialize(corpus, user_items, best[2], spec)
    split.violations = verify_split(split, spec, require_user_disjoint=True)
    return split


def _materialize(
    corpus: Corpus,
    user_items: dict[str, list[LabeledTweet]],
    assignment: dict[str, int],
    spec: SplitSpec,
) -> DatasetSplit:
    by_position = {item.tweet.id: i for i, item in enumerate(corpus)}
    buckets: list[list[LabeledTweet]] = [[], [], []]
    for user, s in assignment.items():
        buckets[s].extend(user_items[user])
    parts = []
    for name, bucket in zip(SPLIT_NAMES, buckets):
        bucket.sort(key=lambda item: by_position[item.tweet.id])
        parts.append(corpus.subset(bucket, name=f"{corpus.name}-{name}"))
    return DatasetSplit(train=parts[0], dev=parts[1], test=parts[2], seed=spec.seed)


def _overall_penalty(split: DatasetSplit, spec: SplitSpec, global_props) -> float:
    total = sum(len(p) for p in split.parts().values())
    penalty = 0.0
    for ratio, part in zip(spec.ratios, split.parts().values()):
        penalty += abs(len(part) / total - ratio)
        if len(part):
            dist = distribution(part)
            for lab, p in global_props.items():
                penalty += abs(dist.get(lab) / len(part) - p)
    return penalty


def verify_split(
    split: DatasetSplit, spec: SplitSpec, require_user_disjoint: bool
) -> list[SplitViolation]:
    """Check id-disjointness, optional user-disjointness, and tolerances."""
    violations: list[SplitViolation] = []
    parts = split.parts()
    ids: dict[str, str] = {}
    for name, part in parts.items():
        for item in part:
            if item.tweet.id in ids:
                violations.append(
                    SplitViolation("id-overlap", f"tweet {item.tweet.id} in {ids[item.tweet.id]} and {name}")
                )
            ids[item.tweet.id] = name
    if require_user_disjoint:
        user_split: dict[str, str] = {}
        flagged: set[str] = set()
        for name, part in parts.items():
            for item in part:
                user = item.tweet.author_id
                prev = user_split.setdefault(user, name)
                if prev != name and user not in flagged:
                    flagged.add(user)
                    violations.append(
                        SplitViolation("user-overlap", f"user {user} in {prev} and {name}")
                    )
    total = sum(len(p) for p in parts.values())
    if total:
        global_counts: dict[StanceLabel, int] = {lab: 0 for lab in StanceLabel}
        for part in parts.values():
            dist = distribution(part)
            for lab in StanceLabel:
                global_counts[lab] += dist.get(lab)
        for (name, part), ratio in zip(parts.items(), spec.ratios):
            share = len(part) / total
            if abs(share - ratio) > spec.size_tolerance:
                violations.append(
                    SplitViolation("size", f"{name} holds {share:.4f} of items, target {ratio:.2f}")
                )
            if len(part) == 0:
                continue
            dist = distribution(part)
            for lab in StanceLabel:
                got = dist.get(lab) / len(part)
                want = global_counts[lab] / total
                if abs(got - want) > spec.label_tolerance:
                    violations.append(
                        SplitViolation(
                            "label",
                            f"{name} has {got:.4f} {lab.value}, corpus-wide {want:.4f}",
                        )
                    )
    return violations


def save_split(split: DatasetSplit, out_dir: str | Path, schema, save_fn) -> None:
    """Write train/dev/test TSVs plus the audit JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in split.parts().items():
        save_fn(part, out_dir / f"{name}.tsv", schema)
    (out_dir / "audit.json").write_text(
        json.dumps(split.audit(), indent=2, sort_keys=True), encoding="utf-8"
    )
