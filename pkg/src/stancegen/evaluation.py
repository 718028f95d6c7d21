"""Scoring, error mining and ensemble-oracle analysis for stance predictions.

The headline metric averages the F1 of FAVOR and AGAINST only; NONE is
trained and predicted but excluded from the average.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus, StanceLabel, parse_label

LABELS = (StanceLabel.AGAINST, StanceLabel.FAVOR, StanceLabel.NONE)


class CoverageError(Exception):
    def __init__(self, missing: Sequence[str], extra: Sequence[str]):
        self.missing = list(missing)
        self.extra = list(extra)
        parts = []
        if self.missing:
            parts.append(f"missing ids: {', '.join(self.missing[:10])}")
        if self.extra:
            parts.append(f"extra ids: {', '.join(self.extra[:10])}")
        super().__init__("; ".join(parts) or "coverage error")


@dataclass(frozen=True)
class PredictionSet:
    system: str
    predictions: Mapping[str, StanceLabel]

    def check_coverage(self, gold: Corpus) -> None:
        gold_ids = set(gold.ids())
        pred_ids = set(self.predictions)
        missing = sorted(gold_ids - pred_ids)
        extra = sorted(pred_ids - gold_ids)
        if missing or extra:
            raise CoverageError(missing, extra)

    @classmethod
    def from_tsv(cls, path: str | Path, system: str | None = None) -> "PredictionSet":
        """Read an ``id<TAB>label`` prediction file."""
        path = Path(path)
        preds: dict[str, StanceLabel] = {}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>label', got {line!r}")
            preds[parts[0]] = parse_label(parts[1])
        return cls(system=system or path.stem, predictions=preds)

    def to_tsv(self, path: str | Path) -> None:
        lines = [f"{tid}\t{label.value}" for tid, label in sorted(self.predictions.items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def round_percent(value: float | Decimal) -> Decimal:
    """Percentages are reported with two decimals, halves rounding up."""
    return Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def f1_average_percent(f1_against: float | str, f1_favor: float | str) -> Decimal:
    """Headline average from per-class F1 percentages, exact in decimal."""
    avg = (Decimal(str(f1_against)) + Decimal(str(f1_favor))) / 2
    return avg.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ScoreReport:
    system: str
    per_class: Mapping[StanceLabel, ClassScore]
    confusion: Mapping[StanceLabel, Mapping[StanceLabel, int]]  # gold -> predicted -> count

    @property
    def f1_avg(self) -> float:
        return (self.per_class[StanceLabel.FAVOR].f1 + self.per_class[StanceLabel.AGAINST].f1) / 2

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "system": self.system,
            "per_class": {
                lab.value: {
                    "precision": cs.precision,
                    "recall": cs.recall,
                    "f1": cs.f1,
                }
                for lab, cs in self.per_class.items()
            },
            "f1_avg": self.f1_avg,
            "confusion": {
                g.value: {p.value: self.confusion[g][p] for p in LABELS} for g in LABELS
            },
        }

    def to_text_table(self) -> str:
        """Aligned table in the layout of the result tables: per-class F1 + average."""
        header = f"{'System':<24}{'F1_against':>12}{'F1_favor':>12}{'F1_avg':>12}"
        row = (
            f"{self.system:<24}"
            f"{round_percent(self.per_class[StanceLabel.AGAINST].f1 * 100):>12}"
            f"{round_percent(self.per_class[StanceLabel.FAVOR].f1 * 100):>12}"
            f"{round_percent(self.f1_avg * 100):>12}"
        )
        return header + "\n" + row


def _prf(tp: int, fp: int, fn: int) -> ClassScore:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassScore(precision=precision, recall=recall, f1=f1)


def score(gold: Corpus, pred: PredictionSet) -> ScoreReport:
    """Per-class precision/recall/F1 plus the FAVOR/AGAINST average."""
    pred.check_coverage(gold)
    confusion: dict[StanceLabel, dict[StanceLabel, int]] = {
        g: {p: 0 for p in LABELS} for g in LABELS
    }
    for item in gold:
        if item.label is None:
            raise ValueError(f"gold item {item.tweet.id!r} is unlabeled")
        confusion[item.label][pred.predictions[item.tweet.id]] += 1
    per_class: dict[StanceLabel, ClassScore] = {}
    for lab in LABELS:
        tp = confusion[lab][lab]
        fp = sum(confusion[g][lab] for g in LABELS if g is not lab)
        fn = sum(confusion[lab][p] for p in LABELS if p is not lab)
        per_class[lab] = _prf(tp, fp, fn)
    return ScoreReport(system=pred.system, per_class=per_class, confusion=confusion)


@dataclass(frozen=True)
class DisputedItem:
    tweet_id: str
    gold: StanceLabel
    predictions: Mapping[str, StanceLabel]  # system -> predicted label

    @property
    def wrong_count(self) -> int:
        return sum(1 for p in self.predictions.values() if p is not self.gold)


def majority_error_set(
    gold: Corpus, preds: Sequence[PredictionSet], threshold: int
) -> list[DisputedItem]:
    """Items misclassified by at least ``threshold`` of the given systems."""
    if len(preds) < 2:
        raise ValueError("need at least two prediction sets")
    if threshold > len(preds):
        raise ValueError(f"threshold {threshold} exceeds the number of systems ({len(preds)})")
    for p in preds:
        p.check_coverage(gold)
    out: list[DisputedItem] = []
    for item in gold:
        tid = item.tweet.id
        per_system = {p.system: p.predictions[tid] for p in preds}
        disputed = DisputedItem(tweet_id=tid, gold=item.label, predictions=per_system)
        if disputed.wrong_count >= threshold:
            out.append(disputed)
    return out


def error_confusion(items: Sequence[DisputedItem]) -> dict[StanceLabel, dict[StanceLabel, int]]:
    """Aggregate gold->predicted counts over the wrong votes of an error set."""
    matrix = {g: {p: 0 for p in LABELS} for g in LABELS}
    for item in items:
        for predicted in item.predictions.values():
            if predicted is not item.gold:
                matrix[item.gold][predicted] += 1
    return matrix


def per_target_scores(gold: Corpus, pred: PredictionSet) -> dict[str, ScoreReport]:
    """One report per stance target, for multi-target benchmark files."""
    by_target: dict[str, list] = {}
    for item in gold:
        by_target.setdefault(item.tweet.target or "", []).append(item)
    out: dict[str, ScoreReport] = {}
    for target, items in sorted(by_target.items()):
        sub_gold = gold.subset(items, name=f"{gold.name}:{target}")
        sub_pred = PredictionSet(
            system=pred.system,
            predictions={item.tweet.id: pred.predictions[item.tweet.id] for item in items},
        )
        out[target] = score(sub_gold, sub_pred)
    return out


def pooled_f1_avg(gold: Corpus, pred: PredictionSet) -> float:
    """Id-pooled aggregate: all targets scored as one corpus."""
    return score(gold, pred).f1_avg


def macro_f1_avg(gold: Corpus, pred: PredictionSet) -> float:
    """Per-target-averaged aggregate: mean F1_avg over the targets."""
    reports = per_target_scores(gold, pred)
    return sum(r.f1_avg for r in reports.values()) / len(reports)


def upperbound(gold: Corpus, preds: Sequence[PredictionSet]) -> ScoreReport:
    """Oracle score: an item counts as correct if any system got it right.

    When no system is correct the first system's prediction stands, so the
    oracle cannot reach 100 unless the systems jointly cover the test set.
    """
    if not preds:
        raise ValueError("need at least one prediction set")
    for p in preds:
        p.check_coverage(gold)
    oracle: dict[str, StanceLabel] = {}
    for item in gold:
        tid = item.tweet.id
        if any(p.predictions[tid] is item.label for p in preds):
            oracle[tid] = item.label
        else:
            oracle[tid] = preds[0].predictions[tid]
    name = "upperbound(" + ",".join(p.system for p in preds) + ")"
    return score(gold, PredictionSet(system=name, predictions=oracle))
