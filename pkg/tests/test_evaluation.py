from decimal import Decimal

import pytest

from stancegen.corpus import StanceLabel
from stancegen.evaluation import (
    CoverageError,
    PredictionSet,
    error_confusion,
    f1_average_percent,
    majority_error_set,
    round_percent,
    score,
    upperbound,
)

from conftest import make_corpus

A, F, N = StanceLabel.AGAINST, StanceLabel.FAVOR, StanceLabel.NONE


def preds(system, mapping):
    return PredictionSet(system=system, predictions={str(k): v for k, v in mapping.items()})


@pytest.fixture()
def gold4():
    return make_corpus(
        [(1, "AGAINST", "t1 text"), (2, "AGAINST", "t2 text"), (3, "FAVOR", "t3 text"), (4, "NONE", "t4 text")]
    )


class TestScore:
    def test_hand_computed_case(self, gold4):
        report = score(gold4, preds("s", {1: A, 2: F, 3: F, 4: N}))
        assert report.per_class[A].f1 == pytest.approx(2 / 3)
        assert report.per_class[F].f1 == pytest.approx(2 / 3)
        assert report.f1_avg == pytest.approx(2 / 3)
        assert round_percent(report.f1_avg * 100) == Decimal("66.67")

    def test_perfect_predictions(self, gold4):
        report = score(gold4, preds("s", {1: A, 2: A, 3: F, 4: N}))
        assert round_percent(report.f1_avg * 100) == Decimal("100.00")

    def test_f1_avg_excludes_none(self):
        gold = make_corpus(
            [(1, "AGAINST", "x y"), (2, "FAVOR", "x y"), (3, "FAVOR", "x y"), (4, "NONE", "x y")]
        )
        # A FAVOR item lost to NONE: NONE precision suffers, but NONE's own
        # F1 never enters the headline average.
        report = score(gold, preds("s", {1: A, 2: F, 3: N, 4: N}))
        assert report.per_class[N].f1 == pytest.approx(2 / 3)
        assert report.f1_avg == pytest.approx((1.0 + 2 / 3) / 2)

    def test_f1_zero_when_class_never_predicted(self, gold4):
        report = score(gold4, preds("s", {1: N, 2: N, 3: N, 4: N}))
        assert report.per_class[A].f1 == 0.0
        assert report.per_class[F].f1 == 0.0
        assert report.f1_avg == 0.0

    def test_missing_ids_raise(self, gold4):
        with pytest.raises(CoverageError, match="missing"):
            score(gold4, preds("s", {1: A}))

    def test_extra_ids_raise(self, gold4):
        with pytest.raises(CoverageError, match="extra"):
            score(gold4, preds("s", {1: A, 2: A, 3: F, 4: N, 99: F}))

    def test_permutation_invariant(self, gold4):
        p1 = preds("s", {1: A, 2: F, 3: F, 4: N})
        p2 = PredictionSet(system="s", predictions=dict(reversed(list(p1.predictions.items()))))
        assert score(gold4, p1).to_json_dict() == score(gold4, p2).to_json_dict()

    def test_confusion_matrix(self, gold4):
        report = score(gold4, preds("s", {1: A, 2: F, 3: F, 4: N}))
        assert report.confusion[A][F] == 1
        assert report.confusion[A][A] == 1
        assert report.confusion[F][F] == 1
        assert report.confusion[N][N] == 1


class TestRounding:
    @pytest.mark.parametrize(
        "against,favor,expected",
        [
            ("73.24", "53.52", "63.38"),
            ("70.69", "78.67", "74.68"),
            ("59.43", "64.46", "61.95"),   # .945 rounds up
            ("66.80", "65.11", "65.96"),   # .955 rounds up
            ("0.00", "93.88", "46.94"),
        ],
    )
    def test_half_up_average(self, against, favor, expected):
        assert f1_average_percent(against, favor) == Decimal(expected)


class TestPredictionFiles:
    def test_tsv_round_trip(self, tmp_path):
        p = preds("sys", {1: A, 2: F})
        path = tmp_path / "pred.tsv"
        p.to_tsv(path)
        again = PredictionSet.from_tsv(path, system="sys")
        assert again.predictions == p.predictions

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "pred.tsv"
        path.write_text("1\tFAVOR\textra\n", encoding="utf-8")
        with pytest.raises(ValueError, match="pred.tsv:1"):
            PredictionSet.from_tsv(path)


class TestMajorityErrorSet:
    def make_five(self, gold_label_map, wrong_ids_per_system):
        systems = []
        for i, wrong_ids in enumerate(wrong_ids_per_system):
            mapping = {}
            for tid, lab in gold_label_map.items():
                mapping[tid] = (F if lab is not F else A) if tid in wrong_ids else lab
            systems.append(preds(f"s{i}", mapping))
        return systems

    def test_all_correct_empty(self, gold4):
        gold_map = {"1": A, "2": A, "3": F, "4": N}
        systems = self.make_five(gold_map, [set()] * 5)
        assert majority_error_set(gold4, systems, threshold=3) == []

    def test_threshold_hit(self, gold4):
        gold_map = {"1": A, "2": A, "3": F, "4": N}
        systems = self.make_five(gold_map, [{"2"}, {"2"}, {"2"}, set(), set()])
        out = majority_error_set(gold4, systems, threshold=3)
        assert [d.tweet_id for d in out] == ["2"]
        assert out[0].wrong_count == 3

    def test_threshold_above_system_count(self, gold4):
        systems = self.make_five({"1": A, "2": A, "3": F, "4": N}, [set()] * 5)
        with pytest.raises(ValueError, match="threshold"):
            majority_error_set(gold4, systems, threshold=6)

    def test_monotone_in_threshold(self, gold4):
        gold_map = {"1": A, "2": A, "3": F, "4": N}
        systems = self.make_five(gold_map, [{"1", "2"}, {"2"}, {"2", "3"}, {"3"}, set()])
        sets = [
            {d.tweet_id for d in majority_error_set(gold4, systems, threshold=k)}
            for k in (1, 2, 3, 4, 5)
        ]
        for bigger, smaller in zip(sets, sets[1:]):
            assert smaller <= bigger

    def test_error_confusion_counts_wrong_votes(self, gold4):
        gold_map = {"1": A, "2": A, "3": F, "4": N}
        systems = self.make_five(gold_map, [{"2"}, {"2"}, {"2"}, set(), set()])
        out = majority_error_set(gold4, systems, threshold=3)
        matrix = error_confusion(out)
        assert matrix[A][F] == 3


class TestTargetAggregation:
    def make_two_target_gold(self):
        from stancegen.corpus import Corpus, LabeledTweet, Tweet

        items = []
        for tid, target, label in (
            (1, "t1", A), (2, "t1", F), (3, "t1", F),
            (4, "t2", A), (5, "t2", A), (6, "t2", F),
        ):
            items.append(
                LabeledTweet(Tweet(id=str(tid), text=f"text {tid}", target=target), label)
            )
        return Corpus(name="multi", language="mixed", items=tuple(items))

    def test_per_target_reports(self):
        from stancegen.evaluation import macro_f1_avg, per_target_scores, pooled_f1_avg

        gold = self.make_two_target_gold()
        # Perfect on t1, everything AGAINST on t2.
        pred = preds("s", {1: A, 2: F, 3: F, 4: A, 5: A, 6: A})
        by_target = per_target_scores(gold, pred)
        assert set(by_target) == {"t1", "t2"}
        assert by_target["t1"].f1_avg == pytest.approx(1.0)
        t2 = by_target["t2"]
        assert t2.per_class[F].f1 == 0.0
        # The two aggregates are distinct, explicitly labeled quantities.
        assert macro_f1_avg(gold, pred) == pytest.approx((1.0 + t2.f1_avg) / 2)
        assert pooled_f1_avg(gold, pred) != pytest.approx(macro_f1_avg(gold, pred))


class TestUpperbound:
    def test_complementary_systems_reach_100(self, gold4):
        s1 = preds("s1", {1: A, 2: F, 3: F, 4: F})
        s2 = preds("s2", {1: F, 2: A, 3: A, 4: N})
        report = upperbound(gold4, [s1, s2])
        assert round_percent(report.f1_avg * 100) == Decimal("100.00")

    def test_single_system_identity(self, gold4):
        s1 = preds("s1", {1: A, 2: F, 3: F, 4: N})
        assert upperbound(gold4, [s1]).f1_avg == pytest.approx(score(gold4, s1).f1_avg)

    def test_dominates_every_member(self, gold4):
        s1 = preds("s1", {1: A, 2: F, 3: N, 4: F})
        s2 = preds("s2", {1: F, 2: A, 3: F, 4: N})
        s3 = preds("s3", {1: N, 2: N, 3: N, 4: N})
        systems = [s1, s2, s3]
        ub = upperbound(gold4, systems).f1_avg
        assert ub >= max(score(gold4, s).f1_avg for s in systems)

    def test_fallback_is_first_system_not_gold(self, gold4):
        # Nobody gets item 4 right: the oracle must NOT credit it.
        s1 = preds("s1", {1: A, 2: A, 3: F, 4: F})
        s2 = preds("s2", {1: A, 2: A, 3: F, 4: A})
        report = upperbound(gold4, [s1, s2])
        assert report.confusion[N][F] == 1
