import numpy as np
import pytest

from stancegen.lda import LdaConfig, TopicModel, select_by_topics, train_lda
from stancegen.synthetic import planted_topic_corpus

from conftest import make_corpus

PLANTED_CFG = LdaConfig(num_topics=2, alpha=0.5, beta=0.01, iterations=200, burn_in=50, seed=42)


@pytest.fixture(scope="module")
def planted():
    return planted_topic_corpus(n_docs=200, doc_len=30, vocab_size=20, n_topics=2, seed=9)


@pytest.fixture(scope="module")
def planted_model(planted):
    return train_lda(planted.docs, PLANTED_CFG, validate_every_sweep=True)


def topic_alignment(model, planted):
    """Map each learned topic to the planted vocabulary it matches best."""
    sets = [set(v) for v in planted.vocabularies]
    mapping = {}
    for k in range(model.num_topics):
        top = {w for w, _ in model.top_words(k, 10)}
        mapping[k] = max(range(len(sets)), key=lambda t: len(top & sets[t]))
    return mapping


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            LdaConfig(num_topics=1)
        with pytest.raises(ValueError):
            LdaConfig(iterations=10, burn_in=10)
        with pytest.raises(ValueError):
            LdaConfig(beta=0.0)

    def test_alpha_default_is_50_over_k(self):
        assert LdaConfig(num_topics=20).effective_alpha == pytest.approx(2.5)


class TestTraining:
    def test_minimal_one_token_corpus(self):
        model = train_lda([["sol"]], LdaConfig(num_topics=2, iterations=5, burn_in=0, seed=1))
        model.check_invariants()
        assert model.doc_topic_counts.sum() == 1

    def test_empty_docs_rejected(self):
        with pytest.raises(ValueError):
            train_lda([], PLANTED_CFG)
        with pytest.raises(ValueError):
            train_lda([["a"], []], PLANTED_CFG)

    def test_seed_determinism_bit_exact(self, planted):
        cfg = LdaConfig(num_topics=2, alpha=0.5, beta=0.01, iterations=30, burn_in=0, seed=7)
        m1 = train_lda(planted.docs, cfg)
        m2 = train_lda(planted.docs, cfg)
        assert np.array_equal(m1.topic_word_counts, m2.topic_word_counts)
        assert np.array_equal(m1.doc_topic_counts, m2.doc_topic_counts)
        assert all(np.array_equal(a, b) for a, b in zip(m1.assignments, m2.assignments))

    def test_different_seeds_differ(self, planted):
        cfg1 = LdaConfig(num_topics=2, iterations=10, burn_in=0, seed=1)
        cfg2 = LdaConfig(num_topics=2, iterations=10, burn_in=0, seed=2)
        m1, m2 = train_lda(planted.docs, cfg1), train_lda(planted.docs, cfg2)
        assert not np.array_equal(m1.doc_topic_counts, m2.doc_topic_counts)

    def test_count_conservation_every_sweep(self, planted_model):
        # validate_every_sweep=True already asserted per sweep; re-check final.
        planted_model.check_invariants()

    def test_log_likelihood_trend(self, planted_model):
        ll = planted_model.log_likelihoods
        assert len(ll) == PLANTED_CFG.iterations
        assert np.mean(ll[40:50]) > np.mean(ll[0:10])


class TestPlantedRecovery:
    def test_top_words_purity(self, planted_model, planted):
        for k in range(2):
            top = [w for w, _ in planted_model.top_words(k, 10)]
            best = max(len(set(top) & set(v)) for v in planted.vocabularies)
            assert best >= 9  # >= 90% of top-10 from one planted vocabulary

    def test_dominant_topic_accuracy(self, planted_model, planted):
        mapping = topic_alignment(planted_model, planted)
        hits = 0
        for d, true_topic in enumerate(planted.topic_of_doc):
            k, share = planted_model.dominant_topic(d)
            hits += mapping[k] == true_topic
        assert hits / len(planted.docs) >= 0.95


class TestTopWords:
    def test_zero_n(self, planted_model):
        assert planted_model.top_words(0, 0) == []

    def test_n_clamped_to_vocab(self, planted_model):
        assert len(planted_model.top_words(0, 10_000)) == planted_model.vocab_size

    def test_out_of_range_topic(self, planted_model):
        with pytest.raises(IndexError):
            planted_model.top_words(2, 5)

    def test_probabilities_in_unit_interval_and_sorted(self, planted_model):
        words = planted_model.top_words(0, 15)
        probs = [p for _, p in words]
        assert all(0 < p < 1 for p in probs)
        assert probs == sorted(probs, reverse=True)


class TestDominantTopic:
    def _model_with_counts(self, rows):
        cfg = LdaConfig(num_topics=len(rows[0]), iterations=1, burn_in=0)
        counts = np.array(rows, dtype=np.int64)
        assignments = []
        for row in counts:
            z = []
            for k, c in enumerate(row):
                z.extend([k] * c)
            assignments.append(np.array(z, dtype=np.int64))
        v = 3
        topic_word = np.zeros((len(rows[0]), v), dtype=np.int64)
        topic_word[:, 0] = counts.sum(axis=0)
        return TopicModel(
            vocabulary={"a": 0, "b": 1, "c": 2},
            topic_word_counts=topic_word,
            doc_topic_counts=counts,
            topic_totals=topic_word.sum(axis=1),
            assignments=assignments,
            config=cfg,
        )

    def test_clear_dominant(self):
        model = self._model_with_counts([[5, 0]])
        assert model.dominant_topic(0) == (0, 1.0)

    def test_tie_goes_to_lowest_topic(self):
        model = self._model_with_counts([[2, 2]])
        assert model.dominant_topic(0) == (0, 0.5)

    def test_out_of_range(self):
        model = self._model_with_counts([[1, 0]])
        with pytest.raises(IndexError):
            model.dominant_topic(5)


class TestSelectByTopics:
    def _corpus_for(self, planted):
        rows = [(i, "FAVOR", " ".join(doc)) for i, doc in enumerate(planted.docs)]
        return make_corpus(rows)

    def test_identity_when_everything_accepted(self, planted_model, planted):
        corpus = self._corpus_for(planted)
        out = select_by_topics(corpus, planted_model, {0, 1}, min_share=0.0)
        assert out.ids() == corpus.ids()

    def test_empty_acceptance(self, planted_model, planted):
        corpus = self._corpus_for(planted)
        assert len(select_by_topics(corpus, planted_model, set())) == 0

    def test_recovers_planted_topic(self, planted_model, planted):
        corpus = self._corpus_for(planted)
        mapping = topic_alignment(planted_model, planted)
        learned_for_0 = next(k for k, t in mapping.items() if t == 0)
        out = select_by_topics(corpus, planted_model, {learned_for_0}, min_share=0.5)
        chosen = {int(tid) for tid in out.ids()}
        planted_0 = {i for i, t in enumerate(planted.topic_of_doc) if t == 0}
        assert len(chosen & planted_0) / len(planted_0) >= 0.95
        assert len(chosen - planted_0) / len(planted_0) <= 0.05

    def test_misalignment_error(self, planted_model):
        corpus = make_corpus([(1, "FAVOR", "una cosa")])
        with pytest.raises(ValueError, match="does not match"):
            select_by_topics(corpus, planted_model, {0})

    def test_bad_topic_id(self, planted_model, planted):
        corpus = self._corpus_for(planted)
        with pytest.raises(IndexError):
            select_by_topics(corpus, planted_model, {99})


class TestSerialization:
    def test_json_round_trip(self, planted_model, tmp_path):
        path = tmp_path / "model.json"
        planted_model.save(path)
        again = TopicModel.load(path)
        assert np.array_equal(again.topic_word_counts, planted_model.topic_word_counts)
        assert np.array_equal(again.doc_topic_counts, planted_model.doc_topic_counts)
        assert again.vocabulary == planted_model.vocabulary
        assert again.config == planted_model.config
        again.check_invariants()
