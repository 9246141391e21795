import math

import numpy as np
import pytest

from priorlda.corpus import build_corpus, compute_stats
from priorlda.metrics import (MetricConfig, codocument_appearance, coherence,
                              expert_word_rate, lift_of_words, log_lift,
                              pmi_score, report, stopword_rate)
from priorlda.priors import TopicKind, symmetric_prior
from priorlda.sampler import ModelConfig, fit, top_words
from priorlda.synthetic import pathology_corpus, planted_stopword_corpus

from .oracles import (naive_codoc, naive_coherence, naive_log_lift, naive_pmi)


def token_docs_of(corpus):
    return [corpus.doc_words(d) for d in range(corpus.n_docs)]


class TestCoherence:
    def test_pair_always_cooccurring(self):
        corpus = build_corpus(["v w"] * 10)
        stats = compute_stats(corpus)
        assert coherence(["v", "w"], stats) == pytest.approx(math.log(11 / 10))

    def test_pair_never_cooccurring(self):
        corpus = build_corpus(["v x"] * 4 + ["w y"] * 6)
        stats = compute_stats(corpus)
        assert coherence(["v", "w"], stats) == pytest.approx(math.log(1 / 4))

    def test_three_doc_sum(self):
        docs = ["a b", "a c", "b c"]
        stats = compute_stats(build_corpus(docs))
        want = naive_coherence(["a", "b", "c"], [d.split() for d in docs])
        assert coherence(["a", "b", "c"], stats) == pytest.approx(want, abs=1e-12)

    def test_order_matters_through_denominator(self):
        # v appears in 4 docs, w in 2; reversing the pair changes the result
        corpus = build_corpus(["v w", "v w", "v x", "v x", "w y", "y x"])
        stats = compute_stats(corpus)
        assert coherence(["v", "w"], stats) != coherence(["w", "v"], stats)
        # equal document counts make the order irrelevant
        stats2 = compute_stats(build_corpus(["p q", "p x", "q x"]))
        assert coherence(["p", "q"], stats2) == coherence(["q", "p"], stats2)

    def test_monotone_in_cooccurrence(self):
        low = compute_stats(build_corpus(["v w", "v x", "w x"]))
        high = compute_stats(build_corpus(["v w", "v w", "w x"]))
        # D(v)=2 in both corpora; co-document count rises from 1 to 2
        assert coherence(["v", "w"], high) > coherence(["v", "w"], low)

    def test_needs_two_words(self, alice_stats):
        with pytest.raises(ValueError):
            coherence(["book"], alice_stats)


class TestPmiScore:
    def test_words_in_every_document_zero_unsmoothed(self):
        stats = compute_stats(build_corpus(["v w"] * 5))
        cfg = MetricConfig(pmi_smoothing=False)
        assert pmi_score(["v", "w"], stats, cfg) == pytest.approx(0.0)

    def test_perfect_association(self):
        stats = compute_stats(build_corpus(["v w", "v w", "x y", "x y"]))
        cfg = MetricConfig(pmi_smoothing=False)
        assert pmi_score(["v", "w"], stats, cfg) == pytest.approx(math.log(2))

    def test_three_doc_median_smoothed(self):
        docs = ["a b", "a c", "b c"]
        stats = compute_stats(build_corpus(docs))
        want = naive_pmi(["a", "b", "c"], [d.split() for d in docs], smoothing=True)
        assert pmi_score(["a", "b", "c"], stats) == pytest.approx(want, abs=1e-12)

    def test_unsmoothed_drops_empty_joints(self):
        docs = ["v w", "v w", "x q", "y q"]
        stats = compute_stats(build_corpus(docs))
        cfg = MetricConfig(pmi_smoothing=False)
        # (v,w) co-occur, (v,x)/(w,x) never do and drop out of the median
        got = pmi_score(["v", "w", "x"], stats, cfg)
        assert got == pytest.approx(naive_pmi(["v", "w", "x"],
                                              [d.split() for d in docs], smoothing=False))

    def test_unsmoothed_all_dropped_is_nan(self):
        stats = compute_stats(build_corpus(["v a", "w b"]))
        cfg = MetricConfig(pmi_smoothing=False)
        assert math.isnan(pmi_score(["v", "w"], stats, cfg))

    def test_lower_median_for_even_counts(self):
        # four words, six pairs; engineered so pair values are distinct
        docs = ["a b c", "a b d", "a c d", "b e", "c e", "d e"]
        stats = compute_stats(build_corpus(docs))
        want = naive_pmi(["a", "b", "c", "d"], [d.split() for d in docs])
        assert pmi_score(["a", "b", "c", "d"], stats) == pytest.approx(want, abs=1e-12)


class TestLogLift:
    def test_topic_equal_to_corpus_distribution(self):
        corpus = build_corpus(["a a b", "b c c c"])
        stats = compute_stats(corpus)
        words = list(stats.vocabulary.id_to_word)
        assert abs(lift_of_words(words, stats.word_freq, stats)) < 1e-6

    def test_single_word_degenerate(self):
        stats = compute_stats(build_corpus(["solo solo"]))
        assert lift_of_words(["solo"], np.array([1.0]), stats) == 0.0

    def test_hand_values(self):
        # corpus probabilities 0.2 / 0.3 / 0.5 against topic 0.5 / 0.3 / 0.2
        corpus = build_corpus(["x x y y y z z z z z"])
        stats = compute_stats(corpus)
        beta_row = np.array([0.5, 0.3, 0.2])
        want = (math.log(0.5 / 0.2) + math.log(0.3 / 0.3) + math.log(0.2 / 0.5)) / 3
        assert lift_of_words(["x", "y", "z"], beta_row, stats) == pytest.approx(want)

    def test_model_route_matches_word_route(self):
        planted = planted_stopword_corpus(seed=2)
        stats = compute_stats(planted.corpus)
        prior = symmetric_prior(3, planted.corpus.vocabulary.size, 1.0)
        model = fit(planted.corpus, prior, ModelConfig(topics=3, iterations=20, seed=0))
        top = top_words(model, 1, 8)
        assert log_lift(model, 1, stats, 8) == pytest.approx(
            lift_of_words(top, model.beta_hat[1], stats))


class TestRates:
    def test_stopword_rate(self):
        assert stopword_rate(["a", "b", "c"], {"x"}) == 0.0
        assert stopword_rate(["a", "b"], {"a", "b"}) == 1.0
        assert stopword_rate(["a", "b", "c", "d"], {"a", "c", "q"}) == 0.5

    def test_stopword_rate_thirty_word_list(self):
        words = [f"w{i}" for i in range(30)]
        assert stopword_rate(words, set(words[:23])) == pytest.approx(23 / 30)

    def test_expert_rate(self):
        assert expert_word_rate(["a", "b"], {"a", "b", "c"}) == 1.0
        assert expert_word_rate(["a", "b"], set()) == 0.0


class TestCodocumentAppearance:
    def test_full_whitelist_everything_hits(self):
        corpus = build_corpus(["a b", "c d", "a d"])
        vocab = set(corpus.vocabulary.id_to_word)
        assert codocument_appearance(["a", "c"], vocab, corpus) == 1.0

    def test_empty_whitelist(self):
        corpus = build_corpus(["a b", "c d"])
        assert codocument_appearance(["a", "c"], set(), corpus) == 0.0

    def test_controlled_overlaps_vs_oracle(self):
        docs = ["a w1 b", "c d", "e w2", "f a"]
        corpus = build_corpus(docs)
        top = ["a", "c", "e", "f"]
        whitelist = {"w1", "w2"}
        want = naive_codoc(top, whitelist, [d.split() for d in docs])
        assert codocument_appearance(top, whitelist, corpus) == want
        # a shares doc 0 with w1; e shares doc 2 with w2; c and f never do
        assert want == 0.5


class TestReport:
    def _small_model(self, seed=0):
        planted = planted_stopword_corpus(seed=1)
        stats = compute_stats(planted.corpus)
        prior = symmetric_prior(4, planted.corpus.vocabulary.size, 1.0)
        model = fit(planted.corpus, prior, ModelConfig(topics=4, iterations=30, seed=seed))
        return planted, stats, model

    def test_single_topic_means_equal_score(self):
        corpus = build_corpus(["a b c d e f g h i j", "a b k l"])
        stats = compute_stats(corpus)
        prior = symmetric_prior(1, corpus.vocabulary.size, 1.0)
        model = fit(corpus, prior, ModelConfig(topics=1, iterations=5, seed=0))
        rep = report(model, stats, {"a"}, {"b"}, MetricConfig(m_small=3, m_large=5, n_lift=5))
        assert len(rep.per_topic) == 1
        for name, value in rep.model_means.items():
            assert value == pytest.approx(getattr(rep.per_topic[0], name))

    def test_all_stopword_model_has_no_domain_means(self):
        corpus = build_corpus(["a b c", "b c d"])
        stats = compute_stats(corpus)
        model = fit(corpus, symmetric_prior(2, corpus.vocabulary.size, 1.0),
                    ModelConfig(topics=2, iterations=5, seed=0))
        model.kinds = (TopicKind.STOPWORD, TopicKind.STOPWORD)
        rep = report(model, stats, set(), set(), MetricConfig(m_small=2, m_large=3, n_lift=3))
        assert rep.domain_means is None

    def test_means_are_arithmetic_means(self):
        planted, stats, model = self._small_model()
        rep = report(model, stats, set(planted.stopwords), set(planted.clusters[0]),
                     MetricConfig(m_small=5, m_large=10, n_lift=10))
        for name in rep.model_means:
            values = [getattr(t, name) for t in rep.per_topic]
            assert rep.model_means[name] == pytest.approx(float(np.mean(values)))

    def test_full_independent_recomputation(self):
        planted, stats, model = self._small_model(seed=3)
        stoplist = set(planted.stopwords)
        whitelist = set(planted.clusters[0]) | set(planted.clusters[1])
        cfg = MetricConfig(m_small=5, m_large=10, n_lift=10)
        rep = report(model, stats, stoplist, whitelist, cfg)
        token_docs = token_docs_of(planted.corpus)
        for t, score in enumerate(rep.per_topic):
            window = top_words(model, t, cfg.m_large)
            small = top_words(model, t, cfg.m_small)
            probs = {w: model.beta_hat[t][stats.vocabulary.word_to_id[w]] for w in window}
            assert score.coherence_10 == pytest.approx(
                naive_coherence(small, token_docs), abs=1e-12)
            assert score.coherence_30 == pytest.approx(
                naive_coherence(window, token_docs), abs=1e-12)
            assert score.pmi == pytest.approx(naive_pmi(window, token_docs), abs=1e-12)
            assert score.log_lift == pytest.approx(
                naive_log_lift(window, probs, token_docs), abs=1e-12)
            assert score.stopword_rate == len([w for w in window if w in stoplist]) / 10
            assert score.expert_rate == len([w for w in window if w in whitelist]) / 10
            assert score.codoc == naive_codoc(window, whitelist, token_docs)

    def test_csv_and_json_round_trip(self, tmp_path):
        planted, stats, model = self._small_model()
        rep = report(model, stats, set(planted.stopwords), set(),
                     MetricConfig(m_small=3, m_large=5, n_lift=5))
        csv_text = rep.to_csv()
        header = csv_text.splitlines()[0]
        assert header == ("topic,coherence_10,coherence_30,pmi,log_lift,"
                          "stopword_rate,expert_rate,codoc,kind")
        assert len(csv_text.splitlines()) == 1 + 4 + 2  # header + topics + mean rows
        data = rep.to_json()
        assert len(data["per_topic"]) == 4
        rep.save(tmp_path / "r.csv")
        rep.save(tmp_path / "r.json")
        assert (tmp_path / "r.csv").read_text() == csv_text


class TestNaiveEquivalenceFuzz:
    def test_random_corpora(self):
        rng = np.random.default_rng(99)
        for trial in range(10):
            n_words = int(rng.integers(8, 40))
            words = [f"w{i}" for i in range(n_words)]
            docs = [" ".join(rng.choice(words, size=rng.integers(3, 12)))
                    for _ in range(int(rng.integers(5, 60)))]
            corpus = build_corpus(docs)
            stats = compute_stats(corpus)
            token_docs = [d.split() for d in docs]
            vocab_words = corpus.vocabulary.id_to_word
            m = min(8, len(vocab_words))
            top = list(rng.choice(vocab_words, size=m, replace=False))
            assert coherence(top, stats) == pytest.approx(
                naive_coherence(top, token_docs), abs=1e-12)
            assert pmi_score(top, stats) == pytest.approx(
                naive_pmi(top, token_docs), abs=1e-12)
            row = rng.uniform(0.01, 1.0, size=len(vocab_words))
            row /= row.sum()
            probs = {w: row[corpus.vocabulary.word_to_id[w]] for w in top}
            assert lift_of_words(top, row, stats) == pytest.approx(
                naive_log_lift(top, probs, token_docs), abs=1e-12)


class TestStopwordPathology:
    def test_universal_topic_beats_clusters_on_coherence_and_pmi_but_not_lift(self):
        planted = pathology_corpus(n_docs=500)
        stats = compute_stats(planted.corpus)
        stop_list = list(planted.stopwords)
        stop_coh = coherence(stop_list, stats)
        stop_pmi = pmi_score(stop_list, stats)
        stop_lift = lift_of_words(stop_list,
                                  _concentrated_row(stats, stop_list), stats)
        for cluster in planted.clusters:
            cluster_row = _concentrated_row(stats, cluster)
            assert stop_coh > coherence(cluster, stats)
            assert stop_pmi > pmi_score(cluster, stats)
            assert stop_lift < lift_of_words(cluster, cluster_row, stats)


def _concentrated_row(stats, support, mass=1.0 - 1e-6):
    """A topic row putting nearly all mass uniformly on ``support``."""
    v = stats.vocabulary.size
    row = np.full(v, (1.0 - mass) / (v - len(support)))
    for w in support:
        row[stats.vocabulary.word_to_id[w]] = mass / len(support)
    return row
