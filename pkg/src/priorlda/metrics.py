"""Topic quality scores: co-document coherence, PMI, log lift, and list rates.

Coherence and PMI are computed from in-corpus document co-occurrence counts.
Both are known to reward topics full of words that appear in every document,
which is exactly what the lift score is here to counterbalance.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, CorpusStats, co_doc_freq
from .priors import TopicKind
from .sampler import FittedModel, top_words

REPORT_FORMAT_VERSION = 1

METRIC_COLUMNS = ("coherence_10", "coherence_30", "pmi", "log_lift",
                  "stopword_rate", "expert_rate", "codoc")


@dataclass(frozen=True)
class MetricConfig:
    """Evaluation windows: m_small/m_large top words for coherence (the 10-
    and 30-word columns), m_large for PMI and the rate metrics, n_lift for
    lift. Add-one smoothing on joint document counts is on by default."""

    m_small: int = 10
    m_large: int = 30
    n_lift: int = 30
    pmi_smoothing: bool = True

    def __post_init__(self):
        if self.m_small < 2 or self.m_large < 2:
            raise ValueError("coherence/PMI windows need at least 2 words")
        if self.n_lift < 1:
            raise ValueError("n_lift must be >= 1")


def _word_ids(top: Sequence[str], stats: CorpusStats) -> list[int]:
    ids = []
    for w in top:
        if w not in stats.vocabulary:
            raise ValueError(f"word {w!r} is not in the statistics vocabulary")
        ids.append(stats.vocabulary.word_to_id[w])
    return ids


def coherence(top: Sequence[str], stats: CorpusStats) -> float:
    """Sum over ordered pairs i<j of ln((D(v_i,v_j) + 1) / D(v_i)).

    ``top`` must be ordered by descending probability: the denominator is the
    document count of the more probable word of each pair.
    """
    ids = _word_ids(top, stats)
    if len(ids) < 2:
        raise ValueError("coherence needs at least 2 words")
    total = 0.0
    for i in range(len(ids) - 1):
        d_i = stats.doc_freq[ids[i]]
        for j in range(i + 1, len(ids)):
            total += math.log((co_doc_freq(stats, ids[i], ids[j]) + 1) / d_i)
    return total


def _median_low(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def pmi_score(top: Sequence[str], stats: CorpusStats,
              config: MetricConfig = MetricConfig()) -> float:
    """Median over word pairs of ln(p(x,y) / (p(x) p(y))).

    Probabilities are document-level: p(x) = D(x)/n_docs. With smoothing on,
    the joint gets an add-one count; with smoothing off, never-co-occurring
    pairs are dropped from the median, and the result is NaN when no pair
    remains. Even pair counts use the lower median.
    """
    ids = _word_ids(top, stats)
    if len(ids) < 2:
        raise ValueError("pmi needs at least 2 words")
    n = stats.n_docs
    values = []
    for i in range(len(ids) - 1):
        for j in range(i + 1, len(ids)):
            joint = co_doc_freq(stats, ids[i], ids[j])
            if config.pmi_smoothing:
                joint += 1
            elif joint == 0:
                continue
            p_joint = joint / n
            p_i = stats.doc_freq[ids[i]] / n
            p_j = stats.doc_freq[ids[j]] / n
            values.append(math.log(p_joint / (p_i * p_j)))
    if not values:
        return float("nan")
    return _median_low(values)


def lift_of_words(words: Sequence[str], beta_row: np.ndarray, stats: CorpusStats) -> float:
    """Mean ln(beta_w / b_w) over the given words."""
    ids = _word_ids(words, stats)
    return float(np.mean(np.log(beta_row[ids] / stats.word_freq[ids])))


def log_lift(model: FittedModel, topic: int, stats: CorpusStats,
             n_lift: int = 30) -> float:
    """Mean log lift of the topic's top n_lift words."""
    top = top_words(model, topic, n_lift)
    return lift_of_words(top, model.beta_hat[topic], stats)


def stopword_rate(top: Sequence[str], stoplist: Iterable[str]) -> float:
    """Share of the top words found on the stoplist."""
    stop = set(stoplist)
    return sum(1 for w in top if w in stop) / len(top)


def expert_word_rate(top: Sequence[str], whitelist: Iterable[str]) -> float:
    """Share of the top words found on the expert whitelist."""
    white = set(whitelist)
    return sum(1 for w in top if w in white) / len(top)


def _codoc_core(top_ids: Sequence[int], white_ids: Sequence[int],
                doc_index: Sequence[np.ndarray]) -> float:
    white_docs: set[int] = set()
    for w in white_ids:
        white_docs.update(int(d) for d in doc_index[w])
    if not top_ids:
        return 0.0
    hits = sum(1 for w in top_ids
               if any(int(d) in white_docs for d in doc_index[w]))
    return hits / len(top_ids)


def codocument_appearance(top: Sequence[str], whitelist: Iterable[str],
                          corpus: Corpus) -> float:
    """Share of top words that share at least one document with some
    whitelist word. One of several defensible aggregations; this per-top-word
    any-document-overlap form is the one the report uses."""
    vocab = corpus.vocabulary
    doc_index: list[list[int]] = [[] for _ in range(vocab.size)]
    for d, doc in enumerate(corpus.documents):
        for w in np.unique(doc):
            doc_index[int(w)].append(d)
    top_ids = [vocab.word_to_id[w] for w in top if w in vocab]
    if len(top_ids) != len(top):
        missing = [w for w in top if w not in vocab][0]
        raise ValueError(f"word {missing!r} is not in the corpus vocabulary")
    white_ids = vocab.ids(set(whitelist))
    return _codoc_core(top_ids, white_ids,
                       [np.asarray(ix, dtype=np.int64) for ix in doc_index])


@dataclass(frozen=True)
class TopicScore:
    coherence_10: float
    coherence_30: float
    pmi: float
    log_lift: float
    stopword_rate: float
    expert_rate: float
    codoc: float
    kind: TopicKind

    def metric_values(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_COLUMNS}


@dataclass(eq=False)
class ModelReport:
    """Per-topic scores plus means over all topics and over domain topics.

    Domain topics are every topic not labeled Stopword. ``domain_means`` is
    None when the model has no domain topics.
    """

    per_topic: list[TopicScore]
    model_means: dict
    domain_means: dict | None

    def to_json(self) -> dict:
        return {
            "version": REPORT_FORMAT_VERSION,
            "per_topic": [dict(t.metric_values(), kind=t.kind.value) for t in self.per_topic],
            "model_means": self.model_means,
            "domain_means": self.domain_means,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("topic",) + METRIC_COLUMNS + ("kind",))
        for t, score in enumerate(self.per_topic):
            writer.writerow([t] + [repr(score.metric_values()[c]) for c in METRIC_COLUMNS]
                            + [score.kind.value])
        writer.writerow(["mean_all"] + [repr(self.model_means[c]) for c in METRIC_COLUMNS] + [""])
        if self.domain_means is not None:
            writer.writerow(["mean_domain"] + [repr(self.domain_means[c]) for c in METRIC_COLUMNS]
                            + [""])
        return buf.getvalue()

    def save(self, path: str | Path) -> None:
        path = Path(path)
        if path.suffix == ".csv":
            path.write_text(self.to_csv(), encoding="utf-8")
        else:
            path.write_text(json.dumps(self.to_json(), separators=(",", ":")) + "\n",
                            encoding="utf-8")


def _means(scores: list[TopicScore]) -> dict:
    return {name: float(np.mean([s.metric_values()[name] for s in scores]))
            for name in METRIC_COLUMNS}


def report(model: FittedModel, stats: CorpusStats, stoplist: Iterable[str],
           whitelist: Iterable[str], config: MetricConfig = MetricConfig()) -> ModelReport:
    """Score every topic and aggregate. Stoplist and whitelist words are
    matched by string against the statistics vocabulary."""
    stoplist = set(stoplist)
    whitelist = set(whitelist)
    white_ids = stats.vocabulary.ids(whitelist)
    scores = []
    for t in range(model.n_topics):
        rate_window = top_words(model, t, config.m_large)
        top_ids = [stats.vocabulary.word_to_id[w] for w in rate_window]
        scores.append(TopicScore(
            coherence_10=coherence(top_words(model, t, config.m_small), stats),
            coherence_30=coherence(rate_window, stats),
            pmi=pmi_score(rate_window, stats, config),
            log_lift=log_lift(model, t, stats, config.n_lift),
            stopword_rate=stopword_rate(rate_window, stoplist),
            expert_rate=expert_word_rate(rate_window, whitelist),
            codoc=_codoc_core(top_ids, white_ids, stats.doc_index),
            kind=model.kinds[t],
        ))
    domain = [s for s in scores if s.kind is not TopicKind.STOPWORD]
    return ModelReport(per_topic=scores, model_means=_means(scores),
                       domain_means=_means(domain) if domain else None)
