"""Collapsed Gibbs sampling for LDA with per-topic Dirichlet weight rows.

Topic assignments are resampled token by token from the collapsed
conditional p(z=k | rest), which is proportional to

    (n_dk + alpha) * (n_kw + eta_kw) / (n_k + sum_v eta_kv)

with all counts excluding the token being resampled. The per-topic eta rows
come from a PriorMatrix, so heterogeneous priors drop in with no change to
the inference.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .corpus import Corpus, Vocabulary
from .priors import PriorMatrix, TopicKind, symmetric_prior

MODEL_FORMAT_VERSION = 1

# Grid for the likelihood-maximizing baseline; symmetric alpha x eta.
DEFAULT_HYPER_GRID = tuple((a, e)
                           for a in (0.01, 0.1, 1.0, 10.0)
                           for e in (0.01, 0.1, 1.0, 10.0))


class DimensionMismatch(ValueError):
    """Prior, corpus, and config disagree about K or V."""


@dataclass(frozen=True)
class ModelConfig:
    """Sampler settings. ``burn_in`` defaults to half the iterations.

    With ``average_estimates`` the returned estimates are posterior means over
    all post-burn-in sweeps instead of the final sample. ``doc_streams``
    switches to one RNG stream per document and sweep-start snapshots of the
    topic counts, making sweeps document-order independent (and document-
    parallelizable); the default is the strictly sequential exact sweep.
    """

    topics: int = 20
    alpha: float = 1.0
    iterations: int = 200
    burn_in: int | None = None
    seed: int = 0
    average_estimates: bool = False
    doc_streams: bool = False

    def __post_init__(self):
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.iterations // 2)
        if self.topics < 1:
            raise ValueError("topics must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not self.iterations > self.burn_in >= 0:
            raise ValueError("need iterations > burn_in >= 0")

    def to_json(self) -> dict:
        return {
            "topics": self.topics,
            "alpha": self.alpha,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "average_estimates": self.average_estimates,
            "doc_streams": self.doc_streams,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelConfig":
        return cls(**data)


@dataclass(eq=False)
class ModelState:
    """Token-level assignments and the count arrays the sweeps maintain."""

    tokens: np.ndarray        # flat token ids
    doc_ix: np.ndarray        # document index per token
    doc_lengths: np.ndarray
    z: np.ndarray             # topic per token
    n_dk: np.ndarray          # (D, K)
    n_kw: np.ndarray          # (K, V)
    n_k: np.ndarray           # (K,)
    rng: np.random.Generator
    doc_rngs: list[np.random.Generator] | None = None
    doc_starts: np.ndarray = field(default=None, repr=False)

    @property
    def n_topics(self) -> int:
        return self.n_k.shape[0]

    def z_by_doc(self) -> list[np.ndarray]:
        return [self.z[self.doc_starts[d]:self.doc_starts[d + 1]]
                for d in range(len(self.doc_lengths))]


def _doc_generators(corpus: Corpus, seed: int) -> list[np.random.Generator]:
    """One independent, reproducible stream per document.

    Streams are keyed by doc_id when present (so they follow the document
    under reordering), by position otherwise.
    """
    gens = []
    for d in range(corpus.n_docs):
        if corpus.doc_ids is not None:
            key = zlib.crc32(corpus.doc_ids[d].encode("utf-8"))
        else:
            key = d
        gens.append(np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key]))))
    return gens


def tabulate(tokens: np.ndarray, doc_ix: np.ndarray, z: np.ndarray,
             n_docs: int, n_topics: int, vocab_size: int):
    """Recount n_dk, n_kw, n_k directly from the assignments."""
    n_dk = np.zeros((n_docs, n_topics), dtype=np.int32)
    n_kw = np.zeros((n_topics, vocab_size), dtype=np.int32)
    n_k = np.zeros(n_topics, dtype=np.int32)
    np.add.at(n_dk, (doc_ix, z), 1)
    np.add.at(n_kw, (z, tokens), 1)
    np.add.at(n_k, z, 1)
    return n_dk, n_kw, n_k


def init(corpus: Corpus, prior: PriorMatrix, config: ModelConfig) -> ModelState:
    """Assign every token a uniformly random topic and tabulate counts."""
    if prior.vocab_size != corpus.vocabulary.size:
        raise DimensionMismatch(
            f"prior covers {prior.vocab_size} words, corpus has {corpus.vocabulary.size}")
    if prior.n_topics != config.topics:
        raise DimensionMismatch(
            f"prior has {prior.n_topics} topics, config wants {config.topics}")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    lengths = np.array([doc.size for doc in corpus.documents], dtype=np.int64)
    tokens = (np.concatenate(corpus.documents) if lengths.sum()
              else np.empty(0, dtype=np.int32)).astype(np.int32)
    doc_ix = np.repeat(np.arange(corpus.n_docs, dtype=np.int32), lengths)
    doc_rngs = _doc_generators(corpus, config.seed) if config.doc_streams else None
    if doc_rngs is not None:
        # initial assignments come from the per-document streams so that the
        # whole chain follows a document under reordering
        z = np.concatenate([gen.integers(0, config.topics, int(length))
                            for gen, length in zip(doc_rngs, lengths)]).astype(np.int32)
    else:
        z = rng.integers(0, config.topics, tokens.shape[0]).astype(np.int32)
    n_dk, n_kw, n_k = tabulate(tokens, doc_ix, z, corpus.n_docs,
                               config.topics, corpus.vocabulary.size)
    starts = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    return ModelState(tokens=tokens, doc_ix=doc_ix, doc_lengths=lengths, z=z,
                      n_dk=n_dk, n_kw=n_kw, n_k=n_k, rng=rng,
                      doc_rngs=doc_rngs, doc_starts=starts)


def sweep(state: ModelState, prior: PriorMatrix, alpha: float) -> ModelState:
    """Resample every token once, in document order, updating counts in place."""
    uniforms = state.rng.random(state.tokens.shape[0])
    _kernels.sweep_tokens(state.tokens, state.doc_ix, state.z,
                          state.n_dk, state.n_kw, state.n_k,
                          prior.weights, prior.row_sums, alpha, uniforms)
    return state


def sweep_snapshot(state: ModelState, prior: PriorMatrix, alpha: float) -> ModelState:
    """Document-order-independent sweep.

    Each document is resampled against a sweep-start snapshot of the topic
    counts plus its own running delta, drawing randomness from its own
    stream. Equivalent under any document ordering or parallel schedule.
    """
    if state.doc_rngs is None:
        raise ValueError("snapshot sweeps need doc_streams=True at init")
    kw_snap = state.n_kw.copy()
    k_snap = state.n_k.copy()
    delta_kw = np.zeros_like(state.n_kw)
    delta_k = np.zeros_like(state.n_k)
    for d in range(len(state.doc_lengths)):
        lo, hi = state.doc_starts[d], state.doc_starts[d + 1]
        if hi == lo:
            continue
        delta_kw[:] = 0
        delta_k[:] = 0
        uniforms = state.doc_rngs[d].random(int(hi - lo))
        _kernels.sweep_doc_snapshot(state.tokens[lo:hi], state.z[lo:hi],
                                    state.n_dk[d], kw_snap, k_snap,
                                    delta_kw, delta_k,
                                    prior.weights, prior.row_sums, alpha, uniforms)
    n_dk, n_kw, n_k = tabulate(state.tokens, state.doc_ix, state.z,
                               len(state.doc_lengths), state.n_topics,
                               state.n_kw.shape[1])
    state.n_dk, state.n_kw, state.n_k = n_dk, n_kw, n_k
    return state


def log_likelihood(state: ModelState, prior: PriorMatrix, alpha: float) -> float:
    """Collapsed joint log p(w, z | alpha, eta): a product of
    Dirichlet-multinomial normalizers over documents and topics."""
    k_total = state.n_topics
    eta = prior.weights
    eta_sums = prior.row_sums
    doc_part = float((gammaln(k_total * alpha) - gammaln(state.doc_lengths + k_total * alpha)).sum())
    doc_part += float((gammaln(state.n_dk + alpha) - gammaln(alpha)).sum())
    topic_part = float((gammaln(eta_sums) - gammaln(state.n_k + eta_sums)).sum())
    topic_part += float((gammaln(state.n_kw + eta) - gammaln(eta)).sum())
    return doc_part + topic_part


def _point_estimates(state: ModelState, prior: PriorMatrix, alpha: float):
    beta = (state.n_kw + prior.weights) / (state.n_k + prior.row_sums)[:, None]
    k_total = state.n_topics
    theta = (state.n_dk + alpha) / (state.doc_lengths + k_total * alpha)[:, None]
    return beta, theta


@dataclass(eq=False)
class FittedModel:
    """Posterior point estimates plus the labels and trace from the fit."""

    beta_hat: np.ndarray              # (K, V) topic-word, rows sum to 1
    theta_hat: np.ndarray             # (D, K) doc-topic, rows sum to 1
    kinds: tuple[TopicKind, ...]
    loglik_trace: np.ndarray
    config: ModelConfig | None = None
    vocabulary: Vocabulary | None = None
    prior: PriorMatrix | None = None

    def __post_init__(self):
        for name, rows in (("beta_hat", self.beta_hat), ("theta_hat", self.theta_hat)):
            if not (rows > 0).all():
                raise ValueError(f"{name} must be strictly positive")
            if np.abs(rows.sum(axis=1) - 1.0).max() > 1e-9:
                raise ValueError(f"{name} rows must sum to 1")

    @property
    def n_topics(self) -> int:
        return self.beta_hat.shape[0]

    def to_json(self) -> dict:
        return {
            "version": MODEL_FORMAT_VERSION,
            "config": self.config.to_json() if self.config else None,
            "kinds": [k.value for k in self.kinds],
            "beta_hat": self.beta_hat.tolist(),
            "theta_hat": self.theta_hat.tolist(),
            "loglik_trace": self.loglik_trace.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict, vocabulary: Vocabulary | None = None) -> "FittedModel":
        if data.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version: {data.get('version')!r}")
        return cls(
            beta_hat=np.asarray(data["beta_hat"], dtype=np.float64),
            theta_hat=np.asarray(data["theta_hat"], dtype=np.float64),
            kinds=tuple(TopicKind(k) for k in data["kinds"]),
            loglik_trace=np.asarray(data["loglik_trace"], dtype=np.float64),
            config=ModelConfig.from_json(data["config"]) if data.get("config") else None,
            vocabulary=vocabulary,
        )


def estimate(state: ModelState, prior: PriorMatrix, alpha: float,
             vocabulary: Vocabulary | None = None) -> FittedModel:
    """Point estimates from the current sample.

    beta_hat[k,w] = (n_kw + eta_kw) / (n_k + sum_v eta_kv)
    theta_hat[d,k] = (n_dk + alpha) / (len_d + K alpha)

    A topic with no counts comes out as exactly its normalized prior row.
    """
    beta, theta = _point_estimates(state, prior, alpha)
    return FittedModel(beta_hat=beta, theta_hat=theta, kinds=prior.kinds,
                       loglik_trace=np.empty(0), vocabulary=vocabulary, prior=prior)


def fit(corpus: Corpus, prior: PriorMatrix, config: ModelConfig) -> FittedModel:
    """Initialize, run the configured sweeps, and estimate.

    Deterministic given the seed: the same inputs produce a bit-identical
    model. The joint log-likelihood is recorded after every sweep.
    """
    state = init(corpus, prior, config)
    sweep_fn = sweep_snapshot if config.doc_streams else sweep
    trace = np.empty(config.iterations)
    beta_acc = theta_acc = None
    n_averaged = 0
    for i in range(config.iterations):
        sweep_fn(state, prior, config.alpha)
        trace[i] = log_likelihood(state, prior, config.alpha)
        if config.average_estimates and i >= config.burn_in:
            beta, theta = _point_estimates(state, prior, config.alpha)
            if beta_acc is None:
                beta_acc, theta_acc = beta, theta
            else:
                beta_acc += beta
                theta_acc += theta
            n_averaged += 1
    if config.average_estimates:
        beta, theta = beta_acc / n_averaged, theta_acc / n_averaged
    else:
        beta, theta = _point_estimates(state, prior, config.alpha)
    return FittedModel(beta_hat=beta, theta_hat=theta, kinds=prior.kinds,
                       loglik_trace=trace, config=config,
                       vocabulary=corpus.vocabulary, prior=prior)


def top_words(model: FittedModel, topic: int, n: int = 30) -> list[str]:
    """The n most probable words of a topic, ties broken by ascending word id."""
    if model.vocabulary is None:
        raise ValueError("model has no vocabulary attached")
    if not 0 <= topic < model.n_topics:
        raise ValueError(f"topic index {topic} out of range")
    if n < 1:
        raise ValueError("n must be >= 1")
    order = np.argsort(-model.beta_hat[topic], kind="stable")[:n]
    return [model.vocabulary.id_to_word[i] for i in order]


@dataclass(frozen=True)
class SearchPoint:
    alpha: float
    eta: float
    log_likelihood: float


@dataclass(eq=False)
class SearchResult:
    model: FittedModel
    table: list[SearchPoint]


def hyperparameter_search(corpus: Corpus, grid, config: ModelConfig) -> SearchResult:
    """Fit one symmetric-prior model per (alpha, eta) grid point and keep the
    one with the highest final joint log-likelihood. Ties go to the earlier
    grid point, so the search is deterministic."""
    points = list(grid)
    if not points:
        raise ValueError("hyperparameter grid is empty")
    best_model = None
    best_ll = -np.inf
    table = []
    for a, e in points:
        prior = symmetric_prior(config.topics, corpus.vocabulary.size, e)
        model = fit(corpus, prior, replace(config, alpha=a))
        ll = float(model.loglik_trace[-1])
        table.append(SearchPoint(alpha=a, eta=e, log_likelihood=ll))
        if ll > best_ll:
            best_model, best_ll = model, ll
    return SearchResult(model=best_model, table=table)


def heldout_perplexity(model: FittedModel, corpus: Corpus,
                       sweeps: int = 50, seed: int = 0) -> float:
    """Per-word predictive perplexity on a corpus not used for fitting.

    Held-out words are matched by string against the model vocabulary;
    out-of-vocabulary tokens are dropped. Document mixtures are folded in by
    Gibbs passes that hold beta_hat fixed, then perplexity is
    exp(-mean log p(w | theta_d, beta)).
    """
    if model.vocabulary is None:
        raise ValueError("model has no vocabulary attached")
    beta = model.beta_hat
    k_total = beta.shape[0]
    word_to_id = model.vocabulary.word_to_id
    heldout_words = corpus.vocabulary.id_to_word
    alpha = model.config.alpha if model.config else 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    log_total = 0.0
    n_tokens = 0
    for raw_doc in corpus.documents:
        doc = np.array([word_to_id[heldout_words[t]] for t in raw_doc
                        if heldout_words[t] in word_to_id], dtype=np.int64)
        if doc.size == 0:
            continue
        z = rng.integers(0, k_total, doc.size)
        n_dk = np.bincount(z, minlength=k_total).astype(np.float64)
        for _ in range(sweeps):
            for t, w in enumerate(doc):
                n_dk[z[t]] -= 1
                p = (n_dk + alpha) * beta[:, w]
                p /= p.sum()
                z[t] = rng.choice(k_total, p=p)
                n_dk[z[t]] += 1
        theta = (n_dk + alpha) / (doc.size + k_total * alpha)
        log_total += float(np.log(theta @ beta[:, doc]).sum())
        n_tokens += int(doc.size)
    if n_tokens == 0:
        raise ValueError("no held-out token matches the model vocabulary")
    return float(np.exp(-log_total / n_tokens))


def save_model(model: FittedModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_json(), separators=(",", ":")) + "\n",
                          encoding="utf-8")


def load_model(path: str | Path, vocabulary: Vocabulary | None = None) -> FittedModel:
    return FittedModel.from_json(json.loads(Path(path).read_text(encoding="utf-8")),
                                 vocabulary=vocabulary)
