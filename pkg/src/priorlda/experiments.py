"""Model-variant zoo, grid runner, comparison tables, and scatter data.

A plan names a corpus, the variants to run, value lists for the searchable
settings, and replicate seeds. Runs are independent; failures are recorded
and skipped, never fatal to the sweep.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import product
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from .corpus import (Corpus, CorpusStats, build_corpus, compute_stats,
                     default_stoplist, delete_low_tfidf, delete_stopwords,
                     load_corpus, load_raw_documents, load_word_list)
from .metrics import METRIC_COLUMNS, MetricConfig, ModelReport, report
from .priors import PriorConfig, TopicKind, assemble, symmetric_prior
from .sampler import (DEFAULT_HYPER_GRID, FittedModel, ModelConfig, fit,
                      hyperparameter_search)

log = logging.getLogger(__name__)

MANIFEST_FORMAT_VERSION = 1


class MissingResource(ValueError):
    """A variant needs a word list the plan does not provide."""


class Variant(str, Enum):
    NO_DELETION = "no_deletion"
    STOPWORD_DELETION = "stopword_deletion"
    TFIDF_DELETION = "tfidf_deletion"
    KEYWORD_TOPICS_BASELINE = "keyword_topics_baseline"
    HYPERPARAM_OPT = "hyperparam_opt"
    DELETION_PLUS_HYPERPARAM_OPT = "deletion_plus_hyperparam_opt"
    WORDFREQ_PRIOR = "wordfreq_prior"
    TFIDF_PRIOR = "tfidf_prior"
    KEYWORD_SEEDING_PRIOR = "keyword_seeding_prior"


# Variants that change the vocabulary, making coherence/PMI incomparable
# against full-vocabulary runs.
ALTERS_VOCABULARY = frozenset({
    Variant.STOPWORD_DELETION,
    Variant.TFIDF_DELETION,
    Variant.DELETION_PLUS_HYPERPARAM_OPT,
})

# Variants whose stopword rate is zero by construction (the scored stoplist
# was deleted from the vocabulary).
FORCES_ZERO_STOPWORD_RATE = frozenset({
    Variant.STOPWORD_DELETION,
    Variant.DELETION_PLUS_HYPERPARAM_OPT,
})

NEEDS_WHITELIST = frozenset({
    Variant.KEYWORD_TOPICS_BASELINE,
    Variant.KEYWORD_SEEDING_PRIOR,
})

# Searchable dimensions that actually apply, per variant; topics and
# iterations always do.
_EXTRA_DIMS = {
    Variant.NO_DELETION: (),
    Variant.STOPWORD_DELETION: (),
    Variant.TFIDF_DELETION: (),
    Variant.KEYWORD_TOPICS_BASELINE: ("c2", "keyword_boost"),
    Variant.HYPERPARAM_OPT: (),
    Variant.DELETION_PLUS_HYPERPARAM_OPT: (),
    Variant.WORDFREQ_PRIOR: (),
    Variant.TFIDF_PRIOR: ("c1",),
    Variant.KEYWORD_SEEDING_PRIOR: ("c1", "c2", "tfidf_topics",
                                    "keyword_topics", "keyword_boost"),
}

# The full search grid the default settings were selected from.
FULL_SEARCH_GRID = {
    "topics": [5, 10, 15, 20, 25, 30, 35, 40, 45, 50],
    "c1": [100.0, 10.0, 1.0, 0.1, 0.01],
    "c2": [100.0, 10.0, 1.0, 0.1, 0.01],
    "tfidf_topics": [1, 5, 10, 19],
    "keyword_topics": [1, 5, 10, 18, 19],
    "keyword_boost": [10.0, 50.0, 100.0, 1000.0],
    "iterations": [100, 200, 500, 1000],
}


@dataclass(frozen=True)
class RunSettings:
    """One fully resolved configuration for a single run."""

    topics: int = 20
    iterations: int = 200
    c1: float = 1.0
    c2: float = 1.0
    keyword_boost: float = 100.0
    stopword_topics: int = 1
    tfidf_topics: int = 9
    keyword_topics: int = 10
    alpha: float = 1.0
    tfidf_cut: float = 0.05

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentPlan:
    """What to run: corpus, variants, grid value lists, seeds, word lists.

    ``stoplist`` is used both for deletion variants and for scoring the
    stopword rate; None means the bundled default list. ``whitelist`` doubles
    as the keyword seed list for keyword variants and as the expert list for
    scoring.
    """

    corpus: str = ""
    corpus_format: str | None = None       # text | jsonl | corpus; None = by extension
    variants: list[Variant] = field(default_factory=lambda: list(Variant))
    topics: list[int] = field(default_factory=lambda: [20])
    c1: list[float] = field(default_factory=lambda: [1.0])
    c2: list[float] = field(default_factory=lambda: [1.0])
    tfidf_topics: list[int] = field(default_factory=lambda: [9])
    keyword_topics: list[int] = field(default_factory=lambda: [10])
    keyword_boost: list[float] = field(default_factory=lambda: [100.0])
    iterations: list[int] = field(default_factory=lambda: [200])
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3])
    stopword_topics: int = 1
    alpha: float = 1.0
    tfidf_cut: float = 0.05
    metric_top_words: int = 30
    stoplist: str | None = None
    whitelist: str | None = None
    hyper_alphas: list[float] = field(default_factory=lambda: sorted({a for a, _ in DEFAULT_HYPER_GRID}))
    hyper_etas: list[float] = field(default_factory=lambda: sorted({e for _, e in DEFAULT_HYPER_GRID}))

    def metric_config(self) -> MetricConfig:
        n = self.metric_top_words
        return MetricConfig(m_small=min(10, n), m_large=n, n_lift=n)

    def __post_init__(self):
        self.variants = [Variant(v) for v in self.variants]
        if not self.variants:
            raise ValueError("plan needs at least one variant")
        for name in ("topics", "c1", "c2", "tfidf_topics", "keyword_topics",
                     "keyword_boost", "iterations", "seeds"):
            if not getattr(self, name):
                raise ValueError(f"plan field {name} must be a non-empty list")

    def to_json(self) -> dict:
        data = asdict(self)
        data["variants"] = [v.value for v in self.variants]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentPlan":
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentPlan":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class RunSpec:
    variant: Variant
    settings: RunSettings
    seed: int


def enumerate_runs(plan: ExperimentPlan) -> list[RunSpec]:
    """Deterministic plan order: variants, then the Cartesian product of each
    variant's applicable dimensions, then seeds. Dimensions that do not apply
    to a variant are pinned to their first plan value."""
    specs = []
    for variant in plan.variants:
        dims = ("topics", "iterations") + _EXTRA_DIMS[variant]
        combos = product(*(getattr(plan, d) for d in dims))
        for combo in combos:
            resolved = {d: v for d, v in zip(dims, combo)}
            settings = RunSettings(
                topics=resolved.get("topics", plan.topics[0]),
                iterations=resolved.get("iterations", plan.iterations[0]),
                c1=resolved.get("c1", plan.c1[0]),
                c2=resolved.get("c2", plan.c2[0]),
                keyword_boost=resolved.get("keyword_boost", plan.keyword_boost[0]),
                stopword_topics=plan.stopword_topics,
                tfidf_topics=resolved.get("tfidf_topics", plan.tfidf_topics[0]),
                keyword_topics=resolved.get("keyword_topics", plan.keyword_topics[0]),
                alpha=plan.alpha,
                tfidf_cut=plan.tfidf_cut,
            )
            for seed in plan.seeds:
                specs.append(RunSpec(variant, settings, seed))
    return specs


@dataclass(eq=False)
class RunRecord:
    variant: Variant
    settings: RunSettings
    seed: int
    model: FittedModel
    report: ModelReport
    duration: float
    vocabulary_altered: bool

    def forced_zero_stopword_rate(self) -> bool:
        return self.variant in FORCES_ZERO_STOPWORD_RATE


@dataclass(frozen=True)
class FailedRun:
    variant: Variant
    settings: RunSettings
    seed: int
    error: str


@dataclass(eq=False)
class PlanResources:
    """Corpus and word lists loaded once per plan."""

    corpus: Corpus
    stoplist: list[str]
    whitelist: list[str] | None


def load_resources(plan: ExperimentPlan, corpus: Corpus | None = None) -> PlanResources:
    if corpus is None:
        corpus = _load_plan_corpus(plan)
    stoplist = load_word_list(plan.stoplist) if plan.stoplist else default_stoplist()
    whitelist = load_word_list(plan.whitelist) if plan.whitelist else None
    return PlanResources(corpus=corpus, stoplist=stoplist, whitelist=whitelist)


def _load_plan_corpus(plan: ExperimentPlan) -> Corpus:
    if not plan.corpus:
        raise MissingResource("plan names no corpus")
    fmt = plan.corpus_format
    if fmt is None:
        suffix = Path(plan.corpus).suffix
        fmt = {"": "text", ".txt": "text", ".jsonl": "jsonl", ".json": "corpus"}.get(suffix, "text")
    if fmt == "corpus":
        return load_corpus(plan.corpus)
    texts, ids = load_raw_documents(plan.corpus, fmt)
    return build_corpus(texts, doc_ids=ids)


def _preprocess(variant: Variant, corpus: Corpus, stoplist: list[str],
                tfidf_cut: float) -> Corpus:
    if variant in (Variant.STOPWORD_DELETION, Variant.DELETION_PLUS_HYPERPARAM_OPT):
        return delete_stopwords(corpus, stoplist)
    if variant is Variant.TFIDF_DELETION:
        return delete_low_tfidf(corpus, tfidf_cut)
    return corpus


def _preprocessing_key(variant: Variant) -> str:
    if variant in (Variant.STOPWORD_DELETION, Variant.DELETION_PLUS_HYPERPARAM_OPT):
        return "stoplist"
    if variant is Variant.TFIDF_DELETION:
        return "tfidf"
    return "none"


def _build_model(variant: Variant, working: Corpus, stats: CorpusStats,
                 settings: RunSettings, seed: int,
                 whitelist: list[str] | None, plan: ExperimentPlan) -> FittedModel:
    k = settings.topics
    config = ModelConfig(topics=k, alpha=settings.alpha,
                         iterations=settings.iterations, seed=seed)
    if variant in NEEDS_WHITELIST and not whitelist:
        raise MissingResource(f"variant {variant.value} needs a whitelist (keyword list)")
    if variant in (Variant.NO_DELETION, Variant.STOPWORD_DELETION, Variant.TFIDF_DELETION):
        prior = symmetric_prior(k, working.vocabulary.size, 1.0)
        return fit(working, prior, config)
    if variant in (Variant.HYPERPARAM_OPT, Variant.DELETION_PLUS_HYPERPARAM_OPT):
        grid = [(a, e) for a in plan.hyper_alphas for e in plan.hyper_etas]
        return hyperparameter_search(working, grid, config).model
    if variant is Variant.KEYWORD_TOPICS_BASELINE:
        prior_cfg = PriorConfig(topics=k, stopword_topics=0, tfidf_topics=0,
                                keyword_topics=k, c2=settings.c2,
                                keyword_boost=settings.keyword_boost)
    elif variant is Variant.WORDFREQ_PRIOR:
        prior_cfg = PriorConfig(topics=k, stopword_topics=settings.stopword_topics,
                                wordfreq_topics=k - settings.stopword_topics)
    elif variant is Variant.TFIDF_PRIOR:
        prior_cfg = PriorConfig(topics=k, stopword_topics=settings.stopword_topics,
                                tfidf_topics=k - settings.stopword_topics,
                                c1=settings.c1)
    elif variant is Variant.KEYWORD_SEEDING_PRIOR:
        prior_cfg = PriorConfig(topics=k, stopword_topics=settings.stopword_topics,
                                tfidf_topics=settings.tfidf_topics,
                                keyword_topics=settings.keyword_topics,
                                c1=settings.c1, c2=settings.c2,
                                keyword_boost=settings.keyword_boost)
    else:  # pragma: no cover
        raise ValueError(f"unhandled variant {variant!r}")
    prior = assemble(prior_cfg, stats, whitelist or ())
    return fit(working, prior, config)


def run_variant(plan: ExperimentPlan, variant: Variant, settings: RunSettings,
                seed: int, resources: PlanResources | None = None,
                metric_config: MetricConfig | None = None) -> RunRecord:
    """Preprocess, build the variant's prior, fit, and score one run."""
    resources = resources or load_resources(plan)
    metric_config = metric_config or plan.metric_config()
    t0 = time.perf_counter()
    working = _preprocess(variant, resources.corpus, resources.stoplist, settings.tfidf_cut)
    stats = compute_stats(working)
    model = _build_model(variant, working, stats, settings, seed,
                         resources.whitelist, plan)
    rep = report(model, stats, resources.stoplist, resources.whitelist or (),
                 metric_config)
    return RunRecord(variant=variant, settings=settings, seed=seed, model=model,
                     report=rep, duration=time.perf_counter() - t0,
                     vocabulary_altered=variant in ALTERS_VOCABULARY)


@dataclass(eq=False)
class GridResult:
    records: list[RunRecord]
    failures: list[FailedRun]


def run_grid(plan: ExperimentPlan, jobs: int | None = None,
             corpus: Corpus | None = None,
             metric_config: MetricConfig | None = None) -> GridResult:
    """Run every spec the plan enumerates. Individual failures are recorded
    and excluded; output order is plan order regardless of scheduling."""
    resources = load_resources(plan, corpus)
    metric_config = metric_config or plan.metric_config()
    specs = enumerate_runs(plan)
    # Preprocessed corpora and their stats are shared read-only; build them
    # up front so workers never race on the cache.
    prep: dict[str, tuple[Corpus, CorpusStats]] = {}
    for spec in specs:
        key = _preprocessing_key(spec.variant)
        if key not in prep:
            working = _preprocess(spec.variant, resources.corpus,
                                  resources.stoplist, spec.settings.tfidf_cut)
            prep[key] = (working, compute_stats(working))

    def one(spec: RunSpec):
        working, stats = prep[_preprocessing_key(spec.variant)]
        t0 = time.perf_counter()
        model = _build_model(spec.variant, working, stats, spec.settings,
                             spec.seed, resources.whitelist, plan)
        rep = report(model, stats, resources.stoplist,
                     resources.whitelist or (), metric_config)
        return RunRecord(variant=spec.variant, settings=spec.settings,
                         seed=spec.seed, model=model, report=rep,
                         duration=time.perf_counter() - t0,
                         vocabulary_altered=spec.variant in ALTERS_VOCABULARY)

    records: list[RunRecord] = []
    failures: list[FailedRun] = []
    workers = jobs or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda s: _guard(one, s), specs))
    else:
        outcomes = [_guard(one, s) for s in specs]
    for spec, outcome in zip(specs, outcomes):
        if isinstance(outcome, RunRecord):
            records.append(outcome)
        else:
            log.warning("run failed: %s seed=%d: %s", spec.variant.value, spec.seed, outcome)
            failures.append(FailedRun(spec.variant, spec.settings, spec.seed, str(outcome)))
    return GridResult(records=records, failures=failures)


def _guard(func, spec):
    try:
        return func(spec)
    except Exception as exc:  # noqa: BLE001 - failure isolation is the contract
        return exc


# --- tables ----------------------------------------------------------------

_SETTING_COLUMNS = ("topics", "iterations", "alpha", "c1", "c2", "keyword_boost",
                    "stopword_topics", "tfidf_topics", "keyword_topics")
_DOMAIN_COLUMNS = ("stopword_rate", "expert_rate", "codoc")


def comparison_table(records: list[RunRecord]) -> list[dict]:
    """One row per record with model-level metrics. Rows from vocabulary-
    altering variants carry vocabulary_altered=True: their coherence and PMI
    are not comparable against full-vocabulary rows. Domain-topic-only rates
    are filled when the model designates stopword topics."""
    rows = []
    for rec in records:
        row = {"variant": rec.variant.value, "seed": rec.seed}
        for name in _SETTING_COLUMNS:
            row[name] = getattr(rec.settings, name)
        for name in METRIC_COLUMNS:
            row[name] = rec.report.model_means[name]
        has_stopword_topics = (rec.report.domain_means is not None
                               and any(s.kind is TopicKind.STOPWORD
                                       for s in rec.report.per_topic))
        for name in _DOMAIN_COLUMNS:
            if has_stopword_topics:
                row[f"domain_{name}"] = rec.report.domain_means[name]
            else:
                row[f"domain_{name}"] = None
        row["vocabulary_altered"] = rec.vocabulary_altered
        rows.append(row)
    return rows


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def comparison_csv(records: list[RunRecord]) -> str:
    rows = comparison_table(records)
    header = (["variant", "seed"] + list(_SETTING_COLUMNS) + list(METRIC_COLUMNS)
              + [f"domain_{c}" for c in _DOMAIN_COLUMNS] + ["vocabulary_altered"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row[h]) for h in header])
    return buf.getvalue()


# --- scatter + correlations -------------------------------------------------

_SCATTER_METRICS = ("coherence_10", "coherence_30", "pmi", "log_lift")
_PROXY_AXES = ("stopword_rate", "expert_rate", "codoc")


@dataclass(eq=False)
class CorrelationData:
    points: list[dict]
    correlations: list[dict]

    def points_csv(self) -> str:
        header = ["variant", "seed", "metric", "metric_value",
                  "stopword_rate", "expert_rate", "codoc"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for p in self.points:
            writer.writerow([_csv_cell(p[h]) for h in header])
        return buf.getvalue()

    def correlations_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", "axis", "spearman", "n"])
        for c in self.correlations:
            writer.writerow([c["metric"], c["axis"], _csv_cell(c["spearman"]), c["n"]])
        return buf.getvalue()

    def correlation(self, metric: str, axis: str) -> float | None:
        for c in self.correlations:
            if c["metric"] == metric and c["axis"] == axis:
                return c["spearman"]
        raise KeyError((metric, axis))


def _spearman(x: list[float], y: list[float]) -> float | None:
    if len(x) < 3:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rho = scipy_stats.spearmanr(x, y).statistic
    return None if np.isnan(rho) else float(rho)


def correlation_data(records: list[RunRecord]) -> CorrelationData:
    """Scatter points of quality metrics against the list-based proxy axes,
    plus Spearman rank correlations.

    Records with altered vocabularies are excluded from coherence and PMI
    (incomparable), and records whose stopword rate is zero by construction
    are excluded from the stopword-rate axis.
    """
    points = []
    for rec in records:
        means = rec.report.model_means
        for metric in _SCATTER_METRICS:
            if metric != "log_lift" and rec.vocabulary_altered:
                continue
            points.append({
                "variant": rec.variant.value,
                "seed": rec.seed,
                "metric": metric,
                "metric_value": means[metric],
                "stopword_rate": means["stopword_rate"],
                "expert_rate": means["expert_rate"],
                "codoc": means["codoc"],
                "_forced_zero": rec.forced_zero_stopword_rate(),
            })
    correlations = []
    for metric in _SCATTER_METRICS:
        for axis in _PROXY_AXES:
            sub = [p for p in points if p["metric"] == metric]
            if axis == "stopword_rate":
                sub = [p for p in sub if not p["_forced_zero"]]
            xs = [p["metric_value"] for p in sub]
            ys = [p[axis] for p in sub]
            correlations.append({"metric": metric, "axis": axis,
                                 "spearman": _spearman(xs, ys), "n": len(sub)})
    for p in points:
        del p["_forced_zero"]
    return CorrelationData(points=points, correlations=correlations)


# --- manifests ---------------------------------------------------------------

def corpus_hash(corpus: Corpus) -> str:
    payload = json.dumps(corpus.to_json(), separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def run_manifest(plan: ExperimentPlan, result: GridResult, corpus: Corpus) -> dict:
    import scipy

    from . import __version__

    return {
        "version": MANIFEST_FORMAT_VERSION,
        "corpus_hash": corpus_hash(corpus),
        "plan": plan.to_json(),
        "n_records": len(result.records),
        "failures": [{"variant": f.variant.value, "seed": f.seed, "error": f.error}
                     for f in result.failures],
        "durations": {f"{r.variant.value}/seed{r.seed}": r.duration
                      for r in result.records},
        "versions": {"priorlda": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__},
    }
