"""Indexed bag-of-words corpora and the corpus statistics everything else consumes."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

CORPUS_FORMAT_VERSION = 1


class AllDocumentsEmpty(ValueError):
    """Raised when every document tokenizes to nothing after word removal."""


def tokenize(raw_text: str, lowercase: bool = True) -> list[str]:
    """Split on whitespace runs; punctuation stays attached to its token."""
    text = raw_text.lower() if lowercase else raw_text
    return text.split()


class Vocabulary:
    """Dense word <-> id mapping. Ids follow first occurrence order, 0..V-1."""

    def __init__(self, words: Sequence[str]):
        self.id_to_word: list[str] = list(words)
        self.word_to_id: dict[str, int] = {w: i for i, w in enumerate(self.id_to_word)}
        if len(self.word_to_id) != len(self.id_to_word):
            raise ValueError("vocabulary contains duplicate words")
        for w in self.id_to_word:
            if not w or w != w.strip() or any(ch.isspace() for ch in w):
                raise ValueError(f"invalid vocabulary token: {w!r}")

    @property
    def size(self) -> int:
        return len(self.id_to_word)

    def __len__(self) -> int:
        return len(self.id_to_word)

    def __contains__(self, word: str) -> bool:
        return word in self.word_to_id

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.id_to_word == other.id_to_word

    def ids(self, words: Iterable[str]) -> list[int]:
        """Map words to ids, silently dropping out-of-vocabulary words."""
        return [self.word_to_id[w] for w in words if w in self.word_to_id]


class Corpus:
    """Documents as token-id sequences over a shared dense vocabulary.

    Token order within documents is preserved. Empty documents are allowed;
    they simply contribute no tokens. Every vocabulary word is guaranteed to
    occur in at least one document.
    """

    def __init__(self, documents: Sequence[Sequence[int]], vocabulary: Vocabulary,
                 doc_ids: Sequence[str] | None = None):
        self.documents = [np.asarray(doc, dtype=np.int32) for doc in documents]
        self.vocabulary = vocabulary
        self.doc_ids = list(doc_ids) if doc_ids is not None else None
        if self.doc_ids is not None and len(self.doc_ids) != len(self.documents):
            raise ValueError("doc_ids length does not match document count")
        self._validate()

    def _validate(self):
        v = self.vocabulary.size
        seen = np.zeros(v, dtype=bool)
        for doc in self.documents:
            if doc.size and (doc.min() < 0 or doc.max() >= v):
                raise ValueError("token id outside vocabulary range")
            seen[doc] = True
        if not seen.all():
            missing = int(np.flatnonzero(~seen)[0])
            raise ValueError(f"vocabulary word never used: {self.vocabulary.id_to_word[missing]!r}")

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    @property
    def n_tokens(self) -> int:
        return sum(int(doc.size) for doc in self.documents)

    def doc_words(self, d: int) -> list[str]:
        return [self.vocabulary.id_to_word[i] for i in self.documents[d]]

    def to_json(self) -> dict:
        data = {
            "version": CORPUS_FORMAT_VERSION,
            "vocabulary": self.vocabulary.id_to_word,
            "documents": [doc.tolist() for doc in self.documents],
        }
        if self.doc_ids is not None:
            data["doc_ids"] = self.doc_ids
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Corpus":
        if data.get("version") != CORPUS_FORMAT_VERSION:
            raise ValueError(f"unsupported corpus format version: {data.get('version')!r}")
        return cls(data["documents"], Vocabulary(data["vocabulary"]), data.get("doc_ids"))


def build_corpus(raw_docs: Sequence[str], remove_set: Iterable[str] = (),
                 lowercase: bool = True, doc_ids: Sequence[str] | None = None) -> Corpus:
    """Tokenize raw documents and index them into a dense-vocabulary corpus.

    Words in ``remove_set`` never enter the vocabulary. Raises
    AllDocumentsEmpty when nothing survives tokenization and removal.
    """
    remove = set(remove_set)
    token_docs = [[w for w in tokenize(doc, lowercase) if w not in remove] for doc in raw_docs]
    return _index_token_docs(token_docs, doc_ids)


def _index_token_docs(token_docs: list[list[str]], doc_ids: Sequence[str] | None) -> Corpus:
    if all(len(doc) == 0 for doc in token_docs):
        raise AllDocumentsEmpty("no tokens remain in any document")
    word_to_id: dict[str, int] = {}
    documents = []
    for doc in token_docs:
        ids = []
        for w in doc:
            if w not in word_to_id:
                word_to_id[w] = len(word_to_id)
            ids.append(word_to_id[w])
        documents.append(ids)
    return Corpus(documents, Vocabulary(list(word_to_id)), doc_ids)


@dataclass(frozen=True, eq=False)
class CorpusStats:
    """Per-word corpus statistics, immutable once computed.

    word_freq  empirical corpus probability of each word (token share)
    doc_freq   number of documents each word appears in
    avg_tfidf  mean over containing documents of TF(w,d) * ln(n_docs / doc_freq(w))
    doc_index  sorted array of document indices per word
    """

    vocabulary: Vocabulary
    word_freq: np.ndarray
    doc_freq: np.ndarray
    avg_tfidf: np.ndarray
    doc_index: tuple[np.ndarray, ...]
    n_docs: int
    n_tokens: int

    def to_json(self) -> dict:
        return {
            "version": CORPUS_FORMAT_VERSION,
            "vocabulary": self.vocabulary.id_to_word,
            "word_freq": self.word_freq.tolist(),
            "doc_freq": self.doc_freq.tolist(),
            "avg_tfidf": self.avg_tfidf.tolist(),
            "doc_index": [ix.tolist() for ix in self.doc_index],
            "n_docs": self.n_docs,
            "n_tokens": self.n_tokens,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CorpusStats":
        return cls(
            vocabulary=Vocabulary(data["vocabulary"]),
            word_freq=_frozen(np.asarray(data["word_freq"], dtype=np.float64)),
            doc_freq=_frozen(np.asarray(data["doc_freq"], dtype=np.int64)),
            avg_tfidf=_frozen(np.asarray(data["avg_tfidf"], dtype=np.float64)),
            doc_index=tuple(_frozen(np.asarray(ix, dtype=np.int64)) for ix in data["doc_index"]),
            n_docs=int(data["n_docs"]),
            n_tokens=int(data["n_tokens"]),
        )


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def compute_stats(corpus: Corpus) -> CorpusStats:
    """Tabulate word frequencies, document frequencies, average TF-IDF, and
    the per-word document index.

    TF(w,d) is count/len within a document; IDF uses the natural log. The
    average runs over only the documents that contain the word, so a word
    present in every document has avg_tfidf exactly 0.
    """
    v = corpus.vocabulary.size
    n_docs = corpus.n_docs
    counts = np.zeros(v, dtype=np.int64)
    doc_freq = np.zeros(v, dtype=np.int64)
    tf_sum = np.zeros(v, dtype=np.float64)
    doc_lists: list[list[int]] = [[] for _ in range(v)]
    for d, doc in enumerate(corpus.documents):
        if doc.size == 0:
            continue
        words, per_doc = np.unique(doc, return_counts=True)
        counts[words] += per_doc
        doc_freq[words] += 1
        tf_sum[words] += per_doc / doc.size
        for w in words:
            doc_lists[int(w)].append(d)
    total = counts.sum()
    word_freq = counts / total
    avg_tfidf = (tf_sum / doc_freq) * np.log(n_docs / doc_freq)
    return CorpusStats(
        vocabulary=corpus.vocabulary,
        word_freq=_frozen(word_freq),
        doc_freq=_frozen(doc_freq),
        avg_tfidf=_frozen(avg_tfidf),
        doc_index=tuple(_frozen(np.asarray(lst, dtype=np.int64)) for lst in doc_lists),
        n_docs=n_docs,
        n_tokens=int(total),
    )


def co_doc_freq(stats: CorpusStats, w1: int, w2: int) -> int:
    """Number of documents where both words appear. Symmetric in arguments."""
    return int(np.intersect1d(stats.doc_index[w1], stats.doc_index[w2], assume_unique=True).size)


def _rebuild(corpus: Corpus, keep: np.ndarray) -> Corpus:
    """New corpus keeping only flagged word ids, with a rebuilt dense vocabulary."""
    words = corpus.vocabulary.id_to_word
    token_docs = [[words[i] for i in doc if keep[i]] for doc in corpus.documents]
    return _index_token_docs(token_docs, corpus.doc_ids)


def delete_stopwords(corpus: Corpus, stoplist: Iterable[str]) -> Corpus:
    """Remove every stoplist word and rebuild dense ids."""
    stop = set(stoplist)
    keep = np.array([w not in stop for w in corpus.vocabulary.id_to_word])
    return _rebuild(corpus, keep)


def delete_low_tfidf(corpus: Corpus, percentile: float = 0.05) -> Corpus:
    """Remove words whose average TF-IDF falls strictly below the given
    quantile of the TF-IDF distribution. Ties at the cutoff are kept, so a
    degenerate all-equal corpus is never emptied.
    """
    if not 0.0 < percentile < 1.0:
        raise ValueError("percentile must be in (0, 1)")
    stats = compute_stats(corpus)
    cutoff = np.quantile(stats.avg_tfidf, percentile)
    keep = stats.avg_tfidf >= cutoff
    return _rebuild(corpus, keep)


# --- file I/O -------------------------------------------------------------

def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(json.dumps(corpus.to_json(), separators=(",", ":")) + "\n",
                          encoding="utf-8")


def load_corpus(path: str | Path) -> Corpus:
    return Corpus.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def load_raw_documents(path: str | Path, fmt: str = "text") -> tuple[list[str], list[str] | None]:
    """Read raw documents: ``text`` is one document per line, ``jsonl`` is one
    {"id": ..., "text": ...} object per line. Returns (texts, doc_ids).
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if fmt == "text":
        return list(lines), None
    if fmt == "jsonl":
        texts, ids = [], []
        for line in lines:
            if not line.strip():
                continue
            obj = json.loads(line)
            texts.append(obj["text"])
            ids.append(str(obj["id"]))
        return texts, ids
    raise ValueError(f"unknown corpus format: {fmt!r}")


def load_word_list(path: str | Path) -> list[str]:
    """One lowercased word per line; blank lines and '#' comments ignored."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        words.append(stripped.lower())
    return words


def default_stoplist() -> list[str]:
    """The bundled 127-word English stoplist. Replaceable data, not canon."""
    text = resources.files("priorlda.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return [w for w in (line.strip() for line in text.splitlines())
            if w and not w.startswith("#")]
