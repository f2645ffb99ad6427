"""Document ingestion, inverted index statistics and sample extraction.

The index holds exactly the quantities the ranking formulas read: N,
average document length, collection and document frequencies per term and
per-document term frequencies. Construction is single-writer; afterwards
the index is immutable and safe for concurrent readers.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distributions import Sample
from .errors import FormatError, IngestError, UsageError

__all__ = [
    "TokenizerConfig",
    "CorpusStats",
    "TermStats",
    "InvertedIndex",
    "QueryRecord",
    "tokenize",
    "build_index",
    "extract_distribution",
    "save_index",
    "load_index",
    "read_counts_file",
    "iter_documents_from_dir",
    "iter_documents_from_tsv",
]

_TOKEN_RE = re.compile(r"[a-z0-9]+")

_MAGIC = b"ADRX"
_VERSION = 1


@dataclass
class TokenizerConfig:
    stop_words: frozenset[str] = frozenset()
    remove_stop_words: bool = False  # off by default: no stop removal, no stemming


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Lowercase and split on non-alphanumeric runs."""
    config = config or TokenizerConfig()
    tokens = _TOKEN_RE.findall(text.lower())
    if config.remove_stop_words and config.stop_words:
        tokens = [t for t in tokens if t not in config.stop_words]
    return tokens


@dataclass
class CorpusStats:
    N: int
    total_terms: int
    vocab_size: int

    @property
    def avg_l(self) -> float:
        return self.total_terms / self.N


@dataclass
class TermStats:
    term: str
    f_tc: int  # collection frequency
    n_t: int  # document frequency


@dataclass
class QueryRecord:
    query_id: str
    terms: list[str]
    raw_text: str

    def __post_init__(self):
        if not self.terms:
            raise UsageError(f"query {self.query_id!r} is empty after tokenization")


class InvertedIndex:
    """Immutable term -> postings map plus corpus-wide statistics."""

    def __init__(self, postings, doc_lengths):
        self._postings: dict[str, dict[str, int]] = postings
        self.doc_lengths: dict[str, int] = doc_lengths
        total = sum(doc_lengths.values())
        self.stats = CorpusStats(
            N=len(doc_lengths), total_terms=total, vocab_size=len(postings)
        )
        self._term_stats = {
            t: TermStats(term=t, f_tc=sum(post.values()), n_t=len(post))
            for t, post in postings.items()
        }

    @property
    def vocabulary(self):
        return self._term_stats.keys()

    def term_stats(self, term: str) -> TermStats:
        try:
            return self._term_stats[term]
        except KeyError:
            raise UsageError(f"term {term!r} not in vocabulary") from None

    def has_term(self, term: str) -> bool:
        return term in self._term_stats

    def postings(self, term: str) -> dict[str, int]:
        try:
            return self._postings[term]
        except KeyError:
            raise UsageError(f"term {term!r} not in vocabulary") from None

    def tf(self, term: str, doc_id: str) -> int:
        return self._postings.get(term, {}).get(doc_id, 0)


def build_index(documents, config: TokenizerConfig | None = None) -> InvertedIndex:
    """Build the index from an iterable of (doc_id, text) pairs."""
    postings: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    for doc_id, text in documents:
        if doc_id in doc_lengths:
            raise IngestError(f"duplicate document id {doc_id!r}")
        tokens = tokenize(text, config)
        doc_lengths[doc_id] = len(tokens)
        for tok in tokens:
            post = postings.setdefault(tok, {})
            post[doc_id] = post.get(doc_id, 0) + 1
    if not doc_lengths:
        raise IngestError("empty corpus: at least one document is required")
    return InvertedIndex(postings, doc_lengths)


def extract_distribution(source, prop: str) -> Sample:
    """Pull a discrete Sample of one distributional property.

    ``term_frequency`` and ``document_length`` read an index;
    ``query_frequency`` and ``query_length`` read an iterable of raw query
    strings. Query frequency counts occurrences of distinct normalized
    (lowercased, whitespace-collapsed) query strings; query length counts
    tokens per logged query.
    """
    if prop == "term_frequency":
        vals = [ts.f_tc for ts in source._term_stats.values()]
    elif prop == "document_length":
        vals = list(source.doc_lengths.values())
    elif prop in ("query_frequency", "query_length"):
        queries = [q for q in source if q.strip()]
        if not queries:
            raise UsageError("empty query log")
        if prop == "query_frequency":
            counts: dict[str, int] = {}
            for q in queries:
                key = " ".join(q.lower().split())
                counts[key] = counts.get(key, 0) + 1
            vals = list(counts.values())
        else:
            vals = [len(tokenize(q)) for q in queries]
    else:
        raise UsageError(f"unknown property {prop!r}")
    if not vals:
        raise UsageError("source is empty")
    return Sample(values=np.asarray(sorted(vals), dtype=np.float64), is_discrete=True)


# --------------------------------------------------------------------------
# persistence: versioned length-prefixed binary with a magic header
# --------------------------------------------------------------------------


def _w_str(out, s: str):
    raw = s.encode("utf-8")
    out.append(struct.pack("<I", len(raw)))
    out.append(raw)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise FormatError("truncated index file")
        chunk = self.blob[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")


def save_index(index: InvertedIndex, path):
    """Write the index; documents and terms are stored sorted so the byte
    stream is independent of ingestion order."""
    out: list[bytes] = [_MAGIC, struct.pack("<I", _VERSION)]
    doc_ids = sorted(index.doc_lengths)
    doc_pos = {d: i for i, d in enumerate(doc_ids)}
    out.append(struct.pack("<I", len(doc_ids)))
    for d in doc_ids:
        _w_str(out, d)
        out.append(struct.pack("<Q", index.doc_lengths[d]))
    terms = sorted(index.vocabulary)
    out.append(struct.pack("<I", len(terms)))
    for t in terms:
        _w_str(out, t)
        post = index.postings(t)
        out.append(struct.pack("<I", len(post)))
        for d in sorted(post):
            out.append(struct.pack("<IQ", doc_pos[d], post[d]))
    Path(path).write_bytes(b"".join(out))


def load_index(path) -> InvertedIndex:
    """Read an index written by :func:`save_index`; any structural problem
    raises FormatError and no partial index is returned."""
    blob = Path(path).read_bytes()
    r = _Reader(blob)
    if r.take(4) != _MAGIC:
        raise FormatError("not an index file (bad magic)")
    version = r.u32()
    if version != _VERSION:
        raise FormatError(f"unsupported index version {version}")
    n_docs = r.u32()
    doc_ids = []
    doc_lengths: dict[str, int] = {}
    for _ in range(n_docs):
        d = r.string()
        doc_ids.append(d)
        doc_lengths[d] = r.u64()
    n_terms = r.u32()
    postings: dict[str, dict[str, int]] = {}
    for _ in range(n_terms):
        t = r.string()
        n_post = r.u32()
        post: dict[str, int] = {}
        for _ in range(n_post):
            pos, count = struct.unpack("<IQ", r.take(12))
            if pos >= n_docs:
                raise FormatError("posting references unknown document")
            post[doc_ids[pos]] = count
        postings[t] = post
    if r.pos != len(blob):
        raise FormatError("trailing bytes after index payload")
    return InvertedIndex(postings, doc_lengths)


def read_counts_file(path) -> Sample:
    """One numeric observation per line; empty files are an error.

    Integers are the documented format; real values are accepted but mark
    the sample as non-discrete, which discrete-only operations reject.
    """
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise FormatError(f"line {lineno}: not a number: {line!r}") from None
        if v < 0:
            raise FormatError(f"line {lineno}: negative count {line!r}")
        values.append(v)
    if not values:
        raise FormatError("counts file holds no observations")
    arr = np.asarray(values, dtype=np.float64)
    return Sample(values=arr, is_discrete=bool(np.all(arr == np.floor(arr))))


def iter_documents_from_dir(path):
    """Plain-text corpus: one file per document, file stem = doc id."""
    root = Path(path)
    files = sorted(p for p in root.iterdir() if p.is_file())
    if not files:
        raise IngestError(f"no files under {root}")
    for p in files:
        yield p.stem, p.read_text(encoding="utf-8", errors="replace")


def iter_documents_from_tsv(path):
    """Line-delimited corpus: doc_id <TAB> text."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise FormatError(f"line {lineno}: expected doc_id<TAB>text")
            doc_id, text = line.split("\t", 1)
            yield doc_id, text
