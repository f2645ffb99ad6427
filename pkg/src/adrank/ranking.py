"""Divergence-based document ranking with pluggable randomness models.

A ranking model is the product of two information functions: the improbable
occurrence of the normalized within-document frequency under a randomness
model (inf1 = -log2 P1), resized by the risk of accepting the term as a
descriptor (inf2 = 1 - P2). The adaptive variants plug the Yule-Simon or
continuous power-law mass into P1; the LL and SPL models use inf1 alone,
and a Dirichlet-smoothed query-likelihood scorer is included as the
standard baseline. Base-2 logs throughout the divergence family; the base
only scales scores uniformly and never reorders documents.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .corpus import InvertedIndex, QueryRecord
from .errors import ConfigError, UsageError
from .numerics import log_gamma

__all__ = [
    "RANDOMNESS_MODELS",
    "ParamScheme",
    "RankingConfig",
    "ScoredDoc",
    "RankedList",
    "normalized_tf",
    "model_parameter",
    "inf1",
    "inf2_risk",
    "score_document",
    "rank",
    "parse_model_spec",
    "format_trec_run",
]

RANDOMNESS_MODELS = (
    "P",
    "G",
    "In",
    "IF",
    "Ine",
    "YuleADR",
    "PowerLawADR",
    "LL",
    "SPL",
    "LMDir",
)
_INF1_ONLY = ("LL", "SPL")
_SCHEMES = ("ttc", "tdc", "ttc2", "tdc2", "ttc_plus1", "tdc_plus1", "fixed")
_LOG2E = 1.0 / math.log(2.0)
_SPL_EPS = 1e-6


@dataclass
class ParamScheme:
    kind: str
    value: float | None = None  # for kind == "fixed"

    def __post_init__(self):
        if self.kind not in _SCHEMES:
            raise ConfigError(f"unknown parameter scheme {self.kind!r}")
        if self.kind == "fixed" and self.value is None:
            raise ConfigError("fixed scheme needs a value")


@dataclass
class RankingConfig:
    """Complete description of one ranking model."""

    randomness: str
    first_norm: str = "laplace"  # none | laplace | bernoulli
    second_norm: str = "logarithmic"  # none | uniform | logarithmic
    scheme: ParamScheme = field(default_factory=lambda: ParamScheme("tdc"))
    c: float = 1.0  # logarithmic second-normalisation parameter
    mu: float = 1000.0  # LMDir smoothing mass
    pl_xmin: float = 1.0  # PowerLawADR lower cutoff

    def __post_init__(self):
        if self.randomness not in RANDOMNESS_MODELS:
            raise ConfigError(f"unknown randomness model {self.randomness!r}")
        if self.first_norm not in ("none", "laplace", "bernoulli"):
            raise ConfigError(f"unknown first normalisation {self.first_norm!r}")
        if self.second_norm not in ("none", "uniform", "logarithmic"):
            raise ConfigError(f"unknown second normalisation {self.second_norm!r}")
        if self.randomness in _INF1_ONLY and self.first_norm != "none":
            raise ConfigError(
                f"{self.randomness} admits no first normalisation; use 'none'"
            )
        if self.randomness == "PowerLawADR" and self.scheme.kind not in (
            "ttc_plus1",
            "tdc_plus1",
            "fixed",
        ):
            raise ConfigError(
                "PowerLawADR needs a scheme producing an exponent > 1 "
                "(ttc_plus1, tdc_plus1 or fixed)"
            )
        if self.second_norm == "logarithmic" and self.c <= 0.0:
            raise ConfigError("logarithmic normalisation needs c > 0")
        if self.mu <= 0.0:
            raise ConfigError("LMDir needs mu > 0")
        if self.pl_xmin <= 0.0:
            raise ConfigError("PowerLawADR needs pl_xmin > 0")


@dataclass
class ScoredDoc:
    doc_id: str
    score: float


@dataclass
class RankedList:
    query_id: str
    entries: list[ScoredDoc]
    skipped_terms: list[str] = field(default_factory=list)


def normalized_tf(f_td: float, doc_len: int, avg_l: float, config: RankingConfig) -> float:
    """Second normalisation of the within-document frequency."""
    if config.second_norm == "none":
        return float(f_td)
    if config.second_norm == "uniform":
        return f_td * avg_l / doc_len
    return f_td * math.log2(1.0 + config.c * avg_l / doc_len)


def model_parameter(scheme: ParamScheme, f_tc: int, n_t: int, N: int) -> float:
    """Per-term parameter value under the configured estimation scheme."""
    if scheme.kind == "ttc":
        return f_tc / N
    if scheme.kind == "tdc":
        return n_t / N
    if scheme.kind == "ttc2":
        return (f_tc / N) ** 2
    if scheme.kind == "tdc2":
        return (n_t / N) ** 2
    if scheme.kind == "ttc_plus1":
        return 1.0 + f_tc / N
    if scheme.kind == "tdc_plus1":
        return 1.0 + n_t / N
    return float(scheme.value)


def inf1(
    config: RankingConfig,
    f_hat: float,
    param: float,
    f_tc: int = 0,
    n_t: int = 0,
    N: int = 1,
) -> float:
    """First information content, -log2 P1, of one term occurrence count."""
    r = config.randomness
    if r == "P":
        lam = param
        if f_hat <= 0.0 or lam <= 0.0:
            raise ConfigError("Poisson randomness needs f_hat > 0 and lambda > 0")
        return (
            f_hat * math.log2(f_hat / lam)
            + (lam + 1.0 / (12.0 * f_hat) - f_hat) * _LOG2E
            + 0.5 * math.log2(2.0 * math.pi * f_hat)
        )
    if r == "G":
        lam = param
        if lam <= 0.0:
            raise ConfigError("geometric randomness needs lambda > 0")
        return -math.log2(1.0 / (1.0 + lam)) - f_hat * math.log2(lam / (1.0 + lam))
    if r == "In":
        return f_hat * math.log2((N + 1.0) / (n_t + 0.5))
    if r == "IF":
        return f_hat * math.log2((N + 1.0) / (f_tc + 0.5)) + math.log2(f_tc / N)
    if r == "Ine":
        expected = N * (1.0 - ((N - 1.0) / N) ** f_tc)
        return f_hat * math.log2((N + 1.0) / (expected + 0.5))
    if r == "YuleADR":
        p = param
        if p <= 0.0 or f_hat <= 0.0:
            raise ConfigError("Yule randomness needs p > 0 and f_hat > 0")
        log_mass = (
            math.log(p) + log_gamma(f_hat) + log_gamma(p + 1.0) - log_gamma(f_hat + p + 1.0)
        )
        return -log_mass * _LOG2E
    if r == "PowerLawADR":
        alpha = param
        if alpha <= 1.0:
            raise ConfigError("power-law randomness needs an exponent > 1")
        g = max(f_hat, config.pl_xmin)
        log_mass = (
            math.log(alpha - 1.0)
            + (alpha - 1.0) * math.log(config.pl_xmin)
            - alpha * math.log(g)
        )
        return -log_mass * _LOG2E
    if r == "LL":
        if param <= 0.0:
            raise ConfigError("LL needs a positive parameter")
        return -math.log2(param / (param + f_hat))
    if r == "SPL":
        lam = min(max(param, _SPL_EPS), 1.0 - _SPL_EPS)
        num = lam ** (f_hat / (f_hat + 1.0)) - lam
        return -math.log2(num / (1.0 - lam)) if num > 0.0 else 0.0
    raise ConfigError(f"{r} has no first information function")


def inf2_risk(config: RankingConfig, f_hat: float, f_tc: int = 0, n_t: int = 0) -> float:
    """Risk resizing, 1 - P2, in [0, 1].

    The Bernoulli estimate can stray outside [0, 1] for extreme statistics
    and is clamped rather than propagated as a negative risk.
    """
    if config.first_norm == "none":
        return 1.0
    if config.first_norm == "laplace":
        return 1.0 / (f_hat + 1.0)
    if n_t < 1:
        raise ConfigError("Bernoulli normalisation needs n_t >= 1")
    return min(max(1.0 - (f_tc + 1.0) / (n_t * (f_hat + 1.0)), 0.0), 1.0)


def _term_score(config, f_td, doc_len, stats, ts):
    f_hat = normalized_tf(f_td, doc_len, stats.avg_l, config)
    param = model_parameter(config.scheme, ts.f_tc, ts.n_t, stats.N)
    i1 = inf1(config, f_hat, param, f_tc=ts.f_tc, n_t=ts.n_t, N=stats.N)
    return i1 * inf2_risk(config, f_hat, f_tc=ts.f_tc, n_t=ts.n_t)


def score_document(
    query: QueryRecord, doc_id: str, index: InvertedIndex, config: RankingConfig
) -> float:
    """Score one document; divergence models sum over query terms present
    in the document, LMDir over all query terms seen in the collection."""
    if doc_id not in index.doc_lengths:
        raise UsageError(f"unknown document {doc_id!r}")
    counts: dict[str, int] = {}
    for t in query.terms:
        counts[t] = counts.get(t, 0) + 1
    stats = index.stats
    doc_len = index.doc_lengths[doc_id]
    score = 0.0
    if config.randomness == "LMDir":
        for t, f_tq in counts.items():
            if not index.has_term(t):
                continue  # zero smoothing mass: skipped
            ts = index.term_stats(t)
            p_c = ts.f_tc / stats.total_terms
            f_td = index.tf(t, doc_id)
            score += f_tq * math.log((f_td + config.mu * p_c) / (doc_len + config.mu))
        return score
    for t, f_tq in counts.items():
        if not index.has_term(t):
            continue
        f_td = index.tf(t, doc_id)
        if f_td == 0:
            continue
        score += f_tq * _term_score(config, f_td, doc_len, stats, index.term_stats(t))
    return score


def rank(
    query: QueryRecord, index: InvertedIndex, config: RankingConfig, k: int = 1000
) -> RankedList:
    """Top-k documents, scores descending, ties broken by ascending id."""
    if k < 1:
        raise UsageError("k must be >= 1")
    counts: dict[str, int] = {}
    skipped = []
    for t in query.terms:
        counts[t] = counts.get(t, 0) + 1
        if not index.has_term(t) and t not in skipped:
            skipped.append(t)
    if config.randomness == "LMDir":
        candidates = list(index.doc_lengths)
    else:
        cand: set[str] = set()
        for t in counts:
            if index.has_term(t):
                cand.update(index.postings(t))
        candidates = list(cand)
    scored = [
        ScoredDoc(d, score_document(query, d, index, config)) for d in candidates
    ]
    scored.sort(key=lambda sd: (-sd.score, sd.doc_id))
    return RankedList(query_id=query.query_id, entries=scored[:k], skipped_terms=skipped)


# ---------------------------------------------------------------------------
# compact model-spec strings, e.g. "YSL2-Tdc2", "PLL2-Tdc+1", "LMDir"
# ---------------------------------------------------------------------------

_SPEC_PREFIXES = [
    ("PowerLawADR", "PowerLawADR"),
    ("YuleADR", "YuleADR"),
    ("LMDir", "LMDir"),
    ("SPL", "SPL"),
    ("LL", "LL"),
    ("YS", "YuleADR"),
    ("PL", "PowerLawADR"),
    ("Ine", "Ine"),
    ("In", "In"),
    ("IF", "IF"),
    ("G", "G"),
    ("P", "P"),
]
_SCHEME_TOKENS = {
    "Ttc": ("ttc", None),
    "Tdc": ("tdc", None),
    "Ttc2": ("ttc2", None),
    "Tdc2": ("tdc2", None),
    "Ttc+1": ("ttc_plus1", None),
    "Tdc+1": ("tdc_plus1", None),
    "TtcPlus1": ("ttc_plus1", None),
    "TdcPlus1": ("tdc_plus1", None),
}
_NORM_RE = re.compile(r"^(?P<first>[LB]?)(?P<second>[012]?)$")


def parse_model_spec(
    spec: str,
    c: float = 1.0,
    mu: float = 1000.0,
    pl_xmin: float = 1.0,
    first_norm_override: str | None = None,
) -> RankingConfig:
    """Parse a compact model name into a RankingConfig.

    Grammar: ``<randomness><L|B><1|2>-<scheme>``, where L/B choose the
    Laplace or Bernoulli resizing, the digit chooses uniform (1) or
    logarithmic (2) length normalisation, and the scheme suffix is one of
    Ttc, Tdc, Ttc2, Tdc2, Ttc+1, Tdc+1 or fixed:<value>. ``LMDir`` stands
    alone. For the LL and SPL models the conventional L in names like
    ``LLL2-Ttc`` is part of the family name and the first normalisation
    stays off; overriding it explicitly is an error.
    """
    spec = spec.strip()
    if spec == "LMDir" or spec.lower() == "lmdir":
        if first_norm_override not in (None, "none"):
            raise ConfigError("LMDir has no first normalisation")
        return RankingConfig(
            randomness="LMDir", first_norm="none", second_norm="none", mu=mu
        )
    head, sep, tail = spec.partition("-")
    if not sep:
        raise ConfigError(f"model spec {spec!r} is missing the -scheme suffix")
    # collect every (randomness, norm-tail) reading of the head; names like
    # PL2 (Poisson, Laplace, logarithmic) and PLL2 (power-law randomness,
    # Laplace, logarithmic) overlap, so an explicit first-norm letter wins,
    # then the longer randomness prefix
    parses = []
    for prefix, name in _SPEC_PREFIXES:
        if head.startswith(prefix):
            m = _NORM_RE.match(head[len(prefix) :])
            if m:
                parses.append((bool(m.group("first")), len(prefix), name, m))
    if not parses:
        raise ConfigError(f"cannot parse randomness model from {head!r}")
    parses.sort(key=lambda t: (t[0], t[1]), reverse=True)
    _, _, randomness, m = parses[0]
    first = {"L": "laplace", "B": "bernoulli", "": "none"}[m.group("first")]
    second = {"1": "uniform", "2": "logarithmic", "0": "none", "": "none"}[
        m.group("second")
    ]
    if randomness in _INF1_ONLY:
        # the L in LLL2/SPLL2 is conventional, not a first normalisation
        first = "none"
    if first_norm_override is not None:
        if randomness in _INF1_ONLY and first_norm_override != "none":
            raise ConfigError(f"{randomness} admits no first normalisation")
        first = first_norm_override
    if tail.startswith("fixed:"):
        scheme = ParamScheme("fixed", float(tail.split(":", 1)[1]))
    elif tail in _SCHEME_TOKENS:
        scheme = ParamScheme(_SCHEME_TOKENS[tail][0])
    else:
        raise ConfigError(f"unknown parameter scheme suffix {tail!r}")
    return RankingConfig(
        randomness=randomness,
        first_norm=first,
        second_norm=second,
        scheme=scheme,
        c=c,
        mu=mu,
        pl_xmin=pl_xmin,
    )


def format_trec_run(ranked_lists, tag: str = "adrank") -> str:
    """Standard 6-column run: qid Q0 docid rank score tag."""
    lines = []
    for rl in ranked_lists:
        for pos, sd in enumerate(rl.entries, 1):
            lines.append(f"{rl.query_id} Q0 {sd.doc_id} {pos} {sd.score:.6f} {tag}")
    return "\n".join(lines) + "\n"
