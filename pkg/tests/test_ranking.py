"""Ranking formulas, model-spec parsing and ranked retrieval."""

import math

import numpy as np
import pytest
import scipy.special

from adrank.corpus import QueryRecord, build_index, tokenize
from adrank.errors import ConfigError, UsageError
from adrank.ranking import (
    ParamScheme,
    RankingConfig,
    format_trec_run,
    inf1,
    inf2_risk,
    model_parameter,
    normalized_tf,
    parse_model_spec,
    rank,
    score_document,
)


def _cfg(randomness, **kw):
    kw.setdefault("first_norm", "none")
    kw.setdefault("second_norm", "none")
    kw.setdefault("scheme", ParamScheme("fixed", 1.0))
    return RankingConfig(randomness, **kw)


class TestNormalizedTf:
    def test_logarithmic_identity_at_average(self):
        cfg = RankingConfig("P", second_norm="logarithmic", c=1.0)
        assert normalized_tf(2, 100, 100.0, cfg) == pytest.approx(2.0)

    def test_uniform_identity_at_average(self):
        cfg = RankingConfig("P", second_norm="uniform")
        assert normalized_tf(3, 80, 80.0, cfg) == pytest.approx(3.0)

    def test_logarithmic_hand(self):
        cfg = RankingConfig("P", second_norm="logarithmic", c=2.0)
        assert normalized_tf(3, 50, 100.0, cfg) == pytest.approx(6.965784, abs=1e-6)

    def test_shorter_docs_boosted(self):
        cfg = RankingConfig("P", second_norm="logarithmic", c=1.0)
        assert normalized_tf(2, 50, 100.0, cfg) > normalized_tf(2, 200, 100.0, cfg)


class TestModelParameter:
    def test_all_schemes(self):
        assert model_parameter(ParamScheme("tdc"), 3, 1, 2) == 0.5
        assert model_parameter(ParamScheme("tdc2"), 3, 1, 2) == 0.25
        assert model_parameter(ParamScheme("ttc"), 3, 1, 2) == 1.5
        assert model_parameter(ParamScheme("ttc2"), 3, 1, 2) == 2.25
        assert model_parameter(ParamScheme("ttc_plus1"), 3, 1, 2) == 2.5
        assert model_parameter(ParamScheme("tdc_plus1"), 3, 1, 2) == 1.5
        assert model_parameter(ParamScheme("fixed", 7.0), 3, 1, 2) == 7.0

    def test_tdc_in_unit_interval(self):
        for n_t, N in ((1, 10), (10, 10), (3, 7)):
            assert 0.0 < model_parameter(ParamScheme("tdc"), 0, n_t, N) <= 1.0


class TestInf1:
    def test_poisson_row_hand(self):
        val = inf1(_cfg("P"), 1.0, 1.0)
        expect = (1.0 / 12.0) * math.log2(math.e) + 0.5 * math.log2(2.0 * math.pi)
        assert val == pytest.approx(expect, abs=1e-9)
        assert val == pytest.approx(1.445973, abs=1e-6)

    def test_geometric_row_hand(self):
        assert inf1(_cfg("G"), 1.0, 1.0) == pytest.approx(2.0)

    def test_idf_rows(self):
        assert inf1(_cfg("In"), 2.0, 0.0, n_t=5, N=99) == pytest.approx(
            2.0 * math.log2(100.0 / 5.5)
        )
        assert inf1(_cfg("IF"), 2.0, 0.0, f_tc=9, N=99) == pytest.approx(
            2.0 * math.log2(100.0 / 9.5) + math.log2(9.0 / 99.0)
        )
        expected_docs = 99 * (1.0 - (98.0 / 99.0) ** 9)
        assert inf1(_cfg("Ine"), 2.0, 0.0, f_tc=9, N=99) == pytest.approx(
            2.0 * math.log2(100.0 / (expected_docs + 0.5))
        )

    def test_yule_mass_against_scipy(self):
        p, f_hat = 1.627, 1.747923
        val = inf1(_cfg("YuleADR"), f_hat, p)
        mass = p * math.exp(
            scipy.special.gammaln(f_hat)
            + scipy.special.gammaln(p + 1.0)
            - scipy.special.gammaln(f_hat + p + 1.0)
        )
        assert val == pytest.approx(-math.log2(mass), abs=1e-9)

    def test_powerlaw_mass(self):
        cfg = _cfg("PowerLawADR", scheme=ParamScheme("fixed", 2.5))
        val = inf1(cfg, 3.0, 2.5)
        assert val == pytest.approx(-math.log2(1.5 * 3.0**-2.5), abs=1e-12)

    def test_powerlaw_clamps_below_cutoff(self):
        cfg = _cfg("PowerLawADR", scheme=ParamScheme("fixed", 2.5))
        assert inf1(cfg, 0.2, 2.5) == inf1(cfg, 1.0, 2.5)

    def test_ll_closed_form(self):
        for r in (0.01, 0.3, 2.0):
            for f in (0.5, 1.0, 7.0):
                assert inf1(_cfg("LL"), f, r) == pytest.approx(
                    math.log2((r + f) / r)
                )

    def test_ll_spl_zero_at_zero(self):
        assert inf1(_cfg("LL"), 0.0, 0.5) == pytest.approx(0.0)
        assert inf1(_cfg("SPL"), 0.0, 0.5) == pytest.approx(0.0)

    def test_spl_increasing(self):
        cfg = _cfg("SPL")
        vals = [inf1(cfg, f, 0.3) for f in np.linspace(0.0, 60.0, 100)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_spl_clamps_parameter(self):
        cfg = _cfg("SPL")
        assert math.isfinite(inf1(cfg, 2.0, 1.0))
        assert math.isfinite(inf1(cfg, 2.0, 1.7))

    def test_domain_errors(self):
        with pytest.raises(ConfigError):
            inf1(_cfg("P"), 0.0, 1.0)
        with pytest.raises(ConfigError):
            inf1(_cfg("YuleADR"), 1.0, 0.0)
        with pytest.raises(ConfigError):
            inf1(_cfg("PowerLawADR", scheme=ParamScheme("fixed", 2.0)), 1.0, 0.9)


class TestInf2:
    def test_laplace(self):
        cfg = RankingConfig("P", first_norm="laplace")
        assert inf2_risk(cfg, 3.0) == 0.25
        assert inf2_risk(cfg, 0.0) == 1.0

    def test_bernoulli_hand(self):
        cfg = RankingConfig("P", first_norm="bernoulli")
        assert inf2_risk(cfg, 1.0, f_tc=9, n_t=5) == 0.0

    def test_bernoulli_clamped(self):
        cfg = RankingConfig("P", first_norm="bernoulli")
        assert inf2_risk(cfg, 0.0, f_tc=100, n_t=1) == 0.0
        assert 0.0 <= inf2_risk(cfg, 50.0, f_tc=2, n_t=2) <= 1.0

    def test_none(self):
        assert inf2_risk(RankingConfig("P", first_norm="none"), 9.0) == 1.0


class TestConfigInvariants:
    def test_ll_spl_force_no_first_norm(self):
        with pytest.raises(ConfigError):
            RankingConfig("LL", first_norm="laplace")
        with pytest.raises(ConfigError):
            RankingConfig("SPL", first_norm="bernoulli")

    def test_powerlaw_scheme_restricted(self):
        with pytest.raises(ConfigError):
            RankingConfig("PowerLawADR", scheme=ParamScheme("tdc"))
        RankingConfig("PowerLawADR", scheme=ParamScheme("tdc_plus1"))

    def test_unknown_names(self):
        with pytest.raises(ConfigError):
            RankingConfig("BM25")
        with pytest.raises(ConfigError):
            ParamScheme("nope")


class TestScoreDocument:
    def _two_doc_index(self):
        return build_index([("d1", "a b a"), ("d2", "b c")])

    def test_absent_term_contributes_zero(self):
        idx = self._two_doc_index()
        cfg = parse_model_spec("YSL2-Tdc")
        q = QueryRecord("q", ["c"], "c")
        assert score_document(q, "d1", idx, cfg) == 0.0

    def test_hand_case_against_independent_evaluation(self):
        # two docs, query 'a', Yule randomness with a fixed parameter,
        # Laplace resizing and logarithmic normalisation at c = 1
        idx = self._two_doc_index()
        p = 1.627
        cfg = RankingConfig(
            "YuleADR",
            first_norm="laplace",
            second_norm="logarithmic",
            scheme=ParamScheme("fixed", p),
            c=1.0,
        )
        q = QueryRecord("q", ["a"], "a")
        f_hat = 2.0 * math.log2(1.0 + 2.5 / 3.0)
        mass = p * math.exp(
            scipy.special.gammaln(f_hat)
            + scipy.special.gammaln(p + 1.0)
            - scipy.special.gammaln(f_hat + p + 1.0)
        )
        expected = -math.log2(mass) * (1.0 / (f_hat + 1.0))
        assert score_document(q, "d1", idx, cfg) == pytest.approx(expected, rel=1e-10)
        assert f_hat == pytest.approx(1.748938, abs=1e-6)

    def test_query_term_multiplicity_scales_contribution(self):
        idx = self._two_doc_index()
        cfg = parse_model_spec("YSL2-Tdc")
        one = score_document(QueryRecord("q", ["a"], "a"), "d1", idx, cfg)
        two = score_document(QueryRecord("q", ["a", "a"], "a a"), "d1", idx, cfg)
        assert two == pytest.approx(2.0 * one)

    def test_higher_tf_wins_when_term_is_common(self):
        # the parameter sits near 1 when the term occurs in every document,
        # where the Laplace-resized Yule weight still grows below f_hat ~ 3
        docs = [("d1", "t x y z w u"), ("d2", "t t t t t x")]
        idx = build_index(docs)
        cfg = RankingConfig(
            "YuleADR",
            first_norm="laplace",
            second_norm="none",
            scheme=ParamScheme("tdc"),
        )
        q = QueryRecord("q", ["t"], "t")
        s1 = score_document(q, "d1", idx, cfg)
        s2 = score_document(q, "d2", idx, cfg)
        assert s2 > s1

    def test_laplace_dampening_peaks_then_decays(self):
        # with a small parameter the Laplace-resized Yule weight is not
        # monotone in a document's term frequency: it rises over small
        # frequencies and then decays like log(f)/f
        cfg = RankingConfig(
            "YuleADR", first_norm="laplace", second_norm="none",
            scheme=ParamScheme("fixed", 1.0),
        )
        vals = []
        for f in range(1, 101):
            i1 = inf1(cfg, float(f), 1.0)
            vals.append(i1 * inf2_risk(cfg, float(f)))
        peak = int(np.argmax(vals))
        assert 0 < peak < 20
        assert vals[-1] < vals[peak]
        # and with a small parameter the decay starts immediately
        small = RankingConfig(
            "YuleADR", first_norm="laplace", second_norm="none",
            scheme=ParamScheme("fixed", 0.01),
        )
        s = [inf1(small, float(f), 0.01) * inf2_risk(small, float(f)) for f in (1, 2, 5)]
        assert s[0] > s[1] > s[2]

    def test_lmdir_scores_all_documents(self):
        idx = self._two_doc_index()
        cfg = parse_model_spec("LMDir", mu=100.0)
        q = QueryRecord("q", ["a"], "a")
        s1 = score_document(q, "d1", idx, cfg)
        s2 = score_document(q, "d2", idx, cfg)
        # d2 lacks the term but still receives smoothed mass
        p_c = 2.0 / 5.0
        assert s1 == pytest.approx(math.log((2.0 + 100.0 * p_c) / (3.0 + 100.0)))
        assert s2 == pytest.approx(math.log((0.0 + 100.0 * p_c) / (2.0 + 100.0)))

    def test_lmdir_skips_unseen_terms(self):
        idx = self._two_doc_index()
        cfg = parse_model_spec("LMDir")
        q = QueryRecord("q", ["zebra"], "zebra")
        assert score_document(q, "d1", idx, cfg) == 0.0


class TestRank:
    def _index(self):
        docs = [
            ("apple", "fruit tree orchard fruit"),
            ("banana", "fruit yellow"),
            ("carrot", "vegetable root"),
        ]
        return build_index(docs)

    def test_only_containing_doc_ranks_first(self):
        idx = self._index()
        q = QueryRecord("q", ["orchard"], "orchard")
        for spec in ("PL2-Tdc", "GL2-Ttc", "InL2-Tdc", "YSL2-Tdc2", "LLL2-Ttc", "SPLL2-Tdc"):
            out = rank(q, idx, parse_model_spec(spec), k=10)
            assert out.entries[0].doc_id == "apple", spec

    def test_k_truncates(self):
        idx = self._index()
        q = QueryRecord("q", ["fruit"], "fruit")
        out = rank(q, idx, parse_model_spec("InL2-Tdc"), k=1)
        assert len(out.entries) == 1

    def test_shorter_list_when_few_matches(self):
        idx = self._index()
        q = QueryRecord("q", ["yellow"], "yellow")
        out = rank(q, idx, parse_model_spec("PL2-Tdc"), k=50)
        assert len(out.entries) == 1

    def test_tie_broken_by_doc_id(self):
        docs = [("b", "t x"), ("a", "t x"), ("c", "zz")]
        idx = build_index(docs)
        out = rank(QueryRecord("q", ["t"], "t"), idx, parse_model_spec("InL2-Tdc"), k=5)
        assert [e.doc_id for e in out.entries] == ["a", "b"]

    def test_determinism(self):
        idx = self._index()
        q = QueryRecord("q", ["fruit", "tree"], "fruit tree")
        cfg = parse_model_spec("YSL2-Tdc2")
        r1 = rank(q, idx, cfg)
        r2 = rank(q, idx, cfg)
        assert [(e.doc_id, e.score) for e in r1.entries] == [
            (e.doc_id, e.score) for e in r2.entries
        ]

    def test_skipped_terms_flagged(self):
        idx = self._index()
        out = rank(QueryRecord("q", ["fruit", "zebra"], ""), idx, parse_model_spec("PL2-Tdc"))
        assert out.skipped_terms == ["zebra"]

    def test_empty_query_rejected(self):
        with pytest.raises(UsageError):
            QueryRecord("q", tokenize("!!"), "!!")


class TestHeuristicConstraints:
    """Finite-difference sign checks of the four retrieval constraints for
    the LL and SPL weights as functions of (f_td, doc length, parameter)."""

    @staticmethod
    def _h(model, f_td, dlen, z, c=2.0, avg=500.0):
        cfg = RankingConfig(model, first_norm="none", second_norm="logarithmic",
                            scheme=ParamScheme("fixed", z), c=c)
        f_hat = normalized_tf(f_td, dlen, avg, cfg)
        return inf1(cfg, f_hat, z)

    @pytest.mark.parametrize("model", ["LL", "SPL"])
    def test_signs_on_small_grid(self, model):
        fs = np.linspace(0.5, 40.0, 6)
        ds = np.linspace(20, 900, 5).astype(int)
        zs = np.array([1e-3, 0.05, 0.5])
        for f in fs:
            for d in ds:
                for z in zs:
                    h = self._h(model, f, int(d), z)
                    up = self._h(model, f * 1.01, int(d), z)
                    assert up > h  # C1: increasing in term frequency
                    dd = self._h(model, f, int(d * 1.1) + 1, z)
                    assert dd < h  # C3: decreasing in document length
                    zz = self._h(model, f, int(d), z * 1.05)
                    assert zz < h  # C4: decreasing in the parameter
                    # C2: concavity in term frequency
                    eps = 0.01 * f
                    second = (
                        self._h(model, f + eps, int(d), z)
                        - 2.0 * h
                        + self._h(model, f - eps, int(d), z)
                    )
                    assert second < 0.0


class TestYuleAsymptotics:
    def test_loglog_slope_matches_exponent(self):
        from adrank.distributions import ModelId, log_density

        p = 1.5
        xs = np.unique(np.round(np.logspace(3, 4, 40))).astype(np.float64)
        ys = log_density(ModelId.YULE_SIMON, {"p": p}, xs)
        slope = np.polyfit(np.log(xs), ys, 1)[0]
        assert slope == pytest.approx(-(p + 1.0), abs=0.05)


class TestModelSpecParsing:
    def test_named_specs(self):
        cfg = parse_model_spec("YSL2-Tdc2")
        assert (cfg.randomness, cfg.first_norm, cfg.second_norm, cfg.scheme.kind) == (
            "YuleADR", "laplace", "logarithmic", "tdc2",
        )
        cfg = parse_model_spec("PLL2-Tdc+1")
        assert (cfg.randomness, cfg.scheme.kind) == ("PowerLawADR", "tdc_plus1")
        cfg = parse_model_spec("PB1-Ttc")
        assert (cfg.randomness, cfg.first_norm, cfg.second_norm) == (
            "P", "bernoulli", "uniform",
        )
        cfg = parse_model_spec("IneL2-Tdc")
        assert cfg.randomness == "Ine"
        cfg = parse_model_spec("G-fixed:0.4")
        assert (cfg.randomness, cfg.first_norm, cfg.scheme.value) == ("G", "none", 0.4)

    def test_lmdir(self):
        cfg = parse_model_spec("LMDir", mu=2000.0)
        assert cfg.randomness == "LMDir"
        assert cfg.mu == 2000.0

    def test_ll_spl_conventional_names(self):
        assert parse_model_spec("LLL2-Ttc").first_norm == "none"
        assert parse_model_spec("SPLL2-Tdc").first_norm == "none"

    def test_first_norm_override_forbidden_for_information_models(self):
        with pytest.raises(ConfigError):
            parse_model_spec("SPLL2-Ttc", first_norm_override="laplace")

    def test_unparseable(self):
        with pytest.raises(ConfigError):
            parse_model_spec("XXL2-Tdc")
        with pytest.raises(ConfigError):
            parse_model_spec("PL2")
        with pytest.raises(ConfigError):
            parse_model_spec("PL2-Txx")


class TestRunFormat:
    def test_six_columns_rank_from_one(self):
        from adrank.ranking import RankedList, ScoredDoc

        rl = RankedList("q7", [ScoredDoc("docB", 1.25), ScoredDoc("docA", 0.5)])
        text = format_trec_run([rl], tag="tagx")
        lines = text.strip().splitlines()
        assert lines[0] == "q7 Q0 docB 1 1.250000 tagx"
        assert lines[1] == "q7 Q0 docA 2 0.500000 tagx"
