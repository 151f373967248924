#include "doctest.h"

#include "feedmine/errors.hpp"
#include "feedmine/sentiment.hpp"

#include "fixtures/equations_expected.hpp"
#include "test_support.hpp"

#include <cmath>
#include <string>

using namespace feedmine;

TEST_CASE("valence lexicon loads and scores single words") {
    const ValenceLexicon lex = ValenceLexicon::load(testsup::data_path("valence_lexicon.tsv"));
    CHECK(lex.size() > 100);
    CHECK(lex.contains("good"));
    CHECK_FALSE(lex.contains("zzzznotaword"));

    CHECK(std::abs(lex.score("good").compound - expected::kValenceChecks[0]) < 1e-12);
    CHECK(lex.score("completely neutral gibberish").compound == 0.0);
}

TEST_CASE("negation flips and dampens within a three-token window") {
    const ValenceLexicon lex = ValenceLexicon::load(testsup::data_path("valence_lexicon.tsv"));
    CHECK(std::abs(lex.score("not good").compound - expected::kValenceChecks[1]) < 1e-12);
    // negator outside the window leaves the word untouched
    const double far = lex.score("not that it would ever matter, good").compound;
    CHECK(far == doctest::Approx(expected::kValenceChecks[0]).epsilon(1e-12));
    // apostrophes collapse so contractions negate too
    CHECK(lex.score("isn't good").compound < 0.0);
}

TEST_CASE("intensifiers boost the following word") {
    const ValenceLexicon lex = ValenceLexicon::load(testsup::data_path("valence_lexicon.tsv"));
    const double s = 1.9 + 0.293;
    const double want = s / std::sqrt(s * s + 15.0);
    CHECK(lex.score("very good").compound == doctest::Approx(want).epsilon(1e-12));
    CHECK(lex.score("very good").compound > lex.score("good").compound);
}

TEST_CASE("from_text parses tab separated rows") {
    const ValenceLexicon lex = ValenceLexicon::from_text("nice\t1.8\nawful\t-2.0\n");
    CHECK(lex.size() == 2);
    CHECK(lex.contains("awful"));
    const double s = 1.8;
    CHECK(lex.score("nice").compound == doctest::Approx(s / std::sqrt(s * s + 15.0)));
}

TEST_CASE("toxicity stub scores hits over five, capped at one") {
    StubToxicity tox = StubToxicity::load(testsup::data_path("toxicity_stub.toml"));
    const ToxicityAttributes none = tox.score("p", "a perfectly pleasant afternoon");
    CHECK(none.toxicity == 0.0);
    CHECK(none.threat == 0.0);

    const ToxicityAttributes one = tox.score("p", "he threatened me");
    CHECK(one.threat == doctest::Approx(0.2).epsilon(1e-12));

    const ToxicityAttributes many =
        tox.score("p", "kill hurt destroy attack beat shoot stab murder");
    CHECK(many.threat == 1.0);
}

TEST_CASE("toxicity wrapper returns the provider result") {
    StubToxicity stub = StubToxicity::load(testsup::data_path("toxicity_stub.toml"));
    const ToxicityAttributes a = toxicity("p9", "he threatened me", stub);
    CHECK(a.threat == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("normalize_value maps the range to the unit interval") {
    CHECK(normalize_value(3.0, 1.0, 5.0) == 0.5);
    CHECK(normalize_value(1.0, 1.0, 5.0) == 0.0);
    CHECK(normalize_value(5.0, 1.0, 5.0) == 1.0);
    CHECK(normalize_value(7.0, 2.0, 2.0) == 0.0); // degenerate range
}

TEST_CASE("aggregate_sentiment accumulates the seven weighted terms in order") {
    ToxicityAttributes attrs;
    attrs.toxicity = 0.4;
    attrs.severe_toxicity = 0.1;
    attrs.insult = 0.2;
    attrs.profanity = 0.0;
    attrs.threat = 0.8;
    attrs.identity_attack = 0.6;
    const ValenceScore vad{-0.5};

    SentimentNorms norms;
    norms.tox_max = norms.sev_max = norms.ins_max = norms.pro_max = norms.thr_max = 1.0;
    norms.vad_min = -1.0;
    norms.vad_max = 1.0;

    SentimentWeights w;
    w.w_a = 1.0;
    w.w_b = 2.0;
    w.w_c = 3.0;
    w.w_d = 4.0;
    w.w_e = 5.0;
    w.w_f = 10.0;
    w.w_g = 7.0;

    double acc = 0.0;
    acc = acc + 1.0 * 0.4;
    acc = acc + 2.0 * 0.1;
    acc = acc + 3.0 * 0.2;
    acc = acc + 4.0 * 0.0;
    acc = acc + 5.0 * 0.8;
    acc = acc + 10.0 * 0.6; // identity attack enters raw
    acc = acc + 7.0 * ((0.5 - -1.0) / 2.0);
    CHECK(aggregate_sentiment(attrs, vad, w, norms) == acc);

    norms.ide_max = 2.0;
    const double with_norm = aggregate_sentiment(attrs, vad, w, norms, true);
    CHECK(with_norm == doctest::Approx(acc - 10.0 * 0.6 + 10.0 * 0.3).epsilon(1e-12));
}
