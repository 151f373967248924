#include "doctest.h"

#include "feedmine/errors.hpp"
#include "feedmine/grid_search.hpp"
#include "feedmine/priority.hpp"
#include "feedmine/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace feedmine;

namespace {

struct Synth {
    std::vector<RawPost> posts;
    FeatureMatrix matrix;
};

Synth make_synthetic(int n, std::uint64_t seed) {
    Rng rng(seed);
    Synth s;
    std::vector<ThemeScores> themes;
    std::vector<ToxicityAttributes> tox;
    std::vector<ValenceScore> valence;
    for (int i = 0; i < n; ++i) {
        RawPost p;
        char id[8];
        std::snprintf(id, sizeof id, "s%03d", i);
        p.id = id;
        p.subreddit = "synth";
        p.created_utc = 1514764800 + static_cast<std::int64_t>(rng.next_below(86400L * 900));
        p.title = "t";
        p.body = "b";
        p.upvotes = static_cast<std::int64_t>(rng.next_below(500));
        p.upvote_ratio = rng.uniform(0.5, 1.0);
        p.num_comments = static_cast<std::int64_t>(rng.next_below(100));
        s.posts.push_back(p);

        ThemeScores t;
        t.post_id = p.id;
        t.harm = rng.uniform(0.0, 0.3);
        t.negativity = rng.uniform(0.0, 0.3);
        t.children = rng.uniform(0.0, 0.1);
        themes.push_back(t);

        ToxicityAttributes a;
        a.toxicity = rng.uniform(0.0, 1.0);
        a.severe_toxicity = rng.uniform(0.0, 1.0);
        a.insult = rng.uniform(0.0, 1.0);
        a.profanity = rng.uniform(0.0, 1.0);
        a.threat = rng.uniform(0.0, 1.0);
        a.identity_attack = rng.uniform(0.0, 1.0);
        tox.push_back(a);

        valence.push_back(ValenceScore{rng.uniform(-1.0, 1.0)});
    }
    s.matrix = FeatureMatrix::build(s.posts, themes, tox, valence);
    return s;
}

GroundTruth plant_truth(const FeatureMatrix &matrix, const PriorityWeights &w_star,
                        double relevant_fraction) {
    const std::vector<double> prio = matrix.priorities(w_star);
    const auto order = rank_order(prio, matrix.created(), matrix.ids());
    GroundTruth truth;
    const auto cutoff = static_cast<std::size_t>(
        std::round(relevant_fraction * static_cast<double>(order.size())));
    for (std::size_t r = 0; r < order.size(); ++r)
        truth.ratings[matrix.ids()[order[r]]] = r < cutoff ? 5.0 : 1.0;
    return truth;
}

} // namespace

TEST_CASE("candidate counting and tuple enumeration order") {
    CHECK(grid_candidate_count(4, 10) == 1048576ULL);
    CHECK(grid_candidate_count(2, 3) == 8ULL);
    CHECK(grid_candidate_count(1, 5) == 1ULL);

    const auto tuples = enumerate_weight_tuples({1.0, 2.0}, 2);
    REQUIRE(tuples.size() == 4);
    CHECK(tuples[0] == std::vector<double>{1.0, 1.0});
    CHECK(tuples[1] == std::vector<double>{1.0, 2.0}); // last parameter varies fastest
    CHECK(tuples[2] == std::vector<double>{2.0, 1.0});
    CHECK(tuples[3] == std::vector<double>{2.0, 2.0});

    CHECK_THROWS_AS(enumerate_weight_tuples({}, 2), ConfigError);
    CHECK_THROWS_AS(enumerate_weight_tuples({1.0}, 0), ConfigError);
}

TEST_CASE("grid search recovers strong weights on planted relevance") {
    const Synth s = make_synthetic(60, 21);
    const PriorityWeights w_star =
        PriorityWeights::from_array({5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0, 1.0, 5.0});
    const GroundTruth truth = plant_truth(s.matrix, w_star, 0.25);

    GridSearchOptions opt;
    opt.grid = {1.0, 5.0};
    opt.k = 10;
    opt.folds = 3;
    opt.seed = 7;

    const GridSearchResult res = grid_search(s.matrix, truth, opt);
    CHECK(res.candidates == 1024ULL);
    CHECK(res.metrics.k == 10);
    REQUIRE(res.metrics.per_fold.size() == 3);

    double psum = 0.0, rsum = 0.0;
    for (const FoldMetrics &fm : res.metrics.per_fold) {
        psum += fm.precision;
        rsum += fm.recall;
        for (double w : fm.selected.as_array())
            CHECK((w == 1.0 || w == 5.0));
    }
    CHECK(res.metrics.precision_at_k == doctest::Approx(psum / 3.0).epsilon(1e-12));
    CHECK(res.metrics.recall_at_k == doctest::Approx(rsum / 3.0).epsilon(1e-12));
    for (double w : res.best.as_array())
        CHECK((w == 1.0 || w == 5.0));

    // tuned beats the uniform weighting on the full ranking
    auto full_precision = [&](const PriorityWeights &w) {
        const auto order = rank_order(s.matrix.priorities(w), s.matrix.created(),
                                      s.matrix.ids());
        std::vector<std::string> ranked;
        for (std::size_t i : order)
            ranked.push_back(s.matrix.ids()[i]);
        return precision_recall_at_k(ranked, truth, opt.k).precision_at_k;
    };
    CHECK(full_precision(res.best) >= full_precision(PriorityWeights{}));
    CHECK(res.metrics.precision_at_k > 0.5);
}

TEST_CASE("grid search is independent of thread count and repeatable") {
    const Synth s = make_synthetic(45, 33);
    const PriorityWeights w_star =
        PriorityWeights::from_array({1.0, 1.0, 5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0, 1.0});
    const GroundTruth truth = plant_truth(s.matrix, w_star, 0.3);

    GridSearchOptions opt;
    opt.grid = {1.0, 5.0};
    opt.k = 8;
    opt.folds = 3;
    opt.seed = 11;

    opt.threads = 1;
    const GridSearchResult serial = grid_search(s.matrix, truth, opt);
    opt.threads = 8;
    const GridSearchResult parallel = grid_search(s.matrix, truth, opt);
    const GridSearchResult again = grid_search(s.matrix, truth, opt);

    CHECK(serial.best == parallel.best);
    CHECK(parallel.best == again.best);
    REQUIRE(serial.metrics.per_fold.size() == parallel.metrics.per_fold.size());
    for (std::size_t f = 0; f < serial.metrics.per_fold.size(); ++f) {
        CHECK(serial.metrics.per_fold[f].selected == parallel.metrics.per_fold[f].selected);
        CHECK(serial.metrics.per_fold[f].precision == parallel.metrics.per_fold[f].precision);
        CHECK(serial.metrics.per_fold[f].recall == parallel.metrics.per_fold[f].recall);
    }
    CHECK(serial.metrics.precision_at_k == parallel.metrics.precision_at_k);
}

TEST_CASE("grid search validates its options") {
    const Synth s = make_synthetic(10, 2);
    GroundTruth truth;
    for (const auto &id : s.matrix.ids())
        truth.ratings[id] = 4.5;

    GridSearchOptions opt;
    opt.folds = 1;
    CHECK_THROWS_AS(grid_search(s.matrix, truth, opt), ConfigError);

    opt = {};
    opt.grid = {};
    CHECK_THROWS_AS(grid_search(s.matrix, truth, opt), ConfigError);

    opt = {};
    opt.k = 0;
    CHECK_THROWS_AS(grid_search(s.matrix, truth, opt), ConfigError);

    opt = {};
    GroundTruth tiny;
    tiny.ratings["s001"] = 4.0;
    CHECK_THROWS_AS(grid_search(s.matrix, tiny, opt), ConfigError);

    GroundTruth unknown = truth;
    unknown.ratings["nope"] = 4.0;
    opt = {};
    opt.folds = 2;
    CHECK_THROWS_AS(grid_search(s.matrix, unknown, opt), NotFoundError);
}
