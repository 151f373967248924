#pragma once

#include "feedmine/classify.hpp"
#include "feedmine/corpus.hpp"
#include "feedmine/sentiment.hpp"
#include "feedmine/themes.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace feedmine {

inline constexpr double kPhiEpsilon = 1e-9;
inline constexpr int kNumPriorityFeatures = 10;

/// Feature/weight column order used by every weighted accumulation:
/// toxicity, severe_toxicity, insult, profanity, threat, identity_attack,
/// negated valence, total entropy, recency, popularity.
inline constexpr const char *kFeatureNames[kNumPriorityFeatures] = {
    "toxicity", "severe_toxicity", "insult",  "profanity", "threat",
    "identity", "valence",         "entropy", "recency",   "popularity"};

/// Per-theme histogram model of the corpus theme-score distribution.
class ThemeDistribution {
  public:
    struct Histogram {
        double lo = 0.0;
        double hi = 0.0;
        double width = 0.0;      // 0 when degenerate (single bin)
        std::vector<double> phi; // floored at epsilon, sums to 1
    };

    static ThemeDistribution fit(const std::vector<ThemeScores> &scores, int bin_count = 10);

    int bin_count() const { return bin_count_; }
    const Histogram &histogram(PriorityTheme theme) const;
    int bin_of(PriorityTheme theme, double value) const;
    double phi_of(PriorityTheme theme, double value) const;

  private:
    int bin_count_ = 0;
    Histogram hist_[3];
};

/// -phi*log2(phi); the surprisal variant drops the leading phi factor.
double entropy_term(double phi, bool surprisal = false);

/// Sum of the three per-theme entropy terms for one post.
double total_entropy(const ThemeScores &scores, const ThemeDistribution &dist,
                     bool surprisal = false);

/// Whole days since the epoch (floor of created_utc / 86400).
double recency(const RawPost &post);

/// upvotes/max_upvotes + upvote_ratio + comments/max_comments; a zero max
/// zeroes its fraction.
double popularity(const RawPost &post, std::int64_t max_upvotes, std::int64_t max_comments);

/// Min-max scaling to [0,1]; a degenerate column maps to all zeros.
std::vector<double> normalize(std::span<const double> values);

struct PriorityWeights {
    double w_a = 1.0, w_b = 1.0, w_c = 1.0, w_d = 1.0, w_e = 1.0;
    double w_f = 1.0, w_g = 1.0, w_h = 1.0, w_i = 1.0, w_j = 1.0;

    std::array<double, kNumPriorityFeatures> as_array() const {
        return {w_a, w_b, w_c, w_d, w_e, w_f, w_g, w_h, w_i, w_j};
    }
    static PriorityWeights from_array(const std::array<double, kNumPriorityFeatures> &w) {
        return {w[0], w[1], w[2], w[3], w[4], w[5], w[6], w[7], w[8], w[9]};
    }
    SentimentWeights sentiment() const { return {w_a, w_b, w_c, w_d, w_e, w_f, w_g}; }

    static PriorityWeights load(const std::string &path);
    static PriorityWeights from_table(const toml::Table &table);
    std::string to_toml() const;

    bool operator==(const PriorityWeights &) const = default;
};

struct FeatureVector {
    std::string post_id;
    std::array<double, kNumPriorityFeatures> raw{};        // valence slot holds -compound
    std::array<double, kNumPriorityFeatures> normalized{}; // identity slot raw by default
};

struct FeatureOptions {
    int bin_count = 10;
    bool surprisal = false;
    bool normalize_identity = false;
};

/// Column-major normalized feature store for the whole corpus, with the raw
/// values and ordering metadata needed for ranking and reporting.
class FeatureMatrix {
  public:
    /// Inputs are parallel to `posts`; theme scores, toxicity attributes and
    /// valence compounds must be in corpus order.
    static FeatureMatrix build(const std::vector<RawPost> &posts,
                               const std::vector<ThemeScores> &themes,
                               const std::vector<ToxicityAttributes> &tox,
                               const std::vector<ValenceScore> &valence,
                               const FeatureOptions &options = {});

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string> &ids() const { return ids_; }
    const std::vector<std::int64_t> &created() const { return created_; }
    const std::vector<double> &column(int feature) const { return norm_[feature]; }
    const std::vector<double> &raw_column(int feature) const { return raw_[feature]; }
    FeatureVector row(std::size_t i) const;
    std::size_t index_of(const std::string &post_id) const; // throws NotFoundError
    const ThemeDistribution &distribution() const { return dist_; }

    /// Weighted 10-term accumulation per post, in fixed column order.
    std::vector<double> priorities(const PriorityWeights &weights) const;
    /// The 7-term sentiment prefix of the same accumulation.
    std::vector<double> sentiments(const PriorityWeights &weights) const;

  private:
    std::vector<std::string> ids_;
    std::vector<std::int64_t> created_;
    std::array<std::vector<double>, kNumPriorityFeatures> raw_;
    std::array<std::vector<double>, kNumPriorityFeatures> norm_;
    std::map<std::string, std::size_t> by_id_;
    ThemeDistribution dist_;
};

/// Total ranking order: priority descending, then older post, then id.
std::vector<std::size_t> rank_order(std::span<const double> priorities,
                                    std::span<const std::int64_t> created,
                                    std::span<const std::string> ids);

struct GroundTruth {
    std::map<std::string, double> ratings; // post_id -> mean Likert in [1,5]

    static GroundTruth load(const std::string &path);
    static GroundTruth from_csv(const std::string &content);
};

struct FoldMetrics {
    int fold = 0;
    PriorityWeights selected;
    double precision = 0.0;
    double recall = 0.0;
    int k = 0;
    bool zero_relevant = false;
};

struct EvalMetrics {
    double precision_at_k = 0.0;
    double recall_at_k = 0.0;
    int k = 0;
    std::vector<FoldMetrics> per_fold; // empty outside cross-validation
};

/// precision@k and recall@k of a ranked id list against mean ratings >=
/// threshold. k clamps to the list length; with no relevant items precision
/// is 0 and recall 1.
EvalMetrics precision_recall_at_k(const std::vector<std::string> &ranked,
                                  const GroundTruth &truth, int k = 20,
                                  double relevance_threshold = 4.0);

struct RankedPost {
    int rank = 0;
    std::string post_id;
    double priority = 0.0;
    Category category = Category::NoneLabel;
    double sent = 0.0;      // 7-term sentiment prefix
    double entropy = 0.0;   // w_h * Nor(ent)
    double recency = 0.0;   // w_i * Nor(rec)
    double popularity = 0.0; // w_j * Nor(pop)
};

struct CategoryPriority {
    Category category = Category::NoneLabel;
    std::size_t count = 0;
    double mean_priority = 0.0;
};

struct RankingResult {
    std::vector<RankedPost> posts;                 // descending priority
    std::vector<CategoryPriority> category_means;  // descending mean priority
};

/// Ranks every post and averages priority per category; every post must have
/// a category entry (None counts as a category).
RankingResult rank_and_aggregate(const FeatureMatrix &features, const PriorityWeights &weights,
                                 const std::map<std::string, Category> &categories);

} // namespace feedmine
