#include "feedmine/priority.hpp"

#include "feedmine/csv.hpp"
#include "feedmine/errors.hpp"
#include "feedmine/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace feedmine {

ThemeDistribution ThemeDistribution::fit(const std::vector<ThemeScores> &scores, int bin_count) {
    if (scores.empty())
        throw ConfigError("cannot fit a theme distribution on an empty corpus");
    if (bin_count < 1)
        throw ConfigError("bin_count must be >= 1");
    ThemeDistribution dist;
    dist.bin_count_ = bin_count;
    const std::size_t n = scores.size();
    for (int t = 0; t < 3; ++t) {
        const PriorityTheme theme = kPriorityThemes[t];
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i)
            values[i] = scores[i].get(theme);
        const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
        const double lo = *lo_it, hi = *hi_it;
        Histogram &h = dist.hist_[t];
        h.lo = lo;
        h.hi = hi;
        if (hi == lo) {
            h.width = 0.0;
            h.phi = {1.0};
            continue;
        }
        h.width = (hi - lo) / bin_count;
        std::vector<std::size_t> counts(static_cast<std::size_t>(bin_count), 0);
        for (const double v : values) {
            const int b = std::min(bin_count - 1, static_cast<int>((v - lo) / h.width));
            ++counts[static_cast<std::size_t>(b)];
        }
        h.phi.resize(counts.size());
        for (std::size_t b = 0; b < counts.size(); ++b)
            h.phi[b] = std::max(static_cast<double>(counts[b]) / static_cast<double>(n),
                                kPhiEpsilon);
        double total = 0.0;
        for (const double p : h.phi)
            total += p;
        for (double &p : h.phi)
            p = std::max(p / total, kPhiEpsilon);
    }
    return dist;
}

const ThemeDistribution::Histogram &ThemeDistribution::histogram(PriorityTheme theme) const {
    return hist_[static_cast<int>(theme)];
}

int ThemeDistribution::bin_of(PriorityTheme theme, double value) const {
    const Histogram &h = hist_[static_cast<int>(theme)];
    if (h.width == 0.0)
        return 0;
    const int b = static_cast<int>((value - h.lo) / h.width);
    return std::clamp(b, 0, static_cast<int>(h.phi.size()) - 1);
}

double ThemeDistribution::phi_of(PriorityTheme theme, double value) const {
    const Histogram &h = hist_[static_cast<int>(theme)];
    return h.phi[static_cast<std::size_t>(bin_of(theme, value))];
}

double entropy_term(double phi, bool surprisal) {
    if (!(phi > 0.0))
        throw ConfigError("entropy_term requires phi > 0");
    if (surprisal)
        return -std::log2(phi);
    return -(phi * std::log2(phi));
}

double total_entropy(const ThemeScores &scores, const ThemeDistribution &dist, bool surprisal) {
    double h = 0.0;
    for (const PriorityTheme theme : kPriorityThemes)
        h += entropy_term(dist.phi_of(theme, scores.get(theme)), surprisal);
    return h;
}

double recency(const RawPost &post) {
    return static_cast<double>(post.created_utc / 86400);
}

double popularity(const RawPost &post, std::int64_t max_upvotes, std::int64_t max_comments) {
    const double a = max_upvotes > 0
                         ? static_cast<double>(post.upvotes) / static_cast<double>(max_upvotes)
                         : 0.0;
    const double b = max_comments > 0 ? static_cast<double>(post.num_comments) /
                                            static_cast<double>(max_comments)
                                      : 0.0;
    return a + post.upvote_ratio + b;
}

std::vector<double> normalize(std::span<const double> values) {
    if (values.empty())
        return {};
    const kernels::MinMax mm = kernels::minmax(values);
    std::vector<double> out(values.size(), 0.0);
    if (mm.max == mm.min)
        return out;
    kernels::scale_to_unit(values, mm.min, mm.max, out);
    return out;
}

PriorityWeights PriorityWeights::load(const std::string &path) {
    return from_table(toml::parse_file(path));
}

PriorityWeights PriorityWeights::from_table(const toml::Table &table) {
    static constexpr const char *kKeys[kNumPriorityFeatures] = {
        "w_a", "w_b", "w_c", "w_d", "w_e", "w_f", "w_g", "w_h", "w_i", "w_j"};
    std::array<double, kNumPriorityFeatures> w{};
    for (int i = 0; i < kNumPriorityFeatures; ++i) {
        if (!table.has(kKeys[i]))
            throw ConfigError(std::string("weights file lacks ") + kKeys[i]);
        w[static_cast<std::size_t>(i)] = table.get_double(kKeys[i]);
        if (!(w[static_cast<std::size_t>(i)] > 0.0) ||
            !std::isfinite(w[static_cast<std::size_t>(i)]))
            throw ConfigError(std::string("weight must be positive and finite: ") + kKeys[i]);
    }
    return from_array(w);
}

std::string PriorityWeights::to_toml() const {
    static constexpr const char *kKeys[kNumPriorityFeatures] = {
        "w_a", "w_b", "w_c", "w_d", "w_e", "w_f", "w_g", "w_h", "w_i", "w_j"};
    const auto w = as_array();
    std::string out;
    for (int i = 0; i < kNumPriorityFeatures; ++i)
        out += std::string(kKeys[i]) + " = " + csv::fmt_exact(w[static_cast<std::size_t>(i)]) +
               "\n";
    return out;
}

FeatureMatrix FeatureMatrix::build(const std::vector<RawPost> &posts,
                                   const std::vector<ThemeScores> &themes,
                                   const std::vector<ToxicityAttributes> &tox,
                                   const std::vector<ValenceScore> &valence,
                                   const FeatureOptions &options) {
    const std::size_t n = posts.size();
    if (n == 0)
        throw ConfigError("cannot build features for an empty corpus");
    if (themes.size() != n || tox.size() != n || valence.size() != n)
        throw ConfigError("feature inputs must be parallel to the post list");

    FeatureMatrix m;
    m.dist_ = ThemeDistribution::fit(themes, options.bin_count);
    m.ids_.reserve(n);
    m.created_.reserve(n);

    std::int64_t max_up = 0, max_com = 0;
    for (const RawPost &p : posts) {
        max_up = std::max(max_up, p.upvotes);
        max_com = std::max(max_com, p.num_comments);
    }

    for (auto &col : m.raw_)
        col.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RawPost &p = posts[i];
        if (themes[i].post_id != p.id)
            throw ConfigError("theme scores out of order at post " + p.id);
        if (!m.by_id_.emplace(p.id, i).second)
            throw ConfigError("duplicate post id in feature build: " + p.id);
        m.ids_.push_back(p.id);
        m.created_.push_back(p.created_utc);
        m.raw_[0][i] = tox[i].toxicity;
        m.raw_[1][i] = tox[i].severe_toxicity;
        m.raw_[2][i] = tox[i].insult;
        m.raw_[3][i] = tox[i].profanity;
        m.raw_[4][i] = tox[i].threat;
        m.raw_[5][i] = tox[i].identity_attack;
        m.raw_[6][i] = -valence[i].compound;
        m.raw_[7][i] = total_entropy(themes[i], m.dist_, options.surprisal);
        m.raw_[8][i] = recency(p);
        m.raw_[9][i] = popularity(p, max_up, max_com);
    }

    for (int k = 0; k < kNumPriorityFeatures; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        if (k == 5 && !options.normalize_identity)
            m.norm_[ki] = m.raw_[ki];
        else
            m.norm_[ki] = normalize(m.raw_[ki]);
    }
    return m;
}

FeatureVector FeatureMatrix::row(std::size_t i) const {
    FeatureVector v;
    v.post_id = ids_[i];
    for (int k = 0; k < kNumPriorityFeatures; ++k) {
        v.raw[static_cast<std::size_t>(k)] = raw_[static_cast<std::size_t>(k)][i];
        v.normalized[static_cast<std::size_t>(k)] = norm_[static_cast<std::size_t>(k)][i];
    }
    return v;
}

std::size_t FeatureMatrix::index_of(const std::string &post_id) const {
    const auto it = by_id_.find(post_id);
    if (it == by_id_.end())
        throw NotFoundError("post not in feature matrix: " + post_id);
    return it->second;
}

std::vector<double> FeatureMatrix::priorities(const PriorityWeights &weights) const {
    const auto w = weights.as_array();
    const double *cols[kNumPriorityFeatures];
    for (int k = 0; k < kNumPriorityFeatures; ++k)
        cols[k] = norm_[static_cast<std::size_t>(k)].data();
    std::vector<double> out(size());
    kernels::weighted_sum(std::span<const double *const>(cols, kNumPriorityFeatures),
                          std::span<const double>(w.data(), kNumPriorityFeatures), out);
    return out;
}

std::vector<double> FeatureMatrix::sentiments(const PriorityWeights &weights) const {
    const auto w = weights.as_array();
    const double *cols[7];
    for (int k = 0; k < 7; ++k)
        cols[k] = norm_[static_cast<std::size_t>(k)].data();
    std::vector<double> out(size());
    kernels::weighted_sum(std::span<const double *const>(cols, 7),
                          std::span<const double>(w.data(), 7), out);
    return out;
}

std::vector<std::size_t> rank_order(std::span<const double> priorities,
                                    std::span<const std::int64_t> created,
                                    std::span<const std::string> ids) {
    std::vector<std::size_t> idx(priorities.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (priorities[x] != priorities[y])
            return priorities[x] > priorities[y];
        if (created[x] != created[y])
            return created[x] < created[y];
        return ids[x] < ids[y];
    });
    return idx;
}

GroundTruth GroundTruth::load(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open ground truth file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

GroundTruth GroundTruth::from_csv(const std::string &content) {
    const csv::TableData table = csv::read(content);
    const int id_col = table.require_column("post_id");
    const int rating_col = table.require_column("mean_rating");
    const auto need = static_cast<std::size_t>(std::max(id_col, rating_col)) + 1;
    GroundTruth truth;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        if (row.size() < need)
            throw ParseError("ground truth row " + std::to_string(r + 2) + ": too few columns");
        const std::string &id = row[static_cast<std::size_t>(id_col)];
        char *end = nullptr;
        const std::string &cell = row[static_cast<std::size_t>(rating_col)];
        const double rating = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
            throw ConfigError("ground truth row " + std::to_string(r + 2) +
                              ": bad mean_rating for " + id);
        if (!(rating >= 1.0 && rating <= 5.0))
            throw ConfigError("ground truth rating out of [1,5] for " + id);
        if (!truth.ratings.emplace(id, rating).second)
            throw ConfigError("duplicate ground truth entry: " + id);
    }
    return truth;
}

EvalMetrics precision_recall_at_k(const std::vector<std::string> &ranked,
                                  const GroundTruth &truth, int k, double relevance_threshold) {
    if (k < 1)
        throw ConfigError("k must be >= 1");
    if (ranked.empty())
        throw ConfigError("cannot evaluate an empty ranking");
    const std::size_t kk = std::min(static_cast<std::size_t>(k), ranked.size());
    // Relevance is judged within the ranked list, so fold-local evaluations
    // see fold-local recall.
    std::size_t relevant = 0, hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto it = truth.ratings.find(ranked[i]);
        if (it == truth.ratings.end())
            throw NotFoundError("ranked post missing from ground truth: " + ranked[i]);
        if (it->second >= relevance_threshold) {
            ++relevant;
            if (i < kk)
                ++hits;
        }
    }
    EvalMetrics metrics;
    metrics.k = static_cast<int>(kk);
    if (relevant == 0) {
        metrics.precision_at_k = 0.0;
        metrics.recall_at_k = 1.0;
    } else {
        metrics.precision_at_k = static_cast<double>(hits) / static_cast<double>(kk);
        metrics.recall_at_k = static_cast<double>(hits) / static_cast<double>(relevant);
    }
    return metrics;
}

RankingResult rank_and_aggregate(const FeatureMatrix &features, const PriorityWeights &weights,
                                 const std::map<std::string, Category> &categories) {
    const std::size_t n = features.size();
    const std::vector<double> prios = features.priorities(weights);
    const std::vector<double> sents = features.sentiments(weights);

    std::vector<Category> cat(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = categories.find(features.ids()[i]);
        if (it == categories.end())
            throw NotFoundError("post has no category: " + features.ids()[i]);
        cat[i] = it->second;
    }

    const auto order =
        rank_order(prios, features.created(), features.ids());

    RankingResult result;
    result.posts.reserve(n);
    int rank = 1;
    for (const std::size_t i : order) {
        RankedPost rp;
        rp.rank = rank++;
        rp.post_id = features.ids()[i];
        rp.priority = prios[i];
        rp.category = cat[i];
        rp.sent = sents[i];
        rp.entropy = weights.w_h * features.column(7)[i];
        rp.recency = weights.w_i * features.column(8)[i];
        rp.popularity = weights.w_j * features.column(9)[i];
        result.posts.push_back(std::move(rp));
    }

    // Category means accumulate in corpus order for determinism. None is a
    // twelfth bucket.
    constexpr std::size_t kBuckets = kCategoryCount + 1;
    double sums[kBuckets] = {};
    std::size_t counts[kBuckets] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(cat[i]);
        sums[c] += prios[i];
        ++counts[c];
    }
    for (std::size_t c = 0; c < kBuckets; ++c) {
        if (counts[c] == 0)
            continue;
        result.category_means.push_back({static_cast<Category>(c), counts[c],
                                         sums[c] / static_cast<double>(counts[c])});
    }
    std::sort(result.category_means.begin(), result.category_means.end(),
              [](const CategoryPriority &a, const CategoryPriority &b) {
                  if (a.mean_priority != b.mean_priority)
                      return a.mean_priority > b.mean_priority;
                  return a.category < b.category;
              });
    return result;
}

} // namespace feedmine
