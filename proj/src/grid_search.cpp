#include "feedmine/grid_search.hpp"

#include "feedmine/errors.hpp"
#include "feedmine/kernels.hpp"
#include "feedmine/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <thread>

namespace feedmine {

std::uint64_t grid_candidate_count(std::size_t num_values, int num_params) {
    std::uint64_t total = 1;
    for (int i = 0; i < num_params; ++i)
        total *= num_values;
    return total;
}

std::vector<std::vector<double>> enumerate_weight_tuples(const std::vector<double> &values,
                                                         int num_params) {
    if (values.empty() || num_params < 1)
        throw ConfigError("weight enumeration needs values and at least one parameter");
    const std::uint64_t total = grid_candidate_count(values.size(), num_params);
    std::vector<std::vector<double>> tuples;
    tuples.reserve(total);
    std::vector<std::size_t> digits(static_cast<std::size_t>(num_params), 0);
    for (std::uint64_t c = 0; c < total; ++c) {
        std::vector<double> tuple(static_cast<std::size_t>(num_params));
        for (int i = 0; i < num_params; ++i)
            tuple[static_cast<std::size_t>(i)] = values[digits[static_cast<std::size_t>(i)]];
        tuples.push_back(std::move(tuple));
        for (int i = num_params - 1; i >= 0; --i) { // increment, last digit fastest
            auto &d = digits[static_cast<std::size_t>(i)];
            if (++d < values.size())
                break;
            d = 0;
        }
    }
    return tuples;
}

namespace {

// One cross-validation fold's training data, gathered into contiguous
// columns so candidate evaluation runs on cache-friendly arrays.
struct FoldData {
    std::vector<std::size_t> train; // feature-matrix indices
    std::vector<std::size_t> test;
    std::vector<double> cols[kNumPriorityFeatures];
    std::vector<int> tiebreak;  // rank under (created asc, id asc)
    std::vector<char> relevant; // rating >= threshold
    std::size_t relevant_count = 0;
};

void decode_candidate(std::uint64_t c, const std::vector<double> &grid,
                      const std::uint64_t *pows, double *w) {
    const auto v = static_cast<std::uint64_t>(grid.size());
    for (int i = 0; i < kNumPriorityFeatures; ++i)
        w[i] = grid[static_cast<std::size_t>((c / pows[i]) % v)];
}

// Training precision@k of one candidate: weighted-sum the gathered columns,
// pick the top-k under (priority desc, tiebreak asc), count relevant.
double train_precision(const FoldData &fold, const double *weights, std::size_t kk,
                       std::vector<double> &buf, std::vector<std::uint32_t> &idx) {
    const std::size_t n = fold.train.size();
    const double *cols[kNumPriorityFeatures];
    for (int k = 0; k < kNumPriorityFeatures; ++k)
        cols[k] = fold.cols[k].data();
    kernels::weighted_sum(std::span<const double *const>(cols, kNumPriorityFeatures),
                          std::span<const double>(weights, kNumPriorityFeatures),
                          std::span<double>(buf.data(), n));
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto cmp = [&](std::uint32_t a, std::uint32_t b) {
        if (buf[a] != buf[b])
            return buf[a] > buf[b];
        return fold.tiebreak[a] < fold.tiebreak[b];
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk) - 1, idx.end(),
                     cmp);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < kk; ++i)
        hits += static_cast<std::size_t>(fold.relevant[idx[i]]);
    return static_cast<double>(hits) / static_cast<double>(kk);
}

} // namespace

GridSearchResult grid_search(const FeatureMatrix &features, const GroundTruth &truth,
                             const GridSearchOptions &options) {
    if (options.folds < 2)
        throw ConfigError("cross-validation needs at least 2 folds");
    if (options.k < 1)
        throw ConfigError("k must be >= 1");
    if (options.grid.empty())
        throw ConfigError("empty weight grid");
    if (truth.ratings.size() < static_cast<std::size_t>(options.folds))
        throw ConfigError("ground truth smaller than fold count");

    // Rated posts in id order (map order), then one seeded shuffle.
    std::vector<std::size_t> order;
    order.reserve(truth.ratings.size());
    for (const auto &[id, rating] : truth.ratings)
        order.push_back(features.index_of(id));
    Rng rng(options.seed);
    rng.shuffle(order);

    const std::size_t n = order.size();
    const auto folds = static_cast<std::size_t>(options.folds);
    const std::size_t base = n / folds, extra = n % folds;

    std::vector<FoldData> fold_data(folds);
    {
        std::size_t pos = 0;
        for (std::size_t f = 0; f < folds; ++f) {
            const std::size_t len = base + (f < extra ? 1 : 0);
            auto &fd = fold_data[f];
            fd.test.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                           order.begin() + static_cast<std::ptrdiff_t>(pos + len));
            fd.train.reserve(n - len);
            for (std::size_t i = 0; i < n; ++i)
                if (i < pos || i >= pos + len)
                    fd.train.push_back(order[i]);
            pos += len;
        }
    }
    for (auto &fd : fold_data) {
        const std::size_t m = fd.train.size();
        for (int k = 0; k < kNumPriorityFeatures; ++k) {
            fd.cols[k].resize(m);
            const auto &col = features.column(k);
            for (std::size_t i = 0; i < m; ++i)
                fd.cols[k][i] = col[fd.train[i]];
        }
        std::vector<std::uint32_t> by_age(m);
        std::iota(by_age.begin(), by_age.end(), 0);
        std::sort(by_age.begin(), by_age.end(), [&](std::uint32_t a, std::uint32_t b) {
            const std::size_t ia = fd.train[a], ib = fd.train[b];
            if (features.created()[ia] != features.created()[ib])
                return features.created()[ia] < features.created()[ib];
            return features.ids()[ia] < features.ids()[ib];
        });
        fd.tiebreak.resize(m);
        for (std::size_t r = 0; r < m; ++r)
            fd.tiebreak[by_age[r]] = static_cast<int>(r);
        fd.relevant.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const bool rel = truth.ratings.at(features.ids()[fd.train[i]]) >=
                             options.relevance_threshold;
            fd.relevant[i] = rel ? 1 : 0;
            fd.relevant_count += rel ? 1 : 0;
        }
    }

    const std::uint64_t total = grid_candidate_count(options.grid.size(), kNumPriorityFeatures);
    std::uint64_t pows[kNumPriorityFeatures];
    {
        std::uint64_t p = 1;
        for (int i = kNumPriorityFeatures - 1; i >= 0; --i) {
            pows[i] = p;
            p *= options.grid.size();
        }
    }

    unsigned thread_count = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                                : std::thread::hardware_concurrency();
    if (thread_count == 0)
        thread_count = 1;
    thread_count = static_cast<unsigned>(
        std::min<std::uint64_t>(thread_count, std::max<std::uint64_t>(total, 1)));

    GridSearchResult result;
    result.candidates = total;
    result.metrics.k = options.k;

    std::map<std::uint64_t, int> votes;
    double precision_sum = 0.0, recall_sum = 0.0;

    for (std::size_t f = 0; f < folds; ++f) {
        const FoldData &fd = fold_data[f];
        const std::size_t kk = std::min(static_cast<std::size_t>(options.k), fd.train.size());

        // Each worker scans a candidate range; the reduction (best precision,
        // lowest index wins ties) is order-free.
        struct Best {
            double precision = -1.0;
            std::uint64_t candidate = 0;
        };
        std::vector<Best> best(thread_count);
        std::vector<std::thread> workers;
        const std::uint64_t chunk = (total + thread_count - 1) / thread_count;
        for (unsigned t = 0; t < thread_count; ++t) {
            workers.emplace_back([&, t] {
                const std::uint64_t lo = t * chunk;
                const std::uint64_t hi = std::min(total, lo + chunk);
                std::vector<double> buf(fd.train.size());
                std::vector<std::uint32_t> idx;
                double w[kNumPriorityFeatures];
                Best local;
                for (std::uint64_t c = lo; c < hi; ++c) {
                    decode_candidate(c, options.grid, pows, w);
                    const double p = train_precision(fd, w, kk, buf, idx);
                    if (p > local.precision) {
                        local.precision = p;
                        local.candidate = c;
                    }
                }
                best[t] = local;
            });
        }
        for (auto &worker : workers)
            worker.join();
        Best fold_best;
        for (const Best &b : best) {
            if (b.precision > fold_best.precision ||
                (b.precision == fold_best.precision && b.candidate < fold_best.candidate))
                fold_best = b;
        }

        double w[kNumPriorityFeatures];
        decode_candidate(fold_best.candidate, options.grid, pows, w);
        std::array<double, kNumPriorityFeatures> warr;
        std::copy(w, w + kNumPriorityFeatures, warr.begin());
        const PriorityWeights selected = PriorityWeights::from_array(warr);

        // Evaluate the fold winner on its held-out posts.
        const std::vector<double> all_prios = features.priorities(selected);
        std::vector<double> test_prios;
        std::vector<std::int64_t> test_created;
        std::vector<std::string> test_ids;
        for (const std::size_t i : fd.test) {
            test_prios.push_back(all_prios[i]);
            test_created.push_back(features.created()[i]);
            test_ids.push_back(features.ids()[i]);
        }
        std::vector<std::string> ranked;
        for (const std::size_t r : rank_order(test_prios, test_created, test_ids))
            ranked.push_back(test_ids[r]);
        const EvalMetrics test_metrics =
            precision_recall_at_k(ranked, truth, options.k, options.relevance_threshold);

        FoldMetrics fm;
        fm.fold = static_cast<int>(f);
        fm.selected = selected;
        fm.precision = test_metrics.precision_at_k;
        fm.recall = test_metrics.recall_at_k;
        fm.k = test_metrics.k;
        bool any_relevant = false;
        for (const std::string &id : test_ids)
            any_relevant |= truth.ratings.at(id) >= options.relevance_threshold;
        fm.zero_relevant = !any_relevant;
        result.metrics.per_fold.push_back(fm);

        precision_sum += fm.precision;
        recall_sum += fm.recall;
        ++votes[fold_best.candidate];
    }

    result.metrics.precision_at_k = precision_sum / static_cast<double>(folds);
    result.metrics.recall_at_k = recall_sum / static_cast<double>(folds);

    // Most frequent winner; map order breaks frequency ties by smallest
    // candidate index, i.e. the lexicographically smallest tuple.
    std::uint64_t best_candidate = 0;
    int best_votes = -1;
    for (const auto &[candidate, count] : votes) {
        if (count > best_votes) {
            best_votes = count;
            best_candidate = candidate;
        }
    }
    double w[kNumPriorityFeatures];
    decode_candidate(best_candidate, options.grid, pows, w);
    std::array<double, kNumPriorityFeatures> warr;
    std::copy(w, w + kNumPriorityFeatures, warr.begin());
    result.best = PriorityWeights::from_array(warr);
    return result;
}

} // namespace feedmine
