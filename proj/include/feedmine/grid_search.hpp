#pragma once

#include "feedmine/priority.hpp"

#include <cstdint>
#include <vector>

namespace feedmine {

/// Candidate count for a value set over num_params independent weights.
std::uint64_t grid_candidate_count(std::size_t num_values, int num_params);

/// All tuples in lexicographic order; the first weight is the most
/// significant digit.
std::vector<std::vector<double>> enumerate_weight_tuples(const std::vector<double> &values,
                                                         int num_params);

struct GridSearchOptions {
    std::vector<double> grid = {1.0, 2.0, 5.0, 10.0};
    int k = 20;
    int folds = 10;
    std::uint64_t seed = 7;
    double relevance_threshold = 4.0;
    int threads = 0; // 0 = hardware concurrency
};

struct GridSearchResult {
    PriorityWeights best;
    EvalMetrics metrics;          // fold-averaged test metrics; per_fold filled
    std::uint64_t candidates = 0; // tuples enumerated per fold
};

/// Exhaustive weight sweep with k-fold cross-validation. Per fold, the tuple
/// with the best training precision@k wins (ties go to the lexicographically
/// smallest); the overall winner is the tuple selected most often across
/// folds. Deterministic for a fixed seed, independent of thread count.
GridSearchResult grid_search(const FeatureMatrix &features, const GroundTruth &truth,
                             const GridSearchOptions &options = {});

} // namespace feedmine
