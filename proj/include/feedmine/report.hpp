#pragma once

#include "feedmine/classify.hpp"
#include "feedmine/cluster.hpp"
#include "feedmine/corpus.hpp"
#include "feedmine/priority.hpp"
#include "feedmine/timeline.hpp"

#include <map>
#include <string>
#include <vector>

namespace feedmine {

struct FrequencyRow {
    std::string key;
    std::size_t numerator = 0;
    std::size_t denominator = 0;
    double frequency = 0.0;
};

struct FrequencyTable {
    std::vector<FrequencyRow> rows;
};

/// Share of each category among the categorized posts, most frequent first.
FrequencyTable frequency_by_category(const std::map<std::string, Category> &categories);

/// Concern posts per app over total posts mentioning the app; a post
/// mentioning several apps counts toward each. Zero-mention apps omitted.
FrequencyTable frequency_by_app(const std::vector<RawPost> &posts, const AppCatalog &catalog,
                                const std::map<std::string, bool> &is_concern);

/// (cluster, category) counts over the cluster's total posts; categories
/// with zero posts in a cluster keep their zero row. Every post's subreddit
/// must belong to exactly one cluster.
FrequencyTable frequency_by_community(const std::vector<RawPost> &posts,
                                      const std::vector<CommunityCluster> &clusters,
                                      const std::map<std::string, Category> &categories);

/// key,count,total,proportion,percent with fixed decimals (3 for
/// proportions, 1 for percents) so emitted files are byte-stable.
std::string frequency_csv(const FrequencyTable &table);

/// Weekly series with CI bands, outlier dots (sized by magnitude, colored by
/// class) and event markers.
std::string render_timeline_svg(const std::vector<WeeklyPoint> &series,
                                const std::vector<ForecastPoint> &forecasts,
                                const std::vector<OutlierFlag> &flags,
                                const std::vector<EventAnnotation> &annotations);

/// Horizontal-axis bar chart of mean priority per category.
std::string render_category_bar_svg(const std::vector<CategoryPriority> &means);

} // namespace feedmine
