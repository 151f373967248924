#include "feedmine/report.hpp"

#include "feedmine/csv.hpp"
#include "feedmine/errors.hpp"
#include "feedmine/svg.hpp"
#include "feedmine/text.hpp"

#include <algorithm>
#include <cmath>

namespace feedmine {

FrequencyTable frequency_by_category(const std::map<std::string, Category> &categories) {
    if (categories.empty())
        throw ConfigError("no categorized posts to tabulate");
    constexpr std::size_t kBuckets = kCategoryCount + 1;
    std::size_t counts[kBuckets] = {};
    for (const auto &[id, cat] : categories)
        ++counts[static_cast<std::size_t>(cat)];
    const std::size_t total = categories.size();

    FrequencyTable table;
    for (std::size_t c = 0; c < kBuckets; ++c) {
        if (counts[c] == 0)
            continue;
        FrequencyRow row;
        row.key = c < static_cast<std::size_t>(kCategoryCount)
                      ? std::string(to_string(static_cast<Category>(c)))
                      : "None";
        row.numerator = counts[c];
        row.denominator = total;
        row.frequency = static_cast<double>(counts[c]) / static_cast<double>(total);
        table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const FrequencyRow &a, const FrequencyRow &b) {
                  if (a.numerator != b.numerator)
                      return a.numerator > b.numerator;
                  return a.key < b.key;
              });
    return table;
}

FrequencyTable frequency_by_app(const std::vector<RawPost> &posts, const AppCatalog &catalog,
                                const std::map<std::string, bool> &is_concern) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> tallies; // app -> (concern, total)
    for (const RawPost &post : posts) {
        const auto label = is_concern.find(post.id);
        if (label == is_concern.end())
            throw NotFoundError("post has no detection label: " + post.id);
        const auto tokens = text::tokenize(post.full_text());
        for (const AppEntry *app : catalog.mentions(tokens)) {
            auto &[concern, total] = tallies[app->canonical];
            ++total;
            if (label->second)
                ++concern;
        }
    }
    FrequencyTable table;
    for (const auto &[app, tally] : tallies) {
        FrequencyRow row;
        row.key = app;
        row.numerator = tally.first;
        row.denominator = tally.second;
        row.frequency = static_cast<double>(tally.first) / static_cast<double>(tally.second);
        table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const FrequencyRow &a, const FrequencyRow &b) {
                  if (a.frequency != b.frequency)
                      return a.frequency > b.frequency;
                  return a.key < b.key;
              });
    return table;
}

FrequencyTable frequency_by_community(const std::vector<RawPost> &posts,
                                      const std::vector<CommunityCluster> &clusters,
                                      const std::map<std::string, Category> &categories) {
    std::map<std::string, std::size_t> cluster_of; // subreddit -> cluster index
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (const std::string &member : clusters[c].members) {
            if (!cluster_of.emplace(member, c).second)
                throw ConfigError("subreddit appears in two clusters: " + member);
        }
    }

    std::vector<std::size_t> totals(clusters.size(), 0);
    std::vector<std::array<std::size_t, kCategoryCount>> counts(
        clusters.size(), std::array<std::size_t, kCategoryCount>{});
    for (const RawPost &post : posts) {
        const auto cit = cluster_of.find(post.subreddit);
        if (cit == cluster_of.end())
            throw NotFoundError("post's subreddit belongs to no cluster: " + post.subreddit);
        const auto label = categories.find(post.id);
        if (label == categories.end())
            throw NotFoundError("post has no category: " + post.id);
        ++totals[cit->second];
        if (label->second != Category::NoneLabel)
            ++counts[cit->second][static_cast<std::size_t>(label->second)];
    }

    FrequencyTable table;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (totals[c] == 0)
            continue; // a cluster without posts has no denominator
        for (int cat = 0; cat < kCategoryCount; ++cat) {
            FrequencyRow row;
            row.key = clusters[c].name + " / " +
                      std::string(to_string(static_cast<Category>(cat)));
            row.numerator = counts[c][static_cast<std::size_t>(cat)];
            row.denominator = totals[c];
            row.frequency =
                static_cast<double>(row.numerator) / static_cast<double>(row.denominator);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string frequency_csv(const FrequencyTable &table) {
    csv::Writer w;
    w.row({"key", "count", "total", "proportion", "percent"});
    for (const FrequencyRow &row : table.rows)
        w.row({row.key, std::to_string(row.numerator), std::to_string(row.denominator),
               csv::fmt(row.frequency, 3), csv::fmt(100.0 * row.frequency, 1)});
    return w.str();
}

namespace {

struct Scale {
    double lo = 0.0, hi = 1.0;
    double px_lo = 0.0, px_hi = 1.0;
    double at(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

} // namespace

std::string render_timeline_svg(const std::vector<WeeklyPoint> &series,
                                const std::vector<ForecastPoint> &forecasts,
                                const std::vector<OutlierFlag> &flags,
                                const std::vector<EventAnnotation> &annotations) {
    const double width = 900, height = 320;
    svg::Canvas canvas(width, height);
    if (series.empty())
        return canvas.str();

    double ymax = 0.0;
    for (const WeeklyPoint &wp : series)
        if (wp.has_frequency())
            ymax = std::max(ymax, wp.frequency());
    for (const ForecastPoint &fp : forecasts)
        ymax = std::max(ymax, fp.hi95);
    if (ymax <= 0.0)
        ymax = 1.0;
    ymax *= 1.1;

    Scale x{static_cast<double>(series.front().week_start),
            static_cast<double>(series.back().week_start), 55, width - 15};
    if (series.size() == 1)
        x.hi = x.lo + 1;
    Scale y{0.0, ymax, height - 30, 15};

    // Axes and y gridlines.
    canvas.line(x.px_lo, y.px_lo, x.px_hi, y.px_lo, "#444444");
    canvas.line(x.px_lo, y.px_lo, x.px_lo, y.px_hi, "#444444");
    for (int g = 1; g <= 4; ++g) {
        const double v = ymax * g / 4.0;
        canvas.line(x.px_lo, y.at(v), x.px_hi, y.at(v), "#dddddd");
        canvas.text(x.px_lo - 5, y.at(v) + 3, csv::fmt(v, 3), 9, "end");
    }
    // Year labels along the x axis.
    int last_year = 0;
    for (const WeeklyPoint &wp : series) {
        const int year = dates::civil_from_days(wp.week_start).year;
        if (year != last_year) {
            last_year = year;
            canvas.line(x.at(static_cast<double>(wp.week_start)), y.px_lo,
                        x.at(static_cast<double>(wp.week_start)), y.px_lo + 4, "#444444");
            canvas.text(x.at(static_cast<double>(wp.week_start)), y.px_lo + 14,
                        std::to_string(year), 9, "middle");
        }
    }

    // Confidence bands, widest first so the 85% band sits on top.
    if (!forecasts.empty()) {
        std::vector<std::pair<double, double>> band95, band85;
        for (const ForecastPoint &fp : forecasts)
            band95.emplace_back(x.at(static_cast<double>(fp.week_start)), y.at(fp.hi95));
        for (auto it = forecasts.rbegin(); it != forecasts.rend(); ++it)
            band95.emplace_back(x.at(static_cast<double>(it->week_start)), y.at(it->lo95));
        canvas.polygon(band95, "#aec7e8", 0.35);
        for (const ForecastPoint &fp : forecasts)
            band85.emplace_back(x.at(static_cast<double>(fp.week_start)), y.at(fp.hi85));
        for (auto it = forecasts.rbegin(); it != forecasts.rend(); ++it)
            band85.emplace_back(x.at(static_cast<double>(it->week_start)), y.at(it->lo85));
        canvas.polygon(band85, "#7fa6d0", 0.35);

        std::vector<std::pair<double, double>> fitline;
        for (const ForecastPoint &fp : forecasts)
            fitline.emplace_back(x.at(static_cast<double>(fp.week_start)), y.at(fp.yhat));
        canvas.polyline(fitline, "#1f77b4", 1.2);
    }

    // Observed weekly frequencies.
    std::vector<std::pair<double, double>> observed;
    for (const WeeklyPoint &wp : series)
        if (wp.has_frequency())
            observed.emplace_back(x.at(static_cast<double>(wp.week_start)), y.at(wp.frequency()));
    canvas.polyline(observed, "#333333", 1.0);

    // Outlier dots sized by magnitude.
    std::map<std::int64_t, double> freq_of;
    for (const WeeklyPoint &wp : series)
        if (wp.has_frequency())
            freq_of[wp.week_start] = wp.frequency();
    for (const OutlierFlag &flag : flags) {
        if (flag.flag == OutlierClass::None)
            continue;
        const auto it = freq_of.find(flag.week_start);
        if (it == freq_of.end())
            continue;
        const double r = 2.0 + std::min(6.0, 40.0 * flag.magnitude);
        const char *color = flag.flag == OutlierClass::Strong ? "#c0392b" : "#e67e22";
        canvas.circle(x.at(static_cast<double>(flag.week_start)), y.at(it->second), r, color);
    }

    // Event markers.
    for (const EventAnnotation &ann : annotations) {
        if (!ann.in_span)
            continue;
        const double ex = x.at(static_cast<double>(ann.event_week));
        canvas.line(ex, y.px_hi, ex, y.px_lo, "#2ca02c", 1.0, "4,3");
        canvas.text(ex + 3, y.px_hi + 10, ann.event.name, 9, "start");
    }
    return canvas.str();
}

std::string render_category_bar_svg(const std::vector<CategoryPriority> &means) {
    const double width = 640, height = 340;
    svg::Canvas canvas(width, height);
    if (means.empty())
        return canvas.str();

    double vmax = 0.0;
    for (const CategoryPriority &m : means)
        vmax = std::max(vmax, m.mean_priority);
    if (vmax <= 0.0)
        vmax = 1.0;

    const double base_y = height - 90, top_y = 20;
    const double plot_w = width - 70;
    const double slot = plot_w / static_cast<double>(means.size());
    canvas.line(55, base_y, width - 15, base_y, "#444444");
    canvas.line(55, base_y, 55, top_y, "#444444");
    for (int g = 1; g <= 4; ++g) {
        const double v = vmax * g / 4.0;
        const double gy = base_y - (base_y - top_y) * (v / vmax);
        canvas.line(55, gy, width - 15, gy, "#dddddd");
        canvas.text(50, gy + 3, csv::fmt(v, 2), 9, "end");
    }
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double cx = 55 + slot * (static_cast<double>(i) + 0.5);
        const double h = (base_y - top_y) * (means[i].mean_priority / vmax);
        const double bw = slot * 0.7;
        canvas.rect(cx - bw / 2, base_y - h, bw, h, "#1f77b4");
        canvas.text(cx, base_y - h - 4, csv::fmt(means[i].mean_priority, 2), 9, "middle");
        const std::string label = means[i].category == Category::NoneLabel
                                      ? "None"
                                      : std::string(to_string(means[i].category));
        canvas.text(cx, base_y + 12, label, 9, "end", -45.0);
    }
    return canvas.str();
}

} // namespace feedmine
