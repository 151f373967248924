#pragma once

#include "feedmine/corpus.hpp"
#include "feedmine/dates.hpp"
#include "feedmine/toml_lite.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace feedmine {

inline constexpr double kWeeksPerYear = 52.18;
inline constexpr int kFourierOrder = 3;
inline constexpr double kZ85 = 1.4395;
inline constexpr double kZ95 = 1.9600;
inline constexpr std::size_t kSeasonalMinWeeks = 104;

struct WeeklyPoint {
    std::int64_t week_start = 0; // epoch-day of the Monday
    int ethical_count = 0;
    int total_count = 0;

    bool has_frequency() const { return total_count > 0; }
    double frequency() const {
        return static_cast<double>(ethical_count) / static_cast<double>(total_count);
    }
};

struct ForecastPoint {
    std::int64_t week_start = 0;
    double yhat = 0.0; // trend + seasonal + holiday, summed in that order
    double lo85 = 0.0, hi85 = 0.0;
    double lo95 = 0.0, hi95 = 0.0;
    double trend = 0.0;
    double seasonal = 0.0;
    double holiday = 0.0;
};

enum class OutlierClass { None, Weak, Strong };
const char *to_string(OutlierClass c);

struct OutlierFlag {
    std::int64_t week_start = 0;
    OutlierClass flag = OutlierClass::None;
    double magnitude = 0.0; // |observed - trend component|
};

struct WorldEvent {
    std::string name;
    dates::Date date;
    std::vector<int> rater_scores; // each in [-2, 2]
    int total = 0;
};

/// Six fixed-or-computed holiday date rules: "MM-DD" or
/// "<ordinal>-<weekday>-MM" with ordinal in {1st, 2nd, 3rd, 4th, last}.
class HolidayCalendar {
  public:
    static HolidayCalendar load(const std::string &path);
    static HolidayCalendar from_table(const toml::Table &table);

    const std::vector<std::string> &names() const { return names_; }
    /// Epoch-day of the named holiday in `year`.
    std::int64_t resolve(const std::string &name, int year) const;
    /// True when the holiday falls within [week_start, week_start+7).
    bool in_week(const std::string &name, std::int64_t week_start) const;

  private:
    struct Rule {
        unsigned month = 1;
        unsigned day = 0;    // fixed-date rules
        int weekday = -1;    // 0=Monday..6=Sunday for computed rules
        int ordinal = 0;     // 1..4, or -1 for "last"
    };
    std::vector<std::string> names_;
    std::vector<Rule> rules_;
    const Rule &rule_of(const std::string &name) const;
};

/// Per-week concern frequency over [span_start, span_end] (epoch days,
/// inclusive); weeks without posts appear with total_count = 0.
std::vector<WeeklyPoint> weekly_frequencies(const std::vector<RawPost> &posts,
                                            const std::map<std::string, bool> &is_concern,
                                            std::int64_t span_start, std::int64_t span_end);

struct SeasonalModel {
    bool seasonal_enabled = false;
    double intercept = 0.0;
    double slope = 0.0;
    std::vector<double> sin_coef; // index k-1 for harmonic k
    std::vector<double> cos_coef;
    std::vector<std::string> holiday_names; // columns kept in the fit
    std::vector<double> holiday_coef;
    double sigma = 0.0;
    std::vector<std::string> warnings;
    std::vector<ForecastPoint> forecasts; // one per fitted (non-missing) week
};

/// Harmonic-regression stand-in for a seasonal activity model: linear trend,
/// three yearly Fourier pairs (period 52.18 weeks), holiday indicators, and
/// Gaussian residual intervals. Seasonality needs >= 104 fitted weeks.
SeasonalModel fit_seasonal(const std::vector<WeeklyPoint> &series,
                           const HolidayCalendar &holidays,
                           int fourier_order = kFourierOrder);

enum class OrderCriterion { Aic, Bic };

struct BaselineModel {
    int order = 0;           // selected p
    double intercept = 0.0;
    std::vector<double> ar_coef; // phi_1..phi_p
    double sigma = 0.0;
    OrderCriterion criterion = OrderCriterion::Bic;
    std::vector<ForecastPoint> forecasts; // weeks p..n-1 of the fitted series
};

/// AR(p)-plus-drift baseline: p in 0..max_order chosen on the common sample
/// by the information criterion (ties to smaller p), then refit on all
/// usable rows. One-step-ahead in-sample predictions with flat components.
BaselineModel fit_baseline(const std::vector<WeeklyPoint> &series, int max_order = 5,
                           OrderCriterion criterion = OrderCriterion::Bic);

/// Interval rule per week: outside 95% -> Strong, outside 85% -> Weak.
/// Weeks without an observation or a forecast stay None.
std::vector<OutlierFlag> classify_outliers(const std::vector<WeeklyPoint> &series,
                                           const std::vector<ForecastPoint> &forecasts);

/// Events CSV: name, date, score_1..score_n.
std::vector<WorldEvent> load_events(const std::string &path);
std::vector<WorldEvent> parse_events(const std::string &csv_content);

/// Events whose rater total strictly exceeds the threshold, date order.
std::vector<WorldEvent> rank_events(const std::vector<WorldEvent> &events, int threshold = 8);

struct EventAnnotation {
    WorldEvent event;
    bool in_span = false;
    std::int64_t event_week = 0;   // Monday of the containing week
    bool has_outlier = false;      // an outlier within +/-5 weeks
    std::int64_t outlier_week = 0;
    OutlierClass outlier_class = OutlierClass::None;
};

/// Maps each event to its containing week and the nearest flagged week
/// within +/-5 weeks (ties to the earlier week).
std::vector<EventAnnotation> align_events(const std::vector<WeeklyPoint> &series,
                                          const std::vector<OutlierFlag> &flags,
                                          const std::vector<WorldEvent> &events);

} // namespace feedmine
