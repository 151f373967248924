#include "feedmine/timeline.hpp"

#include "feedmine/csv.hpp"
#include "feedmine/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace feedmine {

namespace {

constexpr const char *kWeekdayNames[7] = {"monday",   "tuesday", "wednesday", "thursday",
                                          "friday",   "saturday", "sunday"};

struct LstsqResult {
    Eigen::VectorXd coef;
    double rss = 0.0;
    long rank = 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

LstsqResult lstsq(const Eigen::MatrixXd &X, const Eigen::VectorXd &y) {
    LstsqResult r;
    r.qr = X.colPivHouseholderQr();
    r.rank = r.qr.rank();
    r.coef = r.qr.solve(y);
    r.rss = (y - X * r.coef).squaredNorm();
    return r;
}

} // namespace

const char *to_string(OutlierClass c) {
    switch (c) {
    case OutlierClass::None: return "none";
    case OutlierClass::Weak: return "weak";
    case OutlierClass::Strong: return "strong";
    }
    return "none";
}

HolidayCalendar HolidayCalendar::load(const std::string &path) {
    return from_table(toml::parse_file(path));
}

HolidayCalendar HolidayCalendar::from_table(const toml::Table &table) {
    if (!table.has("holidays"))
        throw ConfigError("holiday file lacks a [holidays] table");
    const toml::Table &hol = table.table("holidays");
    HolidayCalendar cal;
    for (const std::string &name : hol.keys()) {
        const std::string spec = hol.get_string(name);
        Rule rule;
        const auto digit = [&spec](std::size_t i) {
            return std::isdigit(static_cast<unsigned char>(spec[i])) != 0;
        };
        if (spec.size() == 5 && spec[2] == '-' && digit(0) && digit(1) && digit(3) && digit(4)) {
            rule.month = static_cast<unsigned>(std::stoi(spec.substr(0, 2)));
            rule.day = static_cast<unsigned>(std::stoi(spec.substr(3, 2)));
            if (rule.month < 1 || rule.month > 12 || rule.day < 1 || rule.day > 31)
                throw ConfigError("bad holiday date rule for " + name + ": " + spec);
        } else {
            const auto first_dash = spec.find('-');
            const auto last_dash = spec.rfind('-');
            if (first_dash == std::string::npos || last_dash == first_dash)
                throw ConfigError("bad holiday rule for " + name + ": " + spec);
            const std::string ord = spec.substr(0, first_dash);
            const std::string wday = spec.substr(first_dash + 1, last_dash - first_dash - 1);
            const std::string mon = spec.substr(last_dash + 1);
            if (ord == "1st") rule.ordinal = 1;
            else if (ord == "2nd") rule.ordinal = 2;
            else if (ord == "3rd") rule.ordinal = 3;
            else if (ord == "4th") rule.ordinal = 4;
            else if (ord == "last") rule.ordinal = -1;
            else throw ConfigError("bad holiday ordinal for " + name + ": " + ord);
            rule.weekday = -1;
            for (int i = 0; i < 7; ++i)
                if (wday == kWeekdayNames[i])
                    rule.weekday = i;
            if (rule.weekday < 0)
                throw ConfigError("bad holiday weekday for " + name + ": " + wday);
            rule.month = static_cast<unsigned>(std::atoi(mon.c_str()));
            if (rule.month < 1 || rule.month > 12)
                throw ConfigError("bad holiday month for " + name + ": " + mon);
        }
        cal.names_.push_back(name);
        cal.rules_.push_back(rule);
    }
    if (cal.names_.empty())
        throw ConfigError("holiday file defines no holidays");
    return cal;
}

const HolidayCalendar::Rule &HolidayCalendar::rule_of(const std::string &name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name)
            return rules_[i];
    throw NotFoundError("unknown holiday: " + name);
}

std::int64_t HolidayCalendar::resolve(const std::string &name, int year) const {
    const Rule &rule = rule_of(name);
    if (rule.day > 0)
        return dates::days_from_civil({year, rule.month, rule.day});
    if (rule.ordinal > 0) {
        const std::int64_t first = dates::days_from_civil({year, rule.month, 1});
        const int shift = (rule.weekday - dates::weekday(first) + 7) % 7;
        return first + shift + static_cast<std::int64_t>(rule.ordinal - 1) * 7;
    }
    const unsigned last_day = dates::days_in_month(year, rule.month);
    const std::int64_t last = dates::days_from_civil({year, rule.month, last_day});
    const int back = (dates::weekday(last) - rule.weekday + 7) % 7;
    return last - back;
}

bool HolidayCalendar::in_week(const std::string &name, std::int64_t week_start) const {
    // A week may straddle a year boundary, so try both civil years it touches.
    const int y1 = dates::civil_from_days(week_start).year;
    const int y2 = dates::civil_from_days(week_start + 6).year;
    for (const int year : {y1, y2}) {
        const std::int64_t day = resolve(name, year);
        if (day >= week_start && day < week_start + 7)
            return true;
        if (y1 == y2)
            break;
    }
    return false;
}

std::vector<WeeklyPoint> weekly_frequencies(const std::vector<RawPost> &posts,
                                            const std::map<std::string, bool> &is_concern,
                                            std::int64_t span_start, std::int64_t span_end) {
    if (span_end < span_start)
        throw ConfigError("weekly span is empty");
    const std::int64_t first_week = dates::week_start(span_start);
    const std::int64_t last_week = dates::week_start(span_end);

    std::map<std::int64_t, WeeklyPoint> weeks;
    for (std::int64_t w = first_week; w <= last_week; w += 7)
        weeks[w] = WeeklyPoint{w, 0, 0};

    for (const RawPost &post : posts) {
        const std::int64_t day = dates::day_of_epoch(post.created_utc);
        if (day < span_start || day > span_end)
            continue;
        const auto label = is_concern.find(post.id);
        if (label == is_concern.end())
            throw NotFoundError("post has no detection label: " + post.id);
        WeeklyPoint &wp = weeks.at(dates::week_start(day));
        ++wp.total_count;
        if (label->second)
            ++wp.ethical_count;
    }

    std::vector<WeeklyPoint> out;
    out.reserve(weeks.size());
    for (const auto &[w, wp] : weeks)
        out.push_back(wp);
    return out;
}

SeasonalModel fit_seasonal(const std::vector<WeeklyPoint> &series,
                           const HolidayCalendar &holidays, int fourier_order) {
    if (fourier_order < 1)
        throw ConfigError("fourier_order must be >= 1");
    std::vector<const WeeklyPoint *> fitted;
    for (const WeeklyPoint &wp : series)
        if (wp.has_frequency())
            fitted.push_back(&wp);
    const std::size_t n = fitted.size();
    if (n < 2)
        throw FitError("seasonal fit needs at least 2 observed weeks, got " + std::to_string(n));

    SeasonalModel model;
    model.seasonal_enabled = n >= kSeasonalMinWeeks;
    if (!model.seasonal_enabled)
        model.warnings.push_back("seasonality disabled: " + std::to_string(n) +
                                 " observed weeks (need " +
                                 std::to_string(kSeasonalMinWeeks) + ")");

    // Column labels mirror the design: intercept, trend, harmonic pairs,
    // then one indicator per holiday that occurs in the fitted span.
    std::vector<std::string> labels = {"intercept", "trend"};
    const int harmonics = model.seasonal_enabled ? fourier_order : 0;
    for (int k = 1; k <= harmonics; ++k) {
        labels.push_back("sin" + std::to_string(k));
        labels.push_back("cos" + std::to_string(k));
    }
    std::vector<std::vector<double>> holiday_cols;
    for (const std::string &name : holidays.names()) {
        std::vector<double> col(n, 0.0);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (holidays.in_week(name, fitted[i]->week_start)) {
                col[i] = 1.0;
                any = true;
            }
        }
        if (!any) {
            model.warnings.push_back("holiday never occurs in fitted span: " + name);
            continue; // an all-zero column would only add collinearity noise
        }
        model.holiday_names.push_back(name);
        holiday_cols.push_back(std::move(col));
        labels.push_back("holiday:" + name);
    }

    const auto ncols = static_cast<long>(2 + 2 * harmonics + holiday_cols.size());
    Eigen::MatrixXd X(static_cast<long>(n), ncols);
    Eigen::VectorXd y(static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<long>(i);
        const double t = static_cast<double>(i);
        long c = 0;
        X(row, c++) = 1.0;
        X(row, c++) = t;
        for (int k = 1; k <= harmonics; ++k) {
            const double angle = 2.0 * std::numbers::pi * k * t / kWeeksPerYear;
            X(row, c++) = std::sin(angle);
            X(row, c++) = std::cos(angle);
        }
        for (const auto &col : holiday_cols)
            X(row, c++) = col[i];
        y(row) = fitted[i]->frequency();
    }

    const LstsqResult fit = lstsq(X, y);
    if (fit.rank < ncols) {
        // The pivot order lists independent columns first; the rest are the
        // collinear ones.
        const auto perm = fit.qr.colsPermutation().indices();
        std::string bad;
        for (long i = fit.rank; i < ncols; ++i) {
            if (!bad.empty())
                bad += ", ";
            bad += labels[static_cast<std::size_t>(perm(i))];
        }
        throw FitError("seasonal design matrix is collinear in: " + bad);
    }

    model.intercept = fit.coef(0);
    model.slope = fit.coef(1);
    for (int k = 0; k < harmonics; ++k) {
        model.sin_coef.push_back(fit.coef(2 + 2 * k));
        model.cos_coef.push_back(fit.coef(3 + 2 * k));
    }
    for (std::size_t h = 0; h < holiday_cols.size(); ++h)
        model.holiday_coef.push_back(fit.coef(static_cast<long>(2 + 2 * harmonics + h)));
    model.sigma = std::sqrt(fit.rss / static_cast<double>(std::max<std::size_t>(
                                          1, n - static_cast<std::size_t>(fit.rank))));

    model.forecasts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        ForecastPoint fp;
        fp.week_start = fitted[i]->week_start;
        fp.trend = model.intercept + model.slope * t;
        fp.seasonal = 0.0;
        for (int k = 1; k <= harmonics; ++k) {
            const double angle = 2.0 * std::numbers::pi * k * t / kWeeksPerYear;
            fp.seasonal += model.sin_coef[static_cast<std::size_t>(k - 1)] * std::sin(angle);
            fp.seasonal += model.cos_coef[static_cast<std::size_t>(k - 1)] * std::cos(angle);
        }
        fp.holiday = 0.0;
        for (std::size_t h = 0; h < holiday_cols.size(); ++h)
            fp.holiday += model.holiday_coef[h] * holiday_cols[h][i];
        fp.yhat = fp.trend + fp.seasonal + fp.holiday;
        fp.lo85 = fp.yhat - kZ85 * model.sigma;
        fp.hi85 = fp.yhat + kZ85 * model.sigma;
        fp.lo95 = fp.yhat - kZ95 * model.sigma;
        fp.hi95 = fp.yhat + kZ95 * model.sigma;
        model.forecasts.push_back(fp);
    }
    return model;
}

BaselineModel fit_baseline(const std::vector<WeeklyPoint> &series, int max_order,
                           OrderCriterion criterion) {
    if (max_order < 0)
        throw ConfigError("max_order must be >= 0");
    std::vector<const WeeklyPoint *> fitted;
    for (const WeeklyPoint &wp : series)
        if (wp.has_frequency())
            fitted.push_back(&wp);
    const std::size_t n = fitted.size();
    if (n < static_cast<std::size_t>(max_order) + 2)
        throw FitError("baseline fit needs at least " + std::to_string(max_order + 2) +
                       " observed weeks, got " + std::to_string(n));
    std::vector<double> yv(n);
    for (std::size_t i = 0; i < n; ++i)
        yv[i] = fitted[i]->frequency();

    // Order selection on the common sample so criteria are comparable.
    const std::size_t m = n - static_cast<std::size_t>(max_order);
    int best_p = 0;
    double best_ic = 0.0;
    for (int p = 0; p <= max_order; ++p) {
        Eigen::MatrixXd X(static_cast<long>(m), p + 1);
        Eigen::VectorXd target(static_cast<long>(m));
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t t = static_cast<std::size_t>(max_order) + r;
            X(static_cast<long>(r), 0) = 1.0;
            for (int i = 1; i <= p; ++i)
                X(static_cast<long>(r), i) = yv[t - static_cast<std::size_t>(i)];
            target(static_cast<long>(r)) = yv[t];
        }
        const LstsqResult fit = lstsq(X, target);
        const double rss = std::max(fit.rss, 1e-300);
        const double pen = criterion == OrderCriterion::Aic
                               ? 2.0
                               : std::log(static_cast<double>(m));
        const double ic = static_cast<double>(m) * std::log(rss / static_cast<double>(m)) +
                          pen * static_cast<double>(p + 1);
        if (p == 0 || ic < best_ic) {
            best_p = p;
            best_ic = ic;
        }
    }

    // Refit the chosen order on every usable row.
    const std::size_t m2 = n - static_cast<std::size_t>(best_p);
    Eigen::MatrixXd X(static_cast<long>(m2), best_p + 1);
    Eigen::VectorXd target(static_cast<long>(m2));
    for (std::size_t r = 0; r < m2; ++r) {
        const std::size_t t = static_cast<std::size_t>(best_p) + r;
        X(static_cast<long>(r), 0) = 1.0;
        for (int i = 1; i <= best_p; ++i)
            X(static_cast<long>(r), i) = yv[t - static_cast<std::size_t>(i)];
        target(static_cast<long>(r)) = yv[t];
    }
    const LstsqResult fit = lstsq(X, target);

    BaselineModel model;
    model.order = best_p;
    model.criterion = criterion;
    model.intercept = fit.coef(0);
    for (int i = 1; i <= best_p; ++i)
        model.ar_coef.push_back(fit.coef(i));
    model.sigma = std::sqrt(fit.rss / static_cast<double>(std::max<std::size_t>(
                                          1, m2 - static_cast<std::size_t>(fit.rank))));

    model.forecasts.reserve(m2);
    for (std::size_t r = 0; r < m2; ++r) {
        const std::size_t t = static_cast<std::size_t>(best_p) + r;
        double acc = model.intercept;
        for (int i = 1; i <= best_p; ++i)
            acc += model.ar_coef[static_cast<std::size_t>(i - 1)] *
                   yv[t - static_cast<std::size_t>(i)];
        ForecastPoint fp;
        fp.week_start = fitted[t]->week_start;
        fp.yhat = acc;
        fp.trend = acc; // no seasonal decomposition in the baseline
        fp.seasonal = 0.0;
        fp.holiday = 0.0;
        fp.lo85 = acc - kZ85 * model.sigma;
        fp.hi85 = acc + kZ85 * model.sigma;
        fp.lo95 = acc - kZ95 * model.sigma;
        fp.hi95 = acc + kZ95 * model.sigma;
        model.forecasts.push_back(fp);
    }
    return model;
}

std::vector<OutlierFlag> classify_outliers(const std::vector<WeeklyPoint> &series,
                                           const std::vector<ForecastPoint> &forecasts) {
    std::map<std::int64_t, const ForecastPoint *> by_week;
    for (const ForecastPoint &fp : forecasts)
        by_week[fp.week_start] = &fp;

    std::vector<OutlierFlag> flags;
    flags.reserve(series.size());
    for (const WeeklyPoint &wp : series) {
        OutlierFlag flag;
        flag.week_start = wp.week_start;
        const auto it = by_week.find(wp.week_start);
        if (wp.has_frequency() && it != by_week.end()) {
            const ForecastPoint &fp = *it->second;
            const double obs = wp.frequency();
            flag.magnitude = std::abs(obs - fp.trend);
            if (obs > fp.hi95 || obs < fp.lo95)
                flag.flag = OutlierClass::Strong;
            else if (obs > fp.hi85 || obs < fp.lo85)
                flag.flag = OutlierClass::Weak;
        }
        flags.push_back(flag);
    }
    return flags;
}

std::vector<WorldEvent> load_events(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open events file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_events(ss.str());
}

std::vector<WorldEvent> parse_events(const std::string &csv_content) {
    const csv::TableData table = csv::read(csv_content);
    if (table.header.size() < 3 || table.header[0] != "name" || table.header[1] != "date")
        throw ConfigError("events file must start with columns name, date, score_1...");
    for (std::size_t c = 2; c < table.header.size(); ++c) {
        const std::string expected = "score_" + std::to_string(c - 1);
        if (table.header[c] != expected)
            throw ConfigError("events file column " + std::to_string(c + 1) + " must be " +
                              expected);
    }
    std::vector<WorldEvent> events;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        if (row.size() != table.header.size())
            throw ParseError("events row " + std::to_string(r + 2) + ": wrong column count");
        WorldEvent ev;
        ev.name = row[0];
        ev.date = dates::parse_iso_date(row[1]);
        for (std::size_t c = 2; c < row.size(); ++c) {
            char *end = nullptr;
            const long score = std::strtol(row[c].c_str(), &end, 10);
            if (end == row[c].c_str() || *end != '\0')
                throw ConfigError("events row " + std::to_string(r + 2) + ": bad score '" +
                                  row[c] + "'");
            if (score < -2 || score > 2)
                throw ConfigError("events row " + std::to_string(r + 2) +
                                  ": rater score out of [-2,2]: " + row[c]);
            ev.rater_scores.push_back(static_cast<int>(score));
            ev.total += static_cast<int>(score);
        }
        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<WorldEvent> rank_events(const std::vector<WorldEvent> &events, int threshold) {
    std::vector<WorldEvent> selected;
    for (const WorldEvent &ev : events) {
        int total = 0;
        for (const int s : ev.rater_scores) {
            if (s < -2 || s > 2)
                throw ConfigError("event " + ev.name + ": rater score out of [-2,2]");
            total += s;
        }
        if (total != ev.total)
            throw ConfigError("event " + ev.name + ": total does not match rater scores");
        if (total > threshold)
            selected.push_back(ev);
    }
    std::sort(selected.begin(), selected.end(), [](const WorldEvent &a, const WorldEvent &b) {
        if (a.date != b.date)
            return a.date < b.date;
        return a.name < b.name;
    });
    return selected;
}

std::vector<EventAnnotation> align_events(const std::vector<WeeklyPoint> &series,
                                          const std::vector<OutlierFlag> &flags,
                                          const std::vector<WorldEvent> &events) {
    std::vector<EventAnnotation> annotations;
    if (series.empty())
        throw ConfigError("cannot align events against an empty series");
    const std::int64_t span_lo = series.front().week_start;
    const std::int64_t span_hi = series.back().week_start + 6;

    for (const WorldEvent &ev : events) {
        EventAnnotation ann;
        ann.event = ev;
        const std::int64_t day = dates::days_from_civil(ev.date);
        ann.event_week = dates::week_start(day);
        ann.in_span = day >= span_lo && day <= span_hi;
        if (ann.in_span) {
            std::int64_t best_dist = 0;
            for (const OutlierFlag &flag : flags) {
                if (flag.flag == OutlierClass::None)
                    continue;
                const std::int64_t dist = std::abs(flag.week_start - ann.event_week) / 7;
                if (dist > 5)
                    continue;
                if (!ann.has_outlier || dist < best_dist ||
                    (dist == best_dist && flag.week_start < ann.outlier_week)) {
                    ann.has_outlier = true;
                    best_dist = dist;
                    ann.outlier_week = flag.week_start;
                    ann.outlier_class = flag.flag;
                }
            }
        }
        annotations.push_back(std::move(ann));
    }
    return annotations;
}

} // namespace feedmine
