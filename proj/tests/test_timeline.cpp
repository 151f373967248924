#include "doctest.h"

#include "feedmine/dates.hpp"
#include "feedmine/errors.hpp"
#include "feedmine/timeline.hpp"

#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

using namespace feedmine;

namespace {

const std::int64_t kMonday2018 = dates::days_from_civil({2018, 1, 1});

std::vector<WeeklyPoint> synthetic_series(int weeks, double intercept, double slope,
                                          double sin1, double cos2) {
    std::vector<WeeklyPoint> series;
    for (int t = 0; t < weeks; ++t) {
        const double angle = 2.0 * std::numbers::pi * t / kWeeksPerYear;
        double y = intercept + slope * t + sin1 * std::sin(angle) +
                   cos2 * std::cos(2.0 * angle);
        WeeklyPoint wp;
        wp.week_start = kMonday2018 + 7L * t;
        wp.total_count = 1000000;
        wp.ethical_count = static_cast<int>(std::lround(y * 1e6));
        series.push_back(wp);
    }
    return series;
}

} // namespace

TEST_CASE("weekly_frequencies buckets posts into monday weeks") {
    std::vector<RawPost> posts;
    std::map<std::string, bool> is_concern;
    auto add = [&](const std::string &id, int day_offset, bool concern) {
        RawPost p;
        p.id = id;
        p.created_utc = (kMonday2018 + day_offset) * 86400 + 3600;
        posts.push_back(p);
        is_concern[id] = concern;
    };
    add("a", 0, true);   // week 0
    add("b", 6, false);  // week 0 (sunday)
    add("c", 7, true);   // week 1
    add("d", 30, false); // week 4
    add("e", -10, true); // before the span, skipped

    const auto weekly = weekly_frequencies(posts, is_concern, kMonday2018,
                                           kMonday2018 + 30);
    REQUIRE(weekly.size() == 5);
    CHECK(weekly[0].week_start == kMonday2018);
    CHECK(weekly[0].total_count == 2);
    CHECK(weekly[0].ethical_count == 1);
    CHECK(weekly[0].frequency() == doctest::Approx(0.5));
    CHECK(weekly[1].total_count == 1);
    CHECK(weekly[1].ethical_count == 1);
    CHECK(weekly[2].total_count == 0);
    CHECK_FALSE(weekly[2].has_frequency());
    CHECK(weekly[4].total_count == 1);

    std::vector<RawPost> unlabeled = {posts[0]};
    CHECK_THROWS_AS(weekly_frequencies(unlabeled, {}, kMonday2018, kMonday2018 + 6),
                    NotFoundError);
    CHECK_THROWS_AS(weekly_frequencies(posts, is_concern, 10, 5), ConfigError);
}

TEST_CASE("holiday calendar resolves fixed and computed rules") {
    const HolidayCalendar cal = HolidayCalendar::load(testsup::data_path("holidays.toml"));
    REQUIRE(cal.names().size() == 6);

    CHECK(cal.resolve("New Year's Day", 2018) == dates::days_from_civil({2018, 1, 1}));
    CHECK(cal.resolve("Thanksgiving", 2018) == dates::days_from_civil({2018, 11, 22}));
    CHECK(cal.resolve("Memorial Day", 2018) == dates::days_from_civil({2018, 5, 28}));
    CHECK(cal.resolve("Labor Day", 2019) == dates::days_from_civil({2019, 9, 2}));

    // Thanksgiving 2018 (thursday) falls in the week starting monday 11-19
    CHECK(cal.in_week("Thanksgiving", dates::days_from_civil({2018, 11, 19})));
    CHECK_FALSE(cal.in_week("Thanksgiving", dates::days_from_civil({2018, 11, 26})));

    CHECK_THROWS_AS(HolidayCalendar::from_table(toml::parse("[holidays]\nx = \"13-01\"\n")),
                    ConfigError);
    CHECK_THROWS_AS(HolidayCalendar::from_table(toml::parse("[other]\n")), ConfigError);
}

TEST_CASE("seasonal fit recovers planted coefficients on a long series") {
    const auto series = synthetic_series(156, 0.30, 0.001, 0.06, 0.03);
    const SeasonalModel model = fit_seasonal(series, HolidayCalendar{});
    CHECK(model.seasonal_enabled);
    CHECK(model.warnings.empty());
    CHECK(model.intercept == doctest::Approx(0.30).epsilon(1e-3));
    CHECK(model.slope == doctest::Approx(0.001).epsilon(1e-3));
    REQUIRE(model.sin_coef.size() == 3);
    REQUIRE(model.cos_coef.size() == 3);
    CHECK(model.sin_coef[0] == doctest::Approx(0.06).epsilon(1e-3));
    CHECK(model.cos_coef[1] == doctest::Approx(0.03).epsilon(1e-3));
    CHECK(std::abs(model.sin_coef[1]) < 1e-4);
    CHECK(std::abs(model.sin_coef[2]) < 1e-4);
    CHECK(std::abs(model.cos_coef[0]) < 1e-4);
    CHECK(std::abs(model.cos_coef[2]) < 1e-4);
    CHECK(model.sigma < 1e-5);
    CHECK(model.holiday_names.empty());

    REQUIRE(model.forecasts.size() == series.size());
    for (const ForecastPoint &f : model.forecasts) {
        CHECK(f.yhat == doctest::Approx(f.trend + f.seasonal + f.holiday).epsilon(1e-12));
        CHECK(f.holiday == 0.0);
        CHECK(f.lo95 < f.lo85);
        CHECK(f.hi85 < f.hi95);
        CHECK(f.hi85 - f.yhat == doctest::Approx(f.yhat - f.lo85).epsilon(1e-9));
    }
    // interval half-widths follow the two z multipliers
    const ForecastPoint &f0 = model.forecasts.front();
    CHECK((f0.hi95 - f0.yhat) / (f0.hi85 - f0.yhat) ==
          doctest::Approx(kZ95 / kZ85).epsilon(1e-9));
}

TEST_CASE("short series disable harmonics with a warning") {
    const auto series = synthetic_series(60, 0.30, 0.001, 0.06, 0.0);
    const SeasonalModel model = fit_seasonal(series, HolidayCalendar{});
    CHECK_FALSE(model.seasonal_enabled);
    REQUIRE_FALSE(model.warnings.empty());
    CHECK(model.warnings[0].find("seasonality disabled") != std::string::npos);
    CHECK(model.sin_coef.empty());
    CHECK(model.cos_coef.empty());
    for (const ForecastPoint &f : model.forecasts)
        CHECK(f.seasonal == 0.0);
}

TEST_CASE("holidays missing from the span are dropped with a warning") {
    // eight observed january weeks: only New Year's Day ever occurs
    const auto series = synthetic_series(8, 0.5, 0.0, 0.0, 0.0);
    const HolidayCalendar cal = HolidayCalendar::load(testsup::data_path("holidays.toml"));
    const SeasonalModel model = fit_seasonal(series, cal);
    CHECK(model.holiday_names == std::vector<std::string>{"New Year's Day"});
    int dropped = 0;
    for (const auto &w : model.warnings)
        dropped += w.find("holiday never occurs") != std::string::npos;
    CHECK(dropped == 5);
}

TEST_CASE("seasonal fit recovers a holiday bump") {
    auto series = synthetic_series(156, 0.30, 0.0005, 0.04, 0.02);
    const HolidayCalendar cal = HolidayCalendar::load(testsup::data_path("holidays.toml"));
    for (WeeklyPoint &wp : series)
        if (cal.in_week("Thanksgiving", wp.week_start))
            wp.ethical_count += 200000; // +0.2 on thanksgiving weeks
    const SeasonalModel model = fit_seasonal(series, cal);
    REQUIRE(model.holiday_names.size() == 6);
    double thanks = 0.0, others = 0.0;
    for (std::size_t h = 0; h < model.holiday_names.size(); ++h) {
        if (model.holiday_names[h] == "Thanksgiving")
            thanks = model.holiday_coef[h];
        else
            others = std::max(others, std::abs(model.holiday_coef[h]));
    }
    CHECK(thanks == doctest::Approx(0.2).epsilon(0.02));
    CHECK(others < 0.01);
}

TEST_CASE("seasonal fit needs two observed weeks") {
    std::vector<WeeklyPoint> series = {{kMonday2018, 1, 2}, {kMonday2018 + 7, 0, 0}};
    CHECK_THROWS_AS(fit_seasonal(series, HolidayCalendar{}), FitError);
    CHECK_THROWS_AS(fit_seasonal(synthetic_series(10, 0.3, 0.0, 0.0, 0.0),
                                 HolidayCalendar{}, 0),
                    ConfigError);
}

TEST_CASE("outlier classification uses the strict band rule") {
    std::vector<WeeklyPoint> series;
    std::vector<ForecastPoint> forecasts;
    auto add = [&](int t, double obs_frequency, bool observed = true) {
        WeeklyPoint wp;
        wp.week_start = kMonday2018 + 7L * t;
        wp.total_count = observed ? 100 : 0;
        wp.ethical_count = static_cast<int>(std::lround(obs_frequency * 100));
        series.push_back(wp);
        ForecastPoint f;
        f.week_start = wp.week_start;
        f.yhat = 0.5;
        f.trend = 0.45;
        f.lo85 = 0.4;
        f.hi85 = 0.6;
        f.lo95 = 0.3;
        f.hi95 = 0.7;
        forecasts.push_back(f);
    };
    add(0, 0.55); // inside both bands
    add(1, 0.65); // outside 85, inside 95 -> weak
    add(2, 0.75); // outside 95 -> strong
    add(3, 0.25); // low side strong
    add(4, 0.60); // exactly on the 85 boundary: not outside
    add(5, 0.99, false); // no observation

    const auto flags = classify_outliers(series, forecasts);
    REQUIRE(flags.size() == series.size());
    CHECK(flags[0].flag == OutlierClass::None);
    CHECK(flags[1].flag == OutlierClass::Weak);
    CHECK(flags[2].flag == OutlierClass::Strong);
    CHECK(flags[3].flag == OutlierClass::Strong);
    CHECK(flags[4].flag == OutlierClass::None);
    CHECK(flags[5].flag == OutlierClass::None);
    CHECK(flags[2].magnitude == doctest::Approx(std::abs(0.75 - 0.45)).epsilon(1e-9));
}

TEST_CASE("ar baseline recovers an exact recursion") {
    std::vector<WeeklyPoint> series;
    double y = 0.2;
    for (int t = 0; t < 80; ++t) {
        WeeklyPoint wp;
        wp.week_start = kMonday2018 + 7L * t;
        wp.total_count = 1000000;
        wp.ethical_count = static_cast<int>(std::lround(y * 1e6));
        series.push_back(wp);
        y = 0.05 + 0.9 * y;
    }
    const BaselineModel model = fit_baseline(series, 5, OrderCriterion::Bic);
    CHECK(model.order == 1);
    CHECK(model.intercept == doctest::Approx(0.05).epsilon(1e-3));
    REQUIRE(model.ar_coef.size() == 1);
    CHECK(model.ar_coef[0] == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(model.sigma < 1e-5);
    REQUIRE(model.forecasts.size() == series.size() - 1);
    for (std::size_t i = 0; i < model.forecasts.size(); ++i) {
        const double obs = series[i + 1].frequency();
        CHECK(model.forecasts[i].week_start == series[i + 1].week_start);
        CHECK(model.forecasts[i].yhat == doctest::Approx(obs).epsilon(1e-4));
    }
}

TEST_CASE("ar baseline prefers order zero for white series and validates length") {
    std::vector<WeeklyPoint> series;
    for (int t = 0; t < 40; ++t) {
        WeeklyPoint wp;
        wp.week_start = kMonday2018 + 7L * t;
        wp.total_count = 10;
        wp.ethical_count = 5;
        series.push_back(wp);
    }
    const BaselineModel flat = fit_baseline(series, 5, OrderCriterion::Bic);
    CHECK(flat.order == 0);

    std::vector<WeeklyPoint> tiny(series.begin(), series.begin() + 6);
    CHECK_THROWS_AS(fit_baseline(tiny, 5), FitError);
    CHECK_THROWS_AS(fit_baseline(series, -1), ConfigError);
}

TEST_CASE("events parse with hand-computed totals and strict selection") {
    const auto events = load_events(testsup::fixture_path("events_hand.csv"));
    REQUIRE(events.size() == 12);
    const int want_totals[12] = {12, 10, -14, -5, 12, 0, 8, 16, 10, 12, 9, 2};
    for (int i = 0; i < 12; ++i) {
        CHECK(events[static_cast<std::size_t>(i)].total == want_totals[i]);
        CHECK(events[static_cast<std::size_t>(i)].rater_scores.size() == 9);
    }
    CHECK(events[0].name == "Data Breach Disclosure");
    CHECK(events[0].date == dates::Date{2018, 3, 12});

    const auto selected = rank_events(events, 8);
    REQUIRE(selected.size() == 7); // the total-8 event sits on the boundary and is excluded
    for (const auto &ev : selected)
        CHECK(ev.total > 8);
    // date order
    for (std::size_t i = 1; i < selected.size(); ++i)
        CHECK(dates::days_from_civil(selected[i - 1].date) <=
              dates::days_from_civil(selected[i].date));

    CHECK_THROWS_AS(parse_events("name,date,score_1\nx,2020-01-01,5\n"), ConfigError);
    CHECK_THROWS_AS(parse_events("name,score_1\nx,1\n"), ConfigError);
    CHECK_THROWS_AS(parse_events("name,date,score_2\nx,2020-01-01,1\n"), ConfigError);
}

TEST_CASE("align_events maps events to weeks and nearby outliers") {
    std::vector<WeeklyPoint> series;
    for (int t = 0; t < 20; ++t)
        series.push_back({kMonday2018 + 7L * t, 1, 2});
    std::vector<OutlierFlag> flags;
    flags.push_back({kMonday2018 + 7L * 6, OutlierClass::Strong, 0.3});
    flags.push_back({kMonday2018 + 7L * 10, OutlierClass::Weak, 0.1});

    WorldEvent in_span;
    in_span.name = "nearby";
    in_span.date = dates::civil_from_days(kMonday2018 + 7 * 8 + 2); // week 8
    WorldEvent outside;
    outside.name = "later";
    outside.date = dates::Date{2022, 1, 1};
    WorldEvent far_event;
    far_event.name = "far";
    far_event.date = dates::civil_from_days(kMonday2018 + 7 * 19); // week 19

    const auto ann = align_events(series, flags, {in_span, outside, far_event});
    REQUIRE(ann.size() == 3);
    CHECK(ann[0].in_span);
    CHECK(ann[0].event_week == kMonday2018 + 7 * 8);
    CHECK(ann[0].has_outlier);
    // weeks 6 and 10 are both two weeks away; the tie goes to the earlier
    CHECK(ann[0].outlier_week == kMonday2018 + 7 * 6);
    CHECK(ann[0].outlier_class == OutlierClass::Strong);
    CHECK_FALSE(ann[1].in_span);
    CHECK(ann[2].in_span);
    CHECK_FALSE(ann[2].has_outlier); // nearest flag is nine weeks away

    CHECK_THROWS_AS(align_events({}, flags, {in_span}), ConfigError);
}
