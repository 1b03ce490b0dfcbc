#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "adopt/market_sim.hpp"

using namespace adopt;

namespace {

std::vector<MarketDay> days_with(std::initializer_list<double> cpms, std::int64_t supply = 1000000) {
    std::vector<MarketDay> days;
    Date d = parse_date("2013-02-08");
    for (double cpm : cpms) {
        days.push_back({d, cpm, supply, false});
        d += std::chrono::days{1};
    }
    return days;
}

// Seven-day bull market around a 0.7427 CPM spot.
std::vector<MarketDay> bull_week() {
    const double cpm[] = {0.9585, 0.9770, 0.9666, 0.8754, 0.8513, 0.8294, 0.9903};
    const std::int64_t supply[] = {8298, 8277, 8190, 7971, 8097, 8201, 3812};
    std::vector<MarketDay> days;
    Date d = parse_date("2013-02-08");
    for (int i = 0; i < 7; ++i) {
        days.push_back({d, cpm[i], supply[i], false});
        d += std::chrono::days{1};
    }
    return days;
}

void check_totals(const SimulationLedger& l) {
    DayRecord sum;
    double spend = 0.0;
    for (const auto& d : l.days) {
        sum.impressions += d.impressions;
        sum.clicks += d.clicks;
        sum.options_exercised += d.options_exercised;
        spend += d.spend();
        CHECK(d.spend() <= d.budget + 1e-12);
        CHECK(d.options_exercised <= d.options_held);
        CHECK(d.clicks == d.option_clicks + d.rtb_clicks);
    }
    CHECK(sum.impressions == l.totals.impressions);
    CHECK(sum.clicks == l.totals.clicks);
    CHECK(sum.options_exercised == l.totals.options_exercised);
    CHECK(spend == doctest::Approx(l.totals.spend()).epsilon(1e-12));
    CHECK(l.totals.spend() <= l.totals.budget + 1e-9);
}

}  // namespace

TEST_SUITE("market_sim") {

TEST_CASE("RTB exact division") {
    const auto l = simulate_rtb(5.0, days_with({1.0}), 0.03);
    REQUIRE(l.days.size() == 1);
    CHECK(l.days[0].impressions == 5000);
    CHECK(l.days[0].used_budget == doctest::Approx(5.0));
    CHECK(l.days[0].clicks == 150);
    check_totals(l);
}

TEST_CASE("RTB is capped by supply") {
    const auto l = simulate_rtb(5.0, bull_week(), 0.03);
    const auto& last = l.days.back();
    CHECK(last.impressions == 3812);
    CHECK(last.used_budget == doctest::Approx(3812 * 0.9903 / 1000.0));
    CHECK(last.clicks == 114);
    CHECK(l.days[0].impressions == 5216);  // floor(5 / 0.0009585)
    check_totals(l);
}

TEST_CASE("zero budget gives an empty ledger") {
    const auto l = simulate_rtb(0.0, bull_week(), 0.03);
    CHECK(l.totals.impressions == 0);
    CHECK(l.totals.clicks == 0);
    CHECK(l.totals.spend() == 0.0);
    CHECK_THROWS(simulate_rtb(-1.0, bull_week(), 0.03));
}

TEST_CASE("options in a bull market buy 201 options and exercise on rising days") {
    const OptionTerms terms{0.0025, 0.0223, 1};
    const auto l = simulate_options(5.0, bull_week(), 0.03, terms);
    CHECK_FALSE(l.degenerate);
    for (const auto& d : l.days) CHECK(d.options_held == 201);
    for (std::size_t i = 0; i + 1 < l.days.size(); ++i) CHECK(l.days[i].options_exercised == 201);
    CHECK(l.days.back().options_exercised == 114);  // floor(3812 * 0.03)
    check_totals(l);
    const auto rtb = simulate_rtb(5.0, bull_week(), 0.03);
    CHECK(l.totals.clicks >= rtb.totals.clicks);
    CHECK(l.cost_per_click() <= rtb.cost_per_click());
}

TEST_CASE("out-of-the-money options cost exactly their premium") {
    const OptionTerms terms{0.001, 0.5, 1};
    const auto days = days_with({1.0, 1.2});
    const auto l = simulate_options(5.0, days, 0.03, terms);
    CHECK(l.totals.options_exercised == 0);
    const std::int64_t bought = l.days[0].options_held;
    CHECK(bought == 9);  // floor(5 / 0.501)
    const double premium = bought * 0.001;
    const auto rtb_rest = simulate_rtb(5.0 - premium, days, 0.03);
    CHECK(l.totals.premium_spend == doctest::Approx(2 * premium));
    CHECK(l.totals.used_budget == doctest::Approx(rtb_rest.totals.used_budget));
    check_totals(l);
}

TEST_CASE("exercise indifference resolves to no exercise") {
    const auto days = days_with({0.9});
    const OptionTerms terms{0.0001, per_click_value(0.9, 0.03), 1};
    CHECK(simulate_options(5.0, days, 0.03, terms).totals.options_exercised == 0);
}

TEST_CASE("premium above the budget degenerates to RTB") {
    const OptionTerms terms{6.0, 0.01, 1};
    const auto l = simulate_options(5.0, bull_week(), 0.03, terms);
    CHECK(l.degenerate);
    CHECK(l.totals.options_held == 0);
    CHECK(l.totals.clicks == simulate_rtb(5.0, bull_week(), 0.03).totals.clicks);
}

TEST_CASE("multi-click options") {
    const OptionTerms terms{0.01, 0.02, 10};
    const auto l = simulate_options(5.0, days_with({1.5}), 0.03, terms);
    CHECK(l.days[0].options_held == 23);  // floor(5 / 0.21)
    CHECK(l.days[0].option_clicks == 230);
    check_totals(l);
    CHECK_THROWS(simulate_options(5.0, bull_week(), 0.03, {0.01, 0.02, 0}));
}

TEST_CASE("publisher revenue without options is pure RTB") {
    const OptionTerms terms{0.0025, 0.0223, 1};
    const auto market = bull_week();
    const auto r = revenue_analysis(market, 0.03, 0.0, terms);
    REQUIRE(r.days.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        const auto& day = market[i];
        CHECK(r.days[i].revenue() == doctest::Approx(day.supply * day.avg_cpm / 1000.0).epsilon(1e-14));
        CHECK(r.days[i].premium_income == 0.0);
    }
    CHECK(r.std_dev > 0.0);
}

TEST_CASE("publisher revenue directions") {
    const OptionTerms terms{0.002, 0.0223, 1};
    // Market clicks worth far more than strike plus premium: pre-selling loses.
    const auto bull = days_with({1.5, 1.6, 1.7}, 8000);
    CHECK(revenue_analysis(bull, 0.03, 0.2, terms).mean < revenue_analysis(bull, 0.03, 0.0, terms).mean);
    // Options never exercised: premium is pure extra income.
    const auto bear = days_with({0.3, 0.25, 0.2}, 8000);
    const auto with = revenue_analysis(bear, 0.03, 0.8, terms);
    CHECK(with.mean > revenue_analysis(bear, 0.03, 0.0, terms).mean);
    for (const auto& d : with.days) CHECK_FALSE(d.exercised);
    CHECK_THROWS(revenue_analysis(bear, 0.03, 1.5, terms));
}

TEST_CASE("market regime") {
    CHECK(classify_market(days_with({1.0, 1.2}), 1.0) == MarketRegime::Bull);
    CHECK(classify_market(days_with({0.8, 1.1}), 1.0) == MarketRegime::Bear);
    auto days = days_with({0.1, 1.2});
    days[0].reserve_floor = true;
    CHECK(classify_market(days, 1.0) == MarketRegime::Bull);
}

TEST_CASE("synthetic market generator") {
    SyntheticMarket spec;
    spec.params = {1.0, 0.5, 3.0, 0.75, 0.35};
    spec.days = 10;
    spec.seed = 4;
    const auto a = generate_market(spec);
    const auto b = generate_market(spec);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].avg_cpm == b[i].avg_cpm);
        CHECK(a[i].supply == 8000);
    }
    CHECK(format_date(a[0].date) == "2013-02-08");
    spec.seed = 5;
    CHECK(generate_market(spec)[0].avg_cpm != a[0].avg_cpm);
    spec.reserve_price = 10.0;
    for (const auto& d : generate_market(spec)) {
        CHECK(d.reserve_floor);
        CHECK(d.avg_cpm == 10.0);
    }
    spec.days = 0;
    CHECK_THROWS(generate_market(spec));
    CHECK(parse_synthetic_model("gbm") == SyntheticModel::Gbm);
    CHECK_THROWS(parse_synthetic_model("heston"));
}

TEST_CASE("market CSV") {
    std::istringstream in("date,avg_cpm,supply\n2013-02-08,0.9585,8298\n2013-02-09,0.977,8277\n");
    const auto days = read_market(in);
    REQUIRE(days.size() == 2);
    CHECK(days[1].supply == 8277);
    std::stringstream io;
    write_market(io, days);
    const auto back = read_market(io);
    CHECK(back[0].avg_cpm == days[0].avg_cpm);

    std::istringstream bad("date,avg_cpm,supply\n2013-02-08,0.9585,8298.5\n");
    CHECK_THROWS_WITH_AS(read_market(bad), doctest::Contains("line 2"), ParseError);
    std::istringstream unordered("date,avg_cpm,supply\n2013-02-08,1,1\n2013-02-08,1,1\n");
    CHECK_THROWS_AS(read_market(unordered), ParseError);
    std::istringstream negative("date,avg_cpm,supply\n2013-02-08,-1,1\n");
    CHECK_THROWS_AS(read_market(negative), ParseError);
    CHECK_THROWS_WITH(read_market_file("/nonexistent.csv"), doctest::Contains("file not found"));
}

TEST_CASE("ledger CSV ends with the totals row") {
    const auto l = simulate_options(5.0, bull_week(), 0.03, {0.0025, 0.0223, 1});
    std::ostringstream out;
    write_ledger_csv(out, l);
    const auto text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);
    CHECK(text.find("\ntotal,,52846,35,") != std::string::npos);
    std::ostringstream rev;
    write_revenue_csv(rev, revenue_analysis(bull_week(), 0.03, 0.5, {0.0025, 0.0223, 1}));
    CHECK(rev.str().rfind("date,avg_cpm,options_sold,exercised,", 0) == 0);
}

}
