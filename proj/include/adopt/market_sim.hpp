#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adopt/core.hpp"
#include "adopt/series.hpp"

namespace adopt {

// Day-by-day replay of an advertiser's delivery (pure RTB or options bought
// ahead plus RTB) and of a publisher's revenue when part of the inventory is
// pre-sold as options. Market prices are daily average winning CPMs.

struct MarketDay {
    Date date;
    double avg_cpm = 0.0;
    std::int64_t supply = 0;  // impressions available
    bool reserve_floor = false;  // price sits at the auction's reserve

    void validate() const;
};

struct DayRecord {
    Date date;
    double avg_cpm = 0.0;
    std::int64_t supply = 0;
    double budget = 0.0;
    double premium_spend = 0.0;  // options for this delivery day, paid upfront
    double remaining_budget = 0.0;  // budget left for the delivery day itself
    std::int64_t options_held = 0;
    std::int64_t options_exercised = 0;
    std::int64_t impressions = 0;
    std::int64_t clicks = 0;
    std::int64_t option_clicks = 0;
    std::int64_t rtb_clicks = 0;
    double used_budget = 0.0;  // strike payments plus RTB spend on the day
    double spend() const { return premium_spend + used_budget; }
};

struct SimulationLedger {
    std::vector<DayRecord> days;
    DayRecord totals;  // field-wise sums; avg_cpm is left at zero
    /// Set when the option premium alone exhausts the daily budget, so no
    /// options could be bought and the run reduces to pure RTB.
    bool degenerate = false;

    double cost_per_click() const;
};

/// Buys min(supply, floor(budget / (cpm / 1000))) impressions per day.
SimulationLedger simulate_rtb(double budget_per_day, std::span<const MarketDay> days, double ctr);

struct OptionTerms {
    double option_price = 0.0;  // premium per option
    double strike_cpc = 0.0;
    int clicks_per_option = 1;

    void validate() const;
};

/// Each delivery day's budget first buys as many options as it can fully
/// fund (premium plus strike), paid upfront. On the day the options are
/// exercised when a click costs strictly more in the market than the strike;
/// exercise is limited by the remaining budget and by the clicks the supply
/// can yield. What is left of budget and supply goes to RTB.
SimulationLedger simulate_options(double budget_per_day, std::span<const MarketDay> days, double ctr,
                                  const OptionTerms& terms);

struct RevenueDay {
    Date date;
    double avg_cpm = 0.0;
    std::int64_t options_sold = 0;
    bool exercised = false;
    double premium_income = 0.0;
    double strike_income = 0.0;
    double rtb_income = 0.0;
    double revenue() const { return premium_income + strike_income + rtb_income; }
};

struct RevenueReport {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation across days
    std::vector<RevenueDay> days;
};

/// Publisher income when sell_ratio of each day's clicks is pre-sold as
/// options; the rest of the inventory, and all of it on days the options are
/// not exercised, is sold in RTB at the day's average CPM.
RevenueReport revenue_analysis(std::span<const MarketDay> days, double ctr, double sell_ratio,
                               const OptionTerms& terms);

enum class MarketRegime { Bull, Bear };
std::string to_string(MarketRegime regime);
/// Bull iff the mean price over non-reserve days exceeds the pricing-date spot.
MarketRegime classify_market(std::span<const MarketDay> days, double spot);

enum class SyntheticModel { Gbm, Sv };
std::string to_string(SyntheticModel model);
SyntheticModel parse_synthetic_model(const std::string& text);

struct SyntheticMarket {
    SyntheticModel model = SyntheticModel::Sv;
    SvParams params;  // GBM uses spot and sigma0 only
    double drift = 0.0;  // annual drift of the CPM; > 0 bull, < 0 bear
    int days = 7;
    double dt = 1.0 / 365.0;
    std::int64_t supply = 8000;
    double reserve_price = 0.0;  // CPMs at or below are clamped and flagged
    Date start = Date{std::chrono::year{2013} / 2 / 8};
    std::uint64_t seed = 20130207;

    void validate() const;
};

/// Delivery days following the pricing date; day i carries the path value
/// i + 1 steps after spot.
std::vector<MarketDay> generate_market(const SyntheticMarket& spec);

/// CSV `date,avg_cpm,supply` with an optional trailing `reserve_floor` (0/1).
std::vector<MarketDay> read_market(std::istream& in);
std::vector<MarketDay> read_market_file(const std::string& path);
void write_market(std::ostream& out, std::span<const MarketDay> days);

/// One row per day and a final `total` row.
void write_ledger_csv(std::ostream& out, const SimulationLedger& ledger);
/// One row per day; mean and standard deviation are not repeated in the file.
void write_revenue_csv(std::ostream& out, const RevenueReport& report);

}  // namespace adopt
