#include "adopt/market_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "adopt/csv.hpp"
#include "adopt/mc.hpp"
#include "adopt/random.hpp"

namespace adopt {

namespace {

// floor/ceil that ignore representation noise such as 201 / 0.03 = 6700.000000000001.
std::int64_t whole_floor(double x) {
    return static_cast<std::int64_t>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x))));
}

std::int64_t whole_ceil(double x) {
    return static_cast<std::int64_t>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

struct RtbFill {
    std::int64_t impressions = 0;
    std::int64_t clicks = 0;
    double spend = 0.0;
};

RtbFill buy_rtb(double budget, double cpm, std::int64_t supply, double ctr) {
    RtbFill fill;
    if (budget <= 0.0 || supply <= 0) return fill;
    const double per_impression = cpm / 1000.0;
    fill.impressions = std::min(supply, whole_floor(budget * 1000.0 / cpm));
    while (fill.impressions > 0 && fill.impressions * per_impression > budget) --fill.impressions;
    fill.spend = static_cast<double>(fill.impressions) * per_impression;
    fill.clicks = whole_floor(static_cast<double>(fill.impressions) * ctr);
    return fill;
}

void check_ctr(double ctr) {
    if (!(ctr > 0.0 && ctr <= 1.0)) throw DomainError("ctr must lie in (0, 1]");
}

void check_budget(double budget) {
    if (!(budget >= 0.0) || !std::isfinite(budget)) throw DomainError("budget must be >= 0");
}

void accumulate(DayRecord& total, const DayRecord& day) {
    total.supply += day.supply;
    total.budget += day.budget;
    total.premium_spend += day.premium_spend;
    total.remaining_budget += day.remaining_budget;
    total.options_held += day.options_held;
    total.options_exercised += day.options_exercised;
    total.impressions += day.impressions;
    total.clicks += day.clicks;
    total.option_clicks += day.option_clicks;
    total.rtb_clicks += day.rtb_clicks;
    total.used_budget += day.used_budget;
}

DayRecord start_record(const MarketDay& day, double budget) {
    day.validate();
    DayRecord rec;
    rec.date = day.date;
    rec.avg_cpm = day.avg_cpm;
    rec.supply = day.supply;
    rec.budget = budget;
    rec.remaining_budget = budget;
    return rec;
}

}  // namespace

void MarketDay::validate() const {
    if (!(avg_cpm > 0.0) || !std::isfinite(avg_cpm))
        throw DomainError("average CPM must be > 0 on " + format_date(date));
    if (supply < 0) throw DomainError("supply must be >= 0 on " + format_date(date));
}

double SimulationLedger::cost_per_click() const {
    return totals.clicks > 0 ? totals.spend() / static_cast<double>(totals.clicks)
                             : std::numeric_limits<double>::infinity();
}

void OptionTerms::validate() const {
    if (!(option_price >= 0.0) || !std::isfinite(option_price))
        throw DomainError("option price must be >= 0");
    if (!(strike_cpc >= 0.0) || !std::isfinite(strike_cpc)) throw DomainError("strike must be >= 0");
    if (clicks_per_option < 1) throw DomainError("clicks per option must be >= 1");
}

SimulationLedger simulate_rtb(double budget_per_day, std::span<const MarketDay> days, double ctr) {
    check_budget(budget_per_day);
    check_ctr(ctr);
    SimulationLedger ledger;
    for (const auto& day : days) {
        DayRecord rec = start_record(day, budget_per_day);
        const auto fill = buy_rtb(budget_per_day, day.avg_cpm, day.supply, ctr);
        rec.impressions = fill.impressions;
        rec.clicks = rec.rtb_clicks = fill.clicks;
        rec.used_budget = fill.spend;
        accumulate(ledger.totals, rec);
        ledger.days.push_back(rec);
    }
    return ledger;
}

SimulationLedger simulate_options(double budget_per_day, std::span<const MarketDay> days, double ctr,
                                  const OptionTerms& terms) {
    check_budget(budget_per_day);
    check_ctr(ctr);
    terms.validate();
    SimulationLedger ledger;
    const double cpo = terms.clicks_per_option;
    const double strike_per_option = terms.strike_cpc * cpo;
    const double unit_cost = terms.option_price + strike_per_option;
    ledger.degenerate = terms.option_price >= budget_per_day;

    std::int64_t bought = 0;
    if (!ledger.degenerate && unit_cost > 0.0) {
        bought = whole_floor(budget_per_day / unit_cost);
        while (bought > 0 && bought * terms.option_price > budget_per_day) --bought;
    }

    for (const auto& day : days) {
        DayRecord rec = start_record(day, budget_per_day);
        rec.options_held = bought;
        rec.premium_spend = static_cast<double>(bought) * terms.option_price;
        rec.remaining_budget = budget_per_day - rec.premium_spend;

        double budget_left = rec.remaining_budget;
        std::int64_t supply_left = day.supply;
        const bool in_the_money = per_click_value(day.avg_cpm, ctr) > terms.strike_cpc;
        if (bought > 0 && in_the_money) {
            std::int64_t exercisable = std::min(bought, whole_floor(day.supply * ctr / cpo));
            if (strike_per_option > 0.0)
                exercisable = std::min(exercisable, whole_floor(budget_left / strike_per_option));
            while (exercisable > 0 && exercisable * strike_per_option > budget_left) --exercisable;
            rec.options_exercised = exercisable;
            rec.option_clicks = exercisable * terms.clicks_per_option;
            const double strike_paid = static_cast<double>(exercisable) * strike_per_option;
            const std::int64_t used_imps =
                std::min(supply_left, whole_ceil(static_cast<double>(rec.option_clicks) / ctr));
            budget_left -= strike_paid;
            supply_left -= used_imps;
            rec.impressions += used_imps;
            rec.used_budget += strike_paid;
        }
        const auto fill = buy_rtb(budget_left, day.avg_cpm, supply_left, ctr);
        rec.impressions += fill.impressions;
        rec.rtb_clicks = fill.clicks;
        rec.used_budget += fill.spend;
        rec.clicks = rec.option_clicks + rec.rtb_clicks;
        accumulate(ledger.totals, rec);
        ledger.days.push_back(rec);
    }
    return ledger;
}

RevenueReport revenue_analysis(std::span<const MarketDay> days, double ctr, double sell_ratio,
                               const OptionTerms& terms) {
    check_ctr(ctr);
    terms.validate();
    if (!(sell_ratio >= 0.0 && sell_ratio <= 1.0)) throw DomainError("sell ratio must lie in [0, 1]");
    RevenueReport report;
    const double cpo = terms.clicks_per_option;
    for (const auto& day : days) {
        day.validate();
        RevenueDay rec;
        rec.date = day.date;
        rec.avg_cpm = day.avg_cpm;
        rec.options_sold = whole_floor(sell_ratio * static_cast<double>(day.supply) * ctr / cpo);
        rec.premium_income = static_cast<double>(rec.options_sold) * terms.option_price;
        std::int64_t unsold = day.supply;
        if (rec.options_sold > 0 && per_click_value(day.avg_cpm, ctr) > terms.strike_cpc) {
            rec.exercised = true;
            const double clicks = static_cast<double>(rec.options_sold) * cpo;
            rec.strike_income = clicks * terms.strike_cpc;
            unsold -= std::min(unsold, whole_ceil(clicks / ctr));
        }
        rec.rtb_income = static_cast<double>(unsold) * day.avg_cpm / 1000.0;
        report.days.push_back(rec);
    }
    const std::size_t n = report.days.size();
    if (n == 0) return report;
    double sum = 0.0;
    for (const auto& d : report.days) sum += d.revenue();
    report.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (const auto& d : report.days) ss += (d.revenue() - report.mean) * (d.revenue() - report.mean);
        report.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return report;
}

std::string to_string(MarketRegime regime) { return regime == MarketRegime::Bull ? "bull" : "bear"; }

MarketRegime classify_market(std::span<const MarketDay> days, double spot) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& d : days) {
        if (d.reserve_floor) continue;
        sum += d.avg_cpm;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("no non-reserve days to classify");
    return sum / static_cast<double>(count) > spot ? MarketRegime::Bull : MarketRegime::Bear;
}

std::string to_string(SyntheticModel model) { return model == SyntheticModel::Gbm ? "gbm" : "sv"; }

SyntheticModel parse_synthetic_model(const std::string& text) {
    if (text == "gbm") return SyntheticModel::Gbm;
    if (text == "sv") return SyntheticModel::Sv;
    throw std::invalid_argument("unknown market model '" + text + "' (expected gbm or sv)");
}

void SyntheticMarket::validate() const {
    params.validate();
    if (days < 1) throw std::invalid_argument("synthetic market needs >= 1 day");
    if (!(dt > 0.0)) throw std::invalid_argument("synthetic market dt must be > 0");
    if (supply < 0) throw std::invalid_argument("supply must be >= 0");
    if (!std::isfinite(drift)) throw std::invalid_argument("drift must be finite");
    if (!(reserve_price >= 0.0)) throw std::invalid_argument("reserve price must be >= 0");
}

std::vector<MarketDay> generate_market(const SyntheticMarket& spec) {
    spec.validate();
    SvParams sv = spec.params;
    if (spec.model == SyntheticModel::Gbm) {
        sv.kappa = 0.0;
        sv.delta = 0.0;
        sv.theta = sv.sigma0;
    }
    CounterRng rng(spec.seed, 0);
    const auto path = simulate_sv_path(sv, spec.drift, spec.dt, spec.days, McScheme::Euler, rng);
    const auto step = std::chrono::days{std::max<long>(1, std::lround(spec.dt * 365.0))};
    std::vector<MarketDay> days;
    days.reserve(spec.days);
    Date date = spec.start;
    for (int i = 1; i <= spec.days; ++i) {
        MarketDay day;
        day.date = date;
        day.supply = spec.supply;
        day.avg_cpm = path[i];
        if (spec.reserve_price > 0.0 && day.avg_cpm <= spec.reserve_price) {
            day.avg_cpm = spec.reserve_price;
            day.reserve_floor = true;
        }
        days.push_back(day);
        date += step;
    }
    return days;
}

std::vector<MarketDay> read_market(std::istream& in) {
    std::vector<MarketDay> days;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::size_t width = 3;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        const auto where = "line " + std::to_string(line_no) + ": ";
        if (!header_seen) {
            header_seen = true;
            if (fields.size() >= 3 && fields[0] == "date" && fields[1] == "avg_cpm" && fields[2] == "supply") {
                if (fields.size() == 4 && fields[3] == "reserve_floor") width = 4;
                else if (fields.size() != 3) throw ParseError(where + "unexpected header column");
                continue;
            }
            throw ParseError(where + "expected header 'date,avg_cpm,supply'");
        }
        if (fields.size() != width)
            throw ParseError(where + "expected " + std::to_string(width) + " fields, got " +
                             std::to_string(fields.size()));
        MarketDay day;
        try {
            day.date = parse_date(fields[0]);
            std::size_t used = 0;
            day.avg_cpm = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing characters in avg_cpm");
            day.supply = std::stoll(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("supply must be an integer");
            if (width == 4) {
                if (fields[3] != "0" && fields[3] != "1")
                    throw std::invalid_argument("reserve_floor must be 0 or 1");
                day.reserve_floor = fields[3] == "1";
            }
            day.validate();
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(where + e.what());
        }
        if (!days.empty() && day.date <= days.back().date)
            throw ParseError(where + "dates must be strictly increasing");
        days.push_back(day);
    }
    if (!header_seen) throw ParseError("line 1: empty file");
    return days;
}

std::vector<MarketDay> read_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("file not found: " + path);
    return read_market(in);
}

void write_market(std::ostream& out, std::span<const MarketDay> days) {
    out << "date,avg_cpm,supply,reserve_floor\n";
    for (const auto& d : days)
        out << format_date(d.date) << ',' << format_number(d.avg_cpm) << ',' << d.supply << ','
            << (d.reserve_floor ? 1 : 0) << '\n';
}

void write_ledger_csv(std::ostream& out, const SimulationLedger& ledger) {
    out << "date,avg_cpm,supply,budget,premium_spend,remaining_budget,options_held,"
           "options_exercised,impressions,clicks,option_clicks,rtb_clicks,used_budget,spend\n";
    auto row = [&out](const std::string& label, const DayRecord& r, bool total) {
        out << label << ',' << (total ? std::string{} : format_number(r.avg_cpm)) << ',' << r.supply
            << ',' << format_number(r.budget) << ',' << format_number(r.premium_spend) << ','
            << format_number(r.remaining_budget) << ',' << r.options_held << ','
            << r.options_exercised << ',' << r.impressions << ',' << r.clicks << ','
            << r.option_clicks << ',' << r.rtb_clicks << ',' << format_number(r.used_budget) << ','
            << format_number(r.spend()) << '\n';
    };
    for (const auto& d : ledger.days) row(format_date(d.date), d, false);
    row("total", ledger.totals, true);
}

void write_revenue_csv(std::ostream& out, const RevenueReport& report) {
    out << "date,avg_cpm,options_sold,exercised,premium_income,strike_income,rtb_income,revenue\n";
    for (const auto& d : report.days)
        out << format_date(d.date) << ',' << format_number(d.avg_cpm) << ',' << d.options_sold << ','
            << (d.exercised ? 1 : 0) << ',' << format_number(d.premium_income) << ','
            << format_number(d.strike_income) << ',' << format_number(d.rtb_income) << ','
            << format_number(d.revenue()) << '\n';
}

}  // namespace adopt
