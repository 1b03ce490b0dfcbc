#include "adopt/series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "adopt/csv.hpp"

namespace adopt {

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
        throw std::invalid_argument("malformed date '" + text + "' (expected YYYY-MM-DD)");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date '" + text + "'");
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

PriceSeries PriceSeries::from_prices(std::span<const double> prices, double dt, Date start) {
    PriceSeries series;
    series.dt = dt;
    const auto step = std::chrono::days{std::max<long>(1, std::lround(dt * 365.0))};
    Date date = start;
    for (double p : prices) {
        series.observations.push_back({date, p});
        date += step;
    }
    return series;
}

std::vector<double> PriceSeries::prices() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.price);
    return out;
}

void PriceSeries::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("series dt must be > 0");
    for (const auto& o : observations)
        if (!(o.price > 0.0) || !std::isfinite(o.price))
            throw std::invalid_argument("series prices must be > 0 (" + format_date(o.date) + ")");
    if (observations.size() < 2) return;
    const double spacing = static_cast<double>((observations.back().date - observations.front().date).count()) /
                           static_cast<double>(observations.size() - 1);
    for (std::size_t i = 1; i < observations.size(); ++i) {
        const auto gap = (observations[i].date - observations[i - 1].date).count();
        if (gap <= 0)
            throw std::invalid_argument("series dates must be strictly increasing at " +
                                        format_date(observations[i].date));
        if (std::abs(static_cast<double>(gap) - spacing) > 1.0)
            throw std::invalid_argument("series dates are not evenly spaced at " +
                                        format_date(observations[i].date));
    }
}

PriceSeries read_price_series(std::istream& in) {
    PriceSeries series;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() >= 2 && fields[0] == "date" && fields[1] == "price") continue;
            throw ParseError("line " + std::to_string(line_no) + ": expected header 'date,price'");
        }
        if (fields.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        Observation obs;
        try {
            obs.date = parse_date(fields[0]);
            std::size_t used = 0;
            obs.price = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        series.observations.push_back(obs);
    }
    if (!header_seen) throw ParseError("line 1: empty file");
    if (series.observations.size() >= 2) {
        const double days = static_cast<double>(
            (series.observations.back().date - series.observations.front().date).count());
        series.dt = days / static_cast<double>(series.observations.size() - 1) / 365.0;
    }
    return series;
}

PriceSeries read_price_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("file not found: " + path);
    return read_price_series(in);
}

void write_price_series(std::ostream& out, const PriceSeries& series) {
    out << "date,price\n";
    for (const auto& o : series.observations)
        out << format_date(o.date) << ',' << format_number(o.price) << '\n';
}

}  // namespace adopt
