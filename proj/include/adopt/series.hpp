#pragma once

#include <chrono>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adopt {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD; throws std::invalid_argument on malformed input.
Date parse_date(const std::string& text);
std::string format_date(Date date);

struct Observation {
    Date date;
    double price = 0.0;
};

/// Dated price series with uniform spacing; dt is that spacing in years.
struct PriceSeries {
    std::vector<Observation> observations;
    double dt = 1.0 / 365.0;

    /// Builds a daily-dated series (dates advance by round(dt * 365) days).
    static PriceSeries from_prices(std::span<const double> prices, double dt,
                                   Date start = Date{std::chrono::year{2013} / 1 / 8});

    std::size_t size() const { return observations.size(); }
    std::vector<double> prices() const;
    /// Prices > 0, dates strictly increasing and evenly spaced within one day.
    void validate() const;
};

/// Thrown for malformed input files; the message names the offending line.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a `date,price` CSV. dt is inferred from the mean date spacing.
PriceSeries read_price_series(std::istream& in);
PriceSeries read_price_series_file(const std::string& path);
void write_price_series(std::ostream& out, const PriceSeries& series);

}  // namespace adopt
