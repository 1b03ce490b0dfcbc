#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "adopt/core.hpp"
#include "adopt/series.hpp"

namespace adopt {

// Checks of the GBM assumption on a price series (normal, independent log
// ratios), parameter estimation for both underlying models and path-distance
// fitness comparison.

/// Constant or otherwise zero-variance input to a statistical test.
class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// ln(M_{i+1} / M_i); throws DomainError on non-positive prices.
std::vector<double> log_ratios(std::span<const double> prices);
std::vector<double> log_ratios(const PriceSeries& series);

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Shapiro-Wilk W with Royston's (AS R94) coefficients and p-value,
/// 3 <= n <= 5000.
TestResult shapiro_wilk(std::span<const double> sample);

/// Ljung-Box Q over lags 1..lags with a chi-square(lags) p-value.
TestResult ljung_box(std::span<const double> sample, int lags);

/// min(10, n / 5), at least 1.
int default_ljung_box_lags(std::size_t n);

struct AcfPoint {
    int lag = 0;
    double value = 0.0;
    double band = 0.0;  // 1.96 / sqrt(n)
};

std::vector<AcfPoint> acf(std::span<const double> sample, int max_lag);

struct GbmVerdict {
    double shapiro_w = 0.0;
    double shapiro_p = 0.0;
    double ljung_q = 0.0;
    double ljung_p = 0.0;
    int ljung_lags = 0;
    double alpha = 0.05;
    std::vector<AcfPoint> acf;
    bool is_gbm = false;
};

/// GBM is accepted when neither normality nor independence of the log
/// ratios is rejected at `alpha`. lags <= 0 selects the default.
GbmVerdict gbm_test(const PriceSeries& series, double alpha, int lags = 0, int acf_lags = 10);

/// Sample moments of the log ratios, annualised with the series dt.
GbmParams estimate_gbm(const PriceSeries& series);

inline constexpr int kDefaultVolWindow = 7;

/// Rolling-window realized volatility (sample std of the last `window` log
/// ratios over sqrt(dt)), one value per complete window.
std::vector<double> realized_volatility(const PriceSeries& series, int window);

/// Least-squares fit of the discretised mean-reverting volatility equation to
/// the realized volatility series.
SvParams estimate_sv(const PriceSeries& series, int window = kDefaultVolWindow);

inline constexpr int kDefaultSmoothWindow = 5;

/// Centered moving average; the window shrinks symmetrically at the ends.
std::vector<double> moving_average(std::span<const double> values, int window);

struct L2Fitness {
    double raw = 0.0;
    double smoothed = 0.0;
};

L2Fitness l2_fitness(std::span<const double> actual, std::span<const double> simulated,
                     int smooth_window = kDefaultSmoothWindow);
L2Fitness l2_fitness(const PriceSeries& actual, const PriceSeries& simulated,
                     int smooth_window = kDefaultSmoothWindow);

struct QqPoint {
    double theoretical = 0.0;  // standard normal quantile
    double sample = 0.0;       // sorted standardized sample
};

std::vector<QqPoint> qq_pairs(std::span<const double> sample);

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    int count = 0;
};

std::vector<HistogramBin> histogram(std::span<const double> sample, int bins);

}  // namespace adopt
