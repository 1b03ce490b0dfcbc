#include "adopt/diagnostics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <string>

namespace adopt {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

/// Upper tail of N(mean, sd^2) at x.
double normal_upper(double x, double mean, double sd) {
    return 0.5 * std::erfc((x - mean) / (sd * std::sqrt(2.0)));
}

double poly(std::span<const double> c, double x) {
    double result = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) result = result * x + *it;
    return result;
}

/// Upper half of the antisymmetric Shapiro-Wilk weights, largest first.
std::vector<double> shapiro_weights(std::size_t n) {
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::sqrt(0.5);
        return a;
    }
    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

    const double an = static_cast<double>(n);
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[0] / ssumm2;

    std::size_t first_scaled;
    double fac;
    if (n > 5) {
        first_scaled = 2;
        const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                        (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
    } else {
        first_scaled = 1;
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
    return a;
}

}  // namespace

std::vector<double> log_ratios(std::span<const double> prices) {
    if (prices.size() < 2) throw DomainError("need >= 2 observations");
    std::vector<double> out;
    out.reserve(prices.size() - 1);
    for (double p : prices)
        if (!(p > 0.0)) throw DomainError("prices must be > 0 for log ratios");
    for (std::size_t i = 1; i < prices.size(); ++i) out.push_back(std::log(prices[i] / prices[i - 1]));
    return out;
}

std::vector<double> log_ratios(const PriceSeries& series) { return log_ratios(series.prices()); }

TestResult shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 5000) throw std::invalid_argument("Shapiro-Wilk needs 3 <= n <= 5000");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 0.0)) throw DegenerateInput("Shapiro-Wilk: sample is constant");

    const auto a = shapiro_weights(n);
    const double centre = mean_of(x);
    double numerator = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) numerator += a[i] * (x[n - 1 - i] - x[i]);
    for (double v : x) ss += (v - centre) * (v - centre);
    const double w = std::min(1.0, numerator * numerator / ss);

    TestResult result;
    result.statistic = w;
    if (n == 3) {
        constexpr double six_over_pi = 1.90985931710274;
        constexpr double pi_over_three = 1.04719755119660;
        result.p_value = std::clamp(six_over_pi * (std::asin(std::sqrt(w)) - pi_over_three), 0.0, 1.0);
        return result;
    }

    const double an = static_cast<double>(n);
    const double w1 = 1.0 - w;
    if (w1 <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    double y = std::log(w1);
    double m, s;
    if (n <= 11) {
        static constexpr double g[] = {-2.273, 0.459};
        static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
        static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
        const double gamma = poly(g, an);
        if (y >= gamma) {
            result.p_value = 1e-99;
            return result;
        }
        y = -std::log(gamma - y);
        m = poly(c3, an);
        s = std::exp(poly(c4, an));
    } else {
        static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
        static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
        const double log_n = std::log(an);
        m = poly(c5, log_n);
        s = std::exp(poly(c6, log_n));
    }
    result.p_value = std::clamp(normal_upper(y, m, s), 0.0, 1.0);
    return result;
}

int default_ljung_box_lags(std::size_t n) {
    return std::max(1, std::min(10, static_cast<int>(n / 5)));
}

std::vector<AcfPoint> acf(std::span<const double> sample, int max_lag) {
    const std::size_t n = sample.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
        throw std::invalid_argument("acf: max_lag must be in [0, n)");
    const double centre = mean_of(sample);
    double denom = 0.0;
    for (double v : sample) denom += (v - centre) * (v - centre);
    if (!(denom > 0.0)) throw DegenerateInput("acf: sample is constant");

    const double band = 1.96 / std::sqrt(static_cast<double>(n));
    std::vector<AcfPoint> out;
    out.push_back({0, 1.0, band});
    for (int lag = 1; lag <= max_lag; ++lag) {
        double num = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t)
            num += (sample[t] - centre) * (sample[t + lag] - centre);
        out.push_back({lag, std::clamp(num / denom, -1.0, 1.0), band});
    }
    return out;
}

TestResult ljung_box(std::span<const double> sample, int lags) {
    const std::size_t n = sample.size();
    if (lags < 1 || 2.0 * lags >= static_cast<double>(n))
        throw std::invalid_argument("Ljung-Box needs 1 <= lags < n/2");
    const auto rho = acf(sample, lags);
    const double an = static_cast<double>(n);
    double q = 0.0;
    for (int k = 1; k <= lags; ++k) q += rho[k].value * rho[k].value / (an - k);
    q *= an * (an + 2.0);
    return {q, boost::math::gamma_q(0.5 * lags, 0.5 * q)};
}

GbmVerdict gbm_test(const PriceSeries& series, double alpha, int lags, int acf_lags) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("alpha must lie in (0, 0.5]");
    series.validate();
    const auto ratios = log_ratios(series);
    GbmVerdict verdict;
    verdict.alpha = alpha;
    const auto sw = shapiro_wilk(ratios);
    verdict.shapiro_w = sw.statistic;
    verdict.shapiro_p = sw.p_value;
    verdict.ljung_lags = lags > 0 ? lags : default_ljung_box_lags(ratios.size());
    const auto lb = ljung_box(ratios, verdict.ljung_lags);
    verdict.ljung_q = lb.statistic;
    verdict.ljung_p = lb.p_value;
    verdict.acf = acf(ratios, std::min<int>(acf_lags, static_cast<int>(ratios.size()) - 1));
    verdict.is_gbm = verdict.shapiro_p >= alpha && verdict.ljung_p >= alpha;
    return verdict;
}

GbmParams estimate_gbm(const PriceSeries& series) {
    if (series.size() < 10) throw std::invalid_argument("GBM estimation needs >= 10 observations");
    series.validate();
    const auto ratios = log_ratios(series);
    GbmParams params;
    params.spot = series.observations.back().price;
    params.sigma = sample_std(ratios) / std::sqrt(series.dt);
    params.mu = mean_of(ratios) / series.dt + 0.5 * params.sigma * params.sigma;
    return params;
}

std::vector<double> realized_volatility(const PriceSeries& series, int window) {
    if (window < 2) throw std::invalid_argument("volatility window must be >= 2");
    const auto ratios = log_ratios(series);
    std::vector<double> vol;
    const double scale = 1.0 / std::sqrt(series.dt);
    for (std::size_t start = 0; start + window <= ratios.size(); ++start)
        vol.push_back(scale * sample_std(std::span<const double>(ratios).subspan(start, window)));
    return vol;
}

SvParams estimate_sv(const PriceSeries& series, int window) {
    if (window < 5) throw std::invalid_argument("SV estimation window must be >= 5");
    if (series.size() < 3 * static_cast<std::size_t>(window))
        throw std::invalid_argument("SV estimation needs at least 3 * window observations");
    series.validate();
    const auto vol = realized_volatility(series, window);
    const double dt = series.dt;

    // d sigma = kappa (theta - sigma) dt + noise  <=>  d sigma = a + b sigma.
    const std::size_t m = vol.size() - 1;
    std::vector<double> level(vol.begin(), vol.end() - 1);
    std::vector<double> change(m);
    for (std::size_t i = 0; i < m; ++i) change[i] = vol[i + 1] - vol[i];
    const double level_mean = mean_of(level);
    const double change_mean = mean_of(change);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (level[i] - level_mean) * (level[i] - level_mean);
        sxy += (level[i] - level_mean) * (change[i] - change_mean);
    }
    if (!(sxx / static_cast<double>(m) > 1e-18 * std::max(1.0, level_mean * level_mean)))
        throw DegenerateInput("SV estimation: realized volatility is constant");
    const double slope = sxy / sxx;
    const double intercept = change_mean - slope * level_mean;

    SvParams params;
    params.spot = series.observations.back().price;
    params.sigma0 = vol.front();
    params.kappa = std::max(0.0, -slope / dt);
    params.theta = params.kappa > 0.0 ? std::max(0.0, intercept / (params.kappa * dt))
                                      : mean_of(vol);

    double scaled = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (level[i] <= 0.0) continue;
        const double residual = change[i] - (intercept + slope * level[i]);
        scaled += residual * residual / (level[i] * dt);
        ++used;
    }
    params.delta = used ? std::sqrt(scaled / static_cast<double>(used)) : 0.0;
    if (!(params.sigma0 > 0.0)) throw DegenerateInput("SV estimation: first window has zero volatility");
    return params;
}

std::vector<double> moving_average(std::span<const double> values, int window) {
    if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
    const std::ptrdiff_t half = window / 2;
    std::vector<double> out(values.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
        double sum = 0.0;
        for (std::ptrdiff_t j = i - h; j <= i + h; ++j) sum += values[j];
        out[i] = sum / static_cast<double>(2 * h + 1);
    }
    return out;
}

L2Fitness l2_fitness(std::span<const double> actual, std::span<const double> simulated,
                     int smooth_window) {
    if (actual.size() != simulated.size())
        throw std::invalid_argument("l2_fitness: series lengths differ (" +
                                    std::to_string(actual.size()) + " vs " +
                                    std::to_string(simulated.size()) + ")");
    auto distance = [](std::span<const double> a, std::span<const double> b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(sum);
    };
    const auto smooth_a = moving_average(actual, smooth_window);
    const auto smooth_s = moving_average(simulated, smooth_window);
    return {distance(actual, simulated), distance(smooth_a, smooth_s)};
}

L2Fitness l2_fitness(const PriceSeries& actual, const PriceSeries& simulated, int smooth_window) {
    const auto a = actual.prices();
    const auto s = simulated.prices();
    return l2_fitness(a, s, smooth_window);
}

std::vector<QqPoint> qq_pairs(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw std::invalid_argument("qq_pairs needs >= 2 values");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double centre = mean_of(x);
    const double sd = sample_std(x);
    if (!(sd > 0.0)) throw DegenerateInput("qq_pairs: sample is constant");
    std::vector<QqPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i + 1) - 0.375) / (static_cast<double>(n) + 0.25);
        out.push_back({normal_quantile(p), (x[i] - centre) / sd});
    }
    return out;
}

std::vector<HistogramBin> histogram(std::span<const double> sample, int bins) {
    if (sample.empty()) throw std::invalid_argument("histogram of an empty sample");
    if (bins < 1) throw std::invalid_argument("histogram needs >= 1 bin");
    const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) return {{lo, hi, static_cast<int>(sample.size())}};
    const double width = (hi - lo) / bins;
    std::vector<HistogramBin> out(bins);
    for (int b = 0; b < bins; ++b) {
        out[b].low = lo + b * width;
        out[b].high = b + 1 == bins ? hi : lo + (b + 1) * width;
    }
    for (double v : sample) {
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
        ++out[b].count;
    }
    return out;
}

}  // namespace adopt
