#include "adopt/gbm_lattice.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cstdio>
#include <limits>
#include <ostream>

#include "adopt/csv.hpp"

namespace adopt {

namespace {

void check_probability(double q, const char* label, LatticeMethod method) {
    if (!(q >= 0.0 && q <= 1.0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "invalid parameterization for %s: %s = %.17g outside [0, 1]",
                      std::string(method_name(method)).c_str(), label, q);
        throw InvalidParameterization(buf);
    }
}

void check_order(bool ordered, LatticeMethod method) {
    if (!ordered)
        throw InvalidParameterization("invalid parameterization for " +
                                      std::string(method_name(method)) +
                                      ": movement scales are not ordered up > mid > down > 0");
}

MoveSpec binomial_move(double up, double down, double growth) {
    MoveSpec m;
    m.up = up;
    m.down = down;
    m.q_up = (growth - down) / (up - down);
    m.q_down = 1.0 - m.q_up;
    return m;
}

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Terminal per-click value after `ups` up moves and `steps - ups` down moves.
double terminal_value(double spot_per_click, const MoveSpec& move, int steps, int ups) {
    return spot_per_click *
           std::exp(ups * std::log(move.up) + (steps - ups) * std::log(move.down));
}

void require_binomial(const LatticeSpec& spec) {
    if (is_trinomial(spec.method))
        throw DomainError(std::string(method_name(spec.method)) + " is not a binomial method");
}

}  // namespace

bool is_trinomial(LatticeMethod method) {
    return method == LatticeMethod::BoyleTrin || method == LatticeMethod::KrTrin ||
           method == LatticeMethod::TianTrin;
}

std::string_view method_name(LatticeMethod method) {
    switch (method) {
        case LatticeMethod::Crr: return "crr";
        case LatticeMethod::TianBin: return "tian-bin";
        case LatticeMethod::HaahtelaBin: return "haahtela";
        case LatticeMethod::BoyleTrin: return "boyle-trin";
        case LatticeMethod::KrTrin: return "kr-trin";
        case LatticeMethod::TianTrin: return "tian-trin";
    }
    return "?";
}

LatticeMethod parse_lattice_method(std::string_view name) {
    for (auto m : kAllLatticeMethods)
        if (method_name(m) == name) return m;
    if (name == "haahtela-bin") return LatticeMethod::HaahtelaBin;
    throw DomainError("unknown lattice method: " + std::string(name));
}

MoveSpec movement_params(const LatticeSpec& spec, double sigma, double rate, double dt) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");

    const double growth = std::exp(rate * dt);  // gamma
    const double var_growth = std::exp(sigma * sigma * dt);  // zeta
    const auto method = spec.method;
    MoveSpec m;

    switch (method) {
        case LatticeMethod::Crr: {
            const double up = std::exp(sigma * std::sqrt(dt));
            m = binomial_move(up, 1.0 / up, growth);
            break;
        }
        case LatticeMethod::TianBin: {
            const double root = std::sqrt(var_growth * var_growth + 2.0 * var_growth - 3.0);
            const double half = 0.5 * growth * var_growth;
            m = binomial_move(half * (var_growth + 1.0 + root), half * (var_growth + 1.0 - root),
                              growth);
            break;
        }
        case LatticeMethod::HaahtelaBin: {
            const double spread = std::sqrt(std::expm1(sigma * sigma * dt));
            m = binomial_move(std::exp(spread + rate * dt), std::exp(-spread + rate * dt), growth);
            break;
        }
        case LatticeMethod::BoyleTrin: {
            if (!(spec.stretch >= 1.0)) throw DomainError("stretch must be >= 1");
            const double up = std::exp(spec.stretch * sigma * std::sqrt(dt));
            const double variance = growth * growth * std::expm1(sigma * sigma * dt);
            const double a = variance + growth * growth - growth;
            const double denom = (up - 1.0) * (up * up - 1.0);
            m.trinomial = true;
            m.up = up;
            m.mid = 1.0;
            m.down = 1.0 / up;
            m.q_up = (a * up - (growth - 1.0)) / denom;
            m.q_down = (a * up * up - (growth - 1.0) * up * up * up) / denom;
            m.q_mid = 1.0 - m.q_up - m.q_down;
            break;
        }
        case LatticeMethod::KrTrin: {
            const double lambda = spec.stretch;
            if (!(lambda >= 1.0)) throw DomainError("stretch must be >= 1");
            const double up = std::exp(lambda * sigma * std::sqrt(dt));
            const double tilt = (rate - 0.5 * sigma * sigma) * std::sqrt(dt) / (2.0 * lambda * sigma);
            m.trinomial = true;
            m.up = up;
            m.mid = 1.0;
            m.down = 1.0 / up;
            m.q_up = 0.5 / (lambda * lambda) + tilt;
            m.q_mid = 1.0 - 1.0 / (lambda * lambda);
            m.q_down = 0.5 / (lambda * lambda) - tilt;
            break;
        }
        case LatticeMethod::TianTrin: {
            const double mid = growth * var_growth * var_growth;
            const double centre = 0.5 * growth * (std::pow(var_growth, 4) + std::pow(var_growth, 3));
            const double root = std::sqrt(centre * centre - mid * mid);
            const double up = centre + root;
            const double down = centre - root;
            const double second = growth * growth * var_growth;
            m.trinomial = true;
            m.up = up;
            m.mid = mid;
            m.down = down;
            m.q_up = (mid * down - growth * (mid + down) + second) / ((up - down) * (up - mid));
            m.q_down = (up * mid - growth * (up + mid) + second) / ((up - down) * (mid - down));
            m.q_mid = 1.0 - m.q_up - m.q_down;
            break;
        }
    }

    if (m.trinomial) {
        check_order(m.up > m.mid && m.mid > m.down && m.down > 0.0, method);
        check_probability(m.q_up, "q_up", method);
        check_probability(m.q_mid, "q_mid", method);
        check_probability(m.q_down, "q_down", method);
    } else {
        check_order(m.up > m.down && m.down > 0.0, method);
        check_probability(m.q_up, "q_up", method);
        check_probability(m.q_down, "q_down", method);
    }
    return m;
}

int exercise_boundary(const GbmParams& params, const OptionContract& contract, const MoveSpec& move) {
    const double spot = per_click_value(params.spot, contract.ctr);
    const double strike = contract.strike_per_click();
    const int n = contract.steps;
    for (int j = 0; j <= n; ++j)
        if (terminal_value(spot, move, n, j) >= strike) return j;
    return n + 1;
}

double binomial_price_sum(const GbmParams& params, const OptionContract& contract,
                          const LatticeSpec& spec) {
    require_binomial(spec);
    params.validate();
    contract.validate();
    const int n = contract.steps;
    if (n > 100000) throw DomainError("binomial sum supports at most 1e5 steps");
    const MoveSpec move = movement_params(spec, params.sigma, contract.rate, contract.dt());
    const double spot = per_click_value(params.spot, contract.ctr);
    const double strike = contract.strike_per_click();

    const double q = move.q_up;
    const double log_q = std::log(q);
    const double log_1mq = std::log1p(-q);
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double exercise = terminal_value(spot, move, n, j) - strike;
        if (exercise <= 0.0) continue;
        double weight;
        if (q <= 0.0) {
            weight = j == 0 ? 1.0 : 0.0;
        } else if (q >= 1.0) {
            weight = j == n ? 1.0 : 0.0;
        } else {
            weight = std::exp(log_choose(n, j) + j * log_q + (n - j) * log_1mq);
        }
        sum += weight * exercise;
    }
    return contract.basis_scale() * discount(sum, contract.rate, contract.expiry);
}

double complementary_binomial_price(const GbmParams& params, const OptionContract& contract,
                                    const LatticeSpec& spec) {
    require_binomial(spec);
    params.validate();
    contract.validate();
    const int n = contract.steps;
    const MoveSpec move = movement_params(spec, params.sigma, contract.rate, contract.dt());
    const int boundary = exercise_boundary(params, contract, move);
    if (boundary > n) return 0.0;

    const double growth = contract.step_growth();
    const double q = move.q_up;
    const double q_tilted = std::min(1.0, q * move.up / growth);
    // Upper binomial tail P(X >= j) = I_p(j, n - j + 1).
    auto tail = [&](double p) {
        if (boundary == 0) return 1.0;
        if (p <= 0.0) return 0.0;
        if (p >= 1.0) return 1.0;
        return boost::math::ibeta(static_cast<double>(boundary), static_cast<double>(n - boundary + 1), p);
    };
    const double spot = per_click_value(params.spot, contract.ctr);
    const double strike = contract.strike_per_click();
    const double price = spot * tail(q_tilted) -
                         strike * std::exp(-contract.rate * contract.expiry) * tail(q);
    return contract.basis_scale() * std::max(price, 0.0);
}

double trinomial_price(const GbmParams& params, const OptionContract& contract,
                       const LatticeSpec& spec) {
    if (!is_trinomial(spec.method))
        throw DomainError(std::string(method_name(spec.method)) + " is not a trinomial method");
    params.validate();
    contract.validate();
    const int n = contract.steps;
    const MoveSpec move = movement_params(spec, params.sigma, contract.rate, contract.dt());
    const double spot = per_click_value(params.spot, contract.ctr);
    const double strike = contract.strike_per_click();

    // Node i of the terminal level has net (ups - downs) = i - n; the grid
    // recombines because up * down == mid^2 for every trinomial method.
    const double log_mid = std::log(move.mid);
    const double log_up_step = std::log(move.up / move.mid);
    const double log_down_step = std::log(move.mid / move.down);
    std::vector<double> values(2 * static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= 2 * n; ++i) {
        const int net = i - n;
        const double log_scale =
            n * log_mid + (net >= 0 ? net * log_up_step : net * log_down_step);
        values[i] = std::max(spot * std::exp(log_scale) - strike, 0.0);
    }
    const double step_discount = 1.0 / contract.step_growth();
    for (int level = n - 1; level >= 0; --level) {
        for (int i = 0; i <= 2 * level; ++i) {
            values[i] = step_discount * (move.q_up * values[i + 2] + move.q_mid * values[i + 1] +
                                         move.q_down * values[i]);
        }
    }
    return contract.basis_scale() * values[0];
}

double lattice_price(const GbmParams& params, const OptionContract& contract,
                     const LatticeSpec& spec) {
    return is_trinomial(spec.method) ? trinomial_price(params, contract, spec)
                                     : binomial_price_sum(params, contract, spec);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double closed_form_price(const GbmParams& params, const OptionContract& contract) {
    params.validate();
    contract.validate();
    const double spot = per_click_value(params.spot, contract.ctr);
    const double strike = contract.strike_per_click();
    const double t = contract.expiry;
    const double discounted_strike = strike * std::exp(-contract.rate * t);
    const double scale = contract.basis_scale();

    if (strike == 0.0) return scale * spot;
    const double vol_root_t = params.sigma * std::sqrt(t);
    if (vol_root_t == 0.0) return scale * std::max(spot - discounted_strike, 0.0);

    const double d1 =
        (std::log(spot / strike) + (contract.rate + 0.5 * params.sigma * params.sigma) * t) /
        vol_root_t;
    const double d2 = d1 - vol_root_t;
    const double price = spot * normal_cdf(d1) - discounted_strike * normal_cdf(d2);
    return scale * std::max(price, 0.0);
}

std::vector<ConvergenceRow> convergence_report(const GbmParams& params,
                                               const OptionContract& contract,
                                               std::span<const LatticeSpec> methods,
                                               std::span<const int> step_counts) {
    if (!std::is_sorted(step_counts.begin(), step_counts.end()))
        throw DomainError("step counts must be ascending");
    const double reference = closed_form_price(params, contract);
    std::vector<ConvergenceRow> rows;
    rows.reserve(methods.size() * step_counts.size());
    for (const auto& spec : methods) {
        for (int n : step_counts) {
            ConvergenceRow row;
            row.method = spec.method;
            row.steps = n;
            try {
                OptionContract c = contract;
                c.steps = n;
                row.price = lattice_price(params, c, spec);
                row.abs_error = std::abs(row.price - reference);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
    out << "method,n,price,abs_error\n";
    for (const auto& row : rows) {
        out << method_name(row.method) << ',' << row.steps << ',' << format_number(row.price) << ','
            << format_number(row.abs_error) << '\n';
    }
}

}  // namespace adopt
