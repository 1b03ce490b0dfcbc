#include "adopt/sv_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "adopt/csv.hpp"

namespace adopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_finite(double value, std::size_t level, std::size_t node, const char* what) {
    if (!std::isfinite(value))
        throw std::runtime_error("non-finite " + std::string(what) + " at level " +
                                 std::to_string(level) + ", node " + std::to_string(node));
}

double censored_up_ratio(double k_adjust, double grid_step) {
    return std::clamp(0.5 * (1.0 + k_adjust / grid_step), 0.0, 1.0);
}

}  // namespace

double vol_mean_path(const SvParams& params, double t) {
    return params.theta + (params.sigma0 - params.theta) * std::exp(-params.kappa * t);
}

std::int64_t nearest_grid_index(double x, double sigma_next, double dt) {
    if (!(sigma_next > 0.0) || !(dt > 0.0)) throw DomainError("grid step must be > 0");
    const double step = sigma_next * std::sqrt(dt);
    const auto base = static_cast<std::int64_t>(std::floor(x / step));
    std::int64_t best = base - 1;
    double best_dist = std::abs(static_cast<double>(best) * step - x);
    for (std::int64_t candidate = base; candidate <= base + 1; ++candidate) {
        const double dist = std::abs(static_cast<double>(candidate) * step - x);
        if (dist <= best_dist) {
            best = candidate;
            best_dist = dist;
        }
    }
    return best;
}

CensoredSplit censored_transition(double q_mass, double k_adjust, double sigma_next, double dt) {
    const double up = q_mass * censored_up_ratio(k_adjust, sigma_next * std::sqrt(dt));
    return {up, q_mass - up};
}

SvLattice build_censored_lattice(const SvParams& params, const OptionContract& contract,
                                 GridOrigin origin) {
    params.validate();
    contract.validate();
    const int n = contract.steps;
    const double dt = contract.dt();

    SvLattice lattice;
    lattice.params = params;
    lattice.contract = contract;
    lattice.dt = dt;
    lattice.log_origin = origin == GridOrigin::Spot ? std::log(params.spot) : 0.0;
    const double x0 = lattice.log_origin;
    lattice.vol_path.resize(n + 1);
    for (int k = 0; k <= n; ++k) lattice.vol_path[k] = vol_mean_path(params, k * dt);
    lattice.levels.resize(n + 1);

    SvNode root;
    root.x = std::log(params.spot);
    root.q_mass = 1.0;
    lattice.levels[0].push_back(root);

    for (int k = 0; k < n; ++k) {
        auto& level = lattice.levels[k];
        auto& next = lattice.levels[k + 1];
        const double sigma_next = lattice.vol_path[k + 1];
        if (!(sigma_next > 0.0))
            throw std::runtime_error("lattice volatility must stay > 0 (level " +
                                     std::to_string(k + 1) + ")");
        const double step = sigma_next * std::sqrt(dt);
        const double drift = (contract.rate - 0.5 * sigma_next * sigma_next) * dt;

        next.resize(level.size() + 1);
        for (std::size_t i = 0; i < level.size(); ++i) {
            SvNode& node = level[i];
            node.j = i == 0 ? nearest_grid_index(node.x - x0, sigma_next, dt) : level[i - 1].j - 2;
            node.k_adjust = node.x - x0 - static_cast<double>(node.j) * step;
            node.p_up = censored_up_ratio(node.k_adjust, step);
            node.q_up = node.q_mass * node.p_up;
            node.q_down = node.q_mass - node.q_up;
            require_finite(node.k_adjust, k, i, "grid adjustment");
            require_finite(node.q_up, k, i, "transition probability");

            if (i == 0) {
                next[0].grid_index = node.j + 1;
                next[0].q_mass = node.q_up;
            } else {
                next[i].q_mass += node.q_up;
            }
            next[i + 1].grid_index = node.j - 1;
            next[i + 1].q_mass = node.q_down;
        }
        for (std::size_t i = 0; i < next.size(); ++i) {
            SvNode& child = next[i];
            child.x = x0 + static_cast<double>(child.grid_index) * step + drift;
            require_finite(child.x, k + 1, i, "log price");
        }
    }

    for (auto& node : lattice.levels[n]) {
        node.j = node.grid_index;
        node.k_adjust = kNaN;
        node.p_up = kNaN;
        node.q_up = kNaN;
        node.q_down = kNaN;
    }
    return lattice;
}

SvPricing price_sv_option(const SvLattice& lattice) {
    const auto& contract = lattice.contract;
    const int n = static_cast<int>(lattice.levels.size()) - 1;
    const double strike = contract.strike_per_click();
    const double scale = contract.basis_scale();

    SvPricing pricing;
    pricing.option_values.resize(lattice.levels.size());
    auto& terminal = pricing.option_values[n];
    double terminal_sum = 0.0;
    for (const auto& node : lattice.levels[n]) {
        const double value = scale * std::max(std::exp(node.x) / (1000.0 * contract.ctr) - strike, 0.0);
        terminal.push_back(value);
        terminal_sum += node.q_mass * value;
    }
    pricing.price = discount(terminal_sum, contract.rate, contract.expiry);

    const double step_discount = std::exp(-contract.rate * lattice.dt);
    for (int k = n - 1; k >= 0; --k) {
        const auto& level = lattice.levels[k];
        const auto& later = pricing.option_values[k + 1];
        auto& values = pricing.option_values[k];
        values.resize(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) {
            const double p = level[i].p_up;
            values[i] = step_discount * (p * later[i] + (1.0 - p) * later[i + 1]);
        }
    }
    pricing.backward_price = pricing.option_values[0][0];
    return pricing;
}

void write_lattice_csv(std::ostream& out, const SvLattice& lattice, const SvPricing& pricing) {
    out << "level,node,x,J,K,Q,q_up,q_down,option_value\n";
    for (std::size_t k = 0; k < lattice.levels.size(); ++k) {
        const auto& level = lattice.levels[k];
        for (std::size_t i = 0; i < level.size(); ++i) {
            const auto& node = level[i];
            out << k << ',' << i << ',' << format_number(node.x) << ',' << node.j << ','
                << format_number(node.k_adjust) << ',' << format_number(node.q_mass) << ','
                << format_number(node.q_up) << ',' << format_number(node.q_down) << ','
                << format_number(pricing.option_values[k][i]) << '\n';
        }
    }
}

}  // namespace adopt
