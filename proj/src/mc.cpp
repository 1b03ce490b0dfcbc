#include "adopt/mc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "adopt/csv.hpp"
#include "adopt/sv_lattice.hpp"

namespace adopt {

namespace {

double vol_euler(const SvState& s, double dt, const SvParams& sv, double shock) {
    return s.sigma + sv.kappa * (sv.theta - s.sigma) * dt +
           sv.delta * std::sqrt(std::max(s.sigma, 0.0) * dt) * shock;
}

double advance_price(const SvState& s, double dt, double rate, double shock) {
    return s.cpm * std::exp((rate - 0.5 * s.sigma * s.sigma) * dt + s.sigma * std::sqrt(dt) * shock);
}

/// Neumaier-compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace

std::string_view scheme_name(McScheme scheme) {
    return scheme == McScheme::Euler ? "euler" : "milstein";
}

McScheme parse_scheme(std::string_view name) {
    if (name == "euler") return McScheme::Euler;
    if (name == "milstein") return McScheme::Milstein;
    throw DomainError("unknown Monte Carlo scheme: " + std::string(name));
}

void McConfig::validate() const {
    if (paths < 2) throw DomainError("need at least 2 Monte Carlo paths");
    if (steps < 0) throw DomainError("steps must be >= 0 (0: use the contract)");
}

SvState step_euler(SvState state, double dt, double rate, const SvParams& sv, Shocks shocks) {
    return {advance_price(state, dt, rate, shocks.price),
            std::max(vol_euler(state, dt, sv, shocks.vol), 0.0)};
}

SvState step_milstein(SvState state, double dt, double rate, const SvParams& sv, Shocks shocks) {
    const double correction = 0.25 * sv.delta * sv.delta * dt * (shocks.vol * shocks.vol - 1.0);
    return {advance_price(state, dt, rate, shocks.price),
            std::max(vol_euler(state, dt, sv, shocks.vol) + correction, 0.0)};
}

SvState step(McScheme scheme, SvState state, double dt, double rate, const SvParams& sv,
             Shocks shocks) {
    return scheme == McScheme::Euler ? step_euler(state, dt, rate, sv, shocks)
                                     : step_milstein(state, dt, rate, sv, shocks);
}

McResult mc_price(const SvParams& sv, const OptionContract& contract, const McConfig& config) {
    sv.validate();
    contract.validate();
    config.validate();
    const int steps = config.steps > 0 ? config.steps : contract.steps;
    const double dt = contract.expiry / steps;
    const auto paths = static_cast<std::size_t>(config.paths);

    std::vector<double> payoffs(paths);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng rng(config.seed, p);
            SvState state{sv.spot, sv.sigma0};
            for (int i = 0; i < steps; ++i) {
                Shocks shocks;
                rng.normal_pair(shocks.price, shocks.vol);
                state = step(config.scheme, state, dt, contract.rate, sv, shocks);
            }
            payoffs[p] = payoff(state.cpm, contract);
        }
    };

    unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, 64);
    if (threads == 1 || paths < 1000) {
        run(0, paths);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (paths + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(paths, begin + chunk);
            if (begin < end) pool.emplace_back(run, begin, end);
        }
    }

    CompensatedSum sum;
    for (double v : payoffs) sum.add(v);
    const double mean = sum.value() / static_cast<double>(paths);
    CompensatedSum squares;
    for (double v : payoffs) squares.add((v - mean) * (v - mean));
    const double sd = std::sqrt(squares.value() / static_cast<double>(paths - 1));

    const double disc = std::exp(-contract.rate * contract.expiry);
    McResult result;
    result.price = disc * mean;
    result.std_error = disc * sd / std::sqrt(static_cast<double>(paths));
    result.ci_low = result.price - kCiMultiplier * result.std_error;
    result.ci_high = result.price + kCiMultiplier * result.std_error;
    result.paths = config.paths;
    result.scheme = config.scheme;
    return result;
}

std::vector<double> simulate_sv_path(const SvParams& sv, double drift, double dt, int steps,
                                     McScheme scheme, CounterRng& rng) {
    std::vector<double> path;
    path.reserve(steps + 1);
    SvState state{sv.spot, sv.sigma0};
    path.push_back(state.cpm);
    for (int i = 0; i < steps; ++i) {
        Shocks shocks;
        rng.normal_pair(shocks.price, shocks.vol);
        state = step(scheme, state, dt, drift, sv, shocks);
        path.push_back(state.cpm);
    }
    return path;
}

std::string_view verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Contained: return "contained";
        case Verdict::Below: return "below";
        case Verdict::Above: return "above";
    }
    return "?";
}

Verdict validate_lattice(double lattice_price, const McResult& mc) {
    if (lattice_price < mc.ci_low) return Verdict::Below;
    if (lattice_price > mc.ci_high) return Verdict::Above;
    return Verdict::Contained;
}

SvParams with_parameter(SvParams base, std::string_view name, double value) {
    if (name == "sigma0") base.sigma0 = value;
    else if (name == "kappa") base.kappa = value;
    else if (name == "theta") base.theta = value;
    else if (name == "delta") base.delta = value;
    else throw DomainError("unknown SV parameter: " + std::string(name));
    return base;
}

std::vector<SweepRow> validation_sweep(const SvParams& base, const OptionContract& contract,
                                       const McConfig& config, std::string_view param,
                                       std::span<const double> values) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double value : values) {
        const SvParams sv = with_parameter(base, param, value);
        SweepRow row;
        row.param = std::string(param);
        row.value = value;
        row.lattice_price = price_sv_option(build_censored_lattice(sv, contract)).price;
        row.mc = mc_price(sv, contract, config);
        row.verdict = validate_lattice(row.lattice_price, row.mc);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "param,value,scheme,lattice_price,mc_price,ci_low,ci_high,verdict\n";
    for (const auto& row : rows) {
        out << row.param << ',' << format_number(row.value) << ',' << scheme_name(row.mc.scheme) << ','
            << format_number(row.lattice_price)
            << ',' << format_number(row.mc.price) << ',' << format_number(row.mc.ci_low) << ','
            << format_number(row.mc.ci_high) << ',' << verdict_name(row.verdict) << '\n';
    }
}

}  // namespace adopt
