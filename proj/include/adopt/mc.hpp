#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/core.hpp"
#include "adopt/random.hpp"

namespace adopt {

enum class McScheme { Euler, Milstein };

std::string_view scheme_name(McScheme scheme);
McScheme parse_scheme(std::string_view name);

struct McConfig {
    McScheme scheme = McScheme::Euler;
    std::int64_t paths = 100000;
    std::uint64_t seed = 20130207;
    int steps = 0;  // 0: use the contract's step count
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct McResult {
    double price = 0.0;
    double std_error = 0.0;  // discounted std of the payoff over sqrt(paths)
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::int64_t paths = 0;
    McScheme scheme = McScheme::Euler;
};

/// 95% confidence multiplier.
inline constexpr double kCiMultiplier = 1.96;

struct SvState {
    double cpm = 0.0;
    double sigma = 0.0;
};

/// Independent standard normal shocks for the price and the volatility.
struct Shocks {
    double price = 0.0;
    double vol = 0.0;
};

// One discretisation step of the SV dynamics under the risk-neutral drift
// `rate`. The log price is advanced exactly given the current volatility;
// the volatility is floored at zero after the step.
SvState step_euler(SvState state, double dt, double rate, const SvParams& sv, Shocks shocks);
SvState step_milstein(SvState state, double dt, double rate, const SvParams& sv, Shocks shocks);

SvState step(McScheme scheme, SvState state, double dt, double rate, const SvParams& sv,
             Shocks shocks);

/// Mean of discounted payoffs over independent paths with a 95% interval.
/// Path p draws from CounterRng(seed, p), so the result is bit-identical for
/// a given seed whatever the thread count.
McResult mc_price(const SvParams& sv, const OptionContract& contract, const McConfig& config);

/// Simulates one CPM path (steps + 1 points, starting at sv.spot) with the
/// given price drift.
std::vector<double> simulate_sv_path(const SvParams& sv, double drift, double dt, int steps,
                                     McScheme scheme, CounterRng& rng);

enum class Verdict { Contained, Below, Above };

std::string_view verdict_name(Verdict verdict);

Verdict validate_lattice(double lattice_price, const McResult& mc);

struct SweepRow {
    std::string param;
    double value = 0.0;
    double lattice_price = 0.0;
    McResult mc;
    Verdict verdict = Verdict::Contained;
};

/// Sets one SV parameter by name: sigma0, kappa, theta or delta.
SvParams with_parameter(SvParams base, std::string_view name, double value);

/// Prices the censored lattice and the Monte Carlo estimate at every value of
/// one parameter and classifies the lattice price against the interval.
std::vector<SweepRow> validation_sweep(const SvParams& base, const OptionContract& contract,
                                       const McConfig& config, std::string_view param,
                                       std::span<const double> values);

/// CSV `param,value,scheme,lattice_price,mc_price,ci_low,ci_high,verdict`.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace adopt
