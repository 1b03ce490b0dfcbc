#pragma once

#include <cmath>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/core.hpp"

namespace adopt {

// Lattice pricing of ad options whose underlying CPM follows a geometric
// Brownian motion. Binomial methods price by the terminal binomial sum,
// trinomial methods by backward induction over the recombining grid.

enum class LatticeMethod { Crr, TianBin, HaahtelaBin, BoyleTrin, KrTrin, TianTrin };

inline constexpr LatticeMethod kAllLatticeMethods[] = {
    LatticeMethod::Crr,       LatticeMethod::TianBin, LatticeMethod::HaahtelaBin,
    LatticeMethod::BoyleTrin, LatticeMethod::KrTrin,  LatticeMethod::TianTrin,
};

/// Default stretch for the Boyle and Kamrad-Ritchken trinomial grids.
inline const double kDefaultStretch = std::sqrt(1.5);

struct LatticeSpec {
    LatticeMethod method = LatticeMethod::Crr;
    double stretch = kDefaultStretch;  // only read by BoyleTrin and KrTrin
};

bool is_trinomial(LatticeMethod method);
std::string_view method_name(LatticeMethod method);
/// Accepts the CLI names: crr, tian-bin, haahtela, boyle-trin, kr-trin, tian-trin.
LatticeMethod parse_lattice_method(std::string_view name);

/// Movement scales and transition probabilities of one lattice step. For
/// binomial lattices `mid` and `q_mid` are zero.
struct MoveSpec {
    double up = 0.0;
    double mid = 0.0;
    double down = 0.0;
    double q_up = 0.0;
    double q_mid = 0.0;
    double q_down = 0.0;
    bool trinomial = false;

    double first_moment() const { return q_up * up + q_mid * mid + q_down * down; }
    double second_moment() const {
        return q_up * up * up + q_mid * mid * mid + q_down * down * down;
    }
};

/// A parameterization whose probabilities leave [0, 1] (or whose scales are
/// not ordered). Never clamped.
class InvalidParameterization : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

MoveSpec movement_params(const LatticeSpec& spec, double sigma, double rate, double dt);

/// Direct binomial sum over all terminal nodes. Binomial methods only.
double binomial_price_sum(const GbmParams& params, const OptionContract& contract,
                          const LatticeSpec& spec);

/// Same price written through the complementary binomial distribution above
/// the exercise boundary j*; evaluated with the regularized incomplete beta.
double complementary_binomial_price(const GbmParams& params, const OptionContract& contract,
                                    const LatticeSpec& spec);

/// Smallest up-move count whose terminal per-click value reaches the strike;
/// steps + 1 when no terminal node is in the money.
int exercise_boundary(const GbmParams& params, const OptionContract& contract, const MoveSpec& move);

double trinomial_price(const GbmParams& params, const OptionContract& contract,
                       const LatticeSpec& spec);

/// Dispatches to binomial_price_sum or trinomial_price.
double lattice_price(const GbmParams& params, const OptionContract& contract,
                     const LatticeSpec& spec);

double normal_cdf(double x);

/// Continuous-time limit of the lattices (log-normal CPM).
double closed_form_price(const GbmParams& params, const OptionContract& contract);

struct ConvergenceRow {
    LatticeMethod method = LatticeMethod::Crr;
    int steps = 0;
    double price = std::nan("");
    double abs_error = std::nan("");
    std::string error;  // non-empty when the row failed
};

/// Prices every (method, n) pair; failures are recorded in their row.
std::vector<ConvergenceRow> convergence_report(const GbmParams& params,
                                               const OptionContract& contract,
                                               std::span<const LatticeSpec> methods,
                                               std::span<const int> step_counts);

/// CSV with header `method,n,price,abs_error`. Failed rows carry empty
/// numeric fields.
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

}  // namespace adopt
