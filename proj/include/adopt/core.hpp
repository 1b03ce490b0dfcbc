#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace adopt {

/// Quote basis of a strike: per click (CPC) or per thousand impressions (CPM).
enum class StrikeBasis { PerClick, PerMille };

/// An option on future ad inventory. The underlying is always the CPM of the
/// spot (RTB) market; a per-click strike is compared through the CTR.
struct OptionContract {
    double strike = 0.0;
    StrikeBasis strike_basis = StrikeBasis::PerClick;
    double ctr = 0.03;
    double expiry = 0.0;  // years
    double rate = 0.0;    // continuous annual rate
    int steps = 1;

    void validate() const;

    double dt() const { return expiry / steps; }
    /// One-step gross risk-free return e^{r dt}.
    double step_growth() const { return std::exp(rate * dt()); }
    /// Strike expressed per click; converts per-mille strikes through the CTR.
    double strike_per_click() const;
    /// Factor turning a per-click price into the strike's basis (1 or 1000 H).
    double basis_scale() const { return strike_basis == StrikeBasis::PerClick ? 1.0 : 1000.0 * ctr; }
};

struct GbmParams {
    double spot = 0.0;  // current CPM
    double sigma = 0.0;
    double mu = 0.0;  // real-world drift, only produced by estimation

    void validate() const;
};

struct SvParams {
    double spot = 0.0;
    double sigma0 = 0.0;
    double kappa = 0.0;
    double theta = 0.0;
    double delta = 0.0;

    void validate() const;
};

/// Thrown for inputs outside a function's domain (e.g. non-positive CTR).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// CPM converted to the value of one click: M / (1000 H).
double per_click_value(double cpm, double ctr);

/// Call payoff at a terminal CPM, in the strike's quote basis.
double payoff(double terminal_cpm, const OptionContract& contract);

double discount(double value, double rate, double horizon);

std::string to_string(StrikeBasis basis);
StrikeBasis parse_strike_basis(const std::string& text);

}  // namespace adopt
