#include "adopt/core.hpp"

#include <algorithm>

namespace adopt {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

void OptionContract::validate() const {
    require(std::isfinite(strike) && strike >= 0.0, "strike must be finite and >= 0");
    require(std::isfinite(ctr) && ctr > 0.0 && ctr <= 1.0, "ctr must lie in (0, 1]");
    require(std::isfinite(expiry) && expiry > 0.0, "expiry must be finite and > 0");
    require(std::isfinite(rate), "rate must be finite");
    require(steps >= 1, "steps must be >= 1");
    const double step = dt();
    require(std::isfinite(step) && step > 0.0, "time step must be finite and > 0");
}

double OptionContract::strike_per_click() const {
    return strike_basis == StrikeBasis::PerClick ? strike : per_click_value(strike, ctr);
}

void GbmParams::validate() const {
    require(std::isfinite(spot) && spot > 0.0, "spot CPM must be > 0");
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be >= 0");
}

void SvParams::validate() const {
    require(std::isfinite(spot) && spot > 0.0, "spot CPM must be > 0");
    require(std::isfinite(sigma0) && sigma0 > 0.0, "sigma0 must be > 0");
    require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
    require(std::isfinite(theta) && theta >= 0.0, "theta must be >= 0");
    require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0");
}

double per_click_value(double cpm, double ctr) {
    if (!(ctr > 0.0)) throw DomainError("ctr must be > 0");
    return cpm / (1000.0 * ctr);
}

double payoff(double terminal_cpm, const OptionContract& contract) {
    if (contract.strike_basis == StrikeBasis::PerMille)
        return std::max(terminal_cpm - contract.strike, 0.0);
    return std::max(per_click_value(terminal_cpm, contract.ctr) - contract.strike, 0.0);
}

double discount(double value, double rate, double horizon) {
    return value * std::exp(-rate * horizon);
}

std::string to_string(StrikeBasis basis) {
    return basis == StrikeBasis::PerClick ? "per-click" : "per-mille";
}

StrikeBasis parse_strike_basis(const std::string& text) {
    if (text == "per-click" || text == "cpc") return StrikeBasis::PerClick;
    if (text == "per-mille" || text == "cpm") return StrikeBasis::PerMille;
    throw DomainError("unknown strike basis: " + text);
}

}  // namespace adopt
