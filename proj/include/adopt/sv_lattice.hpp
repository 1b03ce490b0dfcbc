#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "adopt/core.hpp"

namespace adopt {

// Censored binomial lattice for a CPM with mean-reverting stochastic
// volatility. Level k lives on the grid {origin + J sigma(t_k) sqrt(dt) + drift_k};
// every node snaps to the nearest point of the next level's grid and the
// leftover displacement K is absorbed by censored transition probabilities,
// which keeps the lattice recombining while the volatility moves.

/// Where the log-price grid has its zero. With `Zero` the grid is anchored at
/// log CPM 0 and the top node's rounding residual K is of order the grid step,
/// costing about step^2 / 12 of variance per level whenever the volatility
/// changes. `Spot` anchors the grid at ln M0, which keeps K at the drift term.
enum class GridOrigin { Spot, Zero };

struct SvNode {
    double x = 0.0;           // log CPM
    std::int64_t grid_index = 0;  // x = origin + grid_index * s_k + drift_k (k >= 1)
    std::int64_t j = 0;       // nearest index on the next level's grid
    double k_adjust = 0.0;    // x - origin - j * s_{k+1}
    double q_mass = 0.0;      // node probability Q
    double p_up = 0.0;        // conditional up probability, censored into [0, 1]
    double q_up = 0.0;        // q_mass * p_up
    double q_down = 0.0;      // q_mass - q_up
};

/// Nodes are ordered top to bottom. Terminal nodes have no transitions:
/// their j equals grid_index and k_adjust, p_up, q_up, q_down are NaN.
struct SvLattice {
    std::vector<std::vector<SvNode>> levels;
    std::vector<double> vol_path;  // sigma(t_k), k = 0..n
    double dt = 0.0;
    double log_origin = 0.0;
    SvParams params;
    OptionContract contract;
};

/// Deterministic volatility theta + (sigma0 - theta) e^{-kappa t} used as the
/// per-level lattice volatility.
double vol_mean_path(const SvParams& params, double t);

/// Integer J minimizing |J * sigma_next * sqrt(dt) - x|; ties go to the larger J.
std::int64_t nearest_grid_index(double x, double sigma_next, double dt);

struct CensoredSplit {
    double up = 0.0;
    double down = 0.0;
};

CensoredSplit censored_transition(double q_mass, double k_adjust, double sigma_next, double dt);

/// Throws std::runtime_error naming level and node on non-finite values.
SvLattice build_censored_lattice(const SvParams& params, const OptionContract& contract,
                                 GridOrigin origin = GridOrigin::Spot);

struct SvPricing {
    double price = 0.0;           // discounted terminal sum over node masses
    double backward_price = 0.0;  // time-0 value of the backward induction
    std::vector<std::vector<double>> option_values;  // same shape as levels
};

SvPricing price_sv_option(const SvLattice& lattice);

/// CSV `level,node,x,J,K,Q,q_up,q_down,option_value`.
void write_lattice_csv(std::ostream& out, const SvLattice& lattice, const SvPricing& pricing);

}  // namespace adopt
