#pragma once

#include "platmatch/market.hpp"
#include "platmatch/matching.hpp"

#include <vector>

namespace platmatch {

/// Salience-weighted size of the individual's matched set (sum of sigma_f).
double weighted_size(const market_spec& m, const matching& mu, int individual_id);
/// Kernel-weighted mass of the firm's matched individuals.
double firm_match_quality(const market_spec& m, const matching& mu, int firm_id);
/// Platform objective: firm payoffs at their qualities plus mass-weighted individual payoffs.
double platform_objective(const market_spec& m, const matching& mu);

/// Full decomposition of the objective, index-aligned with the market.
struct objective_terms {
    std::vector<double> sizes;             // per individual
    std::vector<double> qualities;         // per firm
    std::vector<double> firm_terms;        // U^F(v_j, quality_j)
    std::vector<double> individual_terms;  // mass_i * U^I(v_i, size_i)
    double firm_total = 0.0;
    double individual_total = 0.0;
    double total = 0.0;
};

objective_terms evaluate(const market_spec& m, const matching& mu);

/// Index-based building blocks used by the solvers.
double size_of(const market_spec& m, const matching& mu, std::size_t i);
double quality_of(const market_spec& m, const matching& mu, std::size_t j, const std::vector<double>& sizes);

}  // namespace platmatch
