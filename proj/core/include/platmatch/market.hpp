#pragma once

#include "platmatch/kernel.hpp"
#include "platmatch/payoff.hpp"

#include <map>
#include <string>
#include <vector>

namespace platmatch {

struct firm_type {
    int id = 0;
    double v = 0.0;      // vertical type
    double sigma = 1.0;  // salience
};

struct individual_type {
    int id = 0;
    double v = 0.0;
    double sigma = 1.0;
    double mass = 0.0;  // quadrature weight of the grid point
};

/// Market primitives. Individuals form a discretized type grid (masses summing to one), firms
/// carry unit counting measure each.
struct market_spec {
    std::vector<firm_type> firms;
    std::vector<individual_type> individuals;
    payoff_family u_i;
    payoff_family u_f;
    competition_kernel kernel;
    /// Firm-specific payoff, keyed by firm id; used for per-firm shifts.
    std::map<int, payoff_family> firm_payoffs;
    bool horizontal_firms = false;
    bool horizontal_individuals = false;

    std::size_t n_firms() const { return firms.size(); }
    std::size_t n_individuals() const { return individuals.size(); }

    const payoff_family& firm_payoff(std::size_t j) const;
    std::size_t firm_index(int id) const;
    std::size_t individual_index(int id) const;

    /// Upper bound of any individual's weighted size (all firms matched).
    double max_size() const;
    /// Upper bound of any firm's match quality.
    double max_quality() const;
};

/// Every violated invariant, in a stable order; empty when the market is valid.
std::vector<std::string> validation_errors(const market_spec& m);
/// Throws a validation error listing all violations.
void validate(const market_spec& m);

/// Firm indices sorted ascending by v (stable in index).
std::vector<std::size_t> firms_by_type(const market_spec& m);

/// Uniform grid of n points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace platmatch
