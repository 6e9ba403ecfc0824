#pragma once

#include "platmatch/market.hpp"
#include "platmatch/matching.hpp"

#include <optional>
#include <string>
#include <vector>

namespace platmatch {

/// Failing quadruple: U(hi, x_hi) + U(lo, x_lo) < U(hi, x_lo) + U(lo, x_hi) by `margin`.
/// `lo`/`hi` are agent indices (positions in the v grid for the payoff-level check).
struct supermodularity_witness {
    std::size_t lo = 0, hi = 0;
    double x_lo = 0.0, x_hi = 0.0;
    double margin = 0.0;
};

struct supermodularity_verdict {
    bool pass = true;
    std::optional<supermodularity_witness> witness;
};

/// values[a][k] = U_a(x_grid[k]); agents are compared in the given ascending order.
supermodularity_verdict check_supermodular_rows(const std::vector<std::vector<double>>& values,
                                                const std::vector<double>& x_grid, const agent_order& order,
                                                double tol = 1e-12);

/// Grid check of the increasing-differences inequality for a single payoff family.
supermodularity_verdict check_supermodularity(const payoff_family& u, const std::vector<double>& v_grid,
                                              const std::vector<double>& x_grid, double tol = 1e-12);

/// Two x-pairs on which agents `a` and `b` rank in opposite directions.
struct order_certificate {
    std::size_t a = 0, b = 0;
    double x1_lo = 0.0, x1_hi = 0.0;  // increment of a exceeds b's here
    double x2_lo = 0.0, x2_hi = 0.0;  // and falls short of it here
};

struct order_result {
    bool found = false;
    agent_order order;  // ascending in increments
    std::optional<order_certificate> certificate;
};

/// Order of agents making the increment rows consistently ranked, or a certificate.
order_result find_order_rows(const std::vector<std::vector<double>>& values, const std::vector<double>& x_grid,
                             double tol = 1e-12);

order_result find_supermodular_order(const payoff_family& u, const std::vector<double>& v_grid,
                                     const std::vector<double>& x_grid, double tol = 1e-12);

/// Evaluation grids spanning the market's reachable sizes / qualities.
std::vector<double> size_grid(const market_spec& m, std::size_t points = 33);
std::vector<double> quality_grid(const market_spec& m, std::size_t points = 33);

/// Supermodular order of firms (own payoffs over the quality grid) and of individuals.
order_result firm_order(const market_spec& m);
order_result individual_order(const market_spec& m);

std::string describe(const supermodularity_witness& w);
std::string describe(const order_certificate& c);

}  // namespace platmatch
