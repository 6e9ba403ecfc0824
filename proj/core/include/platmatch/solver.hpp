#pragma once

#include "platmatch/market.hpp"
#include "platmatch/matching.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace platmatch {

struct solve_report {
    matching mu;
    double objective = 0.0;
    std::string method;
    std::uint64_t iterations = 0;  // candidates evaluated (exhaustive) or sweeps (ascent)
    int restarts = 0;
    bool exhaustive = false;
    std::optional<double> oracle_gap;
    agent_order firm_order;    // ascending order used for cutoffs
    std::vector<int> cutoffs;  // per individual when the matching is threshold-representable
};

struct solver_limits {
    std::size_t max_cells = 20;              // unrestricted enumeration: 2^cells
    std::uint64_t max_threshold_grid = 10'000'000;  // (N+1)^M
    int restarts = 5;
    double ascent_tolerance = 1e-10;
};

/// Global maximizer by enumeration. Unrestricted: every incidence matrix. Monotone only: every
/// cutoff vector in the firms' supermodular order. Ties go to the lexicographically smallest
/// incidence (firm-major).
solve_report brute_force(const market_spec& m, bool monotone_only, const solver_limits& limits = {});

/// Maximizer over threshold matchings; exhaustive below the grid cap, otherwise cyclic coordinate
/// ascent from the full matching plus seeded random restarts.
solve_report solve_threshold(const market_spec& m, std::uint64_t seed = 0, const solver_limits& limits = {});

/// Discrete first-order conditions for one firm at a threshold matching.
///
/// Add direction: give the firm to the highest-ranked individual not yet matched with it.
/// Drop direction: take it from the lowest-ranked matched individual. `*_residual` is the
/// linearized marginal value of the pairing per unit mass, with firm payoff slopes by central
/// finite difference; `*_delta` is the exact change in the platform objective from the move.
struct foc_report {
    int firm_id = 0;
    bool interior = false;  // both a matched and an unmatched individual exist
    std::optional<std::size_t> add_individual;
    std::optional<double> add_residual;  // value of adding; <= 0 at an optimum
    std::optional<double> add_delta;     // exact objective change; <= 0 at an optimum
    std::optional<std::size_t> drop_individual;
    std::optional<double> keep_residual;  // value of the existing pairing; >= 0 at an optimum
    std::optional<double> drop_delta;     // exact objective change; <= 0 at an optimum
};

foc_report foc_residual(const market_spec& m, const matching& mu, int firm_id);

/// Per-individual maximization when the firm payoff is affine in quality: the individual's set is
/// a prefix of the firms ranked by slope / salience (descending).
solve_report solve_pointwise_affine(const market_spec& m);

/// Cutoff of one salience bucket: the individual is matched with every firm of this salience whose
/// type is at least `cutoff_v` (+infinity when none).
struct salience_cutoff {
    double sigma_f = 0.0;
    double cutoff_v = 0.0;
    bool representable = true;
};

struct horizontal_row {
    std::size_t individual = 0;
    std::vector<salience_cutoff> cutoffs;  // ascending in sigma_f
    double pivot = 0.0;                    // individual marginal value of size plus inframarginal firm cost
    std::string predicted_slope;           // "decreasing" when pivot >= 0, else "increasing"
    std::string observed_slope;            // from the cutoffs: increasing, decreasing, flat or non-monotone
    bool consistent = true;                // observed is flat or matches the prediction
    bool has_negative_firm = false;        // matched with some firm of negative slope
    bool all_positive_matched = false;     // matched with every firm of positive slope
};

struct horizontal_report {
    std::vector<horizontal_row> rows;
    /// Lowest individual type matched with a negative-value firm, if any.
    std::optional<double> v_double_star;
    /// The boundary is a clean cut: negative-value firms matched iff type above it.
    bool boundary_consistent = true;
    solve_report solve;
};

horizontal_report solve_horizontal(const market_spec& m);

/// Pool-adjacent-violators: mass-weighted least-squares projection onto nondecreasing sequences.
std::vector<double> iron_monotone(const std::vector<double>& values, const std::vector<double>& masses);
/// Maximal blocks of the projection: block b covers [starts[b], starts[b+1]); the last entry is the length.
std::vector<std::size_t> iron_blocks(const std::vector<double>& values, const std::vector<double>& masses);

}  // namespace platmatch
