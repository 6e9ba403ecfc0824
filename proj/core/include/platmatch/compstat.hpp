#pragma once

#include "platmatch/distribution.hpp"
#include "platmatch/market.hpp"
#include "platmatch/mechanism.hpp"
#include "platmatch/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace platmatch {

/// Payoff change for a set of firms.
///   additive_slope       U -> U + epsilon * x
///   multiplicative_beta  b(v) -> alpha(v) * b(v) for an affine firm payoff a(v) + b(v) x
///   replace_family       U -> replacement
struct shift_spec {
    enum class kind { additive_slope, multiplicative_beta, replace_family };

    kind tag = kind::additive_slope;
    std::vector<int> firms;
    double epsilon = 0.0;
    type_function alpha = type_function::constant(1.0);
    payoff_family replacement;
};

struct shift_result {
    market_spec market;
    bool increasing_differences = true;  // new increments dominate the old ones on the quality grid
    bool order_preserved = true;
};

/// Applies the shift. Additive and replacement shifts must be increasing-differences changes;
/// every shift must leave the firms' supermodular order unchanged. Violations are structure errors.
shift_result apply_shift(const market_spec& m, const shift_spec& s);

enum class verdict_status { pass, fail, not_applicable, informational };
std::string to_string(verdict_status s);

struct verdict {
    std::string claim;
    verdict_status status = verdict_status::not_applicable;
    std::string detail;
};

struct set_change {
    int id = 0;
    std::string relation;  // "=", "subset", "superset", "incomparable"
    long size_delta = 0;
};

struct comparison_report {
    solve_report before, after;
    bool exhaustive = false;
    std::vector<set_change> firms;        // individuals matched with each firm
    std::vector<set_change> individuals;  // firms matched with each individual
    std::vector<double> quality_delta;    // per firm
    std::vector<verdict> verdicts;

    const verdict* find(const std::string& claim) const;
    /// No verdict failed.
    bool clean() const;
};

/// Which solver produces the two matchings.
enum class solver_choice { brute_force, threshold, pointwise_affine };

/// Solves both markets and compares the matchings; `shift` (when given) selects the claims checked.
comparison_report compare(const market_spec& before, const market_spec& after, const std::optional<shift_spec>& shift,
                          solver_choice solver = solver_choice::brute_force, std::uint64_t seed = 0);

struct welfare_report {
    std::vector<double> types;
    std::vector<double> payoff_before, payoff_after, delta;
    std::string sign;  // "zero", "nonpositive", "nonnegative" or "mixed"
    std::string movement;  // all individual sets: "=", "subset", "superset" or "mixed"
    welfare_preconditions pre_before, pre_after;
    verdict claim;
};

/// Envelope payoffs per individual type before and after, with sizes held on the type grid as a
/// step allocation over the distribution's support.
welfare_report welfare_delta(const market_spec& before, const solve_report& r_before, const market_spec& after,
                             const solve_report& r_after, const distribution& types);

/// Pointwise problem of one individual facing a discretized firm distribution: the value of
/// the firms at positions [c, n) is U^I(v_I, V) + h(V) * sum of beta_j w_j with V = sum of v_j w_j.
struct beta_context {
    std::vector<double> firm_types;    // ascending, positive
    std::vector<double> firm_weights;  // quadrature weights of the firm distribution
    std::vector<individual_type> individuals;
    payoff_family u_i;
    competition_kernel kernel;
};

/// Cutoff c into the ascending firm types maximizing the pointwise value; ties to the larger c.
std::size_t pointwise_cutoff(const beta_context& ctx, const individual_type& ind, const std::vector<double>& beta);
double pointwise_value(const beta_context& ctx, const individual_type& ind, const std::vector<double>& beta, std::size_t c);

struct beta_comparison {
    std::vector<std::size_t> cutoff_before, cutoff_after;  // per individual
    verdict lemma_upper;   // equal at or below the threshold, weakly higher above: threshold weakly rises
    verdict lemma_lower;   // equal above the threshold, weakly higher at or below: threshold weakly falls
    verdict scaling;       // no individual term, beta scaled by an increasing positive alpha: sets shrink
};

/// Thresholds under beta and beta_tilde plus the verdicts whose premises hold. `alpha` is the
/// scaling factor per firm when beta_tilde = alpha * beta.
beta_comparison beta_threshold_compstat(const beta_context& ctx, const std::vector<double>& beta,
                                        const std::vector<double>& beta_tilde,
                                        const std::optional<std::vector<double>>& alpha = std::nullopt);

struct tail_check {
    bool premise = false;  // every tail integral of k is nonnegative
    double lhs = 0.0;      // integral of alpha * k
    double rhs = 0.0;      // alpha(lo) * integral of k
    verdict result;
};

/// Integral inequality for increasing alpha against k with nonnegative tail integrals, on the
/// common support of the two knot functions.
tail_check tail_integral_inequality_check(const knot_function& alpha, const knot_function& k, double tol = 1e-10);

}  // namespace platmatch
