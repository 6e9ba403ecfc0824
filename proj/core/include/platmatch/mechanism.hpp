#pragma once

#include "platmatch/distribution.hpp"
#include "platmatch/market.hpp"
#include "platmatch/payoff.hpp"
#include "platmatch/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace platmatch {

/// Match quality as a function of type.
using allocation = knot_function;

/// Envelope payoffs V(v) = v_low_payoff + integral of U_1(t, x(t)) from the bottom of the
/// support, evaluated at `grid` (panels of Gauss-Legendre between allocation breaks).
std::vector<double> envelope_payoffs(const allocation& x, const payoff_family& u, const distribution& d,
                                     const std::vector<double>& grid, double v_low_payoff = 0.0);

/// Pairwise misreport: type `truth` gains `gain` by reporting `report`.
struct ic_witness {
    std::size_t truth = 0, report = 0;
    double gain = 0.0;
};

struct ic_verdict {
    bool pass = true;
    std::optional<ic_witness> witness;  // largest gain found
};

/// Direct check of every grid pair: u(v, x(v)) - t(v) >= u(v, x(v')) - t(v') - tol.
ic_verdict audit_ic(const std::vector<double>& grid, const std::vector<double>& x, const std::vector<double>& t,
                    const payoff_family& u, double tol = 1e-9);

struct mechanism_report {
    std::vector<double> grid;
    std::vector<double> quality;   // x(v)
    std::vector<double> envelope;  // V(v)
    std::vector<double> payments;  // t(v) = u(v, x(v)) - V(v)
    double revenue_payments = 0.0;  // integral of t dQ
    double revenue_virtual = 0.0;   // integral of [u - (1 - Q)/q u_1] dQ
    double revenue_gap = 0.0;
    ic_verdict ic;
};

/// Envelope payments and total revenue two ways. Requires U(lo, 0) = 0 and a nondecreasing
/// allocation; the lowest type keeps its outside option.
mechanism_report payments_and_revenue(const allocation& x, const payoff_family& u, const distribution& d,
                                      const std::vector<double>& grid);

/// Conditions under which individual welfare moves with matching sets. Both readings of the
/// top firm's cutoff condition are reported.
struct welfare_preconditions {
    bool representable = false;
    /// The top firm is matched with every individual type, so nobody is excluded.
    bool no_exclusion = false;
    /// The lowest type matched with the top firm is the highest individual type.
    bool literal_cutoff_at_top = false;
    bool top_firm_payoff_increasing = false;
    bool lowest_individual_payoff_increasing = false;
    /// no_exclusion together with both monotonicity conditions.
    bool applicable = false;
    std::string reason;
};

welfare_preconditions check_welfare_lemma_preconditions(const market_spec& m, const solve_report& r);

}  // namespace platmatch
