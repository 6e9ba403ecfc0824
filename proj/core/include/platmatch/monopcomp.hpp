#pragma once

#include "platmatch/compstat.hpp"
#include "platmatch/distribution.hpp"
#include "platmatch/matching.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace platmatch {

/// CES preferences over a set of varieties plus money. Requires sigma > 1, theta in (0, 1)
/// and sigma (1 - theta) > 1.
struct ces_params {
    double sigma = 3.0;
    double theta_ces = 0.5;
    /// Wealth of a customer; when absent, demand uses twice the spending it computes.
    std::optional<double> wealth;

    double markup() const { return sigma / (sigma - 1.0); }
    /// Exponent of match quality in the salience: (sigma (1 - theta) - 1) / ((1 - theta) (1 - sigma)).
    double kappa() const;
    double psi() const;
    /// Profit per unit of v and audience salience under markup pricing.
    double gamma() const;
    /// Exponent of the price index in demand: (sigma (1 - theta) - 1) / (1 - theta).
    double demand_exponent() const;
    /// Exponent of the price index in spending: theta / (theta - 1).
    double spending_exponent() const;
};

std::vector<std::string> validation_errors(const ces_params& c);
void validate(const ces_params& c);

struct ces_quantities {
    std::vector<double> prices, quantities;
    double price_index = 0.0;  // +inf for an empty set
    double spending = 0.0;
    double money = 0.0;
    double wealth = 0.0;
    double utility = 0.0;  // indirect utility, wealth included
};

/// Demand of a customer facing `prices` on a set of varieties with masses `weights` (unit
/// masses when empty). `v_i` scales goods demand and the goods part of utility.
ces_quantities ces_demand(const std::vector<double>& prices, const ces_params& ces,
                          const std::vector<double>& weights = {}, double v_i = 1.0);

/// Profit-maximizing price sigma c / (sigma - 1).
double markup_price(double c, double sigma);

struct markup_check {
    double price = 0.0, profit = 0.0;
    double best_grid_price = 0.0, best_grid_profit = 0.0;
    bool pass = true;  // no grid price beats the markup price by more than tol
};

/// Grid search of p^(1 - sigma) X - c p^(-sigma) X over [0.2 p*, 5 p*].
markup_check markup_grid_check(double c, double sigma, double demand_shift = 1.0, std::size_t points = 10000,
                               double tol = 1e-8);

/// Salience of a customer whose matched firms have quality V = sum of v dQ_F: v_i psi V^kappa.
double salience_kernel(double quality, const ces_params& ces, double v_i = 1.0);

/// Goods part of indirect utility per unit of customer type under markup pricing:
/// ((1 - theta) / theta) P^(theta / (theta - 1)), zero for an empty set.
double customer_value(double quality, const ces_params& ces);

/// Firm cost for type v = c^(1 - sigma), and back.
double cost_of_type(double v, double sigma);
double type_of_cost(double c, double sigma);

enum class customer_side { homogeneous, observed, private_info };
enum class amazon_mode { welfare_revenue, two_sided_revenue };

std::string to_string(customer_side s);
std::string to_string(amazon_mode m);

/// A retail platform choosing which firms each customer sees.
///
/// Firm types v = c^(1 - sigma) follow `firms`, discretized at the midpoints of `firm_nodes`
/// equal-width bins with bin probabilities as masses. The platform learns the partition cell of
/// each firm, so virtual values are computed cell by cell; owned cells count at true value.
/// Customers are one representative (homogeneous) or `customer_nodes` types from `customers`.
struct amazon_spec {
    distribution firms = distribution::uniform(0.1, 1.1);
    std::size_t firm_nodes = 12;
    partition cells;  // empty means one cell
    ces_params ces;
    customer_side side = customer_side::homogeneous;
    distribution customers = distribution::uniform(1.0, 2.0);
    std::size_t customer_nodes = 8;
    amazon_mode mode = amazon_mode::welfare_revenue;
    std::set<std::size_t> owned;  // cell indices

    partition effective_cells() const;
};

std::vector<std::string> validation_errors(const amazon_spec& s);
void validate(const amazon_spec& s);

/// Discretized firm side.
struct firm_grid {
    std::vector<double> types, weights, virtual_values;
    std::vector<std::size_t> cell;
};
firm_grid make_firm_grid(const amazon_spec& s);

/// Discretized customer side. The objective per customer is
///   mass * [a * G(V) + b * gamma * psi * V^kappa * sum of phi_F dQ_F]
/// with G the customer value; a and b depend on the side and mode.
struct customer_grid {
    std::vector<double> types, masses, edges;
    std::vector<double> a, b;
};
customer_grid make_customer_grid(const amazon_spec& s);

/// Platform payoff of a matching (firms x customers), wealth excluded. Empty sets contribute 0.
double amazon_objective(const amazon_spec& s, const matching& mu);

/// Objective of one customer's set given its coefficients.
double set_value(const amazon_spec& s, const firm_grid& f, const std::vector<std::size_t>& set, double a, double b);

struct amazon_outcome {
    firm_grid firms;
    customer_grid customers;
    matching mu;
    std::vector<std::size_t> order;            // firms by descending phi / v (ties: higher v, then index)
    std::vector<std::size_t> pointwise_size;   // best prefix of `order` per customer, no monotonicity
    std::vector<std::size_t> size;             // chosen prefix per customer
    std::vector<double> quality;               // V per customer
    std::vector<double> pointwise_quality;
    std::vector<std::size_t> pools;            // ironing block starts, last entry the length
    std::vector<double> payoff;                // customer payoff: G, v G, or envelope integral of G
    double objective = 0.0;
    bool ratio_monotone = true;             // phi_F / v nondecreasing within every cell
    bool firm_monotone = true;              // firm match quality nondecreasing in v within every cell
    bool customer_ratio_monotone = true;    // two-sided revenue on the private side: phi_I / v nondecreasing
    bool pooled = false;                    // every customer row identical
};

/// Threshold in phi_F / v per customer by scanning prefixes of the ratio order. On the private
/// side the ratio a / b is ironed with weights mass * b before the scan, which pools every
/// customer in welfare mode. Ties go to the shorter prefix.
amazon_outcome solve_amazon(const amazon_spec& s);

/// Best set for one customer over all 2^N subsets (N <= 20), ties to the first found in
/// increasing bitmask order.
struct subset_optimum {
    std::vector<std::size_t> set;
    double value = 0.0;
};
subset_optimum exhaustive_subset(const amazon_spec& s, const firm_grid& f, double a, double b);

/// The platform owns the cell: its firms count at true value. Owning an owned cell is an identity.
amazon_spec acquire_cell(const amazon_spec& s, std::size_t cell);
/// Splits the cell at `split`; a split at either cell bound is an identity. Ownership follows
/// the cell to both halves.
amazon_spec refine_partition(const amazon_spec& s, std::size_t cell, double split);

struct amazon_change {
    enum class kind { acquire, refine };
    kind tag = kind::acquire;
    std::size_t cell = 0;
    double split = 0.0;
};

/// "included" when every customer sees every firm node of the cell, "excluded" when none does,
/// "partial" otherwise, "empty" when the cell holds no node.
std::string cell_status(const amazon_outcome& r, std::size_t cell);

struct amazon_comparison {
    amazon_outcome before, after;
    std::string status;
    std::vector<std::string> relation;  // per customer: after vs before
    std::vector<double> payoff_delta;
    verdict sets;
    verdict welfare;
};

/// Solves before and after the change and checks the direction predictions: an included cell
/// shrinks every set and lowers every payoff, an excluded one grows every set and raises every
/// payoff. Partial inclusion or a non-monotone phi_F / v leaves the claims not applicable.
amazon_comparison amazon_counterfactual(const amazon_spec& s, const amazon_change& c);

std::string describe(const amazon_spec& s);

}  // namespace platmatch
