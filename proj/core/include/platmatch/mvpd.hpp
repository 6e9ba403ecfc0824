#pragma once

#include "platmatch/compstat.hpp"
#include "platmatch/distribution.hpp"
#include "platmatch/kernel.hpp"
#include "platmatch/market.hpp"
#include "platmatch/matching.hpp"
#include "platmatch/payoff.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace platmatch {

/// A distributor selling nested channel bundles to privately informed viewers.
///
/// Viewer types follow `viewers` and are grouped into `viewer_cells` equal-width cells; a menu
/// assigns each cell a set of channels. Channels have unit salience, so a viewer's match size is
/// the number of channels in the bundle and the kernel is read at integer sizes.
struct mvpd_spec {
    std::vector<firm_type> channels;
    payoff_family u_f;
    std::map<int, payoff_family> channel_payoffs;  // per-channel override of u_f
    size_function g_i;                              // viewer value of a bundle size, g(0) = 0
    distribution viewers = distribution::uniform(0.0, 1.0);
    std::size_t viewer_cells = 20;
    double beta = 0.5;   // bargaining weight of the channel side
    double theta = 0.0;  // share of an owned channel's viewership change the distributor internalizes
    std::optional<int> owned_channel;
    competition_kernel kernel = competition_kernel::constant(1.0);

    std::size_t n_channels() const { return channels.size(); }
    const payoff_family& channel_payoff(std::size_t j) const;
    std::size_t channel_index(int id) const;
};

/// Collects every problem; empty means valid.
std::vector<std::string> validation_errors(const mvpd_spec& s);
void validate(const mvpd_spec& s);

/// Cell boundaries, `viewer_cells + 1` points from the lowest to the highest type.
std::vector<double> cell_bounds(const mvpd_spec& s);
/// Viewer mass of each cell.
std::vector<double> cell_masses(const mvpd_spec& s);
/// Integral of the virtual value over each cell with respect to the viewer distribution.
std::vector<double> cell_virtual_mass(const mvpd_spec& s);

/// Channel indices by descending type (ties by id): position k is the k-th channel of a nested menu.
std::vector<std::size_t> channel_rank(const mvpd_spec& s);

/// Matching of channels (rows) with viewer cells (columns) giving every cell the top `sizes[i]` channels.
matching nested_menu(const mvpd_spec& s, const std::vector<std::size_t>& sizes);
/// Each cell's bundle is a top-k set and sizes are nondecreasing in the viewer type.
bool threshold_representable(const mvpd_spec& s, const matching& mu);

/// Quality of a channel's audience: sum over its cells of mass * h(bundle size).
double channel_quality(const mvpd_spec& s, const matching& mu, std::size_t channel);

/// Revenue from viewer fees: integral of phi(v) g(|s(v)|) dQ. Monotone bundle sizes required.
double viewer_revenue(const mvpd_spec& s, const matching& mu);

/// The same revenue through the mechanism module: envelope payments for U = v g(|s(v)|) on the
/// cell grid. Returns payment-integral and virtual-surplus totals.
struct viewer_revenue_check {
    double by_virtual_value = 0.0;
    double by_payments = 0.0;
    double by_virtual_surplus = 0.0;
    std::vector<double> grid, payments;
};
viewer_revenue_check viewer_revenue_via_payments(const mvpd_spec& s, const matching& mu);

/// Change in viewer revenue when one channel is dropped from every bundle holding it.
struct dropout_report {
    double delta = 0.0;      // over the channel's cells: phi * [g(|s| - 1) - g(|s|)]
    double recomputed = 0.0;  // revenue after the drop minus revenue before
    double gap = 0.0;
};
dropout_report dropout_delta(const mvpd_spec& s, const matching& mu, int channel_id);

/// Bilateral bargaining outcome with one channel: beta * U^F + (1 - beta) * dropout delta.
double nash_fee(const mvpd_spec& s, const matching& mu, int channel_id);

/// Total revenue: beta * sum of channel payoffs plus phi * [g(n) + (1 - beta) n (g(n-1) - g(n))].
/// The same value is recomputed as fees plus viewer revenue; a gap above 1e-8 is a consistency error.
double mvpd_objective(const mvpd_spec& s, const matching& mu);

struct revenue_breakdown {
    double objective = 0.0;      // closed form
    double fee_total = 0.0;
    double viewer_revenue = 0.0;
    double identity_gap = 0.0;   // |objective - fee_total - viewer_revenue|
    std::vector<double> fees;    // per channel in spec order
};
revenue_breakdown revenue_terms(const mvpd_spec& s, const matching& mu);

/// Lemma-style supermodularity condition on the bundle value: x -> g(x) + (1 - beta) x [g(x-1) - g(x)]
/// weakly increasing on the integers of [x_lo, x_hi].
struct gi_verdict {
    bool pass = true;
    bool concave = true;  // g concave on the same integers
    std::optional<double> witness;  // x with E(x + 1) < E(x)
    std::vector<double> values;     // E at x_lo, x_lo + 1, ...
};
gi_verdict check_gi_condition(const size_function& g, double x_lo, double x_hi, double beta, double tol = 1e-12);

/// Objective with an owned channel, written as four terms (owned channel at full weight, the
/// viewer terms, the owned channel's dropout correction, the leverage term over rivals).
struct blr_terms {
    double channel_payoffs = 0.0;
    double viewer_terms = 0.0;
    double owned_correction = 0.0;
    double leverage = 0.0;
    double total = 0.0;
    double by_fees = 0.0;  // rival fees + owned channel payoff + viewer revenue
    double identity_gap = 0.0;
};
blr_terms blr_breakdown(const mvpd_spec& s, const matching& mu);
double blr_objective(const mvpd_spec& s, const matching& mu);

/// Fee of a rival channel when the distributor owns one: the plain fee plus
/// (1 - beta) theta [U^F_owned(without the rival) - U^F_owned].
double blr_fee(const mvpd_spec& s, const matching& mu, int channel_id);

/// Channel-matching market equivalent to the objective on the cell grid: individuals are cells
/// with type equal to their mean virtual value, firm payoffs are scaled by beta (1 for an owned
/// channel). Without an owned channel its platform objective equals mvpd_objective.
market_spec as_market(const mvpd_spec& s);

struct mvpd_outcome {
    matching mu;
    std::vector<std::size_t> bundle_size;             // per cell
    std::vector<std::optional<double>> cutoff;        // per channel: lowest type served
    revenue_breakdown revenue;
    std::optional<blr_terms> blr;
    double objective = 0.0;  // the maximized objective (leverage form when a channel is owned)
    std::vector<double> grid, payments;  // viewer payments at cell bounds
    std::size_t excluded_cells = 0;
    std::uint64_t menus_evaluated = 0;
};

/// Best nested menu by exhaustive enumeration of nondecreasing bundle sizes over the cells.
/// Requires g concave increasing with g(0) = 0 and channel payoffs supermodular and concave in
/// quality (structure errors). Ties go to the lexicographically smallest size vector.
mvpd_outcome solve_mvpd(const mvpd_spec& s, std::uint64_t max_menus = 5'000'000);

struct merger {
    enum class kind { horizontal, vertical };
    kind tag = kind::horizontal;
    std::vector<int> channels;  // merging channels, or the purchased one
    double synergy = 0.0;        // slope increase for a horizontal merger
};

/// Horizontal: slope shift on the merged channels (the channel order must not change).
/// Vertical: the distributor owns the channel.
mvpd_spec merger_transform(const mvpd_spec& s, const merger& m);

struct merger_report {
    mvpd_outcome before, after;
    std::vector<std::string> cell_relation;  // bundle after vs before: "=", "subset", "superset", "incomparable"
    std::vector<double> payoff_before, payoff_after, payoff_delta;  // envelope payoffs at cell bounds
    verdict bundles;  // set-movement prediction
    verdict lower_channels;  // horizontal: channels ranked below every merged channel lose viewers
    verdict welfare;  // payoff-sign prediction
};

/// Solves both specs and checks the predictions that apply: a horizontal merger of the two
/// lowest channels grows every bundle, of the two highest shrinks every bundle; a vertical
/// purchase with theta = 0 and affine g leaves viewers worse off (highest channel, concave
/// payoffs, no exclusion) or better off (lowest channel, affine payoffs).
merger_report merger_counterfactual(const mvpd_spec& s, const merger& m);

std::string describe(const mvpd_spec& s);

}  // namespace platmatch
