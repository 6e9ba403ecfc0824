#include "platmatch/monopcomp.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/market.hpp"
#include "platmatch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace platmatch {

double ces_params::kappa() const {
    return (sigma * (1.0 - theta_ces) - 1.0) / ((1.0 - theta_ces) * (1.0 - sigma));
}

double ces_params::psi() const { return std::pow(markup(), kappa() * (1.0 - sigma)); }

double ces_params::gamma() const { return std::pow(markup(), 1.0 - sigma) - std::pow(markup(), -sigma); }

double ces_params::demand_exponent() const { return (sigma * (1.0 - theta_ces) - 1.0) / (1.0 - theta_ces); }

double ces_params::spending_exponent() const { return theta_ces / (theta_ces - 1.0); }

std::vector<std::string> validation_errors(const ces_params& c) {
    std::vector<std::string> out;
    if (!(std::isfinite(c.sigma) && c.sigma > 1.0)) out.push_back("sigma must exceed 1");
    if (!(c.theta_ces > 0.0 && c.theta_ces < 1.0)) out.push_back("theta must lie in (0, 1)");
    if (out.empty() && !(c.sigma * (1.0 - c.theta_ces) > 1.0))
        out.push_back("sigma * (1 - theta) must exceed 1");
    if (c.wealth && !(std::isfinite(*c.wealth) && *c.wealth >= 0.0)) out.push_back("wealth must be nonnegative");
    return out;
}

namespace {

std::string join(const std::vector<std::string>& errs) {
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    return msg;
}

}  // namespace

void validate(const ces_params& c) {
    auto errs = validation_errors(c);
    if (!errs.empty()) fail(errc::validation, join(errs));
}

ces_quantities ces_demand(const std::vector<double>& prices, const ces_params& ces, const std::vector<double>& weights,
                          double v_i) {
    validate(ces);
    if (!weights.empty() && weights.size() != prices.size()) fail(errc::input, "prices and weights differ in length");
    if (!(v_i > 0.0 && std::isfinite(v_i))) fail(errc::input, "customer type must be positive");
    ces_quantities out;
    out.prices = prices;
    double sum = 0.0;
    for (std::size_t j = 0; j < prices.size(); ++j) {
        const double w = weights.empty() ? 1.0 : weights[j];
        if (!(prices[j] > 0.0 && std::isfinite(prices[j]))) fail(errc::input, "prices must be positive");
        if (!(w > 0.0 && std::isfinite(w))) fail(errc::input, "variety masses must be positive");
        sum += w * std::pow(prices[j], 1.0 - ces.sigma);
    }
    if (prices.empty()) {
        out.price_index = std::numeric_limits<double>::infinity();
        out.wealth = ces.wealth.value_or(0.0);
        out.money = out.wealth;
        out.utility = out.wealth;
        return out;
    }
    out.price_index = std::pow(sum, 1.0 / (1.0 - ces.sigma));
    const double shift = v_i * std::pow(out.price_index, ces.demand_exponent());
    for (std::size_t j = 0; j < prices.size(); ++j) {
        const double w = weights.empty() ? 1.0 : weights[j];
        out.quantities.push_back(std::pow(prices[j], -ces.sigma) * shift);
        out.spending += w * prices[j] * out.quantities.back();
    }
    out.wealth = ces.wealth.value_or(2.0 * out.spending);
    out.money = out.wealth - out.spending;
    if (out.money < 0.0)
        fail(errc::structure, "wealth " + std::to_string(out.wealth) + " is below spending " +
                                  std::to_string(out.spending) + "; money holdings would be negative");
    const double goods = std::pow(out.price_index, ces.spending_exponent());
    out.utility = v_i * (1.0 - ces.theta_ces) / ces.theta_ces * goods + out.wealth;
    return out;
}

double markup_price(double c, double sigma) {
    if (!(c > 0.0 && std::isfinite(c))) fail(errc::input, "marginal cost must be positive");
    if (!(sigma > 1.0)) fail(errc::input, "sigma must exceed 1");
    return sigma * c / (sigma - 1.0);
}

markup_check markup_grid_check(double c, double sigma, double demand_shift, std::size_t points, double tol) {
    if (points < 2) fail(errc::input, "grid needs at least two points");
    auto profit = [&](double p) {
        return std::pow(p, 1.0 - sigma) * demand_shift - c * std::pow(p, -sigma) * demand_shift;
    };
    markup_check out;
    out.price = markup_price(c, sigma);
    out.profit = profit(out.price);
    out.best_grid_profit = -std::numeric_limits<double>::infinity();
    for (double p : linspace(0.2 * out.price, 5.0 * out.price, points)) {
        const double v = profit(p);
        if (v > out.best_grid_profit) {
            out.best_grid_profit = v;
            out.best_grid_price = p;
        }
    }
    out.pass = out.best_grid_profit - out.profit <= tol;
    return out;
}

double salience_kernel(double quality, const ces_params& ces, double v_i) {
    if (!(quality > 0.0 && std::isfinite(quality)))
        fail(errc::input, "salience needs a positive match quality, got " + std::to_string(quality));
    return v_i * ces.psi() * std::pow(quality, ces.kappa());
}

double customer_value(double quality, const ces_params& ces) {
    if (!(quality >= 0.0 && std::isfinite(quality))) fail(errc::input, "match quality must be nonnegative");
    if (quality == 0.0) return 0.0;
    const double th = ces.theta_ces;
    const double exponent = th / ((th - 1.0) * (1.0 - ces.sigma));
    return (1.0 - th) / th * std::pow(ces.markup(), th / (th - 1.0)) * std::pow(quality, exponent);
}

double cost_of_type(double v, double sigma) {
    if (!(v > 0.0)) fail(errc::input, "firm type must be positive");
    return std::pow(v, 1.0 / (1.0 - sigma));
}

double type_of_cost(double c, double sigma) {
    if (!(c > 0.0)) fail(errc::input, "marginal cost must be positive");
    return std::pow(c, 1.0 - sigma);
}

std::string to_string(customer_side s) {
    switch (s) {
        case customer_side::homogeneous: return "homogeneous";
        case customer_side::observed: return "observed";
        case customer_side::private_info: return "private";
    }
    return "?";
}

std::string to_string(amazon_mode m) {
    return m == amazon_mode::welfare_revenue ? "welfare_revenue" : "two_sided_revenue";
}

partition amazon_spec::effective_cells() const { return cells.bounds.empty() ? partition::trivial(firms) : cells; }

std::vector<std::string> validation_errors(const amazon_spec& s) {
    auto out = validation_errors(s.ces);
    if (!(s.firms.lo() >= 0.0)) out.push_back("firm types must be nonnegative (v = c^(1 - sigma))");
    if (s.firm_nodes == 0) out.push_back("firm_nodes must be positive");
    const auto p = s.effective_cells();
    if (p.bounds.size() < 2) {
        out.push_back("partition needs at least one cell");
    } else {
        for (std::size_t k = 1; k < p.bounds.size(); ++k)
            if (!(p.bounds[k] > p.bounds[k - 1])) {
                out.push_back("partition bounds must be strictly increasing");
                break;
            }
        if (p.bounds.front() != s.firms.lo() || p.bounds.back() != s.firms.hi())
            out.push_back("partition must cover the firm support exactly");
    }
    for (std::size_t k : s.owned)
        if (k >= p.cells()) out.push_back("owned cell " + std::to_string(k) + " is not a partition cell");
    if (s.side != customer_side::homogeneous) {
        if (!(s.customers.lo() > 0.0)) out.push_back("customer types must be positive");
        if (s.customer_nodes == 0) out.push_back("customer_nodes must be positive");
    }
    return out;
}

void validate(const amazon_spec& s) {
    auto errs = validation_errors(s);
    if (!errs.empty()) fail(errc::validation, join(errs));
}

firm_grid make_firm_grid(const amazon_spec& s) {
    const auto p = s.effective_cells();
    const auto edges = linspace(s.firms.lo(), s.firms.hi(), s.firm_nodes + 1);
    firm_grid f;
    for (std::size_t j = 0; j < s.firm_nodes; ++j) {
        const double v = 0.5 * (edges[j] + edges[j + 1]);
        const std::size_t cell = p.cell_of(v);
        f.types.push_back(v);
        f.weights.push_back(s.firms.cdf(edges[j + 1]) - s.firms.cdf(edges[j]));
        f.cell.push_back(cell);
        f.virtual_values.push_back(s.owned.count(cell) ? v : cell_virtual_value(s.firms, p, v));
    }
    return f;
}

customer_grid make_customer_grid(const amazon_spec& s) {
    customer_grid c;
    if (s.side == customer_side::homogeneous) {
        c.types = {1.0};
        c.masses = {1.0};
        c.a = {1.0};
        c.b = {1.0};
        return c;
    }
    c.edges = linspace(s.customers.lo(), s.customers.hi(), s.customer_nodes + 1);
    for (std::size_t i = 0; i < s.customer_nodes; ++i) {
        const double v = 0.5 * (c.edges[i] + c.edges[i + 1]);
        c.types.push_back(v);
        c.masses.push_back(s.customers.cdf(c.edges[i + 1]) - s.customers.cdf(c.edges[i]));
        c.b.push_back(v);
        if (s.side == customer_side::observed)
            c.a.push_back(v);
        else if (s.mode == amazon_mode::welfare_revenue)
            c.a.push_back(1.0 - s.customers.cdf(v));
        else
            c.a.push_back(virtual_value(s.customers, v));
    }
    return c;
}

double set_value(const amazon_spec& s, const firm_grid& f, const std::vector<std::size_t>& set, double a, double b) {
    double quality = 0.0, virt = 0.0;
    for (std::size_t j : set) {
        quality += f.types.at(j) * f.weights.at(j);
        virt += f.virtual_values.at(j) * f.weights.at(j);
    }
    if (set.empty() || quality <= 0.0) return 0.0;
    return a * customer_value(quality, s.ces) + b * s.ces.gamma() * salience_kernel(quality, s.ces) * virt;
}

double amazon_objective(const amazon_spec& s, const matching& mu) {
    validate(s);
    const auto f = make_firm_grid(s);
    const auto c = make_customer_grid(s);
    if (mu.n_firms() != f.types.size() || mu.n_individuals() != c.types.size())
        fail(errc::input, "matching dimensions do not match the discretized scenario");
    double total = 0.0;
    for (std::size_t i = 0; i < c.types.size(); ++i) total += c.masses[i] * set_value(s, f, mu.firms_of(i), c.a[i], c.b[i]);
    return total;
}

namespace {

struct prefix_table {
    std::vector<double> quality, virt;  // cumulative over the ratio order, entry k covers k firms
};

prefix_table prefixes(const firm_grid& f, const std::vector<std::size_t>& order) {
    prefix_table t;
    t.quality.push_back(0.0);
    t.virt.push_back(0.0);
    for (std::size_t j : order) {
        t.quality.push_back(t.quality.back() + f.types[j] * f.weights[j]);
        t.virt.push_back(t.virt.back() + f.virtual_values[j] * f.weights[j]);
    }
    return t;
}

std::size_t best_prefix(const amazon_spec& s, const prefix_table& t, double a, double b) {
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t k = 1; k < t.quality.size(); ++k) {
        if (!(t.quality[k] > 0.0)) continue;
        const double v = a * customer_value(t.quality[k], s.ces) +
                         b * s.ces.gamma() * salience_kernel(t.quality[k], s.ces) * t.virt[k];
        if (v > best_value + 1e-12 * (1.0 + std::fabs(best_value))) {
            best = k;
            best_value = v;
        }
    }
    return best;
}

bool nondecreasing_within_cells(const firm_grid& f, const std::vector<double>& values, double tol) {
    for (std::size_t j = 1; j < values.size(); ++j)
        if (f.cell[j] == f.cell[j - 1] && values[j] < values[j - 1] - tol) return false;
    return true;
}

}  // namespace

amazon_outcome solve_amazon(const amazon_spec& s) {
    validate(s);
    amazon_outcome r;
    r.firms = make_firm_grid(s);
    r.customers = make_customer_grid(s);
    const auto& f = r.firms;
    const auto& c = r.customers;
    const std::size_t n = f.types.size(), m = c.types.size();

    r.order.resize(n);
    std::iota(r.order.begin(), r.order.end(), 0);
    std::vector<double> ratio(n);
    for (std::size_t j = 0; j < n; ++j) ratio[j] = f.virtual_values[j] / f.types[j];
    std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t x, std::size_t y) {
        if (ratio[x] != ratio[y]) return ratio[x] > ratio[y];
        return f.types[x] > f.types[y];
    });
    r.ratio_monotone = nondecreasing_within_cells(f, ratio, 1e-12);

    const auto table = prefixes(f, r.order);
    for (std::size_t i = 0; i < m; ++i) {
        r.pointwise_size.push_back(best_prefix(s, table, c.a[i], c.b[i]));
        r.pointwise_quality.push_back(table.quality[r.pointwise_size.back()]);
    }

    if (s.side == customer_side::private_info) {
        std::vector<double> rr(m), weight(m);
        for (std::size_t i = 0; i < m; ++i) {
            rr[i] = c.a[i] / c.b[i];
            weight[i] = c.masses[i] * c.b[i];
        }
        if (s.mode == amazon_mode::two_sided_revenue)
            for (std::size_t i = 1; i < m; ++i)
                if (rr[i] < rr[i - 1] - 1e-12) r.customer_ratio_monotone = false;
        r.pools = iron_blocks(rr, weight);
        r.size.assign(m, 0);
        for (std::size_t b = 0; b + 1 < r.pools.size(); ++b) {
            double pa = 0.0, pb = 0.0;
            for (std::size_t i = r.pools[b]; i < r.pools[b + 1]; ++i) {
                pa += c.masses[i] * c.a[i];
                pb += c.masses[i] * c.b[i];
            }
            const std::size_t k = best_prefix(s, table, pa, pb);
            for (std::size_t i = r.pools[b]; i < r.pools[b + 1]; ++i) r.size[i] = k;
        }
    } else {
        r.size = r.pointwise_size;
        for (std::size_t i = 0; i <= m; ++i) r.pools.push_back(i);
    }

    r.mu = matching(n, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < r.size[i]; ++k) r.mu.set(r.order[k], i, true);
        r.quality.push_back(table.quality[r.size[i]]);
        r.objective += c.masses[i] * set_value(s, f, r.mu.firms_of(i), c.a[i], c.b[i]);
    }

    std::vector<double> firm_quality(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (r.size[i] == 0) continue;
        const double h = salience_kernel(r.quality[i], s.ces, c.b[i]);
        for (std::size_t k = 0; k < r.size[i]; ++k) firm_quality[r.order[k]] += c.masses[i] * h;
    }
    r.firm_monotone = nondecreasing_within_cells(f, firm_quality, 1e-12);

    r.pooled = true;
    for (std::size_t i = 1; i < m; ++i)
        if (r.size[i] != r.size[0]) r.pooled = false;

    switch (s.side) {
        case customer_side::homogeneous:
            r.payoff.push_back(customer_value(r.quality[0], s.ces));
            break;
        case customer_side::observed:
            for (std::size_t i = 0; i < m; ++i) r.payoff.push_back(c.types[i] * customer_value(r.quality[i], s.ces));
            break;
        case customer_side::private_info: {
            double at_edge = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double g = customer_value(r.quality[i], s.ces);
                r.payoff.push_back(at_edge + g * (c.types[i] - c.edges[i]));
                at_edge += g * (c.edges[i + 1] - c.edges[i]);
            }
            break;
        }
    }
    return r;
}

subset_optimum exhaustive_subset(const amazon_spec& s, const firm_grid& f, double a, double b) {
    const std::size_t n = f.types.size();
    if (n > 20) fail(errc::size, "exhaustive subset search is capped at 20 firms");
    subset_optimum best;
    std::vector<std::size_t> set;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        set.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (mask >> j & 1U) set.push_back(j);
        const double v = set_value(s, f, set, a, b);
        if (v > best.value) {
            best.value = v;
            best.set = set;
        }
    }
    return best;
}

amazon_spec acquire_cell(const amazon_spec& s, std::size_t cell) {
    if (cell >= s.effective_cells().cells()) fail(errc::input, "cell " + std::to_string(cell) + " does not exist");
    amazon_spec out = s;
    out.owned.insert(cell);
    return out;
}

amazon_spec refine_partition(const amazon_spec& s, std::size_t cell, double split) {
    const auto p = s.effective_cells();
    if (cell >= p.cells()) fail(errc::input, "cell " + std::to_string(cell) + " does not exist");
    const double lo = p.bounds[cell], hi = p.bounds[cell + 1];
    if (!(split >= lo && split <= hi))
        fail(errc::input, "split " + std::to_string(split) + " lies outside cell [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    if (split == lo || split == hi) return s;
    amazon_spec out = s;
    out.cells = p;
    out.cells.bounds.insert(out.cells.bounds.begin() + static_cast<std::ptrdiff_t>(cell) + 1, split);
    out.owned.clear();
    for (std::size_t k : s.owned) {
        if (k < cell) {
            out.owned.insert(k);
        } else if (k == cell) {
            out.owned.insert(k);
            out.owned.insert(k + 1);
        } else {
            out.owned.insert(k + 1);
        }
    }
    return out;
}

std::string cell_status(const amazon_outcome& r, std::size_t cell) {
    std::size_t nodes = 0, pairs = 0, matched = 0;
    for (std::size_t j = 0; j < r.firms.cell.size(); ++j) {
        if (r.firms.cell[j] != cell) continue;
        ++nodes;
        for (std::size_t i = 0; i < r.customers.types.size(); ++i) {
            if (!(r.customers.masses[i] > 0.0)) continue;
            ++pairs;
            if (r.mu.at(j, i)) ++matched;
        }
    }
    if (nodes == 0) return "empty";
    if (matched == pairs) return "included";
    if (matched == 0) return "excluded";
    return "partial";
}

amazon_comparison amazon_counterfactual(const amazon_spec& s, const amazon_change& change) {
    amazon_comparison out;
    out.before = solve_amazon(s);
    out.status = cell_status(out.before, change.cell);
    const amazon_spec next =
        change.tag == amazon_change::kind::acquire ? acquire_cell(s, change.cell)
                                                   : refine_partition(s, change.cell, change.split);
    out.after = solve_amazon(next);

    const std::size_t m = out.before.customers.types.size();
    for (std::size_t i = 0; i < m; ++i) {
        out.relation.push_back(set_relation(out.before.mu.firms_of(i), out.after.mu.firms_of(i)));
        out.payoff_delta.push_back(out.after.payoff[i] - out.before.payoff[i]);
    }

    const bool included = out.status == "included";
    out.sets.claim = included ? "included_change_shrinks_sets" : "excluded_change_grows_sets";
    out.welfare.claim = included ? "included_change_lowers_payoffs" : "excluded_change_raises_payoffs";

    std::string blocked;
    if (out.status != "included" && out.status != "excluded")
        blocked = "cell is " + out.status + ", so neither direction is predicted";
    else if (!out.before.ratio_monotone || !out.after.ratio_monotone)
        blocked = "phi_F / v is not increasing within every cell";
    else if (!out.before.customer_ratio_monotone || !out.after.customer_ratio_monotone)
        blocked = "phi_I / v is not increasing";
    if (!blocked.empty()) {
        out.sets.status = out.welfare.status = verdict_status::not_applicable;
        out.sets.detail = out.welfare.detail = blocked;
        return out;
    }

    const std::string expected = included ? "subset" : "superset";
    std::vector<std::string> bad_sets, bad_payoffs;
    for (std::size_t i = 0; i < m; ++i) {
        if (out.relation[i] != "=" && out.relation[i] != expected)
            bad_sets.push_back("customer " + std::to_string(i) + ": " + out.relation[i]);
        const double tol = 1e-9 * (1.0 + std::fabs(out.before.payoff[i]));
        const double d = out.payoff_delta[i];
        if (included ? d > tol : d < -tol) {
            std::ostringstream os;
            os << "customer " << i << ": payoff change " << d;
            bad_payoffs.push_back(os.str());
        }
    }
    auto settle = [](verdict& v, const std::vector<std::string>& bad) {
        v.status = bad.empty() ? verdict_status::pass : verdict_status::fail;
        v.detail = bad.empty() ? "every customer moves as predicted" : join(bad);
    };
    settle(out.sets, bad_sets);
    settle(out.welfare, bad_payoffs);
    return out;
}

std::string describe(const amazon_spec& s) {
    std::ostringstream os;
    os.precision(6);
    os << "retail platform: sigma " << s.ces.sigma << ", theta " << s.ces.theta_ces << ", kappa " << s.ces.kappa()
       << ", psi " << s.ces.psi() << ", gamma " << s.ces.gamma() << "\n";
    os << "firms: " << describe(s.firms) << " on " << s.firm_nodes << " nodes, cells";
    for (double b : s.effective_cells().bounds) os << ' ' << b;
    os << ", owned {";
    for (auto it = s.owned.begin(); it != s.owned.end(); ++it) os << (it == s.owned.begin() ? "" : ", ") << *it;
    os << "}\n";
    os << "customers: " << to_string(s.side);
    if (s.side != customer_side::homogeneous) os << ", " << describe(s.customers) << " on " << s.customer_nodes << " nodes";
    os << ", objective " << to_string(s.mode) << "\n";
    return os.str();
}

}  // namespace platmatch
