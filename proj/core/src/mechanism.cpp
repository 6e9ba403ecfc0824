#include "platmatch/mechanism.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/quadrature.hpp"
#include "platmatch/supermodular.hpp"

#include <algorithm>
#include <cmath>

namespace platmatch {

namespace {

constexpr int gl_points = 8;
constexpr int min_panels = 64;

// Ascending panel edges over [lo, hi]: allocation breaks, extra points and a uniform floor.
std::vector<double> panels(const allocation& x, double lo, double hi, const std::vector<double>& extra) {
    std::vector<double> p{lo, hi};
    for (double b : x.breaks())
        if (b > lo && b < hi) p.push_back(b);
    for (double b : extra)
        if (b > lo && b < hi) p.push_back(b);
    for (int k = 1; k < min_panels; ++k) p.push_back(lo + (hi - lo) * k / min_panels);
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

void require_cover(const allocation& x, const distribution& d) {
    if (x.lo() > d.lo() || x.hi() < d.hi()) fail(errc::input, "allocation must cover the type support");
}

// Integrand evaluated strictly inside a panel, where the allocation is continuous.
double marginal(const allocation& x, const payoff_family& u, double t) { return u.d_type(t, x(t)); }

}  // namespace

std::vector<double> envelope_payoffs(const allocation& x, const payoff_family& u, const distribution& d,
                                     const std::vector<double>& grid, double v_low_payoff) {
    require_cover(x, d);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!d.contains(grid[k])) fail(errc::input, "envelope grid point outside the support");
        if (k > 0 && grid[k] < grid[k - 1]) fail(errc::input, "envelope grid must be ascending");
    }
    std::vector<double> out(grid.size());
    if (grid.empty()) return out;
    const auto p = panels(x, d.lo(), grid.back(), grid);
    auto f = [&](double t) { return marginal(x, u, t); };
    double acc = v_low_payoff;
    std::size_t g = 0;
    while (g < grid.size() && grid[g] <= p.front()) out[g++] = acc;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        acc += integrate(f, p[k], p[k + 1], gl_points);
        while (g < grid.size() && grid[g] <= p[k + 1]) out[g++] = acc;
    }
    return out;
}

ic_verdict audit_ic(const std::vector<double>& grid, const std::vector<double>& x, const std::vector<double>& t,
                    const payoff_family& u, double tol) {
    if (grid.size() != x.size() || grid.size() != t.size()) fail(errc::input, "audit columns differ in length");
    ic_verdict out;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double truthful = u.value(grid[a], x[a]) - t[a];
        for (std::size_t b = 0; b < grid.size(); ++b) {
            if (a == b) continue;
            const double gain = u.value(grid[a], x[b]) - t[b] - truthful;
            if (gain > tol && (!out.witness || gain > out.witness->gain)) {
                out.pass = false;
                out.witness = ic_witness{a, b, gain};
            }
        }
    }
    return out;
}

mechanism_report payments_and_revenue(const allocation& x, const payoff_family& u, const distribution& d,
                                      const std::vector<double>& grid) {
    require_cover(x, d);
    if (std::fabs(u.value(d.lo(), 0.0)) > 1e-12) fail(errc::validation, "payoff of the lowest type at size zero must be 0");
    if (!x.nondecreasing()) fail(errc::incentive, "allocation is not monotone in type");

    mechanism_report r;
    r.grid = grid;
    r.envelope = envelope_payoffs(x, u, d, grid, 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        r.quality.push_back(x(grid[k]));
        r.payments.push_back(u.value(grid[k], r.quality.back()) - r.envelope[k]);
    }

    const auto p = panels(x, d.lo(), d.hi(), grid);
    auto f = [&](double t) { return marginal(x, u, t); };
    double v_start = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        const double a = p[k], b = p[k + 1];
        auto paid = [&](double v) {
            double env = v_start + integrate(f, a, v, gl_points);
            return (u.value(v, x(v)) - env) * d.density(v);
        };
        auto virtual_surplus = [&](double v) {
            double xv = x(v);
            return u.value(v, xv) * d.density(v) - (1.0 - d.cdf(v)) * u.d_type(v, xv);
        };
        r.revenue_payments += integrate(paid, a, b, gl_points);
        r.revenue_virtual += integrate(virtual_surplus, a, b, gl_points);
        v_start += integrate(f, a, b, gl_points);
    }
    r.revenue_gap = std::fabs(r.revenue_payments - r.revenue_virtual);
    r.ic = audit_ic(r.grid, r.quality, r.payments, u);
    return r;
}

welfare_preconditions check_welfare_lemma_preconditions(const market_spec& m, const solve_report& r) {
    welfare_preconditions out;
    const std::size_t N = m.n_firms(), M = m.n_individuals();
    if (r.mu.n_firms() != N || r.mu.n_individuals() != M) fail(errc::input, "solve report does not belong to the market");
    agent_order order = r.firm_order.size() == N ? r.firm_order : agent_order::by_keys([&] {
        std::vector<double> v;
        for (const auto& f : m.firms) v.push_back(f.v);
        return v;
    }());
    out.representable = to_thresholds(r.mu, order).representable;
    const std::size_t top = order.ascending.back();
    const auto matched = r.mu.individuals_of(top);
    out.no_exclusion = matched.size() == M;
    if (!matched.empty()) {
        double lowest = HUGE_VAL, highest = -HUGE_VAL;
        for (auto i : matched) lowest = std::min(lowest, m.individuals[i].v);
        for (const auto& ind : m.individuals) highest = std::max(highest, ind.v);
        out.literal_cutoff_at_top = lowest == highest;
    }
    out.top_firm_payoff_increasing = increasing_in_size(m.firm_payoff(top), m.firms[top].v, quality_grid(m));
    out.lowest_individual_payoff_increasing = increasing_in_size(m.u_i, m.individuals.front().v, size_grid(m));
    out.applicable = out.representable && out.no_exclusion && out.top_firm_payoff_increasing &&
                     out.lowest_individual_payoff_increasing;
    if (!out.representable)
        out.reason = "matching is not threshold-representable";
    else if (!out.no_exclusion)
        out.reason = "top firm excludes some individual types";
    else if (!out.top_firm_payoff_increasing)
        out.reason = "top firm payoff is not increasing in match quality";
    else if (!out.lowest_individual_payoff_increasing)
        out.reason = "lowest individual payoff is not increasing in match size";
    return out;
}

}  // namespace platmatch
