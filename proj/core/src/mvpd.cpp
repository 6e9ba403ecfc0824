#include "platmatch/mvpd.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace platmatch {

const payoff_family& mvpd_spec::channel_payoff(std::size_t j) const {
    auto it = channel_payoffs.find(channels.at(j).id);
    return it == channel_payoffs.end() ? u_f : it->second;
}

std::size_t mvpd_spec::channel_index(int id) const {
    for (std::size_t j = 0; j < channels.size(); ++j)
        if (channels[j].id == id) return j;
    fail(errc::input, "unknown channel id " + std::to_string(id));
}

std::vector<std::string> validation_errors(const mvpd_spec& s) {
    std::vector<std::string> out;
    if (s.channels.empty()) out.push_back("at least one channel is required");
    std::set<int> ids;
    for (const auto& c : s.channels) {
        const std::string tag = "channel " + std::to_string(c.id);
        if (!ids.insert(c.id).second) out.push_back(tag + ": duplicate id");
        if (!std::isfinite(c.v)) out.push_back(tag + ": type must be finite");
        if (c.sigma != 1.0) out.push_back(tag + ": channels have unit salience");
    }
    for (const auto& [id, u] : s.channel_payoffs)
        if (!ids.count(id)) out.push_back("payoff override for unknown channel " + std::to_string(id));
    if (!(s.beta >= 0.0 && s.beta <= 1.0)) out.push_back("beta must lie in [0, 1]");
    if (!(s.theta >= 0.0 && s.theta <= 1.0)) out.push_back("theta must lie in [0, 1]");
    if (s.viewer_cells == 0) out.push_back("viewer_cells must be positive");
    if (std::fabs(s.g_i(0.0)) > 1e-12) out.push_back("g_I(0) must be 0");
    if (s.owned_channel && !ids.count(*s.owned_channel))
        out.push_back("owned channel " + std::to_string(*s.owned_channel) + " is not a channel");
    for (std::size_t n = 0; n <= s.channels.size(); ++n)
        if (!(s.kernel(static_cast<double>(n), 1.0, 1.0) >= 0.0)) {
            out.push_back("kernel must be nonnegative at bundle size " + std::to_string(n));
            break;
        }
    return out;
}

void validate(const mvpd_spec& s) {
    auto errs = validation_errors(s);
    if (errs.empty()) return;
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    fail(errc::validation, msg);
}

std::vector<double> cell_bounds(const mvpd_spec& s) {
    return linspace(s.viewers.lo(), s.viewers.hi(), s.viewer_cells + 1);
}

std::vector<double> cell_masses(const mvpd_spec& s) {
    auto b = cell_bounds(s);
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back(s.viewers.cdf(b[i + 1]) - s.viewers.cdf(b[i]));
    return out;
}

std::vector<double> cell_virtual_mass(const mvpd_spec& s) {
    // d/dv [-v (1 - Q(v))] = v q(v) - (1 - Q(v)), so the integral of phi dQ over [a, b] is exact.
    auto b = cell_bounds(s);
    auto tail = [&](double v) { return v * (1.0 - s.viewers.cdf(v)); };
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back(tail(b[i]) - tail(b[i + 1]));
    return out;
}

std::vector<std::size_t> channel_rank(const mvpd_spec& s) {
    std::vector<std::size_t> r(s.n_channels());
    std::iota(r.begin(), r.end(), 0);
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
        if (s.channels[a].v != s.channels[b].v) return s.channels[a].v > s.channels[b].v;
        return s.channels[a].id < s.channels[b].id;
    });
    return r;
}

matching nested_menu(const mvpd_spec& s, const std::vector<std::size_t>& sizes) {
    if (sizes.size() != s.viewer_cells) fail(errc::input, "menu needs one bundle size per viewer cell");
    const auto rank = channel_rank(s);
    matching mu(s.n_channels(), s.viewer_cells);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] > s.n_channels()) fail(errc::input, "bundle size exceeds the number of channels");
        for (std::size_t k = 0; k < sizes[i]; ++k) mu.set(rank[k], i, true);
    }
    return mu;
}

namespace {

void check_shape(const mvpd_spec& s, const matching& mu) {
    if (mu.n_firms() != s.n_channels() || mu.n_individuals() != s.viewer_cells)
        fail(errc::input, "matching shape does not match channels x viewer cells");
}

std::vector<std::size_t> bundle_sizes(const matching& mu) {
    std::vector<std::size_t> n(mu.n_individuals());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = mu.firms_of(i).size();
    return n;
}

double raw_viewer_revenue(const mvpd_spec& s, const std::vector<std::size_t>& sizes) {
    const auto phi = cell_virtual_mass(s);
    double r = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) r += phi[i] * s.g_i(static_cast<double>(sizes[i]));
    return r;
}

void require_monotone(const std::vector<std::size_t>& sizes) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] < sizes[i - 1])
            fail(errc::incentive, "bundle sizes must be nondecreasing in the viewer type");
}

// g(n - 1) - g(n), the value lost by one fewer channel.
double loss(const mvpd_spec& s, std::size_t n) {
    return s.g_i(static_cast<double>(n) - 1.0) - s.g_i(static_cast<double>(n));
}

double bundle_term(const mvpd_spec& s, std::size_t n) {
    if (n == 0) return s.g_i(0.0);
    return s.g_i(static_cast<double>(n)) + (1.0 - s.beta) * static_cast<double>(n) * loss(s, n);
}

double owned_quality_without(const mvpd_spec& s, const matching& mu, std::size_t owned, std::size_t dropped) {
    const auto mass = cell_masses(s);
    double q = 0.0;
    for (std::size_t i = 0; i < mu.n_individuals(); ++i) {
        if (!mu.at(owned, i)) continue;
        double n = static_cast<double>(mu.firms_of(i).size()) - (mu.at(dropped, i) ? 1.0 : 0.0);
        q += mass[i] * s.kernel(n, 1.0, 1.0);
    }
    return q;
}

double channel_value(const mvpd_spec& s, const matching& mu, std::size_t j) {
    return s.channel_payoff(j).value(s.channels[j].v, channel_quality(s, mu, j));
}

double leverage_term(const mvpd_spec& s, const matching& mu, std::size_t owned, std::size_t rival) {
    const payoff_family& u = s.channel_payoff(owned);
    const double v = s.channels[owned].v;
    return (1.0 - s.beta) * s.theta *
           (u.value(v, owned_quality_without(s, mu, owned, rival)) - u.value(v, channel_quality(s, mu, owned)));
}

}  // namespace

bool threshold_representable(const mvpd_spec& s, const matching& mu) {
    check_shape(s, mu);
    const auto rank = channel_rank(s);
    auto sizes = bundle_sizes(mu);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0 && sizes[i] < sizes[i - 1]) return false;
        for (std::size_t k = 0; k < sizes[i]; ++k)
            if (!mu.at(rank[k], i)) return false;
    }
    return true;
}

double channel_quality(const mvpd_spec& s, const matching& mu, std::size_t channel) {
    check_shape(s, mu);
    const auto mass = cell_masses(s);
    double q = 0.0;
    for (std::size_t i = 0; i < mu.n_individuals(); ++i)
        if (mu.at(channel, i)) q += mass[i] * s.kernel(static_cast<double>(mu.firms_of(i).size()), 1.0, 1.0);
    return q;
}

double viewer_revenue(const mvpd_spec& s, const matching& mu) {
    check_shape(s, mu);
    auto sizes = bundle_sizes(mu);
    require_monotone(sizes);
    return raw_viewer_revenue(s, sizes);
}

viewer_revenue_check viewer_revenue_via_payments(const mvpd_spec& s, const matching& mu) {
    check_shape(s, mu);
    auto sizes = bundle_sizes(mu);
    require_monotone(sizes);
    const auto b = cell_bounds(s);
    std::vector<double> knots(b.begin(), b.end() - 1), xs;
    for (auto n : sizes) xs.push_back(s.g_i(static_cast<double>(n)));
    auto x = allocation::step(knots, xs, b.back());
    auto rep = payments_and_revenue(x, payoff_family::product(size_function::identity()), s.viewers, b);
    viewer_revenue_check out;
    out.by_virtual_value = raw_viewer_revenue(s, sizes);
    out.by_payments = rep.revenue_payments;
    out.by_virtual_surplus = rep.revenue_virtual;
    out.grid = rep.grid;
    out.payments = rep.payments;
    return out;
}

dropout_report dropout_delta(const mvpd_spec& s, const matching& mu, int channel_id) {
    check_shape(s, mu);
    const std::size_t j = s.channel_index(channel_id);
    const auto phi = cell_virtual_mass(s);
    dropout_report out;
    auto sizes = bundle_sizes(mu);
    auto dropped = sizes;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!mu.at(j, i)) continue;
        out.delta += phi[i] * loss(s, sizes[i]);
        --dropped[i];
    }
    out.recomputed = raw_viewer_revenue(s, dropped) - raw_viewer_revenue(s, sizes);
    out.gap = std::fabs(out.delta - out.recomputed);
    return out;
}

double nash_fee(const mvpd_spec& s, const matching& mu, int channel_id) {
    const std::size_t j = s.channel_index(channel_id);
    return s.beta * channel_value(s, mu, j) + (1.0 - s.beta) * dropout_delta(s, mu, channel_id).delta;
}

revenue_breakdown revenue_terms(const mvpd_spec& s, const matching& mu) {
    check_shape(s, mu);
    revenue_breakdown r;
    const auto phi = cell_virtual_mass(s);
    auto sizes = bundle_sizes(mu);
    for (std::size_t j = 0; j < s.n_channels(); ++j) r.objective += s.beta * channel_value(s, mu, j);
    for (std::size_t i = 0; i < sizes.size(); ++i) r.objective += phi[i] * bundle_term(s, sizes[i]);
    for (const auto& c : s.channels) {
        r.fees.push_back(nash_fee(s, mu, c.id));
        r.fee_total += r.fees.back();
    }
    r.viewer_revenue = raw_viewer_revenue(s, sizes);
    r.identity_gap = std::fabs(r.objective - r.fee_total - r.viewer_revenue);
    return r;
}

double mvpd_objective(const mvpd_spec& s, const matching& mu) {
    auto r = revenue_terms(s, mu);
    if (r.identity_gap > 1e-8 * std::max(1.0, std::fabs(r.objective)))
        fail(errc::consistency, "revenue identity fails: objective and fees plus viewer revenue differ by " +
                                    std::to_string(r.identity_gap));
    return r.objective;
}

gi_verdict check_gi_condition(const size_function& g, double x_lo, double x_hi, double beta, double tol) {
    if (!(x_hi >= x_lo)) fail(errc::input, "empty range for the bundle value check");
    gi_verdict out;
    const long lo = static_cast<long>(std::ceil(x_lo)), hi = static_cast<long>(std::floor(x_hi));
    for (long x = lo; x <= hi; ++x) {
        const double xd = static_cast<double>(x);
        out.values.push_back(g(xd) + (1.0 - beta) * xd * (g(xd - 1.0) - g(xd)));
        if (x > lo && x < hi) {
            const double second = g(xd + 1.0) - 2.0 * g(xd) + g(xd - 1.0);
            if (second > tol * std::max(1.0, std::fabs(g(xd)))) out.concave = false;
        }
    }
    for (std::size_t k = 1; k < out.values.size(); ++k)
        if (out.values[k] < out.values[k - 1] - tol * std::max(1.0, std::fabs(out.values[k - 1]))) {
            out.pass = false;
            if (!out.witness) out.witness = static_cast<double>(lo) + static_cast<double>(k - 1);
        }
    return out;
}

blr_terms blr_breakdown(const mvpd_spec& s, const matching& mu) {
    check_shape(s, mu);
    if (!s.owned_channel) fail(errc::input, "no owned channel");
    const std::size_t o = s.channel_index(*s.owned_channel);
    const auto phi = cell_virtual_mass(s);
    auto sizes = bundle_sizes(mu);
    blr_terms t;
    for (std::size_t j = 0; j < s.n_channels(); ++j)
        t.channel_payoffs += (j == o ? 1.0 : s.beta) * channel_value(s, mu, j);
    for (std::size_t i = 0; i < sizes.size(); ++i) t.viewer_terms += phi[i] * bundle_term(s, sizes[i]);
    t.owned_correction = -(1.0 - s.beta) * dropout_delta(s, mu, *s.owned_channel).delta;
    for (std::size_t j = 0; j < s.n_channels(); ++j)
        if (j != o) t.leverage += leverage_term(s, mu, o, j);
    t.total = t.channel_payoffs + t.viewer_terms + t.owned_correction + t.leverage;

    t.by_fees = channel_value(s, mu, o) + raw_viewer_revenue(s, sizes);
    for (const auto& c : s.channels)
        if (c.id != *s.owned_channel) t.by_fees += blr_fee(s, mu, c.id);
    t.identity_gap = std::fabs(t.total - t.by_fees);
    return t;
}

double blr_objective(const mvpd_spec& s, const matching& mu) {
    auto t = blr_breakdown(s, mu);
    if (t.identity_gap > 1e-8 * std::max(1.0, std::fabs(t.total)))
        fail(errc::consistency, "owned-channel revenue identity fails by " + std::to_string(t.identity_gap));
    return t.total;
}

double blr_fee(const mvpd_spec& s, const matching& mu, int channel_id) {
    if (!s.owned_channel) fail(errc::input, "no owned channel");
    if (channel_id == *s.owned_channel) fail(errc::input, "the owned channel has no fee");
    const std::size_t o = s.channel_index(*s.owned_channel), j = s.channel_index(channel_id);
    return nash_fee(s, mu, channel_id) + leverage_term(s, mu, o, j);
}

market_spec as_market(const mvpd_spec& s) {
    validate(s);
    market_spec m;
    for (const auto& c : s.channels) {
        m.firms.push_back({c.id, c.v, 1.0});
        const double w = s.owned_channel && *s.owned_channel == c.id ? 1.0 : s.beta;
        m.firm_payoffs[c.id] = s.channel_payoff(s.channel_index(c.id)).scaled(w);
    }
    m.u_f = s.u_f.scaled(s.beta);
    const auto mass = cell_masses(s);
    const auto phi = cell_virtual_mass(s);
    for (std::size_t i = 0; i < s.viewer_cells; ++i) {
        if (!(mass[i] > 0.0)) fail(errc::structure, "viewer cell " + std::to_string(i) + " has no mass");
        const double mean = phi[i] / mass[i];
        if (i > 0 && mean < m.individuals.back().v)
            fail(errc::structure, "mean virtual values are not increasing across cells (irregular distribution)");
        m.individuals.push_back({static_cast<int>(i + 1), mean, 1.0, mass[i]});
    }
    std::vector<double> ns, terms;
    for (std::size_t n = 0; n <= s.n_channels(); ++n) {
        ns.push_back(static_cast<double>(n));
        terms.push_back(bundle_term(s, n));
    }
    if (ns.size() == 1) {
        ns.push_back(1.0);
        terms.push_back(terms.back());
    }
    m.u_i = payoff_family::product(size_function::table(ns, terms));
    m.kernel = s.kernel;
    return m;
}

namespace {

// Concavity and increasing differences of the channel payoffs on the reachable quality range.
void check_channel_payoffs(const mvpd_spec& s) {
    double hmax = 0.0;
    for (std::size_t n = 0; n <= s.n_channels(); ++n) hmax = std::max(hmax, s.kernel(static_cast<double>(n), 1.0, 1.0));
    const auto xs = linspace(0.0, std::max(hmax, 1e-9), 33);
    for (std::size_t j = 0; j < s.n_channels(); ++j)
        if (!concave_in_size(s.channel_payoff(j), s.channels[j].v, xs, 1e-9))
            fail(errc::structure, "channel " + std::to_string(s.channels[j].id) + " payoff is not concave in quality");
    const auto rank = channel_rank(s);
    for (std::size_t k = 0; k + 1 < rank.size(); ++k) {
        const std::size_t hi = rank[k], lo = rank[k + 1];
        const double vh = s.channels[hi].v, vl = s.channels[lo].v;
        for (std::size_t t = 0; t + 1 < xs.size(); ++t) {
            const double dh = s.channel_payoff(hi).value(vh, xs[t + 1]) - s.channel_payoff(hi).value(vh, xs[t]);
            const double dl = s.channel_payoff(lo).value(vl, xs[t + 1]) - s.channel_payoff(lo).value(vl, xs[t]);
            if (dh < dl - 1e-12 * std::max(1.0, std::fabs(dl)))
                fail(errc::structure, "channel payoffs lack increasing differences between channels " +
                                          std::to_string(s.channels[hi].id) + " and " + std::to_string(s.channels[lo].id));
        }
    }
}

void check_bundle_value(const mvpd_spec& s) {
    const double n = static_cast<double>(s.n_channels());
    for (double x = 0.0; x < n; x += 1.0) {
        if (s.g_i(x + 1.0) < s.g_i(x)) fail(errc::structure, "g_I must be increasing on bundle sizes");
        if (x >= 1.0 && s.g_i(x + 1.0) - s.g_i(x) > s.g_i(x) - s.g_i(x - 1.0) + 1e-12)
            fail(errc::structure, "g_I must be concave on bundle sizes");
    }
}

struct menu_search {
    const mvpd_spec& s;
    std::vector<std::size_t> rank, pos;  // pos[j]: position of channel j in the nested order
    std::vector<double> mass, phi, h, term, g_loss;
    std::optional<std::size_t> owned;
    std::vector<std::size_t> sizes, best_sizes;
    double best = 0.0;
    std::uint64_t evaluated = 0, cap;

    menu_search(const mvpd_spec& spec, std::uint64_t max_menus) : s(spec), cap(max_menus) {
        rank = channel_rank(s);
        pos.resize(rank.size());
        for (std::size_t k = 0; k < rank.size(); ++k) pos[rank[k]] = k;
        mass = cell_masses(s);
        phi = cell_virtual_mass(s);
        for (std::size_t n = 0; n <= s.n_channels(); ++n) {
            h.push_back(s.kernel(static_cast<double>(n), 1.0, 1.0));
            term.push_back(bundle_term(s, n));
            g_loss.push_back(n == 0 ? 0.0 : loss(s, n));
        }
        if (s.owned_channel) owned = s.channel_index(*s.owned_channel);
        sizes.assign(s.viewer_cells, 0);
    }

    double value() const {
        const std::size_t N = s.n_channels();
        std::vector<double> q(N, 0.0), q_without(N, 0.0);
        double viewer = 0.0, owned_loss = 0.0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const std::size_t n = sizes[i];
            viewer += phi[i] * term[n];
            for (std::size_t k = 0; k < n; ++k) q[rank[k]] += mass[i] * h[n];
            if (owned && pos[*owned] < n) {
                owned_loss += phi[i] * g_loss[n];
                for (std::size_t j = 0; j < N; ++j)
                    q_without[j] += mass[i] * h[pos[j] < n ? n - 1 : n];
            }
        }
        double total = viewer;
        for (std::size_t j = 0; j < N; ++j) {
            const double w = owned && *owned == j ? 1.0 : s.beta;
            total += w * s.channel_payoff(j).value(s.channels[j].v, q[j]);
        }
        if (owned) {
            const std::size_t o = *owned;
            const payoff_family& u = s.channel_payoff(o);
            const double base = u.value(s.channels[o].v, q[o]);
            total -= (1.0 - s.beta) * owned_loss;
            for (std::size_t j = 0; j < N; ++j)
                if (j != o) total += (1.0 - s.beta) * s.theta * (u.value(s.channels[o].v, q_without[j]) - base);
        }
        return total;
    }

    void walk(std::size_t i, std::size_t from) {
        if (i == sizes.size()) {
            if (++evaluated > cap) fail(errc::size, "menu enumeration exceeds the cap of " + std::to_string(cap));
            const double v = value();
            if (best_sizes.empty() || v > best + 1e-12 * std::max(1.0, std::fabs(best))) {
                best = v;
                best_sizes = sizes;
            }
            return;
        }
        for (std::size_t n = from; n <= s.n_channels(); ++n) {
            sizes[i] = n;
            walk(i + 1, n);
        }
    }
};

}  // namespace

mvpd_outcome solve_mvpd(const mvpd_spec& s, std::uint64_t max_menus) {
    validate(s);
    check_bundle_value(s);
    check_channel_payoffs(s);
    menu_search search(s, max_menus);
    search.walk(0, 0);

    mvpd_outcome out;
    out.bundle_size = search.best_sizes;
    out.mu = nested_menu(s, out.bundle_size);
    out.menus_evaluated = search.evaluated;
    const auto b = cell_bounds(s);
    out.cutoff.assign(s.n_channels(), std::nullopt);
    for (std::size_t j = 0; j < s.n_channels(); ++j)
        for (std::size_t i = 0; i < s.viewer_cells; ++i)
            if (out.mu.at(j, i)) {
                out.cutoff[j] = b[i];
                break;
            }
    out.revenue = revenue_terms(s, out.mu);
    if (out.revenue.identity_gap > 1e-8 * std::max(1.0, std::fabs(out.revenue.objective)))
        fail(errc::consistency, "revenue identity fails at the solved menu");
    if (s.owned_channel) {
        out.blr = blr_breakdown(s, out.mu);
        if (out.blr->identity_gap > 1e-8 * std::max(1.0, std::fabs(out.blr->total)))
            fail(errc::consistency, "owned-channel revenue identity fails at the solved menu");
        out.objective = out.blr->total;
    } else {
        out.objective = out.revenue.objective;
    }
    if (std::fabs(out.objective - search.best) > 1e-9 * std::max(1.0, std::fabs(search.best)))
        fail(errc::consistency, "menu search value disagrees with the objective at the chosen menu");
    auto pay = viewer_revenue_via_payments(s, out.mu);
    out.grid = pay.grid;
    out.payments = pay.payments;
    out.excluded_cells = static_cast<std::size_t>(std::count(out.bundle_size.begin(), out.bundle_size.end(), 0u));
    return out;
}

mvpd_spec merger_transform(const mvpd_spec& s, const merger& m) {
    validate(s);
    mvpd_spec out = s;
    if (m.channels.empty()) fail(errc::input, "merger names no channels");
    for (int id : m.channels) s.channel_index(id);
    if (m.tag == merger::kind::horizontal) {
        if (m.channels.size() < 2) fail(errc::input, "a horizontal merger needs two or more channels");
        if (!(m.synergy >= 0.0)) fail(errc::input, "merger synergy must be nonnegative");
        for (int id : m.channels)
            out.channel_payoffs[id] = s.channel_payoff(s.channel_index(id)).with_slope_shift(m.synergy);
        try {
            check_channel_payoffs(out);
        } catch (const error&) {
            fail(errc::structure, "merger synergy changes the order of channels");
        }
    } else {
        if (m.channels.size() != 1) fail(errc::input, "a vertical merger purchases exactly one channel");
        if (s.owned_channel) fail(errc::input, "the distributor already owns a channel");
        out.owned_channel = m.channels[0];
    }
    return out;
}

namespace {

std::vector<double> envelope_at_bounds(const mvpd_spec& s, const std::vector<std::size_t>& sizes) {
    const auto b = cell_bounds(s);
    std::vector<double> knots(b.begin(), b.end() - 1), xs;
    for (auto n : sizes) xs.push_back(s.g_i(static_cast<double>(n)));
    return envelope_payoffs(allocation::step(knots, xs, b.back()), payoff_family::product(size_function::identity()),
                            s.viewers, b, 0.0);
}

bool g_affine(const mvpd_spec& s) {
    const double step = s.g_i(1.0) - s.g_i(0.0);
    for (std::size_t n = 1; n < s.n_channels(); ++n) {
        const double d = s.g_i(static_cast<double>(n) + 1.0) - s.g_i(static_cast<double>(n));
        if (std::fabs(d - step) > 1e-12 * std::max(1.0, std::fabs(step))) return false;
    }
    return true;
}

bool kernel_decreasing_on_sizes(const mvpd_spec& s) {
    for (std::size_t n = 0; n < s.n_channels(); ++n)
        if (s.kernel(static_cast<double>(n) + 1.0, 1.0, 1.0) > s.kernel(static_cast<double>(n), 1.0, 1.0)) return false;
    return true;
}

bool all_affine_payoffs(const mvpd_spec& s) {
    for (std::size_t j = 0; j < s.n_channels(); ++j)
        if (!s.channel_payoff(j).affine_at(s.channels[j].v)) return false;
    return true;
}

bool payoff_increasing(const mvpd_spec& s, std::size_t j) {
    return increasing_in_size(s.channel_payoff(j), s.channels[j].v, linspace(0.0, 1.0, 33), 1e-12);
}

verdict judged(const std::string& claim, bool ok, const std::string& detail) {
    return verdict{claim, ok ? verdict_status::pass : verdict_status::fail, detail};
}

}  // namespace

merger_report merger_counterfactual(const mvpd_spec& s, const merger& m) {
    merger_report r;
    const mvpd_spec after = merger_transform(s, m);
    r.before = solve_mvpd(s);
    r.after = solve_mvpd(after);
    for (std::size_t i = 0; i < s.viewer_cells; ++i)
        r.cell_relation.push_back(set_relation(r.before.mu.firms_of(i), r.after.mu.firms_of(i)));
    r.payoff_before = envelope_at_bounds(s, r.before.bundle_size);
    r.payoff_after = envelope_at_bounds(after, r.after.bundle_size);
    bool worse = true, better = true;
    for (std::size_t k = 0; k < r.payoff_before.size(); ++k) {
        r.payoff_delta.push_back(r.payoff_after[k] - r.payoff_before[k]);
        const double tol = 1e-12 * std::max(1.0, std::fabs(r.payoff_before[k]));
        if (r.payoff_delta.back() > tol) worse = false;
        if (r.payoff_delta.back() < -tol) better = false;
    }
    const bool grew = std::all_of(r.cell_relation.begin(), r.cell_relation.end(),
                                  [](const std::string& x) { return x == "=" || x == "superset"; });
    const bool shrank = std::all_of(r.cell_relation.begin(), r.cell_relation.end(),
                                    [](const std::string& x) { return x == "=" || x == "subset"; });

    const auto rank = channel_rank(s);
    const std::size_t N = s.n_channels();
    std::set<std::size_t> merged;
    for (int id : m.channels) merged.insert(s.channel_index(id));
    r.bundles = verdict{"bundle_movement", verdict_status::not_applicable, ""};
    r.welfare = verdict{"viewer_welfare", verdict_status::not_applicable, ""};

    r.lower_channels = verdict{"channels_below_merger_shrink", verdict_status::not_applicable, ""};

    if (m.tag == merger::kind::horizontal) {
        if (kernel_decreasing_on_sizes(s)) {
            std::size_t lowest = 0;
            for (std::size_t k = 0; k < N; ++k)
                if (merged.count(rank[k])) lowest = k;
            std::string bad;
            for (std::size_t k = lowest + 1; k < N; ++k) {
                auto rel = set_relation(r.before.mu.individuals_of(rank[k]), r.after.mu.individuals_of(rank[k]));
                if (rel != "=" && rel != "subset") bad += (bad.empty() ? "channel " : ", channel ") + std::to_string(s.channels[rank[k]].id);
            }
            r.lower_channels = judged("channels_below_merger_shrink", bad.empty(), bad.empty() ? "no lower channel gained viewers" : bad + " gained viewers");
        } else {
            r.lower_channels.detail = "kernel is not decreasing in bundle size";
        }
        if (!kernel_decreasing_on_sizes(s)) {
            r.bundles.detail = "kernel is not decreasing in bundle size";
        } else if (N >= 2 && merged == std::set<std::size_t>{rank[N - 1], rank[N - 2]}) {
            r.bundles = judged("bundles_grow_after_low_merger", grew, grew ? "every bundle weakly grew" : "some bundle lost channels");
        } else if (N >= 2 && merged == std::set<std::size_t>{rank[0], rank[1]}) {
            r.bundles = judged("bundles_shrink_after_high_merger", shrank, shrank ? "every bundle weakly shrank" : "some bundle gained channels");
            if (r.before.excluded_cells == 0)
                r.welfare = judged("viewers_worse_after_high_merger", worse, worse ? "no viewer gained" : "some viewer gained");
            else
                r.welfare.detail = "viewers were excluded before the merger";
        } else {
            r.bundles.detail = "merger is not of the two lowest or the two highest channels";
        }
        return r;
    }

    const std::size_t bought = *merged.begin();
    if (s.theta != 0.0) {
        r.welfare.detail = "leverage over rivals is present";
    } else if (!g_affine(s)) {
        r.welfare.detail = "g_I is not affine";
    } else if (!payoff_increasing(s, bought)) {
        r.welfare.detail = "purchased channel payoff is not increasing in quality";
    } else if (bought == rank[0]) {
        if (r.before.excluded_cells != 0)
            r.welfare.detail = "viewers were excluded before the purchase";
        else
            r.welfare = judged("viewers_worse_after_top_purchase", worse, worse ? "no viewer gained" : "some viewer gained");
    } else if (bought == rank[N - 1]) {
        if (!all_affine_payoffs(s))
            r.welfare.detail = "channel payoffs are not affine";
        else
            r.welfare = judged("viewers_better_after_bottom_purchase", better, better ? "no viewer lost" : "some viewer lost");
    } else {
        r.welfare.detail = "purchased channel is neither the highest nor the lowest";
    }
    return r;
}

std::string describe(const mvpd_spec& s) {
    std::ostringstream os;
    os << s.n_channels() << " channels, " << s.viewer_cells << " viewer cells on " << describe(s.viewers)
       << ", beta " << s.beta << ", theta " << s.theta;
    if (s.owned_channel) os << ", owns channel " << *s.owned_channel;
    return os.str();
}

}  // namespace platmatch
