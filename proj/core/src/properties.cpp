#include "platmatch/properties.hpp"

#include "platmatch/compstat.hpp"
#include "platmatch/errors.hpp"
#include "platmatch/generators.hpp"
#include "platmatch/mechanism.hpp"
#include "platmatch/monopcomp.hpp"
#include "platmatch/mvpd.hpp"
#include "platmatch/objective.hpp"
#include "platmatch/random.hpp"
#include "platmatch/solver.hpp"
#include "platmatch/supermodular.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>

namespace platmatch {

std::string to_string(trial_status s) {
    switch (s) {
        case trial_status::pass: return "pass";
        case trial_status::fail: return "fail";
        case trial_status::skip: return "skip";
    }
    return "skip";
}

namespace {

struct outcome {
    trial_status status = trial_status::skip;
    std::string detail;
};

outcome trial_pass(std::string d) { return {trial_status::pass, std::move(d)}; }
outcome trial_fail(std::string d) { return {trial_status::fail, std::move(d)}; }
outcome trial_skip(std::string d) { return {trial_status::skip, std::move(d)}; }

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

using trial_fn = std::function<outcome(std::size_t index, rng& gen, double tol)>;

struct suite_def {
    suite_info info;
    trial_fn run;
};

// Market of the oracle suites: the default draw with both supermodular orders verified.
struct ordered_market {
    market_spec m;
    order_result firms, individuals;
};

std::optional<ordered_market> draw_ordered_market(rng& gen) {
    ordered_market om{random_market(gen), {}, {}};
    om.firms = firm_order(om.m);
    om.individuals = individual_order(om.m);
    if (!om.firms.found || !om.individuals.found) return std::nullopt;
    return om;
}

outcome oracle_trial(std::size_t, rng& gen, double tol) {
    auto om = draw_ordered_market(gen);
    if (!om) return trial_skip("no supermodular order");
    auto bf = brute_force(om->m, false);
    auto th = solve_threshold(om->m);
    const double gap = std::fabs(bf.objective - th.objective);
    std::string d = "brute force " + num(bf.objective) + ", threshold " + num(th.objective) + ", gap " + num(gap);
    return gap <= tol ? trial_pass(d) : trial_fail(d);
}

// Brute-force optimum, or the best threshold matching when it attains the same objective.
matching canonical_optimum(const market_spec& m, const solve_report& bf) {
    if (to_thresholds(bf.mu, bf.firm_order).representable) return bf.mu;
    auto mono = brute_force(m, true);
    if (mono.objective >= bf.objective - 1e-12 * std::max(1.0, std::fabs(bf.objective))) return mono.mu;
    return bf.mu;
}

outcome threshold_trial(std::size_t, rng& gen, double) {
    auto om = draw_ordered_market(gen);
    if (!om) return trial_skip("no supermodular order");
    auto bf = brute_force(om->m, false);
    const matching mu = canonical_optimum(om->m, bf);
    auto rows = to_thresholds(mu, om->firms.order);
    if (!rows.representable) return trial_fail("optimum is not a threshold matching");
    if (!cutoffs_nonincreasing(rows.cutoffs, om->individuals.order))
        return trial_fail("individual cutoffs are not monotone in the individual order");
    auto cols = to_firm_thresholds(mu, om->individuals.order);
    if (!cols.representable) return trial_fail("firm-side sets are not upper sets of the individual order");
    if (!cutoffs_nonincreasing(cols.cutoffs, om->firms.order))
        return trial_fail("firm cutoffs are not monotone in the firm order");
    return trial_pass(mu == bf.mu ? "optimum is a threshold matching" : "tied threshold matching attains the optimum");
}

// Weakly larger values for agents strictly higher in the order.
std::optional<std::string> order_violation(const agent_order& order, const std::vector<double>& values,
                                           const char* what) {
    for (std::size_t lo = 0; lo < order.size(); ++lo)
        for (std::size_t hi = lo + 1; hi < order.size(); ++hi) {
            if (order.rank[hi] <= order.rank[lo]) continue;
            const double a = values[order.ascending[lo]], b = values[order.ascending[hi]];
            if (b < a - 1e-12 * std::max(1.0, std::fabs(a)))
                return std::string(what) + " " + std::to_string(order.ascending[hi]) + " ranks above " +
                       std::to_string(order.ascending[lo]) + " but has " + num(b) + " < " + num(a);
        }
    return std::nullopt;
}

outcome monotonicity_trial(std::size_t, rng& gen, double) {
    auto om = draw_ordered_market(gen);
    if (!om) return trial_skip("no supermodular order");
    auto bf = brute_force(om->m, false);
    auto terms = evaluate(om->m, bf.mu);
    if (auto v = order_violation(om->individuals.order, terms.sizes, "individual")) return trial_fail(*v);
    if (auto v = order_violation(om->firms.order, terms.qualities, "firm")) return trial_fail(*v);
    return trial_pass("sizes and qualities follow both orders");
}

outcome verdicts_outcome(const std::vector<verdict>& vs) {
    std::string judged, failed;
    for (const auto& v : vs) {
        if (v.status == verdict_status::fail) failed += (failed.empty() ? "" : "; ") + v.claim + ": " + v.detail;
        if (v.status == verdict_status::pass || v.status == verdict_status::fail)
            judged += (judged.empty() ? "" : ", ") + v.claim;
    }
    if (!failed.empty()) return trial_fail(failed);
    if (judged.empty()) return trial_skip("no claim applies");
    return trial_pass(judged);
}

outcome prop2_trial(std::size_t, rng& gen, double) {
    market_draw draw;
    draw.concave_firm_payoff = true;
    market_spec m = random_market(gen, draw);
    shift_spec s;
    s.firms = {m.firms[gen.below(m.n_firms())].id};
    s.epsilon = gen.uniform(0.05, 1.0);
    if (gen.coin()) {
        const int second = m.firms[gen.below(m.n_firms())].id;
        if (second != s.firms[0]) s.firms.push_back(second);
    }
    shift_result shifted;
    try {
        shifted = apply_shift(m, s);
    } catch (const error& e) {
        if (e.kind() == errc::structure) return trial_skip(e.what());
        throw;
    }
    return verdicts_outcome(compare(m, shifted.market, s).verdicts);
}

outcome mechanism_trial(std::size_t, rng& gen, double tol) {
    const payoff_family families[] = {payoff_family::product(size_function::identity()),
                                      payoff_family::product(size_function::log1p()),
                                      payoff_family::product(size_function::power(1.0, 0.5))};
    distribution d = gen.coin() ? distribution::uniform(0.0, 1.0) : distribution::truncated_normal(0.5, 0.3, 0.0, 1.0);
    const auto& u = families[gen.below(3)];
    auto x = random_allocation(gen, 0.0, 1.0);
    auto r = payments_and_revenue(x, u, d, linspace(0.0, 1.0, 26));
    std::string det = "revenue " + num(r.revenue_payments) + ", gap " + num(r.revenue_gap);
    if (!r.ic.pass) return trial_fail(det + ", incentive audit failed");
    return r.revenue_gap <= tol ? trial_pass(det) : trial_fail(det);
}

// One individual facing a random discretized firm distribution, with beta raised above the
// threshold (mode 0), at or below it (mode 1), or scaled by an increasing alpha (mode 2).
outcome beta_trial(std::size_t, rng& gen, double) {
    const std::size_t n = 3 + gen.below(8);
    beta_context ctx;
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        v += gen.uniform(0.05, 0.5);
        ctx.firm_types.push_back(v);
        ctx.firm_weights.push_back(gen.uniform(0.2, 1.0) / static_cast<double>(n));
    }
    ctx.individuals = {{1, gen.uniform(0.1, 2.0), 1.0, 1.0}};
    const auto mode = gen.below(3);
    ctx.u_i = mode == 2 ? payoff_family::zero() : payoff_family::product(size_function::log1p());
    ctx.kernel = competition_kernel::power(1.0, 1.0, -gen.uniform(0.2, 3.0));
    std::vector<double> beta(n), bt(n), alpha(n);
    double r = gen.uniform(-1.0, 0.5);
    for (std::size_t k = 0; k < n; ++k) {
        r += gen.uniform(0.0, 0.5);
        beta[k] = ctx.firm_types[k] * r;
    }
    const std::size_t c = pointwise_cutoff(ctx, ctx.individuals[0], beta);
    std::optional<std::vector<double>> scale;
    if (mode == 2) {
        double a = gen.uniform(0.5, 1.0);
        for (std::size_t k = 0; k < n; ++k) {
            a += gen.uniform(0.0, 0.3);
            alpha[k] = a;
            bt[k] = a * beta[k];
        }
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) total += beta[k] * ctx.firm_weights[k];
        if (total < 0.0) return trial_skip("beta integrates to a negative value");
        for (std::size_t k = 1; k < n; ++k)
            if (bt[k] / ctx.firm_types[k] < bt[k - 1] / ctx.firm_types[k - 1])
                return trial_skip("scaled beta over v is not increasing");
        scale = alpha;
    } else {
        // Raised ratios stay increasing: cumulative bumps above, a bump no larger than the next gap below.
        const double gap = c + 1 < n ? beta[c + 1] / ctx.firm_types[c + 1] - beta[c] / ctx.firm_types[c] : 0.3;
        const double bump = std::min(0.3, gap) * gen.uniform(0.1, 1.0);
        double extra = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            extra += gen.uniform(0.0, 0.3);
            const bool raised = mode == 0 ? k > c : k <= c;
            bt[k] = raised ? beta[k] + ctx.firm_types[k] * (mode == 0 ? extra : bump) : beta[k];
        }
    }
    auto out = beta_threshold_compstat(ctx, beta, bt, scale);
    return verdicts_outcome({out.lemma_upper, out.lemma_lower, out.scaling});
}

outcome tail_trial(std::size_t, rng& gen, double tol) {
    const std::size_t n = 3 + gen.below(6);
    std::vector<double> xs = linspace(0.0, 1.0, n), a(n), kv(n);
    double acc = gen.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        acc += gen.uniform(0.0, 1.0);
        a[i] = acc;
        kv[i] = gen.uniform(-1.0, 2.0);
    }
    auto r = tail_integral_inequality_check(knot_function::piecewise(xs, a), knot_function::piecewise(xs, kv), tol);
    if (!r.premise) return trial_skip("a tail integral of k is negative");
    std::string d = "lhs " + num(r.lhs) + ", rhs " + num(r.rhs);
    return r.lhs >= r.rhs - tol ? trial_pass(d) : trial_fail(d);
}

outcome mvpd_trial(std::size_t, rng& gen, double tol) {
    mvpd_spec s = random_mvpd(gen);
    std::vector<std::size_t> sizes(s.viewer_cells);
    std::size_t n = 0;
    for (auto& x : sizes) {
        if (gen.coin(0.3) && n < s.n_channels()) ++n;
        x = n;
    }
    auto mu = nested_menu(s, sizes);
    auto terms = revenue_terms(s, mu);
    std::string d = "objective " + num(terms.objective) + ", gap " + num(terms.identity_gap);
    return terms.identity_gap <= tol ? trial_pass(d) : trial_fail(d);
}

outcome merger_trial(std::size_t index, rng& gen, double) {
    mvpd_draw draw;
    draw.affine_gi = true;
    draw.affine_channel_payoff = index % 2 == 1;
    mvpd_spec s = random_mvpd(gen, draw);
    const auto rank = channel_rank(s);
    const std::size_t pick = index % 2 == 0 ? rank.front() : rank.back();
    auto r = merger_counterfactual(s, merger{merger::kind::vertical, {s.channels[pick].id}, 0.0});
    return verdicts_outcome({r.welfare});
}

outcome ces_trial(std::size_t index, rng& gen, double tol) {
    static const double pairs[3][2] = {{3.0, 0.5}, {2.0, 0.25}, {4.0, 0.6}};
    ces_params c;
    c.sigma = pairs[index % 3][0];
    c.theta_ces = pairs[index % 3][1];
    c.wealth = 1e3;
    const std::size_t n = 1 + gen.below(8);
    std::vector<double> p(n), w(n);
    for (auto& x : p) x = gen.uniform(0.2, 5.0);
    for (auto& x : w) x = gen.uniform(0.1, 2.0);
    const double v_i = gen.uniform(0.5, 3.0);
    auto q = ces_demand(p, c, w, v_i);
    double spend = 0.0;
    for (std::size_t j = 0; j < n; ++j) spend += w[j] * p[j] * q.quantities[j];
    const double budget_gap = std::fabs(spend + q.money - *c.wealth) / *c.wealth;
    const double spending_gap =
        std::fabs(spend - v_i * std::pow(q.price_index, c.spending_exponent())) / (1.0 + spend);
    auto mk = markup_grid_check(gen.uniform(0.2, 5.0), c.sigma, gen.uniform(0.1, 10.0));
    std::string d = "budget gap " + num(budget_gap) + ", spending gap " + num(spending_gap) + ", markup profit " +
                    num(mk.profit) + " vs grid " + num(mk.best_grid_profit);
    return budget_gap <= tol && spending_gap <= tol && mk.pass ? trial_pass(d) : trial_fail(d);
}

outcome amazon_trial(std::size_t, rng& gen, double tol) {
    amazon_draw d;
    d.side = gen.coin() ? customer_side::observed : customer_side::homogeneous;
    d.max_customers = 3;
    auto s = random_amazon(gen, d);
    auto r = solve_amazon(s);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.customers.types.size(); ++i) {
        auto ex = exhaustive_subset(s, r.firms, r.customers.a[i], r.customers.b[i]);
        const double mine = set_value(s, r.firms, r.mu.firms_of(i), r.customers.a[i], r.customers.b[i]);
        worst = std::max(worst, std::fabs(mine - ex.value) / (1.0 + std::fabs(ex.value)));
    }
    std::string det = std::to_string(r.firms.types.size()) + " firms, worst relative gap " + num(worst);
    return worst <= tol ? trial_pass(det) : trial_fail(det);
}

outcome pooling_trial(std::size_t, rng& gen, double) {
    amazon_draw d;
    d.side = customer_side::private_info;
    d.mode = amazon_mode::welfare_revenue;
    auto r = solve_amazon(random_amazon(gen, d));
    if (!r.pooled) return trial_fail("customer rows differ");
    for (std::size_t i = 1; i < r.pointwise_quality.size(); ++i)
        if (r.pointwise_quality[i] > r.pointwise_quality[i - 1] + 1e-12)
            return trial_fail("pointwise quality rises at customer " + std::to_string(i));
    return trial_pass(std::to_string(r.size.size()) + " customers pooled at " + std::to_string(r.size[0]) + " firms");
}

outcome partition_trial(std::size_t, rng& gen, double) {
    auto s = random_amazon(gen);
    const auto p = s.effective_cells();
    amazon_change c;
    c.cell = gen.below(p.cells());
    c.tag = gen.coin() ? amazon_change::kind::acquire : amazon_change::kind::refine;
    c.split = gen.uniform(p.bounds[c.cell], p.bounds[c.cell + 1]);
    auto cmp = amazon_counterfactual(s, c);
    return verdicts_outcome({cmp.sets, cmp.welfare});
}

const std::vector<suite_def>& suites() {
    static const std::vector<suite_def> all = {
        {{"oracle", "threshold solver matches unrestricted brute force on small supermodular markets", 1e-9},
         oracle_trial},
        {{"threshold", "brute-force optima are threshold matchings with monotone cutoffs on both sides", std::nullopt},
         threshold_trial},
        {{"monotonicity", "higher agents get weakly larger match sizes and qualities at the optimum", std::nullopt},
         monotonicity_trial},
        {{"prop2", "increasing-differences shifts with concave firm payoffs move sets as predicted", std::nullopt},
         prop2_trial},
        {{"mechanism", "payment revenue equals the virtual-surplus integral and the mechanism is incentive compatible",
          1e-8},
         mechanism_trial},
        {{"beta", "pointwise thresholds move as predicted under beta perturbations", std::nullopt}, beta_trial},
        {{"tail", "integral of an increasing alpha against k is at least alpha(lo) times the integral of k", 1e-10},
         tail_trial},
        {{"mvpd", "distributor revenue equals channel fees plus viewer revenue", 1e-8}, mvpd_trial},
        {{"merger", "vertical purchases move viewer welfare as predicted", std::nullopt}, merger_trial},
        {{"ces", "CES budget and spending identities and markup pricing on random prices", 1e-9}, ces_trial},
        {{"amazon", "retail-platform threshold sets match exhaustive subset search", 1e-9}, amazon_trial},
        {{"pooling", "welfare mode with private customer types pools every customer", std::nullopt}, pooling_trial},
        {{"partition", "acquisitions and refinements move sets and payoffs as predicted", std::nullopt},
         partition_trial},
    };
    return all;
}

}  // namespace

const std::vector<suite_info>& property_suites() {
    static const std::vector<suite_info> infos = [] {
        std::vector<suite_info> out;
        for (const auto& s : suites()) out.push_back(s.info);
        return out;
    }();
    return infos;
}

suite_report run_suite(const std::string& name, const property_options& options) {
    const auto& all = suites();
    auto it = std::find_if(all.begin(), all.end(), [&](const suite_def& s) { return s.info.name == name; });
    if (it == all.end()) fail(errc::input, "unknown property suite '" + name + "'");
    if (options.jobs == 0) fail(errc::input, "jobs must be at least 1");

    suite_report rep;
    rep.suite = name;
    rep.description = it->info.description;
    rep.seed = options.seed;
    rep.requested = options.trials;
    if (it->info.tolerance) rep.tolerance = options.tolerance.value_or(*it->info.tolerance);
    const double tol = rep.tolerance.value_or(0.0);

    const std::size_t cap = std::max<std::size_t>(20 * options.trials, 200);
    const std::size_t chunk = std::max<std::size_t>(16, 4 * options.jobs);
    std::vector<trial_record> batch;

    auto evaluate = [&](std::size_t index) {
        trial_record rec;
        rec.index = index;
        rec.seed = trial_seed(options.seed, index);
        rng gen(rec.seed);
        outcome o;
        try {
            o = it->run(index, gen, tol);
        } catch (const std::exception& e) {
            o = trial_fail(std::string("exception: ") + e.what());
        }
        rec.status = o.status;
        rec.detail = std::move(o.detail);
        return rec;
    };

    for (std::size_t start = 0; rep.judged() < options.trials && start < cap; start += chunk) {
        const std::size_t end = std::min(cap, start + chunk);
        batch.assign(end - start, trial_record{});
        std::atomic<std::size_t> next{start};
        auto worker = [&] {
            for (std::size_t i = next++; i < end; i = next++) batch[i - start] = evaluate(i);
        };
        const std::size_t n_threads = std::min(options.jobs, end - start);
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        for (auto& rec : batch) {
            if (rep.judged() == options.trials) break;
            if (rec.status == trial_status::pass) ++rep.passed;
            else if (rec.status == trial_status::fail) ++rep.failed;
            else ++rep.skipped;
            rep.records.push_back(std::move(rec));
        }
    }
    return rep;
}

}  // namespace platmatch
