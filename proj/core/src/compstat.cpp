#include "platmatch/compstat.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/objective.hpp"
#include "platmatch/quadrature.hpp"
#include "platmatch/supermodular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace platmatch {

namespace {

bool same_order(const order_result& a, const order_result& b) {
    return a.found == b.found && a.order.ascending == b.order.ascending && a.order.rank == b.order.rank;
}

bool type_function_increasing(const type_function& f) {
    if (f.tag() == type_function::kind::linear) return f.slope() >= 0.0;
    const auto& ys = f.knots().ys();
    for (std::size_t k = 1; k < ys.size(); ++k)
        if (ys[k] < ys[k - 1]) return false;
    return true;
}

}  // namespace

shift_result apply_shift(const market_spec& m, const shift_spec& s) {
    validate(m);
    if (s.firms.empty()) fail(errc::input, "shift names no firms");
    shift_result out;
    out.market = m;
    const auto xs = quality_grid(m);
    for (int id : s.firms) {
        const std::size_t j = m.firm_index(id);
        const double v = m.firms[j].v;
        const payoff_family& old = m.firm_payoff(j);
        payoff_family next;
        switch (s.tag) {
            case shift_spec::kind::additive_slope: next = old.with_slope_shift(s.epsilon); break;
            case shift_spec::kind::multiplicative_beta: {
                auto c = old.affine_at(v);
                if (!c) fail(errc::structure, "beta scaling needs a firm payoff affine in match quality");
                if (!(s.alpha(v) > 0.0) || !type_function_increasing(s.alpha))
                    fail(errc::structure, "beta scaling factor must be positive and increasing");
                next = payoff_family::affine(type_function::constant(c->intercept),
                                             type_function::constant(s.alpha(v) * c->slope));
                break;
            }
            case shift_spec::kind::replace_family: next = s.replacement; break;
        }
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            double before = old.value(v, xs[k + 1]) - old.value(v, xs[k]);
            double after = next.value(v, xs[k + 1]) - next.value(v, xs[k]);
            if (after < before - 1e-12) out.increasing_differences = false;
        }
        out.market.firm_payoffs[id] = next;
    }
    if (!out.increasing_differences && s.tag != shift_spec::kind::multiplicative_beta)
        fail(errc::structure, "shift is not an increasing-differences change");
    out.order_preserved = same_order(firm_order(m), firm_order(out.market));
    if (!out.order_preserved) fail(errc::structure, "shift changes the supermodular order of firms");
    return out;
}

std::string to_string(verdict_status s) {
    switch (s) {
        case verdict_status::pass: return "pass";
        case verdict_status::fail: return "fail";
        case verdict_status::not_applicable: return "not_applicable";
        case verdict_status::informational: return "informational";
    }
    return "unknown";
}

const verdict* comparison_report::find(const std::string& claim) const {
    for (const auto& v : verdicts)
        if (v.claim == claim) return &v;
    return nullptr;
}

bool comparison_report::clean() const {
    return std::none_of(verdicts.begin(), verdicts.end(), [](const verdict& v) { return v.status == verdict_status::fail; });
}

namespace {

solve_report run_solver(const market_spec& m, solver_choice choice, std::uint64_t seed) {
    switch (choice) {
        case solver_choice::brute_force: return brute_force(m, false);
        case solver_choice::threshold: return solve_threshold(m, seed);
        case solver_choice::pointwise_affine: return solve_pointwise_affine(m);
    }
    fail(errc::input, "unknown solver");
}

bool weakly_smaller(const std::string& rel) { return rel == "=" || rel == "subset"; }
bool weakly_larger(const std::string& rel) { return rel == "=" || rel == "superset"; }

bool all_concave(const market_spec& m) {
    const auto xs = quality_grid(m);
    for (std::size_t j = 0; j < m.n_firms(); ++j)
        if (!concave_in_size(m.firm_payoff(j), m.firms[j].v, xs, 1e-9)) return false;
    return true;
}

bool all_affine(const market_spec& m) {
    for (std::size_t j = 0; j < m.n_firms(); ++j)
        if (!m.firm_payoff(j).affine_at(m.firms[j].v)) return false;
    return true;
}

bool kernel_decreasing_on(const market_spec& m) {
    for (const auto& ind : m.individuals)
        for (const auto& f : m.firms)
            if (!kernel_decreasing(m.kernel, 0.0, m.max_size(), ind.sigma, f.sigma, 129)) return false;
    return true;
}

// Sets a verdict from a list of violations, downgrading to informational outside exhaustive regimes.
verdict judge(const std::string& claim, const std::vector<std::string>& violations, bool exhaustive) {
    verdict v;
    v.claim = claim;
    std::ostringstream os;
    for (std::size_t k = 0; k < violations.size(); ++k) os << (k ? "; " : "") << violations[k];
    v.detail = os.str();
    if (!exhaustive)
        v.status = verdict_status::informational;
    else
        v.status = violations.empty() ? verdict_status::pass : verdict_status::fail;
    return v;
}

verdict skipped(const std::string& claim, const std::string& reason) {
    return verdict{claim, verdict_status::not_applicable, reason};
}

}  // namespace

comparison_report compare(const market_spec& before, const market_spec& after, const std::optional<shift_spec>& shift,
                          solver_choice solver, std::uint64_t seed) {
    if (before.n_firms() != after.n_firms() || before.n_individuals() != after.n_individuals())
        fail(errc::input, "compared markets differ in shape");
    comparison_report r;
    r.before = run_solver(before, solver, seed);
    r.after = run_solver(after, solver, seed);
    r.exhaustive = r.before.exhaustive && r.after.exhaustive;

    const auto tb = evaluate(before, r.before.mu);
    const auto ta = evaluate(after, r.after.mu);
    for (std::size_t j = 0; j < before.n_firms(); ++j) {
        auto b = r.before.mu.individuals_of(j), a = r.after.mu.individuals_of(j);
        r.firms.push_back({before.firms[j].id, set_relation(b, a), static_cast<long>(a.size()) - static_cast<long>(b.size())});
        r.quality_delta.push_back(ta.qualities[j] - tb.qualities[j]);
    }
    for (std::size_t i = 0; i < before.n_individuals(); ++i) {
        auto b = r.before.mu.firms_of(i), a = r.after.mu.firms_of(i);
        r.individuals.push_back(
            {before.individuals[i].id, set_relation(b, a), static_cast<long>(a.size()) - static_cast<long>(b.size())});
    }
    if (!shift) return r;

    std::vector<std::size_t> targets;
    for (int id : shift->firms) targets.push_back(before.firm_index(id));
    const order_result order = firm_order(before);
    std::vector<int> rank(before.n_firms());
    for (std::size_t p = 0; p < order.order.size(); ++p) rank[order.order.ascending[p]] = order.order.rank[p];

    bool id_change = false, order_kept = false;
    try {
        auto s = apply_shift(before, *shift);
        id_change = s.increasing_differences;
        order_kept = s.order_preserved;
    } catch (const error&) {
    }
    const bool single = targets.size() == 1;
    const bool concave = all_concave(before) && all_concave(after);
    const bool affine = all_affine(before) && all_affine(after);
    const bool h_decreasing = kernel_decreasing_on(before);
    const bool premises = order.found && id_change && order_kept;

    // Quality of the shifted firm.
    if (!single || !premises) {
        r.verdicts.push_back(skipped("quality_of_shifted_firm", "needs one shifted firm and an order-preserving increasing-differences change"));
    } else {
        const std::size_t k = targets[0];
        std::vector<std::string> bad;
        if (r.quality_delta[k] < -1e-12 * std::max(1.0, std::fabs(tb.qualities[k])))
            bad.push_back("firm " + std::to_string(before.firms[k].id) + " quality fell by " + std::to_string(-r.quality_delta[k]));
        r.verdicts.push_back(judge("quality_of_shifted_firm", bad, r.exhaustive));
    }

    // Shifted firm grows, lower-type firms shrink; individuals above its old cutoff shrink.
    if (!single || !premises || !concave || !h_decreasing) {
        r.verdicts.push_back(skipped("shifted_firm_grows_lower_firms_shrink", "needs one shifted firm, concave firm payoffs and a decreasing kernel"));
        r.verdicts.push_back(skipped("individuals_above_cutoff_shrink", "needs one shifted firm, concave firm payoffs and a decreasing kernel"));
    } else {
        const std::size_t k = targets[0];
        std::vector<std::string> bad;
        if (!weakly_larger(r.firms[k].relation))
            bad.push_back("shifted firm " + std::to_string(r.firms[k].id) + " set is " + r.firms[k].relation);
        for (std::size_t j = 0; j < before.n_firms(); ++j)
            if (rank[j] < rank[k] && !weakly_smaller(r.firms[j].relation))
                bad.push_back("lower firm " + std::to_string(r.firms[j].id) + " set is " + r.firms[j].relation);
        r.verdicts.push_back(judge("shifted_firm_grows_lower_firms_shrink", bad, r.exhaustive));

        std::vector<std::string> bad_ind;
        const auto matched = r.before.mu.individuals_of(k);
        if (!matched.empty()) {
            double cutoff = HUGE_VAL;
            for (auto i : matched) cutoff = std::min(cutoff, before.individuals[i].v);
            for (std::size_t i = 0; i < before.n_individuals(); ++i)
                if (before.individuals[i].v >= cutoff && !weakly_smaller(r.individuals[i].relation))
                    bad_ind.push_back("individual " + std::to_string(r.individuals[i].id) + " set is " + r.individuals[i].relation);
        }
        r.verdicts.push_back(judge("individuals_above_cutoff_shrink", bad_ind, r.exhaustive));
    }

    // Several shifted firms: every firm below the lowest of them shrinks.
    if (targets.size() < 2 || !premises || !concave || !h_decreasing) {
        r.verdicts.push_back(skipped("firms_below_shifted_set_shrink", "needs two or more shifted firms, concave firm payoffs and a decreasing kernel"));
    } else {
        int lowest = rank[targets[0]];
        for (auto t : targets) lowest = std::min(lowest, rank[t]);
        std::vector<std::string> bad;
        for (std::size_t j = 0; j < before.n_firms(); ++j)
            if (rank[j] < lowest && !weakly_smaller(r.firms[j].relation))
                bad.push_back("firm " + std::to_string(r.firms[j].id) + " set is " + r.firms[j].relation);
        r.verdicts.push_back(judge("firms_below_shifted_set_shrink", bad, r.exhaustive));
    }

    // Affine firm payoffs: the shifted firm's set grows in size.
    if (!single || !premises || !affine) {
        r.verdicts.push_back(skipped("affine_shifted_firm_size_grows", "needs one shifted firm and affine firm payoffs"));
    } else {
        const std::size_t k = targets[0];
        std::vector<std::string> bad;
        if (r.firms[k].size_delta < 0)
            bad.push_back("firm " + std::to_string(r.firms[k].id) + " lost " + std::to_string(-r.firms[k].size_delta) + " individuals");
        r.verdicts.push_back(judge("affine_shifted_firm_size_grows", bad, r.exhaustive));
    }

    // Affine firm payoffs, shift on the lowest firm: each individual gains that firm or is unchanged.
    const bool lowest_target = single && rank[targets[0]] == 0 &&
                               std::count(rank.begin(), rank.end(), 0) == 1;
    if (!lowest_target || !premises || !affine) {
        r.verdicts.push_back(skipped("lowest_firm_added_or_unchanged", "needs a shift on the unique lowest firm and affine firm payoffs"));
    } else {
        const std::size_t k = targets[0];
        std::vector<std::string> bad;
        for (std::size_t i = 0; i < before.n_individuals(); ++i) {
            auto b = r.before.mu.firms_of(i), a = r.after.mu.firms_of(i);
            if (a == b) continue;
            auto grown = b;
            if (!r.before.mu.at(k, i)) {
                grown.push_back(k);
                std::sort(grown.begin(), grown.end());
            }
            if (a != grown || r.before.mu.at(k, i))
                bad.push_back("individual " + std::to_string(before.individuals[i].id) + " changed beyond gaining the lowest firm");
        }
        r.verdicts.push_back(judge("lowest_firm_added_or_unchanged", bad, r.exhaustive));
    }
    return r;
}

welfare_report welfare_delta(const market_spec& before, const solve_report& r_before, const market_spec& after,
                             const solve_report& r_after, const distribution& types) {
    if (before.n_individuals() != after.n_individuals()) fail(errc::input, "compared markets differ in shape");
    welfare_report w;
    for (std::size_t i = 0; i < before.n_individuals(); ++i) {
        double v = before.individuals[i].v;
        if (v != after.individuals[i].v) fail(errc::input, "compared markets use different individual grids");
        if (!types.contains(v)) fail(errc::input, "individual type outside the type distribution");
        w.types.push_back(v);
    }
    auto envelope = [&](const market_spec& m, const solve_report& r) {
        auto sizes = evaluate(m, r.mu).sizes;
        std::vector<double> knots = w.types;
        knots[0] = types.lo();
        auto x = allocation::step(knots, sizes, types.hi());
        return envelope_payoffs(x, m.u_i, types, w.types, 0.0);
    };
    w.payoff_before = envelope(before, r_before);
    w.payoff_after = envelope(after, r_after);
    bool any_neg = false, any_pos = false;
    for (std::size_t i = 0; i < w.types.size(); ++i) {
        double d = w.payoff_after[i] - w.payoff_before[i];
        w.delta.push_back(d);
        double tol = 1e-12 * std::max(1.0, std::fabs(w.payoff_before[i]));
        if (d < -tol) any_neg = true;
        if (d > tol) any_pos = true;
    }
    w.sign = any_neg && any_pos ? "mixed" : any_neg ? "nonpositive" : any_pos ? "nonnegative" : "zero";

    bool all_eq = true, all_sub = true, all_sup = true;
    for (std::size_t i = 0; i < w.types.size(); ++i) {
        auto rel = set_relation(r_before.mu.firms_of(i), r_after.mu.firms_of(i));
        if (rel != "=") all_eq = false;
        if (!weakly_smaller(rel)) all_sub = false;
        if (!weakly_larger(rel)) all_sup = false;
    }
    w.movement = all_eq ? "=" : all_sub ? "subset" : all_sup ? "superset" : "mixed";

    w.pre_before = check_welfare_lemma_preconditions(before, r_before);
    w.pre_after = check_welfare_lemma_preconditions(after, r_after);
    w.claim.claim = "welfare_follows_set_movement";
    if (w.movement == "mixed") {
        w.claim.status = verdict_status::not_applicable;
        w.claim.detail = "matching sets moved in both directions";
    } else if (!w.pre_before.applicable || !w.pre_after.applicable) {
        w.claim.status = verdict_status::not_applicable;
        w.claim.detail = !w.pre_before.applicable ? w.pre_before.reason : w.pre_after.reason;
    } else {
        bool ok = w.movement == "=" ? w.sign == "zero"
                  : w.movement == "subset" ? (w.sign == "zero" || w.sign == "nonpositive")
                                           : (w.sign == "zero" || w.sign == "nonnegative");
        w.claim.status = ok ? verdict_status::pass : verdict_status::fail;
        w.claim.detail = "sets " + w.movement + ", payoffs " + w.sign;
    }
    return w;
}

double pointwise_value(const beta_context& ctx, const individual_type& ind, const std::vector<double>& beta, std::size_t c) {
    double quality = 0.0, weight = 0.0;
    for (std::size_t k = c; k < ctx.firm_types.size(); ++k) {
        quality += ctx.firm_types[k] * ctx.firm_weights[k];
        weight += beta[k] * ctx.firm_weights[k];
    }
    return ctx.u_i.value(ind.v, quality) + ctx.kernel(quality, ind.sigma, 1.0) * weight;
}

std::size_t pointwise_cutoff(const beta_context& ctx, const individual_type& ind, const std::vector<double>& beta) {
    const std::size_t n = ctx.firm_types.size();
    std::size_t best_c = n;
    double best = pointwise_value(ctx, ind, beta, n);
    for (std::size_t c = n; c-- > 0;) {
        double val = pointwise_value(ctx, ind, beta, c);
        if (val > best + 1e-12 * std::max(1.0, std::fabs(best))) {
            best = val;
            best_c = c;
        }
    }
    return best_c;
}

namespace {

void check_context(const beta_context& ctx, const std::vector<double>& beta) {
    const auto& v = ctx.firm_types;
    if (v.empty() || ctx.firm_weights.size() != v.size() || beta.size() != v.size())
        fail(errc::input, "firm types, weights and beta differ in length");
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!(v[k] > 0.0)) fail(errc::input, "firm types must be positive");
        if (!(ctx.firm_weights[k] > 0.0)) fail(errc::input, "firm weights must be positive");
        if (k > 0 && !(v[k] > v[k - 1])) fail(errc::input, "firm types must be strictly ascending");
    }
    if (ctx.individuals.empty()) fail(errc::input, "no individuals in the pointwise context");
}

bool ratio_increasing(const std::vector<double>& v, const std::vector<double>& beta) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (beta[k] / v[k] < beta[k - 1] / v[k - 1] - 1e-12) return false;
    return true;
}

bool kernel_strictly_decreasing(const beta_context& ctx, const individual_type& ind) {
    double top = 0.0;
    for (std::size_t k = 0; k < ctx.firm_types.size(); ++k) top += ctx.firm_types[k] * ctx.firm_weights[k];
    const auto xs = linspace(0.0, top, 65);
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (!(ctx.kernel(xs[k], ind.sigma, 1.0) < ctx.kernel(xs[k - 1], ind.sigma, 1.0))) return false;
    return true;
}

bool same(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b))); }

}  // namespace

beta_comparison beta_threshold_compstat(const beta_context& ctx, const std::vector<double>& beta,
                                        const std::vector<double>& beta_tilde, const std::optional<std::vector<double>>& alpha) {
    check_context(ctx, beta);
    check_context(ctx, beta_tilde);
    if (!ratio_increasing(ctx.firm_types, beta) || !ratio_increasing(ctx.firm_types, beta_tilde))
        fail(errc::structure, "beta(v)/v must be increasing in the firm type");
    const std::size_t n = ctx.firm_types.size();

    beta_comparison out;
    for (const auto& ind : ctx.individuals) {
        out.cutoff_before.push_back(pointwise_cutoff(ctx, ind, beta));
        out.cutoff_after.push_back(pointwise_cutoff(ctx, ind, beta_tilde));
    }

    std::vector<std::string> bad_upper, bad_lower;
    std::size_t upper_cases = 0, lower_cases = 0;
    for (std::size_t i = 0; i < ctx.individuals.size(); ++i) {
        if (!kernel_strictly_decreasing(ctx, ctx.individuals[i])) continue;
        const std::size_t c = out.cutoff_before[i], ct = out.cutoff_after[i];
        bool upper = true, lower = true;
        for (std::size_t k = 0; k < n; ++k) {
            const bool at_or_below = k <= c;
            if (at_or_below) {
                upper = upper && same(beta_tilde[k], beta[k]);
                lower = lower && beta_tilde[k] >= beta[k] - 1e-12;
            } else {
                upper = upper && beta_tilde[k] >= beta[k] - 1e-12;
                lower = lower && same(beta_tilde[k], beta[k]);
            }
        }
        const std::string who = "individual " + std::to_string(ctx.individuals[i].id);
        if (upper) {
            ++upper_cases;
            if (ct < c) bad_upper.push_back(who + " cutoff fell from " + std::to_string(c) + " to " + std::to_string(ct));
        }
        if (lower) {
            ++lower_cases;
            if (ct > c) bad_lower.push_back(who + " cutoff rose from " + std::to_string(c) + " to " + std::to_string(ct));
        }
    }
    out.lemma_upper = upper_cases ? judge("threshold_rises_when_beta_rises_above", bad_upper, true)
                                  : skipped("threshold_rises_when_beta_rises_above", "no individual meets the premise");
    out.lemma_lower = lower_cases ? judge("threshold_falls_when_beta_rises_below", bad_lower, true)
                                  : skipped("threshold_falls_when_beta_rises_below", "no individual meets the premise");

    const std::string scaling = "scaled_beta_shrinks_sets";
    std::string why;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += beta[k] * ctx.firm_weights[k];
    if (!alpha)
        why = "no scaling factor given";
    else if (alpha->size() != n)
        why = "scaling factor has the wrong length";
    else if (total < 0.0)
        why = "beta integrates to a negative value";
    else {
        for (std::size_t k = 0; k < n && why.empty(); ++k) {
            if (!((*alpha)[k] > 0.0)) why = "scaling factor must be positive";
            else if (k > 0 && (*alpha)[k] < (*alpha)[k - 1]) why = "scaling factor must be increasing";
            else if (!same(beta_tilde[k], (*alpha)[k] * beta[k])) why = "beta_tilde is not alpha * beta";
        }
        for (const auto& ind : ctx.individuals) {
            double top = 0.0;
            for (std::size_t k = 0; k < n; ++k) top += ctx.firm_types[k] * ctx.firm_weights[k];
            for (double x : linspace(0.0, top, 17))
                if (ctx.u_i.value(ind.v, x) != 0.0) why = "individual payoff is not identically zero";
            if (!kernel_decreasing(ctx.kernel, 0.0, top, ind.sigma, 1.0, 65)) why = "kernel is not decreasing";
        }
    }
    if (!why.empty()) {
        out.scaling = skipped(scaling, why);
    } else {
        std::vector<std::string> bad;
        for (std::size_t i = 0; i < ctx.individuals.size(); ++i)
            if (out.cutoff_after[i] < out.cutoff_before[i])
                bad.push_back("individual " + std::to_string(ctx.individuals[i].id) + " cutoff fell from " +
                              std::to_string(out.cutoff_before[i]) + " to " + std::to_string(out.cutoff_after[i]));
        out.scaling = judge(scaling, bad, true);
    }
    return out;
}

tail_check tail_integral_inequality_check(const knot_function& alpha, const knot_function& k, double tol) {
    tail_check out;
    out.result.claim = "tail_integral_inequality";
    const double lo = std::max(alpha.lo(), k.lo()), hi = std::min(alpha.hi(), k.hi());
    if (!(hi > lo)) fail(errc::input, "alpha and k share no support");
    std::vector<double> edges{lo, hi};
    for (double b : alpha.breaks())
        if (b > lo && b < hi) edges.push_back(b);
    for (double b : k.breaks())
        if (b > lo && b < hi) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Tail integrals at panel edges and at sign changes of k inside a panel.
    const std::size_t P = edges.size() - 1;
    std::vector<double> panel(P);
    for (std::size_t p = 0; p < P; ++p) panel[p] = integrate([&](double t) { return k(t); }, edges[p], edges[p + 1], 4);
    double tail = 0.0, min_tail = 0.0;
    for (std::size_t p = P; p-- > 0;) {
        const double a = edges[p], b = edges[p + 1];
        const double ka = k(a), kb = k.left(b);
        if ((ka < 0.0) != (kb < 0.0) && ka != kb) {
            const double root = a + (b - a) * ka / (ka - kb);
            min_tail = std::min(min_tail, tail + integrate([&](double t) { return k(t); }, root, b, 4));
        }
        tail += panel[p];
        min_tail = std::min(min_tail, tail);
    }
    out.premise = min_tail >= -tol && alpha.nondecreasing();
    auto prod = [&](double t) { return alpha(t) * k(t); };
    out.lhs = integrate_pieces(prod, edges, 4);
    out.rhs = alpha(lo) * tail;
    if (!out.premise) {
        out.result.status = verdict_status::not_applicable;
        out.result.detail = alpha.nondecreasing() ? "some tail integral of k is negative" : "alpha is not increasing";
    } else {
        out.result.status = out.lhs >= out.rhs - tol ? verdict_status::pass : verdict_status::fail;
        std::ostringstream os;
        os.precision(17);
        os << "lhs " << out.lhs << " rhs " << out.rhs;
        out.result.detail = os.str();
    }
    return out;
}

}  // namespace platmatch
