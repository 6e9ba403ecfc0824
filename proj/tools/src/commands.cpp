#include "commands.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/objective.hpp"
#include "platmatch/properties.hpp"
#include "platmatch/solver.hpp"
#include "platmatch/supermodular.hpp"

#include <algorithm>
#include <cmath>

#ifndef PLATMATCH_VERSION
#define PLATMATCH_VERSION "0.0.0"
#endif

namespace platmatch::cli {

using ojson = nlohmann::ordered_json;

std::string tool_version() { return PLATMATCH_VERSION; }

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> all = {"solve", "oracle", "check", "compstat", "mvpd", "monopcomp", "properties"};
    return all;
}

namespace {

// A scenario that does not fit the subcommand, reported like a validation error.
struct usage_problem {
    std::string message;
};

int exit_for(errc kind) {
    switch (kind) {
        case errc::input:
        case errc::validation: return exit_validation;
        case errc::structure:
        case errc::size:
        case errc::incentive: return exit_precondition;
        case errc::numeric:
        case errc::consistency: return exit_identity;
    }
    return exit_identity;
}

std::string status_for(int code) {
    switch (code) {
        case exit_ok: return "ok";
        case exit_precondition: return "precondition_failed";
        case exit_validation: return "invalid_input";
        case exit_assertion: return "assertion_failed";
        case exit_identity: return "identity_failed";
    }
    return "error";
}

ojson verdict_json(const verdict& v) {
    return ojson{{"claim", v.claim}, {"status", to_string(v.status)}, {"detail", v.detail}};
}

bool failed(const verdict& v) { return v.status == verdict_status::fail; }

std::vector<int> firm_ids(const market_spec& m) {
    std::vector<int> out;
    for (const auto& f : m.firms) out.push_back(f.id);
    return out;
}

std::vector<int> individual_ids(const market_spec& m) {
    std::vector<int> out;
    for (const auto& i : m.individuals) out.push_back(i.id);
    return out;
}

std::vector<int> sequence(std::size_t n) {
    std::vector<int> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<int>(k);
    return out;
}

// Lowest type among the firms in a set, blank for an empty set.
std::string lowest_type(const std::vector<std::size_t>& set, const std::vector<double>& types) {
    if (set.empty()) return "";
    double lo = HUGE_VAL;
    for (auto j : set) lo = std::min(lo, types[j]);
    return format_double(lo);
}

ojson json_or_null(const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); }

// ---------------------------------------------------------------------------------------------
// Generic markets

solver_limits limits_of(const scenario& sc) {
    solver_limits l;
    l.max_cells = sc.solver.max_cells;
    l.restarts = sc.solver.restarts;
    return l;
}

struct generic_solution {
    solve_report report;
    std::optional<horizontal_report> horizontal;
};

generic_solution solve_generic(const scenario& sc, std::uint64_t seed) {
    const auto& m = sc.market;
    const auto& method = sc.solver.method;
    if (method == "brute_force") return {brute_force(m, false, limits_of(sc)), std::nullopt};
    if (method == "pointwise_affine") return {solve_pointwise_affine(m), std::nullopt};
    if (method == "horizontal") {
        auto h = solve_horizontal(m);
        return {h.solve, h};
    }
    return {solve_threshold(m, seed, limits_of(sc)), std::nullopt};
}

ojson matching_json(const market_spec& m, const matching& mu) {
    ojson pairs = ojson::array();
    for (std::size_t j = 0; j < mu.n_firms(); ++j)
        for (std::size_t i = 0; i < mu.n_individuals(); ++i)
            if (mu.at(j, i)) pairs.push_back({m.firms[j].id, m.individuals[i].id});
    return pairs;
}

// Cutoff type per individual when the matching is a threshold matching in the report's firm order.
std::vector<std::string> cutoff_types(const market_spec& m, const solve_report& r) {
    std::vector<std::string> out(m.n_individuals());
    auto rep = to_thresholds(r.mu, r.firm_order);
    if (!rep.representable) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto c = static_cast<std::size_t>(rep.cutoffs[i]);
        if (c < m.n_firms()) out[i] = format_double(m.firms[r.firm_order.ascending[c]].v);
    }
    return out;
}

ojson solve_json(const market_spec& m, const solve_report& r) {
    auto terms = evaluate(m, r.mu);
    auto rep = to_thresholds(r.mu, r.firm_order);
    const auto cut = cutoff_types(m, r);
    ojson order = ojson::array();
    for (auto j : r.firm_order.ascending) order.push_back(m.firms[j].id);
    ojson inds = ojson::array(), firms = ojson::array();
    for (std::size_t i = 0; i < m.n_individuals(); ++i) {
        ojson set = ojson::array();
        for (auto j : r.mu.firms_of(i)) set.push_back(m.firms[j].id);
        inds.push_back({{"id", m.individuals[i].id},
                        {"v", m.individuals[i].v},
                        {"size", terms.sizes[i]},
                        {"payoff", terms.individual_terms[i]},
                        {"firms", set},
                        {"cutoff_vf", cut[i].empty() ? ojson(nullptr) : ojson(m.firms[r.firm_order.ascending[rep.cutoffs[i]]].v)}});
    }
    for (std::size_t j = 0; j < m.n_firms(); ++j) {
        ojson set = ojson::array();
        for (auto i : r.mu.individuals_of(j)) set.push_back(m.individuals[i].id);
        firms.push_back({{"id", m.firms[j].id},
                         {"v", m.firms[j].v},
                         {"quality", terms.qualities[j]},
                         {"payoff", terms.firm_terms[j]},
                         {"individuals", set}});
    }
    return ojson{{"method", r.method},
                 {"exhaustive", r.exhaustive},
                 {"iterations", r.iterations},
                 {"restarts", r.restarts},
                 {"objective", r.objective},
                 {"matched_pairs", r.mu.matched_count()},
                 {"threshold_representable", rep.representable},
                 {"firm_order", order},
                 {"cutoffs", rep.representable ? ojson(rep.cutoffs) : ojson(nullptr)},
                 {"matching", matching_json(m, r.mu)},
                 {"individuals", inds},
                 {"firms", firms}};
}

csv_table thresholds_table(const std::vector<int>& ids, const std::vector<std::string>& cutoffs) {
    csv_table t{{"individual_id", "cutoff_vf"}, {}};
    for (std::size_t i = 0; i < ids.size(); ++i) t.rows.push_back({std::to_string(ids[i]), cutoffs[i]});
    return t;
}

void add_generic_tables(run_result& out, const market_spec& m, const solve_report& r) {
    out.tables.push_back({"matching.csv", matching_table(r.mu, firm_ids(m), individual_ids(m))});
    out.tables.push_back({"thresholds.csv", thresholds_table(individual_ids(m), cutoff_types(m, r))});
}

void require_kind(const scenario& sc, scenario_kind k, const std::string& sub) {
    if (sc.kind != k)
        throw usage_problem{"'" + sub + "' needs a " + to_string(k) + " scenario, got " + to_string(sc.kind)};
}

void cmd_solve_generic(run_result& out, const scenario& sc, std::uint64_t seed) {
    auto sol = solve_generic(sc, seed);
    out.report["solve"] = solve_json(sc.market, sol.report);
    if (sol.horizontal) {
        ojson rows = ojson::array();
        for (const auto& row : sol.horizontal->rows) {
            ojson cuts = ojson::array();
            for (const auto& c : row.cutoffs)
                cuts.push_back({{"sigma_f", c.sigma_f}, {"cutoff_v", c.cutoff_v}, {"representable", c.representable}});
            rows.push_back({{"individual", sc.market.individuals[row.individual].id},
                            {"pivot", row.pivot},
                            {"predicted_slope", row.predicted_slope},
                            {"observed_slope", row.observed_slope},
                            {"consistent", row.consistent},
                            {"cutoffs", cuts}});
        }
        out.report["horizontal"] = {{"rows", rows},
                                    {"v_double_star", json_or_null(sol.horizontal->v_double_star)},
                                    {"boundary_consistent", sol.horizontal->boundary_consistent}};
    }
    add_generic_tables(out, sc.market, sol.report);
}

void cmd_oracle(run_result& out, const scenario& sc, std::uint64_t seed, double tol) {
    const auto& m = sc.market;
    auto bf = brute_force(m, false, limits_of(sc));
    auto th = solve_threshold(m, seed, limits_of(sc));
    const double gap = std::fabs(bf.objective - th.objective);
    const bool pass = gap <= tol;
    out.report["oracle"] = {{"brute_force_objective", bf.objective},
                            {"threshold_objective", th.objective},
                            {"gap", gap},
                            {"tolerance", tol},
                            {"threshold_exhaustive", th.exhaustive},
                            {"same_matching", bf.mu == th.mu},
                            {"status", pass ? "pass" : "fail"}};
    out.report["solve"] = solve_json(m, bf);
    add_generic_tables(out, m, bf);
    if (!pass) out.code = exit_assertion;
}

void cmd_check(run_result& out, const scenario& sc, std::uint64_t seed, double tol) {
    const auto& m = sc.market;
    std::vector<verdict> claims;
    auto fo = firm_order(m);
    auto io = individual_order(m);
    claims.push_back({"firm_supermodular_order", fo.found ? verdict_status::pass : verdict_status::fail,
                      fo.found ? "firm increments are consistently ranked" : describe(*fo.certificate)});
    claims.push_back({"individual_supermodular_order", io.found ? verdict_status::pass : verdict_status::fail,
                      io.found ? "individual increments are consistently ranked" : describe(*io.certificate)});

    if (m.n_firms() * m.n_individuals() <= sc.solver.max_cells) {
        auto bf = brute_force(m, false, limits_of(sc));
        bool rep = to_thresholds(bf.mu, bf.firm_order).representable;
        std::string detail = rep ? "brute-force optimum is a threshold matching" : "brute-force optimum is not a threshold matching";
        if (!rep) {
            auto mono = brute_force(m, true, limits_of(sc));
            if (mono.objective >= bf.objective - 1e-12 * std::max(1.0, std::fabs(bf.objective))) {
                rep = true;
                detail = "a threshold matching ties the brute-force optimum";
            }
        }
        claims.push_back({"optimum_threshold_representable", rep ? verdict_status::pass : verdict_status::fail, detail});
    } else {
        claims.push_back({"optimum_threshold_representable", verdict_status::not_applicable,
                          "market exceeds the enumeration cap"});
    }

    auto th = solve_threshold(m, seed, limits_of(sc));
    ojson focs = ojson::array();
    std::string bad;
    for (const auto& f : m.firms) {
        auto r = foc_residual(m, th.mu, f.id);
        if ((r.add_delta && *r.add_delta > tol) || (r.drop_delta && *r.drop_delta > tol))
            bad += (bad.empty() ? "firm " : ", firm ") + std::to_string(f.id);
        focs.push_back({{"firm", f.id},
                        {"interior", r.interior},
                        {"add_residual", json_or_null(r.add_residual)},
                        {"add_delta", json_or_null(r.add_delta)},
                        {"keep_residual", json_or_null(r.keep_residual)},
                        {"drop_delta", json_or_null(r.drop_delta)}});
    }
    claims.push_back({"discrete_first_order_conditions", bad.empty() ? verdict_status::pass : verdict_status::fail,
                      bad.empty() ? "no single add or drop improves the threshold solution" : bad + " can improve"});

    auto pre = check_welfare_lemma_preconditions(m, th);
    ojson cj = ojson::array();
    for (const auto& c : claims) {
        cj.push_back(verdict_json(c));
        if (failed(c)) out.code = exit_assertion;
    }
    out.report["check"] = {{"claims", cj},
                           {"tolerance", tol},
                           {"first_order", focs},
                           {"welfare_preconditions",
                            {{"representable", pre.representable},
                             {"no_exclusion", pre.no_exclusion},
                             {"literal_cutoff_at_top", pre.literal_cutoff_at_top},
                             {"top_firm_payoff_increasing", pre.top_firm_payoff_increasing},
                             {"lowest_individual_payoff_increasing", pre.lowest_individual_payoff_increasing},
                             {"applicable", pre.applicable},
                             {"reason", pre.reason}}}};
    out.report["solve"] = solve_json(m, th);
    add_generic_tables(out, m, th);
}

solver_choice choice_of(const scenario& sc) {
    if (sc.solver.method == "threshold") return solver_choice::threshold;
    if (sc.solver.method == "pointwise_affine") return solver_choice::pointwise_affine;
    return solver_choice::brute_force;
}

ojson set_changes_json(const std::vector<set_change>& v) {
    ojson out = ojson::array();
    for (const auto& c : v) out.push_back({{"id", c.id}, {"relation", c.relation}, {"size_delta", c.size_delta}});
    return out;
}

csv_table welfare_table(const std::vector<double>& v, const std::vector<double>& before, const std::vector<double>& after) {
    csv_table t{{"v", "V_before", "V_after", "delta"}, {}};
    for (std::size_t k = 0; k < v.size(); ++k)
        t.rows.push_back({format_double(v[k]), format_double(before[k]), format_double(after[k]),
                          format_double(after[k] - before[k])});
    return t;
}

void cmd_compstat(run_result& out, const scenario& sc, std::uint64_t seed) {
    if (!sc.shift) throw usage_problem{"'compstat' needs experiment.shift"};
    const auto& m = sc.market;
    auto shifted = apply_shift(m, *sc.shift);
    auto cmp = compare(m, shifted.market, sc.shift, choice_of(sc), seed);
    ojson verdicts = ojson::array();
    for (const auto& v : cmp.verdicts) verdicts.push_back(verdict_json(v));
    out.report["compstat"] = {{"increasing_differences", shifted.increasing_differences},
                              {"order_preserved", shifted.order_preserved},
                              {"exhaustive", cmp.exhaustive},
                              {"firms", set_changes_json(cmp.firms)},
                              {"individuals", set_changes_json(cmp.individuals)},
                              {"quality_delta", cmp.quality_delta},
                              {"verdicts", verdicts}};
    out.report["before"] = solve_json(m, cmp.before);
    out.report["after"] = solve_json(shifted.market, cmp.after);
    if (!cmp.clean()) out.code = exit_assertion;
    if (sc.individual_types) {
        auto w = welfare_delta(m, cmp.before, shifted.market, cmp.after, *sc.individual_types);
        out.report["welfare"] = {{"types", w.types},
                                 {"payoff_before", w.payoff_before},
                                 {"payoff_after", w.payoff_after},
                                 {"delta", w.delta},
                                 {"sign", w.sign},
                                 {"movement", w.movement},
                                 {"claim", verdict_json(w.claim)}};
        if (failed(w.claim)) out.code = exit_assertion;
        out.tables.push_back({"welfare.csv", welfare_table(w.types, w.payoff_before, w.payoff_after)});
    }
    add_generic_tables(out, shifted.market, cmp.after);
}

// ---------------------------------------------------------------------------------------------
// Distributor

ojson mvpd_outcome_json(const mvpd_spec& s, const mvpd_outcome& r) {
    ojson cutoffs = ojson::array();
    for (std::size_t j = 0; j < s.n_channels(); ++j)
        cutoffs.push_back({{"channel", s.channels[j].id}, {"lowest_type_served", json_or_null(r.cutoff[j])}});
    ojson fees = ojson::array();
    for (std::size_t j = 0; j < s.n_channels(); ++j) fees.push_back({{"channel", s.channels[j].id}, {"fee", r.revenue.fees[j]}});
    ojson out{{"objective", r.objective},
              {"bundle_size", r.bundle_size},
              {"cutoffs", cutoffs},
              {"excluded_cells", r.excluded_cells},
              {"menus_evaluated", r.menus_evaluated},
              {"revenue",
               {{"objective", r.revenue.objective},
                {"fee_total", r.revenue.fee_total},
                {"viewer_revenue", r.revenue.viewer_revenue},
                {"identity_gap", r.revenue.identity_gap}}},
              {"fees", fees},
              {"payments", {{"grid", r.grid}, {"payments", r.payments}}}};
    if (r.blr)
        out["owned_channel_terms"] = {{"channel_payoffs", r.blr->channel_payoffs},
                                      {"viewer_terms", r.blr->viewer_terms},
                                      {"owned_correction", r.blr->owned_correction},
                                      {"leverage", r.blr->leverage},
                                      {"total", r.blr->total},
                                      {"by_fees", r.blr->by_fees},
                                      {"identity_gap", r.blr->identity_gap}};
    return out;
}

csv_table fees_table(const mvpd_spec& s, const mvpd_outcome& r) {
    csv_table t{{"channel_id", "fee"}, {}};
    for (std::size_t j = 0; j < s.n_channels(); ++j) {
        const int id = s.channels[j].id;
        if (s.owned_channel && *s.owned_channel == id) continue;
        const double fee = s.owned_channel ? blr_fee(s, r.mu, id) : r.revenue.fees[j];
        t.rows.push_back({std::to_string(id), format_double(fee)});
    }
    return t;
}

void check_mvpd_identities(run_result& out, const mvpd_outcome& r, double tol) {
    const bool bad = r.revenue.identity_gap > tol || (r.blr && r.blr->identity_gap > tol);
    if (bad) out.code = std::max(out.code, static_cast<int>(exit_identity));
}

void add_mvpd_tables(run_result& out, const mvpd_spec& s, const mvpd_outcome& r) {
    std::vector<int> ids;
    std::vector<double> types;
    for (const auto& c : s.channels) {
        ids.push_back(c.id);
        types.push_back(c.v);
    }
    const auto cells = sequence(s.viewer_cells);
    out.tables.push_back({"matching.csv", matching_table(r.mu, ids, cells)});
    std::vector<std::string> cut;
    for (std::size_t i = 0; i < s.viewer_cells; ++i) cut.push_back(lowest_type(r.mu.firms_of(i), types));
    out.tables.push_back({"thresholds.csv", thresholds_table(cells, cut)});
    out.tables.push_back({"fees.csv", fees_table(s, r)});
}

void cmd_mvpd(run_result& out, const scenario& sc, double tol) {
    const auto& s = sc.mvpd;
    out.report["scenario"]["description"] = describe(s);
    if (!sc.merger_change) {
        auto r = solve_mvpd(s);
        out.report["mvpd"] = mvpd_outcome_json(s, r);
        check_mvpd_identities(out, r, tol);
        add_mvpd_tables(out, s, r);
        return;
    }
    auto after_spec = merger_transform(s, *sc.merger_change);
    auto r = merger_counterfactual(s, *sc.merger_change);
    out.report["mvpd"] = {{"before", mvpd_outcome_json(s, r.before)},
                          {"after", mvpd_outcome_json(after_spec, r.after)},
                          {"cell_relation", r.cell_relation},
                          {"verdicts", {verdict_json(r.bundles), verdict_json(r.lower_channels), verdict_json(r.welfare)}}};
    for (const auto* v : {&r.bundles, &r.lower_channels, &r.welfare})
        if (failed(*v)) out.code = exit_assertion;
    check_mvpd_identities(out, r.before, tol);
    check_mvpd_identities(out, r.after, tol);
    add_mvpd_tables(out, after_spec, r.after);
    out.tables.push_back({"welfare.csv", welfare_table(r.before.grid, r.payoff_before, r.payoff_after)});
}

// ---------------------------------------------------------------------------------------------
// Retail platform

ojson amazon_json(const amazon_outcome& r) {
    ojson customers = ojson::array();
    for (std::size_t i = 0; i < r.customers.types.size(); ++i) {
        customers.push_back({{"id", static_cast<int>(i)},
                             {"v", r.customers.types[i]},
                             {"mass", r.customers.masses[i]},
                             {"set_size", r.size[i]},
                             {"pointwise_size", r.pointwise_size[i]},
                             {"quality", r.quality[i]},
                             {"payoff", r.payoff[i]},
                             {"firms", r.mu.firms_of(i)}});
    }
    return ojson{{"objective", r.objective},
                 {"firm_types", r.firms.types},
                 {"firm_weights", r.firms.weights},
                 {"virtual_values", r.firms.virtual_values},
                 {"firm_cell", r.firms.cell},
                 {"ratio_order", r.order},
                 {"pools", r.pools},
                 {"ratio_monotone", r.ratio_monotone},
                 {"firm_monotone", r.firm_monotone},
                 {"customer_ratio_monotone", r.customer_ratio_monotone},
                 {"pooled", r.pooled},
                 {"customers", customers}};
}

void add_amazon_tables(run_result& out, const amazon_outcome& r) {
    const auto firms = sequence(r.firms.types.size());
    const auto customers = sequence(r.customers.types.size());
    out.tables.push_back({"matching.csv", matching_table(r.mu, firms, customers)});
    std::vector<std::string> cut;
    for (std::size_t i = 0; i < customers.size(); ++i) cut.push_back(lowest_type(r.mu.firms_of(i), r.firms.types));
    out.tables.push_back({"thresholds.csv", thresholds_table(customers, cut)});
}

void cmd_monopcomp(run_result& out, const scenario& sc) {
    const auto& s = sc.monopcomp;
    out.report["scenario"]["description"] = describe(s);
    out.report["ces"] = {{"sigma", s.ces.sigma},      {"theta", s.ces.theta_ces}, {"markup", s.ces.markup()},
                         {"kappa", s.ces.kappa()},    {"psi", s.ces.psi()},       {"gamma", s.ces.gamma()}};
    if (!sc.partition_change) {
        auto r = solve_amazon(s);
        out.report["monopcomp"] = amazon_json(r);
        add_amazon_tables(out, r);
        return;
    }
    auto cmp = amazon_counterfactual(s, *sc.partition_change);
    out.report["monopcomp"] = {{"change", sc.partition_change->tag == amazon_change::kind::acquire ? "acquire" : "refine"},
                               {"cell", sc.partition_change->cell},
                               {"cell_status", cmp.status},
                               {"relation", cmp.relation},
                               {"payoff_delta", cmp.payoff_delta},
                               {"verdicts", {verdict_json(cmp.sets), verdict_json(cmp.welfare)}},
                               {"before", amazon_json(cmp.before)},
                               {"after", amazon_json(cmp.after)}};
    if (failed(cmp.sets) || failed(cmp.welfare)) out.code = exit_assertion;
    add_amazon_tables(out, cmp.after);
    out.tables.push_back({"welfare.csv", welfare_table(cmp.before.customers.types, cmp.before.payoff, cmp.after.payoff)});
}

// ---------------------------------------------------------------------------------------------
// Property suites

void cmd_properties(run_result& out, const run_options& o, std::uint64_t seed) {
    std::vector<std::string> names;
    if (o.suite == "all") {
        for (const auto& s : property_suites()) names.push_back(s.name);
    } else {
        names.push_back(o.suite);
    }
    property_options po;
    po.seed = seed;
    po.trials = o.trials;
    po.jobs = o.jobs;
    po.tolerance = o.tolerance;
    ojson suites = ojson::array();
    bool all_ok = true;
    for (const auto& n : names) {
        auto rep = run_suite(n, po);
        ojson records = ojson::array();
        for (const auto& t : rep.records)
            records.push_back({{"index", t.index}, {"seed", t.seed}, {"status", to_string(t.status)}, {"detail", t.detail}});
        suites.push_back({{"suite", rep.suite},
                          {"description", rep.description},
                          {"seed", rep.seed},
                          {"requested", rep.requested},
                          {"tolerance", json_or_null(rep.tolerance)},
                          {"passed", rep.passed},
                          {"failed", rep.failed},
                          {"skipped", rep.skipped},
                          {"verdict", rep.ok() ? "pass" : rep.failed ? "fail" : "incomplete"},
                          {"records", records}});
        all_ok = all_ok && rep.ok();
    }
    out.report["properties"] = {{"verdict", all_ok ? "pass" : "fail"}, {"suites", suites}};
    if (!all_ok) out.code = exit_assertion;
}

ojson provenance(const std::string& sub, const std::string& input_text, bool has_input,
                 std::optional<std::uint64_t> seed, std::optional<double> tol) {
    ojson p{{"tool", "platmatch"},
            {"version", tool_version()},
            {"command", sub},
            {"input_fnv1a64", has_input ? ojson(hex64(fnv1a64(input_text))) : ojson(nullptr)},
            {"seed", seed ? ojson(*seed) : ojson(nullptr)},
            {"tolerance", json_or_null(tol)}};
    return p;
}

void set_error(run_result& out, int code, const std::string& kind, const std::vector<std::string>& messages) {
    out.code = code;
    out.report["error"] = {{"kind", kind}, {"messages", messages}};
    out.tables.clear();
}

}  // namespace

run_result run(const std::string& sub, const std::optional<scenario>& sc, const std::string& input_text,
               const run_options& o) {
    run_result out;
    const bool props = sub == "properties";
    const std::uint64_t seed = o.seed.value_or(props ? 7 : sc ? sc->solver.seed : 0);
    std::optional<double> tol = o.tolerance;
    if (sub == "oracle") tol = o.tolerance.value_or(1e-9);
    else if (sub == "check") tol = o.tolerance.value_or(1e-12);
    else if (sub == "mvpd" || (sub == "solve" && sc && sc->kind == scenario_kind::mvpd)) tol = o.tolerance.value_or(1e-8);

    out.report["provenance"] = provenance(sub, input_text, sc.has_value(), seed, tol);
    out.report["status"] = "ok";
    out.report["exit_code"] = 0;
    if (props) {
        out.report["provenance"]["suite"] = o.suite;
        out.report["provenance"]["trials"] = o.trials;
    }
    if (sc) out.report["scenario"] = {{"schema_version", sc->version}, {"kind", to_string(sc->kind)}};

    try {
        if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
            throw usage_problem{"unknown subcommand '" + sub + "'"};
        if (!props && !sc) throw usage_problem{"'" + sub + "' needs a scenario file"};
        if (sub == "solve") {
            scenario plain = *sc;
            plain.shift.reset();
            plain.merger_change.reset();
            plain.partition_change.reset();
            if (plain.kind == scenario_kind::generic) cmd_solve_generic(out, plain, seed);
            else if (plain.kind == scenario_kind::mvpd) cmd_mvpd(out, plain, *tol);
            else cmd_monopcomp(out, plain);
        } else if (sub == "oracle") {
            require_kind(*sc, scenario_kind::generic, sub);
            cmd_oracle(out, *sc, seed, *tol);
        } else if (sub == "check") {
            require_kind(*sc, scenario_kind::generic, sub);
            cmd_check(out, *sc, seed, *tol);
        } else if (sub == "compstat") {
            require_kind(*sc, scenario_kind::generic, sub);
            cmd_compstat(out, *sc, seed);
        } else if (sub == "mvpd") {
            require_kind(*sc, scenario_kind::mvpd, sub);
            cmd_mvpd(out, *sc, *tol);
        } else if (sub == "monopcomp") {
            require_kind(*sc, scenario_kind::monopcomp, sub);
            cmd_monopcomp(out, *sc);
        } else {
            cmd_properties(out, o, seed);
        }
    } catch (const usage_problem& e) {
        set_error(out, exit_validation, "usage", {e.message});
    } catch (const error& e) {
        set_error(out, exit_for(e.kind()), to_string(e.kind()), {e.what()});
    } catch (const std::exception& e) {
        set_error(out, exit_identity, "internal", {e.what()});
    }
    out.report["status"] = status_for(out.code);
    out.report["exit_code"] = out.code;
    return out;
}

run_result load_failure(const std::string& sub, const load_error& e, const std::string& input_text) {
    run_result out;
    out.report["provenance"] = provenance(sub, input_text, e.which() != load_error::category::io, std::nullopt, std::nullopt);
    set_error(out, exit_validation, to_string(e.which()), e.messages());
    out.report["status"] = status_for(out.code);
    out.report["exit_code"] = out.code;
    return out;
}

std::string render_report(const run_result& r) { return r.report.dump(2) + "\n"; }

}  // namespace platmatch::cli
