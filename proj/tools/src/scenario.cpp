#include "scenario.hpp"

#include "platmatch/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace platmatch::cli {

using json = nlohmann::json;

std::string to_string(scenario_kind k) {
    switch (k) {
        case scenario_kind::generic: return "generic";
        case scenario_kind::mvpd: return "mvpd";
        case scenario_kind::monopcomp: return "monopcomp";
    }
    return "generic";
}

load_error::load_error(category c, std::vector<std::string> messages)
    : std::runtime_error(messages.empty() ? to_string(c) + " error" : messages.front()),
      category_(c),
      messages_(std::move(messages)) {}

std::string to_string(load_error::category c) {
    switch (c) {
        case load_error::category::io: return "io";
        case load_error::category::parse: return "parse";
        case load_error::category::schema: return "schema";
        case load_error::category::invariant: return "invariant";
    }
    return "schema";
}

namespace {

// Walks the document, recording every schema problem with its path and returning defaults so
// that later fields are still checked.
class reader {
public:
    std::vector<std::string> errors;

    void problem(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            problem(path, "expected an object");
            return false;
        }
        for (const auto& [key, value] : j.items()) {
            if (key == "notes") continue;
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
                problem(path + "." + key, "unknown field");
        }
        return true;
    }

    const json* field(const json& j, const std::string& path, const char* key, bool required) {
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) problem(path + "." + key, "missing required field");
            return nullptr;
        }
        return &*it;
    }

    double number(const json& j, const std::string& path, const char* key, std::optional<double> fallback) {
        const json* f = field(j, path, key, !fallback);
        if (!f) return fallback.value_or(0.0);
        if (!f->is_number()) {
            problem(path + "." + key, "expected a number");
            return fallback.value_or(0.0);
        }
        return f->get<double>();
    }

    long long integer(const json& j, const std::string& path, const char* key, std::optional<long long> fallback) {
        const json* f = field(j, path, key, !fallback);
        if (!f) return fallback.value_or(0);
        if (!f->is_number_integer()) {
            problem(path + "." + key, "expected an integer");
            return fallback.value_or(0);
        }
        return f->get<long long>();
    }

    std::size_t count(const json& j, const std::string& path, const char* key, std::optional<std::size_t> fallback) {
        const long long n = integer(j, path, key, fallback ? std::optional<long long>(static_cast<long long>(*fallback))
                                                           : std::nullopt);
        if (n < 0) {
            problem(path + "." + key, "expected a nonnegative integer");
            return fallback.value_or(0);
        }
        return static_cast<std::size_t>(n);
    }

    bool boolean(const json& j, const std::string& path, const char* key, bool fallback) {
        const json* f = field(j, path, key, false);
        if (!f) return fallback;
        if (!f->is_boolean()) {
            problem(path + "." + key, "expected true or false");
            return fallback;
        }
        return f->get<bool>();
    }

    std::string text(const json& j, const std::string& path, const char* key, std::optional<std::string> fallback) {
        const json* f = field(j, path, key, !fallback);
        if (!f) return fallback.value_or("");
        if (!f->is_string()) {
            problem(path + "." + key, "expected a string");
            return fallback.value_or("");
        }
        return f->get<std::string>();
    }

    std::vector<double> numbers(const json& j, const std::string& path, const char* key) {
        const json* f = field(j, path, key, true);
        std::vector<double> out;
        if (!f) return out;
        if (!f->is_array()) {
            problem(path + "." + key, "expected an array of numbers");
            return out;
        }
        for (std::size_t k = 0; k < f->size(); ++k) {
            if (!(*f)[k].is_number()) {
                problem(path + "." + key + "[" + std::to_string(k) + "]", "expected a number");
                continue;
            }
            out.push_back((*f)[k].get<double>());
        }
        return out;
    }

    std::vector<int> ids(const json& j, const std::string& path, const char* key) {
        const json* f = field(j, path, key, true);
        std::vector<int> out;
        if (!f) return out;
        if (!f->is_array()) {
            problem(path + "." + key, "expected an array of integer ids");
            return out;
        }
        for (std::size_t k = 0; k < f->size(); ++k) {
            if (!(*f)[k].is_number_integer()) {
                problem(path + "." + key + "[" + std::to_string(k) + "]", "expected an integer id");
                continue;
            }
            out.push_back((*f)[k].get<int>());
        }
        return out;
    }

    // Runs a library constructor, turning its argument errors into schema problems.
    template <class T, class F>
    T build(const std::string& path, F make) {
        try {
            return make();
        } catch (const error& e) {
            problem(path, e.what());
            return T{};
        }
    }
};

type_function parse_type_function(reader& r, const json& j, const std::string& path) {
    if (j.is_number()) return type_function::constant(j.get<double>());
    if (!j.is_object()) {
        r.problem(path, "expected a number or an object");
        return type_function::identity();
    }
    const std::string kind = r.text(j, path, "kind", std::nullopt);
    if (kind == "identity") {
        r.object(j, path, {"kind"});
        return type_function::identity();
    }
    if (kind == "linear") {
        r.object(j, path, {"kind", "intercept", "slope"});
        return type_function::linear(r.number(j, path, "intercept", 0.0), r.number(j, path, "slope", 0.0));
    }
    if (kind == "table") {
        r.object(j, path, {"kind", "v", "values"});
        auto vs = r.numbers(j, path, "v");
        auto ys = r.numbers(j, path, "values");
        return r.build<type_function>(path, [&] { return type_function::table(vs, ys); });
    }
    if (!kind.empty()) r.problem(path + ".kind", "unknown type function '" + kind + "'");
    return type_function::identity();
}

size_function parse_size_function(reader& r, const json& j, const std::string& path) {
    if (!r.object(j, path, {"kind", "coef", "exponent", "slope", "intercept", "x", "values"}))
        return size_function::identity();
    const std::string kind = r.text(j, path, "kind", std::nullopt);
    if (kind == "identity") return size_function::identity();
    if (kind == "power")
        return r.build<size_function>(path, [&] {
            return size_function::power(r.number(j, path, "coef", 1.0), r.number(j, path, "exponent", std::nullopt));
        });
    if (kind == "log1p") return size_function::log1p(r.number(j, path, "coef", 1.0));
    if (kind == "affine") return size_function::affine(r.number(j, path, "slope", 1.0), r.number(j, path, "intercept", 0.0));
    if (kind == "table") {
        auto xs = r.numbers(j, path, "x");
        auto ys = r.numbers(j, path, "values");
        return r.build<size_function>(path, [&] { return size_function::table(xs, ys); });
    }
    if (!kind.empty()) r.problem(path + ".kind", "unknown size function '" + kind + "'");
    return size_function::identity();
}

payoff_family parse_payoff(reader& r, const json& j, const std::string& path) {
    if (!r.object(j, path, {"family", "a", "b", "m", "g", "v", "x", "values"})) return payoff_family::zero();
    const std::string family = r.text(j, path, "family", std::nullopt);
    auto sub = [&](const char* key) -> const json* { return r.field(j, path, key, true); };
    if (family == "zero") return payoff_family::zero();
    if (family == "affine") {
        const json* a = sub("a");
        const json* b = sub("b");
        if (!a || !b) return payoff_family::zero();
        return payoff_family::affine(parse_type_function(r, *a, path + ".a"), parse_type_function(r, *b, path + ".b"));
    }
    if (family == "multiplicative") {
        const json* m = sub("m");
        const json* g = sub("g");
        if (!m || !g) return payoff_family::zero();
        return payoff_family::multiplicative(parse_type_function(r, *m, path + ".m"),
                                             parse_size_function(r, *g, path + ".g"));
    }
    if (family == "product") {
        const json* g = sub("g");
        if (!g) return payoff_family::zero();
        return payoff_family::product(parse_size_function(r, *g, path + ".g"));
    }
    if (family == "tabulated") {
        payoff_table t{r.numbers(j, path, "v"), r.numbers(j, path, "x"), r.numbers(j, path, "values")};
        return r.build<payoff_family>(path, [&] { return payoff_family::tabulated(t); });
    }
    if (!family.empty()) r.problem(path + ".family", "unknown payoff family '" + family + "'");
    return payoff_family::zero();
}

competition_kernel parse_kernel(reader& r, const json& j, const std::string& path) {
    if (!r.object(j, path,
                  {"kind", "c", "c0", "c1", "scale", "eps", "exponent", "psi", "kappa", "sizes", "values",
                   "sigma_f_decay", "scale_by_sigma_i"}))
        return competition_kernel::constant(1.0);
    const std::string kind = r.text(j, path, "kind", std::nullopt);
    competition_kernel h = r.build<competition_kernel>(path, [&]() -> competition_kernel {
        if (kind == "constant") return competition_kernel::constant(r.number(j, path, "c", std::nullopt));
        if (kind == "affine_truncated")
            return competition_kernel::affine_truncated(r.number(j, path, "c0", std::nullopt),
                                                        r.number(j, path, "c1", std::nullopt));
        if (kind == "power")
            return competition_kernel::power(r.number(j, path, "scale", 1.0), r.number(j, path, "eps", 1.0),
                                             r.number(j, path, "exponent", std::nullopt));
        if (kind == "ces")
            return competition_kernel::ces(r.number(j, path, "psi", std::nullopt), r.number(j, path, "kappa", std::nullopt));
        if (kind == "table") {
            auto xs = r.numbers(j, path, "sizes");
            auto ys = r.numbers(j, path, "values");
            return competition_kernel::table(xs, ys);
        }
        if (!kind.empty()) r.problem(path + ".kind", "unknown kernel '" + kind + "'");
        return competition_kernel::constant(1.0);
    });
    if (j.contains("sigma_f_decay")) h = h.with_sigma_f_decay(r.number(j, path, "sigma_f_decay", 0.0));
    if (r.boolean(j, path, "scale_by_sigma_i", false)) h = h.with_sigma_i_scaling();
    return h;
}

distribution parse_distribution(reader& r, const json& j, const std::string& path) {
    if (!r.object(j, path, {"kind", "lo", "hi", "mu", "s", "grid", "cdf", "density"}))
        return distribution::uniform(0.0, 1.0);
    const std::string kind = r.text(j, path, "kind", std::nullopt);
    return r.build<distribution>(path, [&]() -> distribution {
        if (kind == "uniform")
            return distribution::uniform(r.number(j, path, "lo", std::nullopt), r.number(j, path, "hi", std::nullopt));
        if (kind == "truncated_normal")
            return distribution::truncated_normal(r.number(j, path, "mu", std::nullopt), r.number(j, path, "s", std::nullopt),
                                                  r.number(j, path, "lo", std::nullopt),
                                                  r.number(j, path, "hi", std::nullopt));
        if (kind == "tabulated") {
            auto g = r.numbers(j, path, "grid");
            auto c = r.numbers(j, path, "cdf");
            auto d = r.numbers(j, path, "density");
            return distribution::tabulated(g, c, d);
        }
        if (!kind.empty()) r.problem(path + ".kind", "unknown distribution '" + kind + "'");
        return distribution::uniform(0.0, 1.0);
    });
}

template <class F>
void each(reader& r, const json& j, const std::string& path, const char* key, bool required, F f) {
    const json* arr = r.field(j, path, key, required);
    if (!arr) return;
    if (!arr->is_array()) {
        r.problem(path + "." + key, "expected an array");
        return;
    }
    for (std::size_t k = 0; k < arr->size(); ++k) f((*arr)[k], path + "." + key + "[" + std::to_string(k) + "]");
}

template <class F>
void each_override(reader& r, const json& j, const std::string& path, const char* key, F f) {
    const json* obj = r.field(j, path, key, false);
    if (!obj) return;
    if (!obj->is_object()) {
        r.problem(path + "." + key, "expected an object keyed by id");
        return;
    }
    for (const auto& [id, value] : obj->items()) {
        const std::string p = path + "." + key + "." + id;
        try {
            std::size_t used = 0;
            const int n = std::stoi(id, &used);
            if (used != id.size()) throw std::invalid_argument(id);
            f(n, value, p);
        } catch (const std::logic_error&) {
            r.problem(p, "key is not an integer id");
        }
    }
}

market_spec parse_market(reader& r, const json& j, const std::string& path) {
    market_spec m;
    if (!r.object(j, path,
                  {"firms", "individuals", "u_i", "u_f", "kernel", "firm_payoffs", "horizontal_firms",
                   "horizontal_individuals"}))
        return m;
    each(r, j, path, "firms", true, [&](const json& f, const std::string& p) {
        if (!r.object(f, p, {"id", "v", "sigma"})) return;
        m.firms.push_back({static_cast<int>(r.integer(f, p, "id", std::nullopt)), r.number(f, p, "v", std::nullopt),
                           r.number(f, p, "sigma", 1.0)});
    });
    each(r, j, path, "individuals", true, [&](const json& i, const std::string& p) {
        if (!r.object(i, p, {"id", "v", "sigma", "mass"})) return;
        m.individuals.push_back({static_cast<int>(r.integer(i, p, "id", std::nullopt)), r.number(i, p, "v", std::nullopt),
                                 r.number(i, p, "sigma", 1.0), r.number(i, p, "mass", std::nullopt)});
    });
    if (const json* u = r.field(j, path, "u_i", true)) m.u_i = parse_payoff(r, *u, path + ".u_i");
    if (const json* u = r.field(j, path, "u_f", true)) m.u_f = parse_payoff(r, *u, path + ".u_f");
    if (const json* h = r.field(j, path, "kernel", true)) m.kernel = parse_kernel(r, *h, path + ".kernel");
    each_override(r, j, path, "firm_payoffs", [&](int id, const json& u, const std::string& p) {
        m.firm_payoffs[id] = parse_payoff(r, u, p);
    });
    m.horizontal_firms = r.boolean(j, path, "horizontal_firms", false);
    m.horizontal_individuals = r.boolean(j, path, "horizontal_individuals", false);
    return m;
}

mvpd_spec parse_mvpd(reader& r, const json& j, const std::string& path) {
    mvpd_spec s;
    if (!r.object(j, path,
                  {"channels", "u_f", "channel_payoffs", "g_i", "viewers", "viewer_cells", "beta", "theta",
                   "owned_channel", "kernel"}))
        return s;
    each(r, j, path, "channels", true, [&](const json& c, const std::string& p) {
        if (!r.object(c, p, {"id", "v", "sigma"})) return;
        s.channels.push_back({static_cast<int>(r.integer(c, p, "id", std::nullopt)), r.number(c, p, "v", std::nullopt),
                              r.number(c, p, "sigma", 1.0)});
    });
    if (const json* u = r.field(j, path, "u_f", true)) s.u_f = parse_payoff(r, *u, path + ".u_f");
    each_override(r, j, path, "channel_payoffs", [&](int id, const json& u, const std::string& p) {
        s.channel_payoffs[id] = parse_payoff(r, u, p);
    });
    if (const json* g = r.field(j, path, "g_i", true)) s.g_i = parse_size_function(r, *g, path + ".g_i");
    if (const json* d = r.field(j, path, "viewers", false)) s.viewers = parse_distribution(r, *d, path + ".viewers");
    s.viewer_cells = r.count(j, path, "viewer_cells", std::size_t{20});
    s.beta = r.number(j, path, "beta", 0.5);
    s.theta = r.number(j, path, "theta", 0.0);
    if (j.contains("owned_channel")) s.owned_channel = static_cast<int>(r.integer(j, path, "owned_channel", std::nullopt));
    if (const json* h = r.field(j, path, "kernel", false)) s.kernel = parse_kernel(r, *h, path + ".kernel");
    return s;
}

amazon_spec parse_monopcomp(reader& r, const json& j, const std::string& path) {
    amazon_spec s;
    if (!r.object(j, path,
                  {"firms", "firm_nodes", "cells", "ces", "side", "customers", "customer_nodes", "mode", "owned"}))
        return s;
    if (const json* d = r.field(j, path, "firms", true)) s.firms = parse_distribution(r, *d, path + ".firms");
    s.firm_nodes = r.count(j, path, "firm_nodes", std::size_t{12});
    if (j.contains("cells")) s.cells.bounds = r.numbers(j, path, "cells");
    if (const json* c = r.field(j, path, "ces", true)) {
        const std::string p = path + ".ces";
        if (r.object(*c, p, {"sigma", "theta", "wealth"})) {
            s.ces.sigma = r.number(*c, p, "sigma", std::nullopt);
            s.ces.theta_ces = r.number(*c, p, "theta", std::nullopt);
            if (c->contains("wealth")) s.ces.wealth = r.number(*c, p, "wealth", std::nullopt);
        }
    }
    const std::string side = r.text(j, path, "side", std::string("homogeneous"));
    if (side == "homogeneous") s.side = customer_side::homogeneous;
    else if (side == "observed") s.side = customer_side::observed;
    else if (side == "private") s.side = customer_side::private_info;
    else r.problem(path + ".side", "expected homogeneous, observed or private");
    if (const json* d = r.field(j, path, "customers", false)) s.customers = parse_distribution(r, *d, path + ".customers");
    s.customer_nodes = r.count(j, path, "customer_nodes", std::size_t{8});
    const std::string mode = r.text(j, path, "mode", std::string("welfare_revenue"));
    if (mode == "welfare_revenue") s.mode = amazon_mode::welfare_revenue;
    else if (mode == "two_sided_revenue") s.mode = amazon_mode::two_sided_revenue;
    else r.problem(path + ".mode", "expected welfare_revenue or two_sided_revenue");
    if (j.contains("owned"))
        for (int c : r.ids(j, path, "owned")) {
            if (c < 0) r.problem(path + ".owned", "cell indices are nonnegative");
            else s.owned.insert(static_cast<std::size_t>(c));
        }
    return s;
}

solver_options parse_solver(reader& r, const json& j, const std::string& path) {
    solver_options o;
    if (!r.object(j, path, {"method", "max_cells", "restarts", "seed"})) return o;
    o.method = r.text(j, path, "method", o.method);
    if (o.method != "brute_force" && o.method != "threshold" && o.method != "pointwise_affine" && o.method != "horizontal")
        r.problem(path + ".method", "expected brute_force, threshold, pointwise_affine or horizontal");
    o.max_cells = r.count(j, path, "max_cells", o.max_cells);
    o.restarts = static_cast<int>(r.integer(j, path, "restarts", o.restarts));
    o.seed = static_cast<std::uint64_t>(r.count(j, path, "seed", std::size_t{0}));
    return o;
}

shift_spec parse_shift(reader& r, const json& j, const std::string& path) {
    shift_spec s;
    if (!r.object(j, path, {"kind", "firms", "epsilon", "alpha", "replacement"})) return s;
    const std::string kind = r.text(j, path, "kind", std::string("additive_slope"));
    if (kind == "additive_slope") s.tag = shift_spec::kind::additive_slope;
    else if (kind == "multiplicative_beta") s.tag = shift_spec::kind::multiplicative_beta;
    else if (kind == "replace_family") s.tag = shift_spec::kind::replace_family;
    else r.problem(path + ".kind", "expected additive_slope, multiplicative_beta or replace_family");
    s.firms = r.ids(j, path, "firms");
    s.epsilon = r.number(j, path, "epsilon", 0.0);
    if (const json* a = r.field(j, path, "alpha", s.tag == shift_spec::kind::multiplicative_beta))
        s.alpha = parse_type_function(r, *a, path + ".alpha");
    if (const json* u = r.field(j, path, "replacement", s.tag == shift_spec::kind::replace_family))
        s.replacement = parse_payoff(r, *u, path + ".replacement");
    return s;
}

merger parse_merger(reader& r, const json& j, const std::string& path) {
    merger m;
    if (!r.object(j, path, {"kind", "channels", "synergy"})) return m;
    const std::string kind = r.text(j, path, "kind", std::nullopt);
    if (kind == "horizontal") m.tag = merger::kind::horizontal;
    else if (kind == "vertical") m.tag = merger::kind::vertical;
    else r.problem(path + ".kind", "expected horizontal or vertical");
    m.channels = r.ids(j, path, "channels");
    m.synergy = r.number(j, path, "synergy", 0.0);
    return m;
}

amazon_change parse_partition_change(reader& r, const json& j, const std::string& path) {
    amazon_change c;
    if (!r.object(j, path, {"kind", "cell", "split"})) return c;
    const std::string kind = r.text(j, path, "kind", std::nullopt);
    if (kind == "acquire") c.tag = amazon_change::kind::acquire;
    else if (kind == "refine") c.tag = amazon_change::kind::refine;
    else r.problem(path + ".kind", "expected acquire or refine");
    c.cell = r.count(j, path, "cell", std::nullopt);
    c.split = r.number(j, path, "split", c.tag == amazon_change::kind::refine ? std::nullopt : std::optional<double>(0.0));
    return c;
}

std::vector<std::string> invariant_errors(const scenario& s) {
    std::vector<std::string> out;
    auto add = [&](const std::string& scope, const std::vector<std::string>& errs) {
        for (const auto& e : errs) out.push_back(scope + ": " + e);
    };
    switch (s.kind) {
        case scenario_kind::generic: {
            add("market", validation_errors(s.market));
            if (s.shift)
                for (int id : s.shift->firms)
                    if (std::none_of(s.market.firms.begin(), s.market.firms.end(), [&](const firm_type& f) { return f.id == id; }))
                        out.push_back("experiment.shift: unknown firm id " + std::to_string(id));
            if (s.individual_types)
                for (const auto& i : s.market.individuals)
                    if (!s.individual_types->contains(i.v))
                        out.push_back("individual_types: individual " + std::to_string(i.id) + " lies outside the support");
            break;
        }
        case scenario_kind::mvpd: {
            add("mvpd", validation_errors(s.mvpd));
            if (s.merger_change)
                for (int id : s.merger_change->channels)
                    if (std::none_of(s.mvpd.channels.begin(), s.mvpd.channels.end(), [&](const firm_type& c) { return c.id == id; }))
                        out.push_back("experiment.merger: unknown channel id " + std::to_string(id));
            break;
        }
        case scenario_kind::monopcomp: {
            add("monopcomp", validation_errors(s.monopcomp));
            if (s.partition_change && out.empty()) {
                const auto p = s.monopcomp.effective_cells();
                if (s.partition_change->cell >= p.cells())
                    out.push_back("experiment.partition: cell " + std::to_string(s.partition_change->cell) +
                                  " does not exist");
                else if (s.partition_change->tag == amazon_change::kind::refine &&
                         (s.partition_change->split < p.bounds[s.partition_change->cell] ||
                          s.partition_change->split > p.bounds[s.partition_change->cell + 1]))
                    out.push_back("experiment.partition: split lies outside the cell");
            }
            break;
        }
    }
    return out;
}

}  // namespace

scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw load_error(load_error::category::parse, {e.what()});
    }

    reader r;
    scenario s;
    const std::string root = "$";
    if (!r.object(doc, root,
                  {"schema_version", "kind", "market", "individual_types", "mvpd", "monopcomp", "solver", "experiment"}))
        throw load_error(load_error::category::schema, r.errors);

    s.version = r.text(doc, root, "schema_version", std::nullopt);
    if (doc.contains("schema_version") && s.version != schema_version)
        r.problem("$.schema_version", "unsupported version '" + s.version + "', expected '" + schema_version + "'");

    const std::string kind = r.text(doc, root, "kind", std::string("generic"));
    if (kind == "generic") s.kind = scenario_kind::generic;
    else if (kind == "mvpd") s.kind = scenario_kind::mvpd;
    else if (kind == "monopcomp") s.kind = scenario_kind::monopcomp;
    else r.problem("$.kind", "expected generic, mvpd or monopcomp");

    const char* block = s.kind == scenario_kind::generic ? "market" : s.kind == scenario_kind::mvpd ? "mvpd" : "monopcomp";
    for (const char* other : {"market", "mvpd", "monopcomp"})
        if (std::string(other) != block && doc.contains(other))
            r.problem(std::string("$.") + other, "not used by a " + kind + " scenario");
    if (const json* b = r.field(doc, root, block, true)) {
        const std::string p = std::string("$.") + block;
        if (s.kind == scenario_kind::generic) s.market = parse_market(r, *b, p);
        else if (s.kind == scenario_kind::mvpd) s.mvpd = parse_mvpd(r, *b, p);
        else s.monopcomp = parse_monopcomp(r, *b, p);
    }
    if (const json* d = r.field(doc, root, "individual_types", false))
        s.individual_types = parse_distribution(r, *d, "$.individual_types");
    if (const json* o = r.field(doc, root, "solver", false)) s.solver = parse_solver(r, *o, "$.solver");

    if (const json* e = r.field(doc, root, "experiment", false)) {
        const std::string p = "$.experiment";
        if (r.object(*e, p, {"shift", "merger", "partition"})) {
            const char* expected = s.kind == scenario_kind::generic ? "shift"
                                   : s.kind == scenario_kind::mvpd  ? "merger"
                                                                    : "partition";
            for (const auto& [key, value] : e->items()) {
                if (key == "notes") continue;
                if (key != expected) {
                    r.problem(p + "." + key, "not used by a " + kind + " scenario");
                    continue;
                }
                if (key == "shift") s.shift = parse_shift(r, value, p + ".shift");
                else if (key == "merger") s.merger_change = parse_merger(r, value, p + ".merger");
                else s.partition_change = parse_partition_change(r, value, p + ".partition");
            }
        }
    }

    if (!r.errors.empty()) throw load_error(load_error::category::schema, r.errors);
    auto inv = invariant_errors(s);
    if (!inv.empty()) throw load_error(load_error::category::invariant, inv);
    return s;
}

scenario load_scenario(const std::string& path, std::string* text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw load_error(load_error::category::io, {"cannot open scenario file '" + path + "'"});
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    scenario s = parse_scenario(content);
    if (text) *text = std::move(content);
    return s;
}

}  // namespace platmatch::cli
