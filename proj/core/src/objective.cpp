#include "platmatch/objective.hpp"

#include "platmatch/errors.hpp"

#include <cmath>

namespace platmatch {

namespace {

void require_shape(const market_spec& m, const matching& mu) {
    if (mu.n_firms() != m.n_firms() || mu.n_individuals() != m.n_individuals())
        fail(errc::input, "matching dimensions do not match the market");
}

}  // namespace

double size_of(const market_spec& m, const matching& mu, std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.n_firms(); ++j)
        if (mu.at(j, i)) s += m.firms[j].sigma;
    return s;
}

double quality_of(const market_spec& m, const matching& mu, std::size_t j, const std::vector<double>& sizes) {
    double q = 0.0;
    for (std::size_t i = 0; i < m.n_individuals(); ++i) {
        if (!mu.at(j, i)) continue;
        const auto& ind = m.individuals[i];
        double h = m.kernel(sizes[i], ind.sigma, m.firms[j].sigma);
        if (h < 0.0) fail(errc::validation, "competition kernel evaluated negative");
        q += ind.mass * h;
    }
    return q;
}

double weighted_size(const market_spec& m, const matching& mu, int individual_id) {
    require_shape(m, mu);
    return size_of(m, mu, m.individual_index(individual_id));
}

double firm_match_quality(const market_spec& m, const matching& mu, int firm_id) {
    require_shape(m, mu);
    std::size_t j = m.firm_index(firm_id);
    std::vector<double> sizes(m.n_individuals());
    for (std::size_t i = 0; i < sizes.size(); ++i) sizes[i] = size_of(m, mu, i);
    return quality_of(m, mu, j, sizes);
}

objective_terms evaluate(const market_spec& m, const matching& mu) {
    require_shape(m, mu);
    objective_terms t;
    t.sizes.resize(m.n_individuals());
    t.individual_terms.resize(m.n_individuals());
    for (std::size_t i = 0; i < m.n_individuals(); ++i) {
        t.sizes[i] = size_of(m, mu, i);
        t.individual_terms[i] = m.individuals[i].mass * m.u_i.value(m.individuals[i].v, t.sizes[i]);
        t.individual_total += t.individual_terms[i];
    }
    t.qualities.resize(m.n_firms());
    t.firm_terms.resize(m.n_firms());
    for (std::size_t j = 0; j < m.n_firms(); ++j) {
        t.qualities[j] = quality_of(m, mu, j, t.sizes);
        t.firm_terms[j] = m.firm_payoff(j).value(m.firms[j].v, t.qualities[j]);
        t.firm_total += t.firm_terms[j];
    }
    t.total = t.firm_total + t.individual_total;
    if (!std::isfinite(t.total)) fail(errc::numeric, "platform objective is not finite");
    return t;
}

double platform_objective(const market_spec& m, const matching& mu) { return evaluate(m, mu).total; }

}  // namespace platmatch
