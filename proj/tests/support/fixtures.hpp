#pragma once

#include "platmatch/market.hpp"
#include "platmatch/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace platmatch::testing {

/// Two firms v=(2,1), two individuals v=(2,1) with mass 1/2, U = v*x on both sides,
/// h(1) = 1 and h(2) = 0.1.
inline market_spec instance_a() {
    market_spec m;
    m.firms = {{1, 2.0, 1.0}, {2, 1.0, 1.0}};
    m.individuals = {{1, 1.0, 1.0, 0.5}, {2, 2.0, 1.0, 0.5}};
    m.u_i = payoff_family::product(size_function::identity());
    m.u_f = payoff_family::product(size_function::identity());
    m.kernel = competition_kernel::table({1.0, 2.0}, {1.0, 0.1});
    return m;
}

/// Objective straight from its definition, sharing no code with the library evaluator.
/// `cell(j, i)` says whether firm j is matched with individual i.
template <class Cell>
double direct_objective(const market_spec& m, Cell cell) {
    std::vector<double> size(m.individuals.size(), 0.0);
    for (std::size_t i = 0; i < m.individuals.size(); ++i)
        for (std::size_t j = 0; j < m.firms.size(); ++j)
            if (cell(j, i)) size[i] += m.firms[j].sigma;
    double total = 0.0;
    for (std::size_t i = 0; i < m.individuals.size(); ++i)
        total += m.individuals[i].mass * m.u_i.value(m.individuals[i].v, size[i]);
    for (std::size_t j = 0; j < m.firms.size(); ++j) {
        double q = 0.0;
        for (std::size_t i = 0; i < m.individuals.size(); ++i)
            if (cell(j, i)) q += m.individuals[i].mass * m.kernel(size[i], m.individuals[i].sigma, m.firms[j].sigma);
        total += m.firm_payoff(j).value(m.firms[j].v, q);
    }
    return total;
}

/// Maximum of direct_objective over every incidence matrix.
inline double enumerate_all(const market_spec& m) {
    const std::size_t n = m.firms.size(), k = m.individuals.size();
    double best = -HUGE_VAL;
    for (unsigned long mask = 0; mask < (1ul << (n * k)); ++mask)
        best = std::max(best, direct_objective(m, [&](std::size_t j, std::size_t i) { return (mask >> (j * k + i)) & 1; }));
    return best;
}

}  // namespace platmatch::testing
