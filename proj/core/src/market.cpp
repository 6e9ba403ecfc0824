#include "platmatch/market.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace platmatch {

const payoff_family& market_spec::firm_payoff(std::size_t j) const {
    auto it = firm_payoffs.find(firms[j].id);
    return it == firm_payoffs.end() ? u_f : it->second;
}

std::size_t market_spec::firm_index(int id) const {
    for (std::size_t j = 0; j < firms.size(); ++j)
        if (firms[j].id == id) return j;
    fail(errc::input, "unknown firm id " + std::to_string(id));
}

std::size_t market_spec::individual_index(int id) const {
    for (std::size_t i = 0; i < individuals.size(); ++i)
        if (individuals[i].id == id) return i;
    fail(errc::input, "unknown individual id " + std::to_string(id));
}

double market_spec::max_size() const {
    double s = 0.0;
    for (const auto& f : firms) s += f.sigma;
    return s;
}

double market_spec::max_quality() const {
    const double top = max_size();
    double q = 0.0;
    for (const auto& f : firms)
        for (const auto& ind : individuals) {
            double best = 0.0;
            for (int k = 0; k <= 16; ++k) {
                double x = top * k / 16.0;
                double h = kernel(x, ind.sigma, f.sigma);
                if (std::isfinite(h)) best = std::max(best, h);
            }
            q = std::max(q, best);
        }
    double total_mass = 0.0;
    for (const auto& ind : individuals) total_mass += ind.mass;
    return q * total_mass;
}

std::vector<std::string> validation_errors(const market_spec& m) {
    std::vector<std::string> out;
    if (m.firms.empty()) out.push_back("market has no firms");
    if (m.individuals.empty()) out.push_back("market has no individual types");

    std::set<int> ids;
    for (const auto& f : m.firms) {
        if (!ids.insert(f.id).second) out.push_back("duplicate firm id " + std::to_string(f.id));
        if (!std::isfinite(f.v)) out.push_back("firm " + std::to_string(f.id) + ": type is not finite");
        if (!(f.sigma >= 0.0)) out.push_back("firm " + std::to_string(f.id) + ": sigma_f must be >= 0");
    }
    ids.clear();
    double mass = 0.0;
    for (std::size_t i = 0; i < m.individuals.size(); ++i) {
        const auto& ind = m.individuals[i];
        const std::string tag = "individual " + std::to_string(ind.id);
        if (!ids.insert(ind.id).second) out.push_back("duplicate individual id " + std::to_string(ind.id));
        if (!std::isfinite(ind.v)) out.push_back(tag + ": type is not finite");
        if (!(ind.sigma >= 0.0)) out.push_back(tag + ": sigma_i must be >= 0");
        if (!(ind.mass > 0.0)) out.push_back(tag + ": mass must be > 0");
        if (i > 0 && ind.v < m.individuals[i - 1].v) out.push_back(tag + ": individual grid must be sorted ascending in v");
        mass += ind.mass;
    }
    if (!m.individuals.empty() && std::fabs(mass - 1.0) > 1e-9) {
        std::ostringstream os;
        os.precision(17);
        os << "individual masses sum to " << mass << ", expected 1";
        out.push_back(os.str());
    }
    for (const auto& [id, u] : m.firm_payoffs) {
        (void)u;
        bool known = std::any_of(m.firms.begin(), m.firms.end(), [id = id](const firm_type& f) { return f.id == id; });
        if (!known) out.push_back("firm payoff override refers to unknown firm id " + std::to_string(id));
    }
    if (!out.empty() && (m.firms.empty() || m.individuals.empty())) return out;

    // Kernel nonnegativity and finiteness of every payoff on the induced range.
    const double top = m.max_size();
    for (const auto& f : m.firms)
        for (const auto& ind : m.individuals) {
            double lo = kernel_minimum(m.kernel, top, ind.sigma, f.sigma, 65);
            if (lo < 0.0) {
                std::ostringstream os;
                os << "kernel is negative (" << lo << ") for firm " << f.id << ", individual " << ind.id;
                out.push_back(os.str());
                return out;
            }
        }
    const double qtop = m.max_quality();
    for (std::size_t j = 0; j < m.firms.size(); ++j)
        for (int k = 0; k <= 8; ++k) {
            double val = m.firm_payoff(j).value(m.firms[j].v, qtop * k / 8.0);
            if (!std::isfinite(val)) {
                out.push_back("firm payoff not finite for firm " + std::to_string(m.firms[j].id));
                break;
            }
        }
    for (const auto& ind : m.individuals)
        for (int k = 0; k <= 8; ++k) {
            if (!std::isfinite(m.u_i.value(ind.v, top * k / 8.0))) {
                out.push_back("individual payoff not finite for individual " + std::to_string(ind.id));
                break;
            }
        }
    return out;
}

void validate(const market_spec& m) {
    auto errs = validation_errors(m);
    if (errs.empty()) return;
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    fail(errc::validation, msg);
}

std::vector<std::size_t> firms_by_type(const market_spec& m) {
    std::vector<std::size_t> order(m.n_firms());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m.firms[a].v < m.firms[b].v; });
    return order;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

}  // namespace platmatch
