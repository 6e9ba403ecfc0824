#include "platmatch/supermodular.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace platmatch {

supermodularity_verdict check_supermodular_rows(const std::vector<std::vector<double>>& values,
                                                const std::vector<double>& x_grid, const agent_order& order,
                                                double tol) {
    supermodularity_verdict out;
    const std::size_t nx = x_grid.size();
    for (std::size_t p = 0; p < order.size(); ++p)
        for (std::size_t q = p + 1; q < order.size(); ++q) {
            const auto& lo = values[order.ascending[p]];
            const auto& hi = values[order.ascending[q]];
            for (std::size_t k0 = 0; k0 < nx; ++k0)
                for (std::size_t k1 = k0 + 1; k1 < nx; ++k1) {
                    double margin = (hi[k1] + lo[k0]) - (hi[k0] + lo[k1]);
                    if (margin < -tol) {
                        out.pass = false;
                        out.witness = supermodularity_witness{order.ascending[p], order.ascending[q], x_grid[k0],
                                                              x_grid[k1], margin};
                        return out;
                    }
                }
        }
    return out;
}

namespace {

std::vector<std::vector<double>> tabulate(const payoff_family& u, const std::vector<double>& v_grid,
                                          const std::vector<double>& x_grid) {
    std::vector<std::vector<double>> rows(v_grid.size(), std::vector<double>(x_grid.size()));
    for (std::size_t a = 0; a < v_grid.size(); ++a)
        for (std::size_t k = 0; k < x_grid.size(); ++k) rows[a][k] = u.value(v_grid[a], x_grid[k]);
    return rows;
}

void require_grids(const std::vector<double>& v_grid, const std::vector<double>& x_grid) {
    if (v_grid.size() < 2 || x_grid.size() < 2) fail(errc::input, "supermodularity grids need at least two points");
    for (std::size_t k = 1; k < x_grid.size(); ++k)
        if (!(x_grid[k] > x_grid[k - 1])) fail(errc::input, "x grid must be strictly ascending");
}

}  // namespace

supermodularity_verdict check_supermodularity(const payoff_family& u, const std::vector<double>& v_grid,
                                              const std::vector<double>& x_grid, double tol) {
    require_grids(v_grid, x_grid);
    for (std::size_t k = 1; k < v_grid.size(); ++k)
        if (v_grid[k] < v_grid[k - 1]) fail(errc::input, "v grid must be ascending");
    return check_supermodular_rows(tabulate(u, v_grid, x_grid), x_grid, agent_order::identity(v_grid.size()), tol);
}

order_result find_order_rows(const std::vector<std::vector<double>>& values, const std::vector<double>& x_grid,
                             double tol) {
    const std::size_t n = values.size();
    const std::size_t nx = x_grid.size();
    std::vector<std::vector<double>> inc(n, std::vector<double>(nx > 0 ? nx - 1 : 0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t k = 0; k + 1 < nx; ++k) inc[a][k] = values[a][k + 1] - values[a][k];

    auto not_below = [&](std::size_t hi, std::size_t lo) {
        for (std::size_t k = 0; k < inc[hi].size(); ++k)
            if (inc[hi][k] < inc[lo][k] - tol) return false;
        return true;
    };
    auto same = [&](std::size_t a, std::size_t b) { return not_below(a, b) && not_below(b, a); };

    std::vector<std::size_t> seq(n);
    std::iota(seq.begin(), seq.end(), std::size_t{0});
    bool identity_ok = true;
    for (std::size_t k = 1; k < n && identity_ok; ++k) identity_ok = not_below(seq[k], seq[k - 1]);
    if (!identity_ok) {
        // Lexicographic order on increment rows; any consistent order is also lexicographic.
        std::stable_sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) {
            for (std::size_t k = 0; k < inc[a].size(); ++k) {
                if (inc[a][k] < inc[b][k] - tol) return true;
                if (inc[a][k] > inc[b][k] + tol) return false;
            }
            return false;
        });
    }

    order_result out;
    out.order.ascending = seq;
    out.order.rank.assign(n, 0);
    for (std::size_t k = 1; k < n; ++k) out.order.rank[k] = out.order.rank[k - 1] + (same(seq[k], seq[k - 1]) ? 0 : 1);

    if (check_supermodular_rows(values, x_grid, out.order, tol).pass) {
        out.found = true;
        return out;
    }
    // No consistent order: find two agents whose increments cross.
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            for (std::size_t k1 = 0; k1 + 1 < nx; ++k1) {
                if (!(inc[a][k1] > inc[b][k1] + tol)) continue;
                for (std::size_t k2 = 0; k2 + 1 < nx; ++k2)
                    if (inc[a][k2] < inc[b][k2] - tol) {
                        out.certificate = order_certificate{a, b, x_grid[k1], x_grid[k1 + 1], x_grid[k2], x_grid[k2 + 1]};
                        return out;
                    }
            }
        }
    return out;
}

order_result find_supermodular_order(const payoff_family& u, const std::vector<double>& v_grid,
                                     const std::vector<double>& x_grid, double tol) {
    require_grids(v_grid, x_grid);
    return find_order_rows(tabulate(u, v_grid, x_grid), x_grid, tol);
}

namespace {

std::vector<double> grid_with_integers(double top, std::size_t points) {
    std::vector<double> g = linspace(0.0, top, points);
    for (double x = 1.0; x < top; x += 1.0) g.push_back(x);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::fabs(a - b) <= 1e-12; }), g.end());
    return g;
}

}  // namespace

std::vector<double> size_grid(const market_spec& m, std::size_t points) {
    double top = m.max_size();
    if (!(top > 0.0)) top = 1.0;
    return grid_with_integers(top, points);
}

std::vector<double> quality_grid(const market_spec& m, std::size_t points) {
    double top = m.max_quality();
    if (!(top > 0.0)) top = 1.0;
    return linspace(0.0, top, points);
}

order_result firm_order(const market_spec& m) {
    const auto xs = quality_grid(m);
    std::vector<std::vector<double>> rows(m.n_firms(), std::vector<double>(xs.size()));
    for (std::size_t j = 0; j < m.n_firms(); ++j)
        for (std::size_t k = 0; k < xs.size(); ++k) rows[j][k] = m.firm_payoff(j).value(m.firms[j].v, xs[k]);
    // Within the supermodular order, break remaining ties by vertical type so that the
    // canonical order stays ascending in v wherever payoffs cannot tell firms apart.
    auto by_v = firms_by_type(m);
    std::vector<std::vector<double>> permuted(rows.size());
    for (std::size_t k = 0; k < by_v.size(); ++k) permuted[k] = rows[by_v[k]];
    order_result r = find_order_rows(permuted, xs);
    for (auto& a : r.order.ascending) a = by_v[a];
    if (r.certificate) {
        r.certificate->a = by_v[r.certificate->a];
        r.certificate->b = by_v[r.certificate->b];
    }
    // Firms with equal increments but distinct v are ordered by v and no longer tied.
    const std::vector<int> raw = r.order.rank;
    for (std::size_t k = 1; k < r.order.size(); ++k) {
        bool split = raw[k] != raw[k - 1] ||
                     m.firms[r.order.ascending[k]].v != m.firms[r.order.ascending[k - 1]].v;
        r.order.rank[k] = r.order.rank[k - 1] + (split ? 1 : 0);
    }
    return r;
}

order_result individual_order(const market_spec& m) {
    const auto xs = size_grid(m);
    std::vector<std::vector<double>> rows(m.n_individuals(), std::vector<double>(xs.size()));
    for (std::size_t i = 0; i < m.n_individuals(); ++i)
        for (std::size_t k = 0; k < xs.size(); ++k) rows[i][k] = m.u_i.value(m.individuals[i].v, xs[k]);
    return find_order_rows(rows, xs);
}

std::string describe(const supermodularity_witness& w) {
    std::ostringstream os;
    os.precision(17);
    os << "agents (" << w.lo << "," << w.hi << ") at x=(" << w.x_lo << "," << w.x_hi << ") margin " << w.margin;
    return os.str();
}

std::string describe(const order_certificate& c) {
    std::ostringstream os;
    os.precision(17);
    os << "agents " << c.a << "," << c.b << ": increment order flips between x-pairs (" << c.x1_lo << "," << c.x1_hi
       << ") and (" << c.x2_lo << "," << c.x2_hi << ")";
    return os.str();
}

}  // namespace platmatch
