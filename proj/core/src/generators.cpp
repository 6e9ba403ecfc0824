#include "platmatch/generators.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <vector>

namespace platmatch {

size_function drawn_size_function(std::size_t family) {
    switch (family) {
        case 0: return size_function::identity();
        case 1: return size_function::log1p();
        case 2: return size_function::power(1.0, 0.5);
    }
    fail(errc::input, "unknown size family index");
}

namespace {

std::size_t draw_count(rng& gen, std::size_t lo, std::size_t hi) {
    if (hi < lo) fail(errc::input, "market draw bounds are inverted");
    return lo + static_cast<std::size_t>(gen.below(hi - lo + 1));
}

}  // namespace

market_spec random_market(rng& gen, const market_draw& draw) {
    const std::size_t n = draw_count(gen, draw.min_firms, draw.max_firms);
    const std::size_t k = draw_count(gen, draw.min_individuals, draw.max_individuals);
    market_spec m;
    for (std::size_t j = 0; j < n; ++j) m.firms.push_back({static_cast<int>(j + 1), gen.uniform(draw.v_lo, draw.v_hi), 1.0});

    std::vector<double> vs(k), w(k);
    for (auto& v : vs) v = gen.uniform(draw.v_lo, draw.v_hi);
    std::sort(vs.begin(), vs.end());
    double total = 0.0;
    for (auto& x : w) total += (x = gen.uniform(0.5, 1.5));
    for (std::size_t i = 0; i < k; ++i) m.individuals.push_back({static_cast<int>(i + 1), vs[i], 1.0, w[i] / total});

    std::size_t firm_family = gen.below(3);
    if (draw.linear_firm_payoff) firm_family = 0;
    if (draw.concave_firm_payoff) firm_family = 1 + gen.below(2);
    m.u_f = payoff_family::product(drawn_size_function(firm_family));
    m.u_i = payoff_family::product(drawn_size_function(gen.below(3)));

    if (gen.coin())
        m.kernel = competition_kernel::affine_truncated(1.0, gen.uniform(0.0, 1.5 / static_cast<double>(n)));
    else
        m.kernel = competition_kernel::power(1.0, 1.0, -gen.uniform(0.0, 3.0));
    return m;
}

mvpd_spec random_mvpd(rng& gen, const mvpd_draw& draw) {
    mvpd_spec s;
    const std::size_t n = draw.min_channels + gen.below(draw.max_channels - draw.min_channels + 1);
    for (std::size_t j = 0; j < n; ++j) s.channels.push_back({static_cast<int>(j + 1), gen.uniform(0.2, 2.0), 1.0});
    s.u_f = payoff_family::product(drawn_size_function(draw.affine_channel_payoff ? 0 : gen.below(3)));
    s.g_i = drawn_size_function(draw.affine_gi ? 0 : gen.below(3));
    const double lo = gen.uniform(0.0, 1.0), width = gen.uniform(0.5, 1.5);
    if (gen.coin())
        s.viewers = distribution::uniform(lo, lo + width);
    else
        s.viewers = distribution::truncated_normal(lo + gen.uniform(0.0, width), gen.uniform(0.2, 1.0), lo, lo + width);
    s.viewer_cells = draw.min_cells + gen.below(draw.max_cells - draw.min_cells + 1);
    s.beta = gen.uniform(0.0, 1.0);
    s.kernel = competition_kernel::power(1.0, 1.0, -gen.uniform(0.0, 1.5));
    return s;
}

namespace {

distribution draw_support(rng& gen, double lo_min, double lo_max, double width_min, double width_max) {
    const double lo = gen.uniform(lo_min, lo_max), width = gen.uniform(width_min, width_max);
    if (gen.coin()) return distribution::uniform(lo, lo + width);
    return distribution::truncated_normal(lo + gen.uniform(0.0, width), gen.uniform(0.2, 1.0) * width, lo, lo + width);
}

}  // namespace

amazon_spec random_amazon(rng& gen, const amazon_draw& draw) {
    amazon_spec s;
    s.ces.sigma = gen.uniform(1.5, 5.0);
    s.ces.theta_ces = gen.uniform(0.05, 0.95 * (1.0 - 1.0 / s.ces.sigma));
    s.firms = draw_support(gen, 0.1, 1.0, 0.5, 2.0);
    s.firm_nodes = draw_count(gen, draw.min_firms, draw.max_firms);
    const std::size_t cells = draw_count(gen, draw.min_cells, draw.max_cells);
    std::vector<double> inner(cells - 1);
    for (auto& b : inner) b = gen.uniform(s.firms.lo(), s.firms.hi());
    std::sort(inner.begin(), inner.end());
    s.cells.bounds.push_back(s.firms.lo());
    for (double b : inner)
        if (b > s.cells.bounds.back()) s.cells.bounds.push_back(b);
    s.cells.bounds.push_back(s.firms.hi());
    const std::size_t side = gen.below(3), mode = gen.below(2);
    s.side = draw.side.value_or(static_cast<customer_side>(side));
    s.mode = draw.mode.value_or(static_cast<amazon_mode>(mode));
    s.customers = draw_support(gen, 0.5, 1.5, 0.5, 2.0);
    s.customer_nodes = draw_count(gen, draw.min_customers, draw.max_customers);
    return s;
}

allocation random_allocation(rng& gen, double lo, double hi) {
    std::vector<double> vs{lo}, xs{gen.uniform(0.0, 1.0)};
    const int knots = 3 + static_cast<int>(gen.below(6));
    for (int k = 1; k <= knots; ++k) {
        double v = lo + (hi - lo) * k / (knots + 1);
        vs.push_back(v);
        xs.push_back(xs.back() + gen.uniform(0.0, 0.5));
        if (gen.coin(0.3)) {
            vs.push_back(v);
            xs.push_back(xs.back() + gen.uniform(0.0, 1.0));
        }
    }
    vs.push_back(hi);
    xs.push_back(xs.back() + gen.uniform(0.0, 0.5));
    return allocation::piecewise(vs, xs);
}

}  // namespace platmatch
