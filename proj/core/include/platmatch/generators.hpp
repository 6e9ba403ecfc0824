#pragma once

#include "platmatch/market.hpp"
#include "platmatch/mechanism.hpp"
#include "platmatch/monopcomp.hpp"
#include "platmatch/mvpd.hpp"
#include "platmatch/random.hpp"

#include <cstddef>
#include <optional>

namespace platmatch {

/// Shape of a random market drawn for the property suites.
///
/// Types are uniform on [v_lo, v_hi], masses uniform on [0.5, 1.5] then normalized, saliences
/// one. Payoffs are v * g(x) with g drawn from {x, log(1 + x), sqrt(x)} independently per side;
/// the kernel is affine-truncated or a negative power, both nonnegative and decreasing.
struct market_draw {
    std::size_t min_firms = 2, max_firms = 4;
    std::size_t min_individuals = 2, max_individuals = 4;
    double v_lo = 0.1, v_hi = 2.0;
    bool linear_firm_payoff = false;  // firm payoff v * x only
    bool concave_firm_payoff = false;  // exclude the linear firm payoff
};

market_spec random_market(rng& gen, const market_draw& draw = {});

/// Shape of a random distributor scenario: 2-4 channels with types on [0.2, 2], a uniform or
/// truncated-normal viewer distribution, concave g_I and channel payoffs v * g(x) with g drawn
/// from {x, log(1 + x), sqrt(x)}, and a kernel (1 + n)^-e.
struct mvpd_draw {
    std::size_t min_channels = 2, max_channels = 4;
    std::size_t min_cells = 6, max_cells = 10;
    bool affine_channel_payoff = false;
    bool affine_gi = false;
};

mvpd_spec random_mvpd(rng& gen, const mvpd_draw& draw = {});

/// Shape of a random retail-platform scenario: admissible (sigma, theta), firm types uniform or
/// truncated normal on [lo, lo + width] with lo in [0.1, 1], one to three partition cells, and
/// customers on [lo, lo + width] with lo in [0.5, 1.5]. Unset side and mode are drawn.
struct amazon_draw {
    std::size_t min_firms = 4, max_firms = 12;
    std::size_t min_cells = 1, max_cells = 3;
    std::size_t min_customers = 3, max_customers = 8;
    std::optional<customer_side> side;
    std::optional<amazon_mode> mode;
};

amazon_spec random_amazon(rng& gen, const amazon_draw& draw = {});

/// Nondecreasing piecewise-linear allocation on [lo, hi] with 3-8 interior knots, about a third
/// of them jumps.
allocation random_allocation(rng& gen, double lo, double hi);

/// The size function drawn for a family index in {0, 1, 2}: x, log(1 + x), sqrt(x).
size_function drawn_size_function(std::size_t family);

}  // namespace platmatch
