#include "platmatch/errors.hpp"
#include "platmatch/generators.hpp"
#include "platmatch/mechanism.hpp"
#include "platmatch/monopcomp.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

using namespace platmatch;

namespace {

errc kind_of(auto&& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return errc::input;
}

ces_params ces(double sigma, double theta) {
    ces_params c;
    c.sigma = sigma;
    c.theta_ces = theta;
    return c;
}

// Primal utility m + (v_i^(1 - theta) / theta) (sum w q^((sigma - 1) / sigma))^(theta sigma / (sigma - 1)).
double primal_utility(const ces_params& c, const std::vector<double>& q, const std::vector<double>& w, double money,
                      double v_i) {
    double agg = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) agg += w[j] * std::pow(q[j], (c.sigma - 1.0) / c.sigma);
    return money + std::pow(v_i, 1.0 - c.theta_ces) / c.theta_ces *
                       std::pow(agg, c.theta_ces * c.sigma / (c.sigma - 1.0));
}

// Prices set at the markup over each firm's cost, with the firm masses as variety weights.
ces_quantities demand_for(const amazon_spec& s, const firm_grid& f, const std::vector<std::size_t>& set, double v_i) {
    std::vector<double> p, w;
    for (std::size_t j : set) {
        p.push_back(markup_price(cost_of_type(f.types[j], s.ces.sigma), s.ces.sigma));
        w.push_back(f.weights[j]);
    }
    return ces_demand(p, s.ces, w, v_i);
}

// Best objective over every nondecreasing sequence of prefix lengths of the ratio order.
double best_monotone_prefixes(const amazon_spec& s, const amazon_outcome& r) {
    const std::size_t n = r.firms.types.size(), m = r.customers.types.size();
    std::vector<std::size_t> k(m, 0);
    double best = -HUGE_VAL;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t lo) {
        if (i == m) {
            matching mu(n, m);
            for (std::size_t ii = 0; ii < m; ++ii)
                for (std::size_t q = 0; q < k[ii]; ++q) mu.set(r.order[q], ii, true);
            best = std::max(best, amazon_objective(s, mu));
            return;
        }
        for (std::size_t kk = lo; kk <= n; ++kk) {
            k[i] = kk;
            rec(i + 1, kk);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("ces parameters") {
    auto c = ces(3.0, 0.5);
    CHECK(c.kappa() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(c.psi() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(c.gamma() == doctest::Approx(4.0 / 27.0).epsilon(1e-12));

    SUBCASE("the admissibility constraint is named") {
        auto errs = validation_errors(ces(2.0, 0.6));
        REQUIRE(errs.size() == 1);
        CHECK(errs[0].find("sigma * (1 - theta)") != std::string::npos);
        CHECK(kind_of([] { validate(ces(0.5, 0.5)); }) == errc::validation);
        CHECK(kind_of([] { validate(ces(3.0, 1.0)); }) == errc::validation);
    }

    SUBCASE("derived constants stay in range on admissible draws") {
        rng gen(41);
        for (int t = 0; t < 500; ++t) {
            const double sigma = gen.uniform(1.01, 10.0);
            const double theta = gen.uniform(1e-3, 1.0 - 1.0 / sigma) * 0.999;
            auto p = ces(sigma, theta);
            REQUIRE(validation_errors(p).empty());
            CHECK(p.kappa() > -1.0);
            CHECK(p.kappa() < 0.0);
            CHECK(p.psi() > 0.0);
            CHECK(p.gamma() > 0.0);
        }
    }
}

TEST_CASE("ces demand") {
    SUBCASE("one variety at unit price") {
        for (auto [s, t] : {std::pair{3.0, 0.5}, {2.0, 0.25}, {4.0, 0.6}}) {
            auto q = ces_demand({1.0}, ces(s, t));
            CHECK(q.price_index == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(q.spending == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(q.quantities[0] == doctest::Approx(1.0).epsilon(1e-14));
        }
    }

    SUBCASE("two varieties at unit price") {
        auto q = ces_demand({1.0, 1.0}, ces(3.0, 0.5));
        CHECK(q.price_index == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
        CHECK(q.quantities[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
        CHECK(q.spending == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(q.money + q.spending == doctest::Approx(q.wealth).epsilon(1e-14));
    }

    SUBCASE("empty set") {
        auto c = ces(3.0, 0.5);
        c.wealth = 5.0;
        auto q = ces_demand({}, c);
        CHECK(std::isinf(q.price_index));
        CHECK(q.spending == 0.0);
        CHECK(q.money == 5.0);
        CHECK(q.utility == 5.0);
    }

    SUBCASE("wealth below spending") {
        auto c = ces(3.0, 0.5);
        c.wealth = 1.0;
        CHECK(kind_of([&] { ces_demand({1.0, 1.0}, c); }) == errc::structure);
        CHECK(kind_of([&] { ces_demand({1.0, -1.0}, ces(3.0, 0.5)); }) == errc::input);
    }

    SUBCASE("budget, spending and utility identities on random prices") {
        rng gen(42);
        for (auto [s, t] : {std::pair{3.0, 0.5}, {2.0, 0.25}, {4.0, 0.6}}) {
            for (int trial = 0; trial < 300; ++trial) {
                auto c = ces(s, t);
                const std::size_t n = 1 + gen.below(8);
                std::vector<double> p(n), w(n);
                for (auto& x : p) x = gen.uniform(0.2, 5.0);
                for (auto& x : w) x = gen.uniform(0.1, 2.0);
                const double v_i = gen.uniform(0.5, 3.0);
                c.wealth = 1e3;
                auto q = ces_demand(p, c, w, v_i);
                double spend = 0.0;
                for (std::size_t j = 0; j < n; ++j) spend += w[j] * p[j] * q.quantities[j];
                CHECK(std::fabs(spend + q.money - 1e3) <= 1e-9 * 1e3);
                CHECK(std::fabs(spend - v_i * std::pow(q.price_index, t / (t - 1.0))) <= 1e-9 * (1.0 + spend));
                CHECK(q.utility == doctest::Approx(primal_utility(c, q.quantities, w, q.money, v_i)).epsilon(1e-10));

                // Moving spending between two varieties along the budget never helps.
                if (n >= 2) {
                    for (double eps : {-1e-3, 1e-3}) {
                        auto moved = q.quantities;
                        moved[0] += eps / (w[0] * p[0]);
                        moved[1] -= eps / (w[1] * p[1]);
                        if (moved[0] <= 0.0 || moved[1] <= 0.0) continue;
                        CHECK(primal_utility(c, moved, w, q.money, v_i) <= q.utility + 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("markup pricing") {
    CHECK(markup_price(2.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(markup_price(1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(kind_of([] { markup_price(0.0, 3.0); }) == errc::input);

    rng gen(43);
    for (int t = 0; t < 200; ++t) {
        const double c = gen.uniform(0.1, 5.0), sigma = gen.uniform(1.1, 6.0);
        auto check = markup_grid_check(c, sigma, gen.uniform(0.1, 10.0));
        CHECK(check.pass);
        auto profit = [&](double p) { return std::pow(p, 1.0 - sigma) - c * std::pow(p, -sigma); };
        CHECK(profit(check.price) > profit(1.01 * check.price));
        CHECK(profit(check.price) > profit(0.99 * check.price));
        // The best price does not move with the size of the audience.
        CHECK(markup_grid_check(c, sigma, 1.0).best_grid_price ==
              markup_grid_check(c, sigma, 7.5).best_grid_price);
    }
}

TEST_CASE("salience kernel") {
    auto c = ces(3.0, 0.5);
    CHECK(salience_kernel(1.0, c) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(salience_kernel(4.0, c) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(salience_kernel(4.0, c, 2.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(kind_of([&] { salience_kernel(0.0, c); }) == errc::input);
    CHECK(kind_of([&] { salience_kernel(-1.0, c); }) == errc::input);

    rng gen(44);
    for (int t = 0; t < 200; ++t) {
        const double sigma = gen.uniform(1.2, 6.0);
        auto p = ces(sigma, gen.uniform(0.01, 0.99 * (1.0 - 1.0 / sigma)));
        const std::size_t n = 1 + gen.below(6);
        std::vector<double> v(n), w(n), prices(n);
        double quality = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = gen.uniform(0.1, 3.0);
            w[j] = gen.uniform(0.05, 1.0);
            prices[j] = markup_price(cost_of_type(v[j], sigma), sigma);
            quality += v[j] * w[j];
        }
        auto q = ces_demand(prices, p, w);
        CHECK(salience_kernel(quality, p) ==
              doctest::Approx(std::pow(q.price_index, p.demand_exponent())).epsilon(1e-10));
        CHECK(customer_value(quality, p) ==
              doctest::Approx(q.utility - q.wealth).epsilon(1e-10));
        CHECK(salience_kernel(quality * 1.1, p) < salience_kernel(quality, p));
    }
}

TEST_CASE("firm profit from demand aggregation") {
    rng gen(45);
    for (int t = 0; t < 40; ++t) {
        amazon_draw d;
        d.side = t % 2 ? customer_side::observed : customer_side::homogeneous;
        auto s = random_amazon(gen, d);
        auto r = solve_amazon(s);
        const auto& f = r.firms;
        const auto& c = r.customers;
        for (std::size_t j = 0; j < f.types.size(); ++j) {
            const double cost = cost_of_type(f.types[j], s.ces.sigma);
            const double price = markup_price(cost, s.ces.sigma);
            double by_demand = 0.0, by_salience = 0.0;
            for (std::size_t i = 0; i < c.types.size(); ++i) {
                if (!r.mu.at(j, i)) continue;
                auto set = r.mu.firms_of(i);
                auto q = demand_for(s, f, set, c.b[i]);
                const auto pos = static_cast<std::size_t>(std::find(set.begin(), set.end(), j) - set.begin());
                by_demand += c.masses[i] * (price - cost) * q.quantities[pos];
                by_salience += c.masses[i] * salience_kernel(r.quality[i], s.ces, c.b[i]);
            }
            CHECK(std::fabs(by_demand - s.ces.gamma() * f.types[j] * by_salience) <= 1e-9 * (1.0 + by_demand));
        }
    }
}

TEST_CASE("platform objective") {
    amazon_spec s;
    s.firms = distribution::uniform(0.1, 1.1);
    const auto f = make_firm_grid(s);

    SUBCASE("empty allocation") {
        CHECK(amazon_objective(s, matching(12, 1)) == 0.0);
    }

    SUBCASE("owned firms: formula against consumer utility plus firm profits") {
        s.owned = {0};
        const auto fo = make_firm_grid(s);
        for (std::size_t j = 0; j < fo.types.size(); ++j) CHECK(fo.virtual_values[j] == fo.types[j]);
        for (std::size_t k = 1; k <= 12; ++k) {
            matching mu(12, 1);
            std::vector<std::size_t> set;
            for (std::size_t j = 12 - k; j < 12; ++j) {
                mu.set(j, 0, true);
                set.push_back(j);
            }
            auto q = demand_for(s, fo, set, 1.0);
            double total = q.utility - q.wealth;
            for (std::size_t pos = 0; pos < set.size(); ++pos) {
                const double cost = cost_of_type(fo.types[set[pos]], s.ces.sigma);
                total += fo.weights[set[pos]] * (q.prices[pos] - cost) * q.quantities[pos];
            }
            CHECK(amazon_objective(s, mu) == doctest::Approx(total).epsilon(1e-10));
        }
    }

    SUBCASE("dimension mismatch") {
        CHECK(kind_of([&] { amazon_objective(s, matching(3, 1)); }) == errc::input);
    }

    SUBCASE("revenue mode: customer payments through the mechanism route") {
        amazon_spec p;
        p.side = customer_side::private_info;
        p.mode = amazon_mode::two_sided_revenue;
        p.customers = distribution::uniform(0.5, 1.5);
        p.customer_nodes = 10;
        auto r = solve_amazon(p);
        const auto& c = r.customers;
        std::vector<double> g;
        for (double q : r.quality) g.push_back(customer_value(q, p.ces));
        // The virtual value of a uniform type is linear, so the midpoint term is exact per bin.
        allocation x = allocation::step(std::vector<double>(c.edges.begin(), c.edges.end() - 1), g, c.edges.back());
        auto rep = payments_and_revenue(x, payoff_family::product(size_function::identity()), p.customers, c.edges);
        double term = 0.0;
        for (std::size_t i = 0; i < c.types.size(); ++i) term += c.masses[i] * c.a[i] * g[i];
        CHECK(term == doctest::Approx(rep.revenue_payments).epsilon(1e-9));
        CHECK(rep.ic.pass);
        CHECK(c.a[0] * g[0] <= 0.0);
    }
}

TEST_CASE("threshold solution against exhaustive subsets") {
    SUBCASE("uniform firms on one cell") {
        amazon_spec s;
        s.firms = distribution::uniform(0.1, 1.1);
        s.firm_nodes = 12;
        auto r = solve_amazon(s);
        auto ex = exhaustive_subset(s, r.firms, 1.0, 1.0);
        CHECK(r.objective == doctest::Approx(ex.value).epsilon(1e-12));
        CHECK(ex.set == r.mu.firms_of(0));
        // With one cell the ratio order is the type order, so the set is the firms above a type cutoff.
        const auto set = r.mu.firms_of(0);
        REQUIRE(!set.empty());
        CHECK(set.back() == 11);
        CHECK(set.size() == 12 - set.front());
        CHECK(r.ratio_monotone);
        // The marginal firm adds value and the next one would not.
        const auto& t = r.order;
        const std::size_t k = r.size[0];
        std::vector<std::size_t> smaller(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k - 1));
        std::vector<std::size_t> larger(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k + 1));
        CHECK(set_value(s, r.firms, smaller, 1.0, 1.0) < r.objective);
        CHECK(set_value(s, r.firms, larger, 1.0, 1.0) < r.objective);
    }

    SUBCASE("random scenarios") {
        for (std::uint64_t t = 0; t < 60; ++t) {
            rng gen(trial_seed(46, t));
            amazon_draw d;
            d.side = t % 3 == 0 ? customer_side::observed : customer_side::homogeneous;
            d.max_customers = 3;
            auto s = random_amazon(gen, d);
            auto r = solve_amazon(s);
            for (std::size_t i = 0; i < r.customers.types.size(); ++i) {
                auto ex = exhaustive_subset(s, r.firms, r.customers.a[i], r.customers.b[i]);
                const double mine = set_value(s, r.firms, r.mu.firms_of(i), r.customers.a[i], r.customers.b[i]);
                CHECK(std::fabs(mine - ex.value) <= 1e-9 * (1.0 + std::fabs(ex.value)));
            }
        }
    }
}

TEST_CASE("private customer types") {
    SUBCASE("welfare mode pools every customer") {
        for (std::uint64_t t = 0; t < 60; ++t) {
            rng gen(trial_seed(47, t));
            amazon_draw d;
            d.side = customer_side::private_info;
            d.mode = amazon_mode::welfare_revenue;
            auto s = random_amazon(gen, d);
            auto r = solve_amazon(s);
            CHECK(r.pooled);
            for (std::size_t i = 1; i < r.size.size(); ++i) {
                CHECK(r.mu.firms_of(i) == r.mu.firms_of(0));
                CHECK(r.pointwise_quality[i] <= r.pointwise_quality[i - 1] + 1e-12);
            }
        }
    }

    SUBCASE("revenue mode with an increasing ratio gives monotone qualities") {
        int judged = 0;
        for (std::uint64_t t = 0; t < 60; ++t) {
            rng gen(trial_seed(48, t));
            amazon_draw d;
            d.side = customer_side::private_info;
            d.mode = amazon_mode::two_sided_revenue;
            auto s = random_amazon(gen, d);
            auto r = solve_amazon(s);
            if (!r.customer_ratio_monotone) continue;
            ++judged;
            CHECK(r.size == r.pointwise_size);
            for (std::size_t i = 1; i < r.size.size(); ++i) CHECK(r.quality[i] >= r.quality[i - 1]);
        }
        CHECK(judged > 20);
    }

    SUBCASE("ironing matches the best monotone prefix sequence") {
        for (std::uint64_t t = 0; t < 60; ++t) {
            rng gen(trial_seed(49, t));
            amazon_draw d;
            d.side = customer_side::private_info;
            d.max_customers = 5;
            d.max_firms = 7;
            auto s = random_amazon(gen, d);
            auto r = solve_amazon(s);
            for (std::size_t i = 1; i < r.quality.size(); ++i) CHECK(r.quality[i] >= r.quality[i - 1]);
            const double best = best_monotone_prefixes(s, r);
            CHECK(r.objective >= best - 1e-9 * (1.0 + std::fabs(best)));
        }
    }

    SUBCASE("envelope payoffs") {
        amazon_spec s;
        s.side = customer_side::private_info;
        s.customers = distribution::uniform(1.0, 2.0);
        s.customer_nodes = 4;
        auto r = solve_amazon(s);
        const double g = customer_value(r.quality[0], s.ces);
        for (std::size_t i = 0; i < 4; ++i) CHECK(r.payoff[i] == doctest::Approx(g * (r.customers.types[i] - 1.0)));
    }
}

TEST_CASE("cell acquisition and refinement") {
    amazon_spec s;
    s.firms = distribution::uniform(0.0, 1.0);
    s.cells.bounds = {0.0, 0.5, 1.0};

    SUBCASE("transforms") {
        auto a = acquire_cell(s, 1);
        CHECK(a.owned == std::set<std::size_t>{1});
        CHECK(acquire_cell(a, 1).owned == a.owned);
        CHECK(kind_of([&] { acquire_cell(s, 2); }) == errc::input);

        auto same = refine_partition(s, 1, 1.0);
        CHECK(same.cells.bounds == s.cells.bounds);
        CHECK(kind_of([&] { refine_partition(s, 0, 0.7); }) == errc::input);

        auto fine = refine_partition(a, 0, 0.25);
        CHECK(fine.cells.bounds == std::vector<double>{0.0, 0.25, 0.5, 1.0});
        CHECK(fine.owned == std::set<std::size_t>{2});
        CHECK(refine_partition(a, 1, 0.75).owned == std::set<std::size_t>{1, 2});
    }

    SUBCASE("a split raises cell virtual values") {
        amazon_spec one;
        one.firms = distribution::uniform(0.0, 1.0);
        CHECK(cell_virtual_value(one.firms, one.effective_cells(), 0.25) == doctest::Approx(-0.5).epsilon(1e-14));
        auto split = refine_partition(one, 0, 0.5);
        CHECK(cell_virtual_value(split.firms, split.cells, 0.25) == doctest::Approx(0.0).epsilon(1e-14));
        const auto before = make_firm_grid(one), after = make_firm_grid(split);
        for (std::size_t j = 0; j < before.types.size(); ++j) CHECK(after.virtual_values[j] >= before.virtual_values[j]);
    }

    SUBCASE("acquiring an owned cell changes nothing") {
        auto owned = acquire_cell(s, 1);
        auto cmp = amazon_counterfactual(owned, {amazon_change::kind::acquire, 1, 0.0});
        CHECK(cmp.before.mu == cmp.after.mu);
        CHECK(cmp.relation[0] == "=");
    }

    SUBCASE("acquiring the included top cell") {
        auto cmp = amazon_counterfactual(s, {amazon_change::kind::acquire, 1, 0.0});
        CHECK(cmp.status == "included");
        CHECK(cmp.sets.status == verdict_status::pass);
        CHECK(cmp.welfare.status == verdict_status::pass);
        CHECK(cmp.after.size[0] <= cmp.before.size[0]);
    }

    SUBCASE("a partially included cell is not judged") {
        auto cmp = amazon_counterfactual(s, {amazon_change::kind::refine, 0, 0.25});
        CHECK(cmp.status == "partial");
        CHECK(cmp.sets.status == verdict_status::not_applicable);
    }

    SUBCASE("an excluded cell grows the set") {
        amazon_spec e;
        e.ces = ces(1.5, 0.2);
        e.firms = distribution::truncated_normal(2.0, 0.34, 0.5, 2.1);
        e.firm_nodes = 4;
        e.cells.bounds = {0.5, 1.05, 1.9, 2.1};
        REQUIRE(cell_status(solve_amazon(e), 0) == "excluded");
        for (auto kind : {amazon_change::kind::acquire, amazon_change::kind::refine}) {
            auto cmp = amazon_counterfactual(e, {kind, 0, 0.8});
            CHECK(cmp.sets.claim == "excluded_change_grows_sets");
            CHECK(cmp.sets.status == verdict_status::pass);
            CHECK(cmp.welfare.status == verdict_status::pass);
        }
    }

    SUBCASE("random counterfactuals move in the predicted direction") {
        int judged = 0;
        for (std::uint64_t t = 0; t < 150; ++t) {
            rng gen(trial_seed(50, t));
            auto sc = random_amazon(gen);
            const auto p = sc.effective_cells();
            amazon_change c;
            c.cell = gen.below(p.cells());
            c.tag = gen.coin() ? amazon_change::kind::acquire : amazon_change::kind::refine;
            c.split = gen.uniform(p.bounds[c.cell], p.bounds[c.cell + 1]);
            auto cmp = amazon_counterfactual(sc, c);
            if (cmp.sets.status == verdict_status::not_applicable) continue;
            ++judged;
            CHECK_MESSAGE(cmp.sets.status == verdict_status::pass, cmp.sets.detail);
            CHECK_MESSAGE(cmp.welfare.status == verdict_status::pass, cmp.welfare.detail);
        }
        CHECK(judged >= 50);
    }
}

TEST_CASE("scenario validation") {
    amazon_spec s;
    s.ces = ces(2.0, 0.6);
    s.firms = distribution::uniform(0.1, 1.0);
    s.cells.bounds = {0.1, 0.5};
    s.owned = {3};
    auto errs = validation_errors(s);
    CHECK(errs.size() == 3);
    CHECK(kind_of([&] { solve_amazon(s); }) == errc::validation);
    CHECK(!describe(amazon_spec{}).empty());
}
