#include "fixtures.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/objective.hpp"
#include "platmatch/supermodular.hpp"

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <string>

using namespace platmatch;
using platmatch::testing::direct_objective;
using platmatch::testing::instance_a;

namespace {

matching instance_a_optimum() {
    // Firm 1 (v=2) with both individuals, firm 2 (v=1) with the high individual only.
    matching mu(2, 2);
    mu.set(0, 0, true);
    mu.set(0, 1, true);
    mu.set(1, 1, true);
    return mu;
}

market_spec unit_market(std::vector<double> sigmas) {
    market_spec m;
    for (std::size_t j = 0; j < sigmas.size(); ++j) m.firms.push_back({static_cast<int>(j), 1.0 + j, sigmas[j]});
    m.individuals = {{0, 1.0, 1.0, 1.0}};
    m.u_i = payoff_family::product(size_function::identity());
    m.u_f = payoff_family::product(size_function::identity());
    m.kernel = competition_kernel::constant(1.0);
    return m;
}

}  // namespace

TEST_CASE("weighted size sums firm saliences") {
    auto m = unit_market({1.0, 1.0});
    matching mu = matching::full(2, 1);
    CHECK(weighted_size(m, mu, 0) == 2.0);

    mu = matching(2, 1);
    CHECK(weighted_size(m, mu, 0) == 0.0);

    auto s = unit_market({0.5, 0.25});
    CHECK(weighted_size(s, matching::full(2, 1), 0) == 0.75);

    CHECK_THROWS_AS(weighted_size(m, mu, 42), error);
    try {
        weighted_size(m, mu, 42);
    } catch (const error& e) {
        CHECK(e.kind() == errc::input);
    }
}

TEST_CASE("firm match quality") {
    SUBCASE("constant kernel, everyone matched") {
        market_spec m = instance_a();
        m.kernel = competition_kernel::constant(1.0);
        CHECK(firm_match_quality(m, matching::full(2, 2), 1) == doctest::Approx(1.0));
    }
    SUBCASE("unmatched firm") {
        market_spec m = instance_a();
        CHECK(firm_match_quality(m, matching(2, 2), 2) == 0.0);
    }
    SUBCASE("instance A, top firm") {
        market_spec m = instance_a();
        matching mu = instance_a_optimum();
        // 0.5 * h(2) + 0.5 * h(1)
        double expected = 0.5 * 0.1 + 0.5 * 1.0;
        CHECK(firm_match_quality(m, mu, 1) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(expected == doctest::Approx(0.55).epsilon(1e-15));
    }
    SUBCASE("negative kernel is rejected") {
        market_spec m = instance_a();
        m.kernel = competition_kernel::table({0.0, 2.0}, {1.0, -1.0});
        CHECK_THROWS_AS(firm_match_quality(m, matching::full(2, 2), 1), error);
        CHECK_FALSE(validation_errors(m).empty());
    }
}

TEST_CASE("platform objective on instance A") {
    market_spec m = instance_a();
    matching mu = instance_a_optimum();
    double oracle = direct_objective(m, [&](std::size_t j, std::size_t i) { return mu.at(j, i); });
    CHECK(oracle == doctest::Approx(3.65).epsilon(1e-14));
    CHECK(platform_objective(m, mu) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(platmatch::testing::enumerate_all(m) == doctest::Approx(3.65).epsilon(1e-14));

    auto terms = evaluate(m, mu);
    CHECK(terms.qualities[0] == doctest::Approx(0.55));
    CHECK(terms.total == doctest::Approx(terms.firm_total + terms.individual_total));

    SUBCASE("empty matching with normalized payoffs") {
        CHECK(platform_objective(m, matching(2, 2)) == 0.0);
    }
    SUBCASE("full matching with a constant kernel") {
        m.kernel = competition_kernel::constant(1.0);
        matching full = matching::full(2, 2);
        double direct = direct_objective(m, [](std::size_t, std::size_t) { return true; });
        CHECK(direct == doctest::Approx(6.0));
        CHECK(platform_objective(m, full) == doctest::Approx(6.0));
        CHECK(platmatch::testing::enumerate_all(m) == doctest::Approx(6.0));
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(platform_objective(m, matching(3, 2)), error);
    }
}

TEST_CASE("supermodularity check") {
    auto vs = linspace(0.1, 2.0, 9);
    auto xs = linspace(0.0, 3.0, 13);
    CHECK(check_supermodularity(payoff_family::product(size_function::identity()), vs, xs).pass);
    CHECK(check_supermodularity(payoff_family::product(size_function::log1p()), vs, xs).pass);

    auto neg = payoff_family::multiplicative(type_function::linear(0.0, -1.0), size_function::identity());
    auto verdict = check_supermodularity(neg, vs, xs);
    REQUIRE_FALSE(verdict.pass);
    REQUIRE(verdict.witness);
    const auto& w = *verdict.witness;
    double lhs = neg.value(vs[w.hi], w.x_hi) + neg.value(vs[w.lo], w.x_lo);
    double rhs = neg.value(vs[w.hi], w.x_lo) + neg.value(vs[w.lo], w.x_hi);
    CHECK(lhs < rhs);
    CHECK(w.margin == doctest::Approx(lhs - rhs));

    CHECK_THROWS_AS(check_supermodularity(neg, {1.0}, xs), error);
}

TEST_CASE("supermodular order") {
    auto xs = linspace(0.0, 2.0, 5);
    SUBCASE("identity for v*x") {
        auto r = find_supermodular_order(payoff_family::product(size_function::identity()), {1.0, 2.0, 3.0}, xs);
        REQUIRE(r.found);
        CHECK(r.order.ascending == std::vector<std::size_t>{0, 1, 2});
    }
    SUBCASE("reversed for (5 - v) x") {
        auto u = payoff_family::multiplicative(type_function::linear(5.0, -1.0), size_function::identity());
        auto r = find_supermodular_order(u, {1.0, 2.0, 3.0}, xs);
        REQUIRE(r.found);
        CHECK(r.order.ascending == std::vector<std::size_t>{2, 1, 0});
    }
    SUBCASE("sin(v) x sorts by sin(v)") {
        std::vector<double> vs = {1.0, 2.0, 3.0};
        auto u = payoff_family::multiplicative(type_function::table({1.0, 2.0, 3.0}, {std::sin(1.0), std::sin(2.0), std::sin(3.0)}),
                                               size_function::identity());
        auto r = find_supermodular_order(u, vs, xs);
        REQUIRE(r.found);
        // sin 3 < sin 1 < sin 2
        CHECK(r.order.ascending == std::vector<std::size_t>{2, 0, 1});
        // Recheck the inequality under the returned permutation.
        std::vector<double> permuted;
        for (auto a : r.order.ascending) permuted.push_back(vs[a]);
        std::vector<std::vector<double>> rows;
        for (double v : permuted) {
            rows.emplace_back();
            for (double x : xs) rows.back().push_back(u.value(v, x));
        }
        CHECK(check_supermodular_rows(rows, xs, agent_order::identity(3)).pass);
    }
    SUBCASE("no order exists") {
        // Increments cross: agent 0 is steeper at low x, agent 1 at high x.
        payoff_table t{{0.0, 1.0}, {0.0, 1.0, 2.0}, {0.0, 2.0, 2.5, 0.0, 1.0, 3.0}};
        auto r = find_supermodular_order(payoff_family::tabulated(t), {0.0, 1.0}, {0.0, 1.0, 2.0});
        CHECK_FALSE(r.found);
        REQUIRE(r.certificate);
        CHECK(r.certificate->a != r.certificate->b);
    }
}

TEST_CASE("supermodular payoffs admit the identity order") {
    rng gen(11);
    auto xs = linspace(0.0, 4.0, 17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> vs;
        for (int k = 0; k < 6; ++k) vs.push_back(gen.uniform(0.1, 2.0));
        std::sort(vs.begin(), vs.end());
        size_function g = trial % 3 == 0 ? size_function::identity()
                          : trial % 3 == 1 ? size_function::log1p()
                                           : size_function::power(1.0, 0.5);
        auto u = payoff_family::product(g);
        REQUIRE(check_supermodularity(u, vs, xs).pass);
        auto r = find_supermodular_order(u, vs, xs);
        REQUIRE(r.found);
        CHECK(r.order.ascending == agent_order::identity(vs.size()).ascending);
    }
}

TEST_CASE("sizes and qualities are additive over disjoint sets") {
    rng gen(5);
    for (int trial = 0; trial < 40; ++trial) {
        market_spec m;
        for (int j = 0; j < 4; ++j) m.firms.push_back({j, gen.uniform(0.1, 2.0), gen.uniform(0.0, 2.0)});
        m.individuals = {{0, 1.0, 1.0, 1.0}};
        m.u_i = payoff_family::product(size_function::identity());
        m.u_f = m.u_i;
        m.kernel = competition_kernel::constant(0.7);
        matching left(4, 1), right(4, 1), both(4, 1);
        for (std::size_t j = 0; j < 4; ++j) {
            bool side = gen.coin();
            (side ? left : right).set(j, 0, true);
            both.set(j, 0, true);
        }
        CHECK(std::fabs(weighted_size(m, left, 0) + weighted_size(m, right, 0) - weighted_size(m, both, 0)) <= 1e-12);
    }
    // Firm side: with a constant kernel each matched individual adds mass * h.
    rng g2(6);
    for (int trial = 0; trial < 40; ++trial) {
        market_spec m = instance_a();
        m.kernel = competition_kernel::constant(g2.uniform(0.1, 1.0));
        matching a(2, 2), b(2, 2), both(2, 2);
        a.set(0, 0, true);
        b.set(0, 1, true);
        both.set(0, 0, true);
        both.set(0, 1, true);
        CHECK(std::fabs(firm_match_quality(m, a, 1) + firm_match_quality(m, b, 1) - firm_match_quality(m, both, 1)) <= 1e-12);
    }
}

TEST_CASE("objective is invariant under relabeling") {
    rng gen(3);
    for (int trial = 0; trial < 40; ++trial) {
        market_spec m;
        for (int j = 0; j < 3; ++j) m.firms.push_back({10 + j, gen.uniform(0.1, 2.0), 1.0});
        std::vector<double> vs{gen.uniform(0.1, 2.0), gen.uniform(0.1, 2.0), gen.uniform(0.1, 2.0)};
        std::sort(vs.begin(), vs.end());
        for (int i = 0; i < 3; ++i) m.individuals.push_back({i, vs[i], 1.0, 1.0 / 3});
        m.u_i = payoff_family::product(size_function::log1p());
        m.u_f = payoff_family::product(size_function::power(1.0, 0.5));
        m.kernel = competition_kernel::power(1.0, 1.0, -1.0);
        matching mu(3, 3);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) mu.set(j, i, gen.coin());
        double base = platform_objective(m, mu);

        // Reverse the firm list and renumber ids; individuals keep their sorted grid.
        market_spec p = m;
        std::reverse(p.firms.begin(), p.firms.end());
        for (auto& f : p.firms) f.id = 100 - f.id;
        matching pm(3, 3);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) pm.set(2 - j, i, mu.at(j, i));
        CHECK(platform_objective(p, pm) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("row and column reads agree") {
    rng gen(9);
    matching mu(4, 3);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 3; ++i) mu.set(j, i, gen.coin());
    CHECK(mu.transposed().transposed() == mu);
    for (std::size_t i = 0; i < 3; ++i)
        for (auto j : mu.firms_of(i)) {
            auto col = mu.individuals_of(j);
            CHECK(std::find(col.begin(), col.end(), i) != col.end());
        }
}

TEST_CASE("threshold representation") {
    agent_order by_v = agent_order::by_keys({2.0, 1.0, 3.0});  // firm 1 < firm 0 < firm 2
    matching mu(3, 2);
    mu.set(2, 0, true);
    mu.set(0, 0, true);  // individual 0: firms {0, 2} = positions {1, 2}
    auto t = to_thresholds(mu, by_v);
    REQUIRE(t.representable);
    CHECK(t.cutoffs == std::vector<int>{1, 3});
    CHECK(from_thresholds(t.cutoffs, by_v) == mu);

    mu.set(0, 0, false);
    mu.set(1, 0, true);  // {1, 2}: skips position 1
    CHECK_FALSE(to_thresholds(mu, by_v).representable);

    SUBCASE("ties may not be split") {
        agent_order tied = agent_order::by_keys({1.0, 1.0});
        matching half(2, 1);
        half.set(1, 0, true);
        CHECK_FALSE(to_thresholds(half, tied).representable);
        CHECK(to_thresholds(matching::full(2, 1), tied).representable);
    }
    CHECK(cutoffs_nonincreasing({2, 1, 0}, agent_order::identity(3)));
    CHECK_FALSE(cutoffs_nonincreasing({0, 1}, agent_order::identity(2)));
}

TEST_CASE("market validation reports every violation") {
    market_spec m = instance_a();
    m.firms[0].sigma = -1.0;
    m.individuals[1].mass = 0.7;
    m.firms[1].id = 1;
    auto errs = validation_errors(m);
    CHECK(errs.size() == 3);
    CHECK_THROWS_AS(validate(m), error);
    try {
        validate(m);
    } catch (const error& e) {
        CHECK(e.kind() == errc::validation);
        CHECK(std::string(e.what()).find("sigma_f") != std::string::npos);
    }
    CHECK(validation_errors(instance_a()).empty());
}

TEST_CASE("kernel families") {
    CHECK(competition_kernel::affine_truncated(1.0, 0.4)(3.0) == 0.0);
    CHECK(competition_kernel::affine_truncated(1.0, 0.4)(1.0) == doctest::Approx(0.6));
    CHECK(competition_kernel::power(2.0, 1.0, -1.0)(1.0) == doctest::Approx(1.0));
    CHECK(competition_kernel::ces(1.5, -0.5)(4.0) == doctest::Approx(0.75));
    auto decay = competition_kernel::constant(1.0).with_sigma_f_decay(1.0);
    CHECK(decay(0.0, 1.0, 3.0) == doctest::Approx(0.25));
    CHECK(kernel_decreasing(competition_kernel::power(1.0, 1.0, -2.0), 0.0, 4.0));
    CHECK_FALSE(kernel_decreasing(competition_kernel::power(1.0, 1.0, 0.5), 0.0, 4.0));
    CHECK(competition_kernel::power(1.0, 0.0, 2.0).d_size(1.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("payoff families") {
    auto affine = payoff_family::affine(type_function::linear(1.0, 0.5), type_function::identity());
    CHECK(affine.value(2.0, 3.0) == doctest::Approx(2.0 + 6.0));
    REQUIRE(affine.affine_at(2.0));
    CHECK(affine.affine_at(2.0)->slope == 2.0);
    CHECK(affine.with_slope_shift(0.5).affine_at(2.0)->slope == 2.5);
    CHECK_FALSE(payoff_family::product(size_function::log1p()).affine_at(1.0));
    CHECK(payoff_family::product(size_function::identity()).affine_at(3.0)->slope == 3.0);

    auto root = payoff_family::product(size_function::power(1.0, 0.5));
    CHECK(root.d_size(2.0, 4.0) == doctest::Approx(0.5));
    CHECK(marginal_in_size_fd(root, 2.0, 4.0) == doctest::Approx(0.5).epsilon(1e-8));
    auto xs = linspace(0.0, 4.0, 9);
    CHECK(concave_in_size(root, 1.0, xs));
    CHECK_FALSE(concave_in_size(payoff_family::product(size_function::power(1.0, 2.0)), 1.0, xs));
    CHECK(increasing_in_size(root, 1.0, xs));

    payoff_table t{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0, 0.0, 3.0}};
    auto tab = payoff_family::tabulated(t);
    CHECK(tab.value(0.5, 0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(payoff_family::tabulated(payoff_table{{0.0}, {0.0, 1.0}, {0.0}}), error);
    CHECK_THROWS_AS(size_function::power(1.0, 0.0), error);
}
