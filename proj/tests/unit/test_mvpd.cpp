#include "platmatch/errors.hpp"
#include "platmatch/generators.hpp"
#include "platmatch/mvpd.hpp"
#include "platmatch/objective.hpp"
#include "platmatch/solver.hpp"

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

// Two channels v = (2, 1), U^F = v x, h = 1, g_I(x) = x, uniform viewers on [0, 1], beta = 1/2.
mvpd_spec two_channels() {
    mvpd_spec s;
    s.channels = {{1, 2.0, 1.0}, {2, 1.0, 1.0}};
    s.u_f = payoff_family::product(size_function::identity());
    s.g_i = size_function::identity();
    s.viewers = distribution::uniform(0.0, 1.0);
    s.viewer_cells = 20;
    s.beta = 0.5;
    s.kernel = competition_kernel::constant(1.0);
    return s;
}

std::vector<std::size_t> sizes_from(const mvpd_spec& s, std::function<std::size_t(double)> f) {
    auto b = cell_bounds(s);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back(f(b[i]));
    return out;
}

// Integral of phi dQ for uniform [0, 1] viewers over [a, b]: the integral of 2v - 1.
double uniform_phi(double a, double b) { return (b * b - b) - (a * a - a); }

// Every nondecreasing size vector, evaluated from the objective's definition.
double best_nested_menu(const mvpd_spec& s) {
    const auto phi = cell_virtual_mass(s);
    const auto mass = cell_masses(s);
    const auto rank = channel_rank(s);
    const std::size_t N = s.n_channels(), M = s.viewer_cells;
    std::vector<std::size_t> n(M, 0);
    double best = -HUGE_VAL;
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t from) {
        if (i == M) {
            double total = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                double q = 0.0;
                for (std::size_t c = 0; c < M; ++c)
                    if (n[c] > k) q += mass[c] * s.kernel(static_cast<double>(n[c]), 1.0, 1.0);
                total += s.beta * s.channel_payoff(rank[k]).value(s.channels[rank[k]].v, q);
            }
            for (std::size_t c = 0; c < M; ++c) {
                const double x = static_cast<double>(n[c]);
                const double g = s.g_i(x);
                total += phi[c] * (n[c] ? g + (1.0 - s.beta) * x * (s.g_i(x - 1.0) - g) : 0.0);
            }
            best = std::max(best, total);
            return;
        }
        for (std::size_t k = from; k <= N; ++k) {
            n[i] = k;
            walk(i + 1, k);
        }
    };
    walk(0, 0);
    return best;
}

}  // namespace

TEST_CASE("viewer revenue") {
    mvpd_spec s = two_channels();

    SUBCASE("everyone gets both channels") {
        auto mu = nested_menu(s, std::vector<std::size_t>(20, 2));
        CHECK(std::fabs(viewer_revenue(s, mu)) <= 1e-14);
        auto chk = viewer_revenue_via_payments(s, mu);
        CHECK(std::fabs(chk.by_payments) <= 1e-8);
        CHECK(std::fabs(chk.by_virtual_surplus) <= 1e-8);
    }

    SUBCASE("empty allocation") {
        auto mu = nested_menu(s, std::vector<std::size_t>(20, 0));
        CHECK(viewer_revenue(s, mu) == 0.0);
    }

    SUBCASE("one channel above one half") {
        auto mu = nested_menu(s, sizes_from(s, [](double v) { return v >= 0.5 ? 1u : 0u; }));
        CHECK(viewer_revenue(s, mu) == doctest::Approx(0.25).epsilon(1e-14));
        auto chk = viewer_revenue_via_payments(s, mu);
        CHECK(chk.by_payments == doctest::Approx(0.25).epsilon(1e-8));
        CHECK(chk.by_virtual_surplus == doctest::Approx(0.25).epsilon(1e-8));
        // The posted price for the channel is 0.5.
        CHECK(chk.payments.back() == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("non-monotone allocation") {
        auto mu = nested_menu(s, sizes_from(s, [](double v) { return v < 0.5 ? 1u : 0u; }));
        CHECK(kind_of([&] { viewer_revenue(s, mu); }) == errc::incentive);
    }

    SUBCASE("cell virtual mass matches the closed form") {
        const auto phi = cell_virtual_mass(s);
        const auto b = cell_bounds(s);
        for (std::size_t i = 0; i < phi.size(); ++i) CHECK(phi[i] == doctest::Approx(uniform_phi(b[i], b[i + 1])).epsilon(1e-12));
    }
}

TEST_CASE("dropout delta") {
    mvpd_spec s = two_channels();

    SUBCASE("channel with the upper half of viewers") {
        auto mu = nested_menu(s, sizes_from(s, [](double v) { return v >= 0.5 ? 1u : 0u; }));
        auto d = dropout_delta(s, mu, 1);
        CHECK(d.delta == doctest::Approx(-0.25).epsilon(1e-14));
        CHECK(d.gap <= 1e-9);
    }

    SUBCASE("channel with nobody") {
        auto mu = nested_menu(s, std::vector<std::size_t>(20, 1));
        auto d = dropout_delta(s, mu, 2);
        CHECK(d.delta == 0.0);
        CHECK(d.recomputed == 0.0);
    }

    SUBCASE("bundle value flat beyond the first channel") {
        s.g_i = size_function::table({0.0, 1.0, 2.0}, {0.0, 1.0, 1.0});
        auto mu = nested_menu(s, std::vector<std::size_t>(20, 2));
        auto d = dropout_delta(s, mu, 2);
        CHECK(d.delta == 0.0);
        CHECK(d.gap <= 1e-9);
    }
}

TEST_CASE("nash fees and the revenue identity") {
    mvpd_spec s = two_channels();
    auto full = nested_menu(s, std::vector<std::size_t>(20, 2));

    SUBCASE("two-channel example") {
        CHECK(nash_fee(s, full, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(nash_fee(s, full, 2) == doctest::Approx(0.5).epsilon(1e-12));
        auto r = revenue_terms(s, full);
        CHECK(r.objective == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(r.fee_total + r.viewer_revenue == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(r.identity_gap <= 1e-8);
        CHECK(mvpd_objective(s, full) == doctest::Approx(1.5).epsilon(1e-12));
    }

    SUBCASE("full channel bargaining power") {
        s.beta = 1.0;
        auto mu = nested_menu(s, sizes_from(s, [](double v) { return v >= 0.3 ? 2u : 1u; }));
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(nash_fee(s, mu, s.channels[j].id) ==
                  s.u_f.value(s.channels[j].v, channel_quality(s, mu, j)));
    }

    SUBCASE("no channel bargaining power") {
        s.beta = 0.0;
        auto mu = nested_menu(s, sizes_from(s, [](double v) { return v >= 0.3 ? 2u : 1u; }));
        CHECK(nash_fee(s, mu, 2) == dropout_delta(s, mu, 2).delta);
    }

    SUBCASE("plug-in fee with zero dropout effect") {
        s.g_i = size_function::table({0.0, 1.0, 2.0}, {0.0, 1.0, 1.0});
        // Quality is the full viewer mass, 1.
        CHECK(channel_quality(s, full, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(nash_fee(s, full, 1) == doctest::Approx(0.5 * 2.0).epsilon(1e-14));
        CHECK(nash_fee(s, full, 2) == doctest::Approx(0.5 * 1.0).epsilon(1e-14));
    }

    SUBCASE("welfare form at beta = 1") {
        s.beta = 1.0;
        s.g_i = size_function::table({0.0, 1.0, 2.0, 3.0}, {0.0, 2.0, 3.0, 4.0});
        auto mu = nested_menu(s, sizes_from(s, [](double v) { return v < 0.2 ? 0u : v < 0.6 ? 1u : 2u; }));
        double welfare = 0.0;
        for (std::size_t j = 0; j < 2; ++j) welfare += s.u_f.value(s.channels[j].v, channel_quality(s, mu, j));
        welfare += viewer_revenue(s, mu);
        CHECK(mvpd_objective(s, mu) == doctest::Approx(welfare).epsilon(1e-13));
    }

    SUBCASE("empty matching") {
        auto mu = nested_menu(s, std::vector<std::size_t>(20, 0));
        CHECK(mvpd_objective(s, mu) == 0.0);
    }

    SUBCASE("identity on random menus") {
        for (std::uint64_t t = 0; t < 100; ++t) {
            rng gen(trial_seed(17, t));
            mvpd_spec r = random_mvpd(gen);
            std::vector<std::size_t> sizes(r.viewer_cells);
            std::size_t n = 0;
            for (auto& x : sizes) {
                if (gen.coin(0.3) && n < r.n_channels()) ++n;
                x = n;
            }
            auto mu = nested_menu(r, sizes);
            auto terms = revenue_terms(r, mu);
            CHECK(terms.identity_gap <= 1e-8);
            for (const auto& c : r.channels) CHECK(dropout_delta(r, mu, c.id).gap <= 1e-9);
            auto chk = viewer_revenue_via_payments(r, mu);
            CHECK(std::fabs(chk.by_payments - chk.by_virtual_value) <= 1e-8);
            CHECK(std::fabs(chk.by_virtual_surplus - chk.by_virtual_value) <= 1e-8);
        }
    }
}

TEST_CASE("bundle value condition") {
    SUBCASE("linear g") {
        for (double beta : {0.0, 0.3, 1.0}) {
            auto v = check_gi_condition(size_function::identity(), 1.0, 10.0, beta);
            CHECK(v.pass);
            for (std::size_t k = 0; k < v.values.size(); ++k)
                CHECK(v.values[k] == doctest::Approx(beta * static_cast<double>(k + 1)).epsilon(1e-14));
        }
    }

    SUBCASE("concave g passes") {
        for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            CHECK(check_gi_condition(size_function::power(1.0, 0.5), 1.0, 64.0, beta).pass);
            CHECK(check_gi_condition(size_function::log1p(), 1.0, 64.0, beta).pass);
        }
    }

    SUBCASE("convex g fails with a witness") {
        auto v = check_gi_condition(size_function::power(1.0, 2.0), 1.0, 10.0, 0.0);
        CHECK_FALSE(v.pass);
        CHECK_FALSE(v.concave);
        REQUIRE(v.witness.has_value());
        // E(x) = x - x^2 at beta = 0: E(1) = 0 > E(2) = -2.
        CHECK(*v.witness == 1.0);
        CHECK(v.values[1] == doctest::Approx(-2.0).epsilon(1e-14));
    }
}

TEST_CASE("solve_mvpd") {
    SUBCASE("two-channel example bundles everything") {
        mvpd_spec s = two_channels();
        s.viewer_cells = 10;
        auto out = solve_mvpd(s);
        CHECK(out.bundle_size == std::vector<std::size_t>(10, 2));
        CHECK(out.objective == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(out.objective == doctest::Approx(best_nested_menu(s)).epsilon(1e-12));
        CHECK(out.revenue.fees[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.revenue.fees[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(out.excluded_cells == 0);
    }

    SUBCASE("positive virtual value at the bottom excludes nobody") {
        mvpd_spec s = two_channels();
        s.viewers = distribution::uniform(1.5, 2.5);
        s.viewer_cells = 10;
        s.u_f = payoff_family::product(size_function::log1p());
        CHECK(2.0 * 1.5 - 2.5 > 0.0);
        auto out = solve_mvpd(s);
        CHECK(out.excluded_cells == 0);
    }

    SUBCASE("single channel with no channel payoff sells where phi >= 0") {
        mvpd_spec s = two_channels();
        s.channels = {{1, 1.0, 1.0}};
        s.u_f = payoff_family::zero();
        s.viewer_cells = 20;
        auto out = solve_mvpd(s);
        REQUIRE(out.cutoff[0].has_value());
        CHECK(*out.cutoff[0] == doctest::Approx(0.5).epsilon(1e-14));
    }

    SUBCASE("matches the nested oracle and the matching-market solver") {
        for (std::uint64_t t = 0; t < 40; ++t) {
            rng gen(trial_seed(23, t));
            mvpd_draw draw;
            draw.max_channels = 3;
            draw.min_cells = 3;
            draw.max_cells = 5;
            mvpd_spec s = random_mvpd(gen, draw);
            auto out = solve_mvpd(s);
            CHECK(out.objective == doctest::Approx(best_nested_menu(s)).epsilon(1e-11));
            CHECK(threshold_representable(s, out.mu));
            auto m = as_market(s);
            CHECK(platform_objective(m, out.mu) == doctest::Approx(out.objective).epsilon(1e-11));
            auto bf = brute_force(m, true);
            CHECK(bf.objective == doctest::Approx(out.objective).epsilon(1e-11));
        }
    }

    SUBCASE("preconditions") {
        mvpd_spec s = two_channels();
        s.g_i = size_function::power(1.0, 2.0);
        CHECK(kind_of([&] { solve_mvpd(s); }) == errc::structure);
        s = two_channels();
        s.u_f = payoff_family::product(size_function::power(1.0, 2.0));
        CHECK(kind_of([&] { solve_mvpd(s); }) == errc::structure);
        s = two_channels();
        s.g_i = size_function::affine(1.0, 1.0);
        CHECK(kind_of([&] { solve_mvpd(s); }) == errc::validation);
        s = two_channels();
        s.beta = 1.5;
        s.owned_channel = 7;
        auto errs = validation_errors(s);
        CHECK(errs.size() == 2);
        s = two_channels();
        s.viewer_cells = 30;
        s.channels.push_back({3, 0.5, 1.0});
        s.channels.push_back({4, 0.25, 1.0});
        CHECK(kind_of([&] { solve_mvpd(s, 1000); }) == errc::size);
    }
}

TEST_CASE("owned channel objective") {
    mvpd_spec s = two_channels();
    s.channels.push_back({3, 0.5, 1.0});
    s.kernel = competition_kernel::power(1.0, 1.0, -1.0);
    s.owned_channel = 1;
    auto mu = nested_menu(s, sizes_from(s, [](double v) { return v < 0.1 ? 0u : v < 0.4 ? 1u : v < 0.7 ? 2u : 3u; }));
    const auto phi = cell_virtual_mass(s);

    SUBCASE("no leverage: plain objective with full weight on the owned channel plus the correction") {
        s.theta = 0.0;
        auto t = blr_breakdown(s, mu);
        mvpd_spec plain = s;
        plain.owned_channel.reset();
        double reweighted = revenue_terms(plain, mu).objective +
                            (1.0 - s.beta) * s.u_f.value(2.0, channel_quality(s, mu, 0));
        double correction = -(1.0 - s.beta) * dropout_delta(s, mu, 1).delta;
        CHECK(t.total == doctest::Approx(reweighted + correction).epsilon(1e-13));
        CHECK(t.leverage == 0.0);
        CHECK(t.identity_gap <= 1e-8);
    }

    SUBCASE("affine g reduces the correction to the owned channel's virtual mass") {
        s.theta = 0.0;
        s.g_i = size_function::affine(1.7, 0.0);
        auto t = blr_breakdown(s, mu);
        double owned_phi = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (mu.at(0, i)) owned_phi += phi[i];
        CHECK(t.owned_correction == doctest::Approx((1.0 - s.beta) * 1.7 * owned_phi).epsilon(1e-13));
    }

    SUBCASE("constant kernel removes the leverage term") {
        s.theta = 0.8;
        s.kernel = competition_kernel::constant(1.0);
        auto t = blr_breakdown(s, mu);
        CHECK(t.leverage == 0.0);
    }

    SUBCASE("leverage term and fees agree") {
        s.theta = 0.6;
        auto t = blr_breakdown(s, mu);
        CHECK(t.leverage > 0.0);
        CHECK(t.identity_gap <= 1e-8);
        CHECK(blr_objective(s, mu) == doctest::Approx(t.total).epsilon(1e-15));
        CHECK(kind_of([&] { blr_fee(s, mu, 1); }) == errc::input);
    }
}

TEST_CASE("mergers") {
    mvpd_spec s = two_channels();
    s.channels.push_back({3, 0.6, 1.0});
    s.viewer_cells = 10;
    s.u_f = payoff_family::product(size_function::log1p());
    s.kernel = competition_kernel::power(1.0, 1.0, -0.5);

    SUBCASE("zero synergy changes nothing") {
        auto r = merger_counterfactual(s, merger{merger::kind::horizontal, {2, 3}, 0.0});
        CHECK(r.after.mu == r.before.mu);
        for (const auto& rel : r.cell_relation) CHECK(rel == "=");
    }

    SUBCASE("merger of the two lowest channels grows every bundle") {
        auto r = merger_counterfactual(s, merger{merger::kind::horizontal, {2, 3}, 0.2});
        CHECK(r.bundles.claim == "bundles_grow_after_low_merger");
        CHECK(r.bundles.status == verdict_status::pass);
        for (const auto& rel : r.cell_relation) CHECK((rel == "=" || rel == "superset"));
    }

    SUBCASE("purchase of the highest channel") {
        s.viewers = distribution::uniform(1.5, 2.5);
        auto r = merger_counterfactual(s, merger{merger::kind::vertical, {1}, 0.0});
        REQUIRE(r.before.excluded_cells == 0);
        CHECK(r.welfare.claim == "viewers_worse_after_top_purchase");
        CHECK(r.welfare.status == verdict_status::pass);
        for (double d : r.payoff_delta) CHECK(d <= 1e-12);
    }

    SUBCASE("leverage suppresses the welfare verdict") {
        s.theta = 0.5;
        auto r = merger_counterfactual(s, merger{merger::kind::vertical, {1}, 0.0});
        CHECK(r.welfare.status == verdict_status::not_applicable);
    }

    SUBCASE("synergy that reorders channels") {
        CHECK(kind_of([&] { merger_transform(s, merger{merger::kind::horizontal, {2, 3}, 2.0}); }) == errc::structure);
    }

    SUBCASE("vertical merger sets the owned channel") {
        auto t = merger_transform(s, merger{merger::kind::vertical, {3}, 0.0});
        REQUIRE(t.owned_channel.has_value());
        CHECK(*t.owned_channel == 3);
        CHECK(kind_of([&] { merger_transform(t, merger{merger::kind::vertical, {1}, 0.0}); }) == errc::input);
    }
}

TEST_CASE("vertical purchase predictions on random scenarios") {
    int judged = 0;
    for (std::uint64_t t = 0; t < 120; ++t) {
        rng gen(trial_seed(29, t));
        mvpd_draw draw;
        draw.affine_gi = true;
        draw.affine_channel_payoff = t % 2 == 1;
        mvpd_spec s = random_mvpd(gen, draw);
        const auto rank = channel_rank(s);
        const std::size_t pick = t % 2 == 0 ? rank.front() : rank.back();
        auto r = merger_counterfactual(s, merger{merger::kind::vertical, {s.channels[pick].id}, 0.0});
        CHECK(r.welfare.status != verdict_status::fail);
        judged += r.welfare.status == verdict_status::pass;
    }
    CHECK(judged >= 50);
}
