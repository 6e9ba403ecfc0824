#include "platmatch/solver.hpp"

#include "platmatch/errors.hpp"
#include "platmatch/objective.hpp"
#include "platmatch/random.hpp"
#include "platmatch/supermodular.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace platmatch {

namespace {

double tie_tolerance(double best) { return std::isfinite(best) ? 1e-12 * std::max(1.0, std::fabs(best)) : 0.0; }

agent_order threshold_order(const market_spec& m, bool strict) {
    auto r = firm_order(m);
    if (r.found) return r.order;
    if (strict) {
        std::string why = r.certificate ? describe(*r.certificate) : "increments cannot be ranked";
        fail(errc::structure, "firm payoffs admit no supermodular order: " + why);
    }
    std::vector<double> keys(m.n_firms());
    for (std::size_t j = 0; j < keys.size(); ++j) keys[j] = m.firms[j].v;
    return agent_order::by_keys(keys);
}

std::uint64_t grid_count(std::size_t n_firms, std::size_t n_individuals, std::uint64_t cap) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < n_individuals; ++i) {
        count *= n_firms + 1;
        if (count > cap) return cap + 1;
    }
    return count;
}

// Objective over cutoff vectors with every kernel value precomputed.
class threshold_table {
public:
    threshold_table(const market_spec& m, agent_order order) : m_(m), order_(std::move(order)) {
        n_ = m.n_firms();
        m_ind_ = m.n_individuals();
        size_at_.assign(n_ + 1, 0.0);
        for (std::size_t c = n_; c-- > 0;) size_at_[c] = size_at_[c + 1] + m.firms[order_.ascending[c]].sigma;
        ui_.resize(m_ind_ * (n_ + 1));
        mh_.resize(m_ind_ * (n_ + 1) * n_);
        for (std::size_t i = 0; i < m_ind_; ++i) {
            const auto& ind = m.individuals[i];
            for (std::size_t c = 0; c <= n_; ++c) {
                ui_[i * (n_ + 1) + c] = ind.mass * m.u_i.value(ind.v, size_at_[c]);
                for (std::size_t p = c; p < n_; ++p)
                    mh_[(i * (n_ + 1) + c) * n_ + p] =
                        ind.mass * m.kernel(size_at_[c], ind.sigma, m.firms[order_.ascending[p]].sigma);
            }
        }
        uf_.resize(n_);
        vf_.resize(n_);
        for (std::size_t p = 0; p < n_; ++p) {
            uf_[p] = &m.firm_payoff(order_.ascending[p]);
            vf_[p] = m.firms[order_.ascending[p]].v;
        }
        q_.resize(n_);
    }

    double value(const std::vector<int>& cut) {
        std::fill(q_.begin(), q_.end(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < m_ind_; ++i) {
            const std::size_t c = static_cast<std::size_t>(cut[i]);
            total += ui_[i * (n_ + 1) + c];
            const double* row = &mh_[(i * (n_ + 1) + c) * n_];
            for (std::size_t p = c; p < n_; ++p) q_[p] += row[p];
        }
        for (std::size_t p = 0; p < n_; ++p) total += uf_[p]->value(vf_[p], q_[p]);
        return total;
    }

    const agent_order& order() const { return order_; }
    std::size_t firms() const { return n_; }
    std::size_t individuals() const { return m_ind_; }

private:
    const market_spec& m_;
    agent_order order_;
    std::size_t n_ = 0, m_ind_ = 0;
    std::vector<double> size_at_, ui_, mh_, vf_, q_;
    std::vector<const payoff_family*> uf_;
};

// Exhaustive search over cutoff vectors; ties resolve to the smallest incidence.
solve_report enumerate_thresholds(const market_spec& m, const agent_order& order, const std::string& method) {
    threshold_table table(m, order);
    const std::size_t M = m.n_individuals();
    const int N = static_cast<int>(m.n_firms());
    std::vector<int> cut(M, 0), best_cut;
    double best = -std::numeric_limits<double>::infinity();
    matching best_mu;
    std::uint64_t evaluated = 0;
    while (true) {
        double val = table.value(cut);
        ++evaluated;
        if (!std::isfinite(val)) fail(errc::numeric, "platform objective is not finite");
        if (val > best + tie_tolerance(best)) {
            best = val;
            best_cut = cut;
            best_mu = from_thresholds(cut, order);
        } else if (std::fabs(val - best) <= tie_tolerance(best)) {
            matching mu = from_thresholds(cut, order);
            if (mu < best_mu) {
                best = std::max(best, val);
                best_cut = cut;
                best_mu = std::move(mu);
            }
        }
        bool carry = true;
        for (std::size_t k = M; carry && k-- > 0;) {
            if (cut[k] < N) {
                ++cut[k];
                carry = false;
            } else {
                cut[k] = 0;
            }
        }
        if (carry) break;
    }
    solve_report r;
    r.mu = best_mu;
    r.objective = platform_objective(m, r.mu);
    r.method = method;
    r.iterations = evaluated;
    r.exhaustive = true;
    r.firm_order = order;
    r.cutoffs = best_cut;
    return r;
}

solve_report coordinate_ascent(const market_spec& m, const agent_order& order, std::uint64_t seed,
                               const solver_limits& limits) {
    threshold_table table(m, order);
    const std::size_t M = m.n_individuals();
    const int N = static_cast<int>(m.n_firms());
    std::vector<int> best_cut;
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t sweeps = 0;
    for (int start = 0; start <= limits.restarts; ++start) {
        std::vector<int> cut(M, 0);
        if (start > 0) {
            rng gen(trial_seed(seed, static_cast<std::uint64_t>(start)));
            for (auto& c : cut) c = static_cast<int>(gen.below(static_cast<std::uint64_t>(N) + 1));
        }
        double cur = table.value(cut);
        bool improved = true;
        while (improved) {
            improved = false;
            ++sweeps;
            for (std::size_t i = 0; i < M; ++i) {
                const int keep = cut[i];
                int arg = keep;
                double top = cur;
                for (int c = 0; c <= N; ++c) {
                    if (c == keep) continue;
                    cut[i] = c;
                    double val = table.value(cut);
                    if (val > top + limits.ascent_tolerance) {
                        top = val;
                        arg = c;
                    }
                }
                cut[i] = arg;
                if (arg != keep) {
                    cur = top;
                    improved = true;
                }
            }
        }
        if (cur > best + tie_tolerance(best)) {
            best = cur;
            best_cut = cut;
        }
    }
    solve_report r;
    r.mu = from_thresholds(best_cut, order);
    r.objective = platform_objective(m, r.mu);
    r.method = "threshold_ascent";
    r.iterations = sweeps;
    r.restarts = limits.restarts;
    r.exhaustive = false;
    r.firm_order = order;
    r.cutoffs = best_cut;
    return r;
}

void attach_cutoffs(solve_report& r) {
    auto t = to_thresholds(r.mu, r.firm_order);
    r.cutoffs = t.representable ? t.cutoffs : std::vector<int>{};
}

}  // namespace

solve_report brute_force(const market_spec& m, bool monotone_only, const solver_limits& limits) {
    validate(m);
    const std::size_t N = m.n_firms(), M = m.n_individuals();
    if (monotone_only) {
        if (grid_count(N, M, limits.max_threshold_grid) > limits.max_threshold_grid)
            fail(errc::size, "threshold enumeration exceeds the (N+1)^M cap");
        return enumerate_thresholds(m, threshold_order(m, false), "brute_force_monotone");
    }
    const std::size_t cells = N * M;
    if (cells > limits.max_cells || cells >= 63) fail(errc::size, "incidence enumeration exceeds the 2^cells cap");

    // Row cache: for each individual and each subset of firms, the size-dependent terms.
    const std::uint64_t rows = std::uint64_t{1} << N;
    const bool cached = rows * M * (N + 1) <= 4'000'000;
    std::vector<double> ui, mh;
    auto fill_row = [&](std::size_t i, std::uint64_t r, double* ui_out, double* mh_out) {
        const auto& ind = m.individuals[i];
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j)
            if (r >> j & 1) s += m.firms[j].sigma;
        *ui_out = ind.mass * m.u_i.value(ind.v, s);
        for (std::size_t j = 0; j < N; ++j)
            mh_out[j] = (r >> j & 1) ? ind.mass * m.kernel(s, ind.sigma, m.firms[j].sigma) : 0.0;
    };
    if (cached) {
        ui.resize(M * rows);
        mh.resize(M * rows * N);
        for (std::size_t i = 0; i < M; ++i)
            for (std::uint64_t r = 0; r < rows; ++r) fill_row(i, r, &ui[i * rows + r], &mh[(i * rows + r) * N]);
    }
    std::vector<double> q(N), scratch_mh(N);
    std::vector<std::uint64_t> row_of(M);
    std::vector<const payoff_family*> uf(N);
    for (std::size_t j = 0; j < N; ++j) uf[j] = &m.firm_payoff(j);

    const std::uint64_t total = std::uint64_t{1} << cells;
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        // Cell (j, i) sits at firm-major index j*M+i; the most significant bit is cell 0, so
        // ascending masks are ascending lexicographic incidences.
        std::fill(row_of.begin(), row_of.end(), 0);
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t i = 0; i < M; ++i)
                if (mask >> (cells - 1 - (j * M + i)) & 1) row_of[i] |= std::uint64_t{1} << j;
        std::fill(q.begin(), q.end(), 0.0);
        double val = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double* row;
            double u;
            if (cached) {
                u = ui[i * rows + row_of[i]];
                row = &mh[(i * rows + row_of[i]) * N];
            } else {
                fill_row(i, row_of[i], &u, scratch_mh.data());
                row = scratch_mh.data();
            }
            val += u;
            for (std::size_t j = 0; j < N; ++j) q[j] += row[j];
        }
        for (std::size_t j = 0; j < N; ++j) val += uf[j]->value(m.firms[j].v, q[j]);
        if (!std::isfinite(val)) fail(errc::numeric, "platform objective is not finite");
        if (val > best + tie_tolerance(best)) {
            best = val;
            best_mask = mask;
        }
    }
    solve_report r;
    r.mu = matching(N, M);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = 0; i < M; ++i) r.mu.set(j, i, best_mask >> (cells - 1 - (j * M + i)) & 1);
    r.objective = platform_objective(m, r.mu);
    r.method = "brute_force";
    r.iterations = total;
    r.exhaustive = true;
    r.firm_order = threshold_order(m, false);
    attach_cutoffs(r);
    return r;
}

solve_report solve_threshold(const market_spec& m, std::uint64_t seed, const solver_limits& limits) {
    validate(m);
    agent_order order = threshold_order(m, true);
    auto ind = individual_order(m);
    if (!ind.found) {
        std::string why = ind.certificate ? describe(*ind.certificate) : "increments cannot be ranked";
        fail(errc::structure, "individual payoffs admit no supermodular order: " + why);
    }
    if (grid_count(m.n_firms(), m.n_individuals(), limits.max_threshold_grid) <= limits.max_threshold_grid)
        return enumerate_thresholds(m, order, "threshold_exhaustive");
    return coordinate_ascent(m, order, seed, limits);
}

foc_report foc_residual(const market_spec& m, const matching& mu, int firm_id) {
    validate(m);
    if (m.horizontal_firms || m.horizontal_individuals)
        fail(errc::structure, "first-order conditions need a market without horizontal differentiation");
    agent_order order = threshold_order(m, false);
    if (!to_thresholds(mu, order).representable) fail(errc::structure, "matching is not threshold-representable");
    const std::size_t j = m.firm_index(firm_id);
    auto ind_order = individual_order(m);
    const agent_order& io = ind_order.found ? ind_order.order : agent_order::identity(m.n_individuals());

    const objective_terms base = evaluate(m, mu);
    std::vector<double> slope(m.n_firms());
    for (std::size_t k = 0; k < m.n_firms(); ++k)
        slope[k] = marginal_in_size_fd(m.firm_payoff(k), m.firms[k].v, base.qualities[k]);

    // Marginal value per unit mass of pairing (j, i) when i's set without j has size s_without.
    auto pairing_value = [&](std::size_t i, double s_without) {
        const auto& ind = m.individuals[i];
        const double s_with = s_without + m.firms[j].sigma;
        double val = slope[j] * m.kernel(s_with, ind.sigma, m.firms[j].sigma);
        for (std::size_t k = 0; k < m.n_firms(); ++k) {
            if (k == j || !mu.at(k, i)) continue;
            val += slope[k] * (m.kernel(s_with, ind.sigma, m.firms[k].sigma) - m.kernel(s_without, ind.sigma, m.firms[k].sigma));
        }
        return val + m.u_i.value(ind.v, s_with) - m.u_i.value(ind.v, s_without);
    };
    auto exact_delta = [&](std::size_t i) {
        matching alt = mu;
        alt.flip(j, i);
        return platform_objective(m, alt) - base.total;
    };

    foc_report r;
    r.firm_id = firm_id;
    for (std::size_t k = io.size(); k-- > 0;) {
        std::size_t i = io.ascending[k];
        if (!mu.at(j, i)) {
            r.add_individual = i;
            r.add_residual = pairing_value(i, base.sizes[i]);
            r.add_delta = exact_delta(i);
            break;
        }
    }
    for (std::size_t k = 0; k < io.size(); ++k) {
        std::size_t i = io.ascending[k];
        if (mu.at(j, i)) {
            r.drop_individual = i;
            r.keep_residual = pairing_value(i, base.sizes[i] - m.firms[j].sigma);
            r.drop_delta = exact_delta(i);
            break;
        }
    }
    r.interior = r.add_individual.has_value() && r.drop_individual.has_value();
    return r;
}

solve_report solve_pointwise_affine(const market_spec& m) {
    validate(m);
    const std::size_t N = m.n_firms(), M = m.n_individuals();
    std::vector<double> a(N), b(N);
    for (std::size_t j = 0; j < N; ++j) {
        auto c = m.firm_payoff(j).affine_at(m.firms[j].v);
        if (!c) fail(errc::structure, "firm payoff is not affine in match quality (firm " + std::to_string(m.firms[j].id) + ")");
        a[j] = c->intercept;
        b[j] = c->slope;
    }
    auto ratio = [&](std::size_t j) {
        const double s = m.firms[j].sigma;
        if (s > 0.0) return b[j] / s;
        return b[j] > 0.0 ? HUGE_VAL : (b[j] < 0.0 ? -HUGE_VAL : 0.0);
    };
    // Descending ratio; ties go to the higher type first.
    std::vector<std::size_t> rank(N);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) {
        if (ratio(x) != ratio(y)) return ratio(x) > ratio(y);
        return m.firms[x].v > m.firms[y].v;
    });

    solve_report r;
    r.mu = matching(N, M);
    double constant = std::accumulate(a.begin(), a.end(), 0.0);
    double total = constant;
    std::uint64_t evaluated = 0;
    for (std::size_t i = 0; i < M; ++i) {
        const auto& ind = m.individuals[i];
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        double s = 0.0;
        for (std::size_t k = 0; k <= N; ++k) {
            if (k > 0) s += m.firms[rank[k - 1]].sigma;
            double val = m.u_i.value(ind.v, s);
            for (std::size_t t = 0; t < k; ++t) val += b[rank[t]] * m.kernel(s, ind.sigma, m.firms[rank[t]].sigma);
            ++evaluated;
            if (val > best + tie_tolerance(best)) {
                best = val;
                best_k = k;
            }
        }
        for (std::size_t t = 0; t < best_k; ++t) r.mu.set(rank[t], i, true);
        total += ind.mass * best;
    }
    r.objective = platform_objective(m, r.mu);
    if (std::fabs(r.objective - total) > 1e-9 * std::max(1.0, std::fabs(total)))
        fail(errc::consistency, "pointwise decomposition disagrees with the platform objective");
    r.method = "pointwise_affine";
    r.iterations = evaluated;
    r.exhaustive = true;
    r.firm_order = threshold_order(m, false);
    attach_cutoffs(r);
    return r;
}

namespace {

// Lower bound of a threshold: value plus whether the bound itself is excluded.
struct bound {
    double value;
    bool open;
};

// Can thresholds t_b with lo_b < t_b <= hi_b be chosen monotone along the buckets?
bool monotone_thresholds_exist(const std::vector<double>& lo, const std::vector<double>& hi, bool nonincreasing) {
    const std::size_t B = lo.size();
    bound cur{-HUGE_VAL, false};
    for (std::size_t step = 0; step < B; ++step) {
        std::size_t b = nonincreasing ? B - 1 - step : step;
        bound need = cur;
        if (lo[b] > need.value || (lo[b] == need.value && !need.open)) need = {lo[b], true};
        bool ok = need.open ? need.value < hi[b] : need.value <= hi[b];
        if (!ok) return false;
        cur = need;
    }
    return true;
}

std::string slope_of(const std::vector<double>& c) {
    bool up = true, down = true;
    for (std::size_t k = 1; k < c.size(); ++k) {
        if (c[k] < c[k - 1]) up = false;
        if (c[k] > c[k - 1]) down = false;
    }
    if (up && down) return "flat";
    if (down) return "decreasing";
    if (up) return "increasing";
    return "non-monotone";
}

}  // namespace

horizontal_report solve_horizontal(const market_spec& m) {
    validate(m);
    const std::size_t N = m.n_firms(), M = m.n_individuals();
    if (N > 16) fail(errc::size, "horizontal subset search is capped at 16 firms");
    std::vector<double> b(N);
    for (std::size_t j = 0; j < N; ++j) {
        auto c = m.firm_payoff(j).affine_at(m.firms[j].v);
        if (!c) fail(errc::structure, "horizontal structure needs firm payoffs affine in match quality");
        b[j] = c->slope;
    }
    std::vector<double> sigmas;
    for (const auto& f : m.firms) sigmas.push_back(f.sigma);
    std::sort(sigmas.begin(), sigmas.end());
    sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());
    const double top = m.max_size();
    for (const auto& ind : m.individuals) {
        for (double s : sigmas)
            if (!kernel_decreasing(m.kernel, 0.0, top, ind.sigma, s, 65))
                fail(errc::structure, "kernel must be decreasing in match size on the scenario range");
        for (std::size_t k = 1; k < sigmas.size(); ++k)
            for (double x : linspace(0.0, top, 17))
                if (m.kernel(x, ind.sigma, sigmas[k]) > m.kernel(x, ind.sigma, sigmas[k - 1]) + 1e-12)
                    fail(errc::structure, "kernel must be decreasing in firm salience on the scenario range");
    }

    horizontal_report out;
    out.solve.mu = matching(N, M);
    std::uint64_t evaluated = 0;
    for (std::size_t i = 0; i < M; ++i) {
        const auto& ind = m.individuals[i];
        double best = -std::numeric_limits<double>::infinity();
        std::uint64_t best_set = 0;
        for (std::uint64_t set = 0; set < (std::uint64_t{1} << N); ++set) {
            double s = 0.0;
            for (std::size_t j = 0; j < N; ++j)
                if (set >> j & 1) s += m.firms[j].sigma;
            double val = m.u_i.value(ind.v, s);
            for (std::size_t j = 0; j < N; ++j)
                if (set >> j & 1) val += b[j] * m.kernel(s, ind.sigma, m.firms[j].sigma);
            ++evaluated;
            const double tol = tie_tolerance(best);
            bool better = val > best + tol;
            if (!better && std::fabs(val - best) <= tol) {
                int pc = std::popcount(set), pb = std::popcount(best_set);
                better = pc < pb || (pc == pb && set < best_set);
            }
            if (better) {
                best = std::max(best, val);
                best_set = set;
            }
        }
        horizontal_row row;
        row.individual = i;
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j)
            if (best_set >> j & 1) {
                out.solve.mu.set(j, i, true);
                s += m.firms[j].sigma;
            }
        row.pivot = m.u_i.d_size(ind.v, s);
        for (std::size_t j = 0; j < N; ++j)
            if (best_set >> j & 1) row.pivot += b[j] * m.kernel.d_size(s, ind.sigma, m.firms[j].sigma);
        row.predicted_slope = row.pivot >= 0.0 ? "decreasing" : "increasing";

        std::vector<double> lo, hi, cut;
        for (double sig : sigmas) {
            salience_cutoff sc;
            sc.sigma_f = sig;
            double low_matched = HUGE_VAL, high_unmatched = -HUGE_VAL;
            for (std::size_t j = 0; j < N; ++j) {
                if (m.firms[j].sigma != sig) continue;
                if (best_set >> j & 1)
                    low_matched = std::min(low_matched, m.firms[j].v);
                else
                    high_unmatched = std::max(high_unmatched, m.firms[j].v);
            }
            sc.cutoff_v = low_matched;
            sc.representable = !(high_unmatched >= low_matched);
            row.cutoffs.push_back(sc);
            lo.push_back(high_unmatched);
            hi.push_back(low_matched);
            cut.push_back(low_matched);
        }
        row.observed_slope = slope_of(cut);
        bool representable = std::all_of(row.cutoffs.begin(), row.cutoffs.end(), [](const salience_cutoff& c) { return c.representable; });
        row.consistent = representable && monotone_thresholds_exist(lo, hi, row.predicted_slope == "decreasing");
        row.all_positive_matched = true;
        for (std::size_t j = 0; j < N; ++j) {
            bool on = best_set >> j & 1;
            if (on && b[j] < 0.0) row.has_negative_firm = true;
            if (!on && b[j] > 0.0) row.all_positive_matched = false;
        }
        out.rows.push_back(row);
    }
    for (const auto& row : out.rows)
        if (row.has_negative_firm) {
            double v = m.individuals[row.individual].v;
            if (!out.v_double_star || v < *out.v_double_star) out.v_double_star = v;
        }
    if (out.v_double_star)
        for (const auto& row : out.rows)
            if ((m.individuals[row.individual].v >= *out.v_double_star) != row.has_negative_firm)
                out.boundary_consistent = false;

    out.solve.objective = platform_objective(m, out.solve.mu);
    out.solve.method = "horizontal_subsets";
    out.solve.iterations = evaluated;
    out.solve.exhaustive = true;
    out.solve.firm_order = threshold_order(m, false);
    attach_cutoffs(out.solve);
    return out;
}

std::vector<std::size_t> iron_blocks(const std::vector<double>& values, const std::vector<double>& masses) {
    if (values.size() != masses.size()) fail(errc::input, "values and masses differ in length");
    for (double w : masses)
        if (!(w > 0.0)) fail(errc::input, "ironing masses must be positive");
    struct block {
        std::size_t start;
        double weight, mean;
    };
    std::vector<block> stack;
    for (std::size_t k = 0; k < values.size(); ++k) {
        block cur{k, masses[k], values[k]};
        while (!stack.empty() && stack.back().mean >= cur.mean) {
            const block& prev = stack.back();
            double w = prev.weight + cur.weight;
            cur = block{prev.start, w, (prev.mean * prev.weight + cur.mean * cur.weight) / w};
            stack.pop_back();
        }
        stack.push_back(cur);
    }
    std::vector<std::size_t> starts;
    for (const auto& bl : stack) starts.push_back(bl.start);
    starts.push_back(values.size());
    return starts;
}

std::vector<double> iron_monotone(const std::vector<double>& values, const std::vector<double>& masses) {
    auto starts = iron_blocks(values, masses);
    std::vector<double> out(values.size());
    for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
        double w = 0.0, s = 0.0;
        for (std::size_t k = starts[b]; k < starts[b + 1]; ++k) {
            w += masses[k];
            s += masses[k] * values[k];
        }
        for (std::size_t k = starts[b]; k < starts[b + 1]; ++k) out[k] = s / w;
    }
    return out;
}

}  // namespace platmatch
