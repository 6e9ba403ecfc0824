#include "platmatch/matching.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <numeric>

namespace platmatch {

agent_order agent_order::identity(std::size_t n) {
    agent_order o;
    o.ascending.resize(n);
    std::iota(o.ascending.begin(), o.ascending.end(), std::size_t{0});
    o.rank.resize(n);
    std::iota(o.rank.begin(), o.rank.end(), 0);
    return o;
}

agent_order agent_order::by_keys(const std::vector<double>& keys) {
    agent_order o;
    o.ascending.resize(keys.size());
    std::iota(o.ascending.begin(), o.ascending.end(), std::size_t{0});
    std::stable_sort(o.ascending.begin(), o.ascending.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    o.rank.resize(keys.size());
    int r = 0;
    for (std::size_t k = 0; k < keys.size(); ++k) {
        if (k > 0 && keys[o.ascending[k]] != keys[o.ascending[k - 1]]) ++r;
        o.rank[k] = r;
    }
    return o;
}

std::size_t agent_order::position(std::size_t a) const {
    for (std::size_t k = 0; k < ascending.size(); ++k)
        if (ascending[k] == a) return k;
    fail(errc::input, "agent not in order");
}

matching::matching(std::size_t n_firms, std::size_t n_individuals, bool value)
    : n_firms_(n_firms), n_ind_(n_individuals), cells_(n_firms * n_individuals, value ? 1 : 0) {}

std::size_t matching::matched_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

std::vector<std::size_t> matching::firms_of(std::size_t individual) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n_firms_; ++j)
        if (at(j, individual)) out.push_back(j);
    return out;
}

std::vector<std::size_t> matching::individuals_of(std::size_t firm) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_ind_; ++i)
        if (at(firm, i)) out.push_back(i);
    return out;
}

matching matching::transposed() const {
    matching t(n_ind_, n_firms_);
    for (std::size_t j = 0; j < n_firms_; ++j)
        for (std::size_t i = 0; i < n_ind_; ++i) t.set(i, j, at(j, i));
    return t;
}

namespace {

// Rows of `rows_by_owner` are read through `get(owner, member)`; members follow `order`.
template <class Get>
threshold_repr upper_set_cutoffs(std::size_t owners, const agent_order& order, Get get) {
    threshold_repr r;
    r.representable = true;
    r.cutoffs.assign(owners, static_cast<int>(order.size()));
    const std::size_t n = order.size();
    for (std::size_t o = 0; o < owners; ++o) {
        // Lowest matched position; everything above must be matched.
        std::size_t first = n;
        for (std::size_t k = 0; k < n; ++k)
            if (get(o, order.ascending[k])) {
                first = k;
                break;
            }
        bool ok = true;
        for (std::size_t k = first; k < n; ++k)
            if (!get(o, order.ascending[k])) ok = false;
        if (ok && first > 0 && first < n && order.rank[first] == order.rank[first - 1]) ok = false;
        if (!ok) {
            r.representable = false;
            r.cutoffs.clear();
            return r;
        }
        r.cutoffs[o] = static_cast<int>(first);
    }
    return r;
}

}  // namespace

threshold_repr to_thresholds(const matching& mu, const agent_order& firm_order) {
    if (firm_order.size() != mu.n_firms()) fail(errc::input, "firm order does not match the matching");
    return upper_set_cutoffs(mu.n_individuals(), firm_order,
                             [&](std::size_t i, std::size_t j) { return mu.at(j, i); });
}

matching from_thresholds(const std::vector<int>& cutoffs, const agent_order& firm_order) {
    matching mu(firm_order.size(), cutoffs.size());
    for (std::size_t i = 0; i < cutoffs.size(); ++i)
        for (std::size_t k = static_cast<std::size_t>(std::max(0, cutoffs[i])); k < firm_order.size(); ++k)
            mu.set(firm_order.ascending[k], i, true);
    return mu;
}

threshold_repr to_firm_thresholds(const matching& mu, const agent_order& individual_order) {
    if (individual_order.size() != mu.n_individuals()) fail(errc::input, "individual order does not match the matching");
    return upper_set_cutoffs(mu.n_firms(), individual_order, [&](std::size_t j, std::size_t i) { return mu.at(j, i); });
}

bool cutoffs_nonincreasing(const std::vector<int>& cutoffs, const agent_order& owner_order) {
    for (std::size_t k = 1; k < owner_order.size(); ++k)
        if (cutoffs[owner_order.ascending[k]] > cutoffs[owner_order.ascending[k - 1]]) return false;
    return true;
}

std::string set_relation(const std::vector<std::size_t>& before, const std::vector<std::size_t>& after) {
    bool sub = std::includes(before.begin(), before.end(), after.begin(), after.end());
    bool sup = std::includes(after.begin(), after.end(), before.begin(), before.end());
    if (sub && sup) return "=";
    if (sub) return "subset";
    if (sup) return "superset";
    return "incomparable";
}

}  // namespace platmatch
