#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace platmatch {

/// Ascending ordering of agents. `rank[k]` belongs to `ascending[k]`; agents with equal rank are
/// tied and a threshold may not separate them.
struct agent_order {
    std::vector<std::size_t> ascending;
    std::vector<int> rank;

    std::size_t size() const { return ascending.size(); }
    static agent_order identity(std::size_t n);
    /// Order by keys ascending (stable); equal keys are ties.
    static agent_order by_keys(const std::vector<double>& keys);
    /// Position of agent `a` in the order.
    std::size_t position(std::size_t a) const;
};

/// Reciprocal firm x individual incidence. Stored once, read by row (an individual's firms) or
/// by column (a firm's individuals).
class matching {
public:
    matching() = default;
    matching(std::size_t n_firms, std::size_t n_individuals, bool value = false);

    static matching full(std::size_t n_firms, std::size_t n_individuals) { return matching(n_firms, n_individuals, true); }

    bool at(std::size_t firm, std::size_t individual) const { return cells_[firm * n_ind_ + individual] != 0; }
    void set(std::size_t firm, std::size_t individual, bool on) { cells_[firm * n_ind_ + individual] = on ? 1 : 0; }
    void flip(std::size_t firm, std::size_t individual) { cells_[firm * n_ind_ + individual] ^= 1; }

    std::size_t n_firms() const { return n_firms_; }
    std::size_t n_individuals() const { return n_ind_; }
    std::size_t matched_count() const;

    /// Firms matched with individual i (ascending index).
    std::vector<std::size_t> firms_of(std::size_t individual) const;
    /// Individuals matched with firm j (ascending index).
    std::vector<std::size_t> individuals_of(std::size_t firm) const;

    /// Individual-major copy; transposing twice gives the original.
    matching transposed() const;

    bool operator==(const matching& other) const = default;
    /// Lexicographic on the firm-major cell vector.
    bool operator<(const matching& other) const { return cells_ < other.cells_; }

    const std::vector<unsigned char>& cells() const { return cells_; }

private:
    std::size_t n_firms_ = 0;
    std::size_t n_ind_ = 0;
    std::vector<unsigned char> cells_;
};

/// Per-individual cutoff into an ascending firm order: cutoff c matches the individual with the
/// firms at positions [c, N). 0 means every firm, N means none.
struct threshold_repr {
    bool representable = false;
    std::vector<int> cutoffs;
};

/// Cutoffs when every row is an upper set of the order that does not split tied firms.
threshold_repr to_thresholds(const matching& mu, const agent_order& firm_order);
matching from_thresholds(const std::vector<int>& cutoffs, const agent_order& firm_order);

/// The firm-side analogue: per firm, cutoff into an ascending individual order.
threshold_repr to_firm_thresholds(const matching& mu, const agent_order& individual_order);

/// Cutoffs weakly decreasing along the ascending order of the agents that own them.
bool cutoffs_nonincreasing(const std::vector<int>& cutoffs, const agent_order& owner_order);

/// Relation of `after` to `before` (ascending index sets): "=", "subset" (after is a proper
/// subset), "superset" or "incomparable".
std::string set_relation(const std::vector<std::size_t>& before, const std::vector<std::size_t>& after);

}  // namespace platmatch
