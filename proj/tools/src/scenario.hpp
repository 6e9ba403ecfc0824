#pragma once

#include "platmatch/compstat.hpp"
#include "platmatch/monopcomp.hpp"
#include "platmatch/mvpd.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace platmatch::cli {

inline constexpr const char* schema_version = "1";

enum class scenario_kind { generic, mvpd, monopcomp };
std::string to_string(scenario_kind k);

struct solver_options {
    std::string method = "threshold";  // brute_force, threshold, pointwise_affine, horizontal
    std::size_t max_cells = 20;
    int restarts = 5;
    std::uint64_t seed = 0;
};

struct scenario {
    std::string version;
    scenario_kind kind = scenario_kind::generic;
    market_spec market;
    std::optional<distribution> individual_types;  // envelope welfare in compstat
    mvpd_spec mvpd;
    amazon_spec monopcomp;
    solver_options solver;
    std::optional<shift_spec> shift;
    std::optional<merger> merger_change;
    std::optional<amazon_change> partition_change;
};

/// Why a scenario was rejected. Every problem found is listed, not just the first.
class load_error : public std::runtime_error {
public:
    enum class category { io, parse, schema, invariant };

    load_error(category c, std::vector<std::string> messages);

    category which() const noexcept { return category_; }
    const std::vector<std::string>& messages() const noexcept { return messages_; }

private:
    category category_;
    std::vector<std::string> messages_;
};

std::string to_string(load_error::category c);

/// Parses and validates scenario text. Schema problems are reported with their JSON path.
scenario parse_scenario(const std::string& text);
/// Reads the file and parses it; `text` receives the raw bytes for hashing.
scenario load_scenario(const std::string& path, std::string* text = nullptr);

}  // namespace platmatch::cli
