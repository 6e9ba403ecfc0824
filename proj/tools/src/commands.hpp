#pragma once

#include "report_io.hpp"
#include "scenario.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace platmatch::cli {

enum exit_code : int {
    exit_ok = 0,
    exit_precondition = 2,
    exit_validation = 3,
    exit_assertion = 4,
    exit_identity = 5,
};

struct run_options {
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    std::optional<double> tolerance;
    std::string suite = "all";  // properties only
    std::size_t trials = 100;   // properties only
};

struct run_result {
    int code = exit_ok;
    nlohmann::ordered_json report;
    std::vector<std::pair<std::string, csv_table>> tables;  // file name, contents
};

const std::vector<std::string>& subcommands();

/// Runs a subcommand on a loaded scenario (absent for `properties`). Library errors become an
/// error report with the matching exit code; nothing is written to disk here.
run_result run(const std::string& subcommand, const std::optional<scenario>& sc, const std::string& input_text,
               const run_options& options);

/// Report for a scenario that failed to load.
run_result load_failure(const std::string& subcommand, const load_error& e, const std::string& input_text);

/// Serialized report.json: two-space indentation and a trailing newline.
std::string render_report(const run_result& r);

std::string tool_version();

}  // namespace platmatch::cli
