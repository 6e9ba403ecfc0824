#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace platmatch {

/// Seeded property suites with brute-force or closed-form oracles.
///
/// A suite draws candidate trials with seeds trial_seed(seed, index) for index = 0, 1, ... and
/// keeps going until `trials` candidates meet the suite's premises (or the candidate cap is
/// reached). Trials run on up to `jobs` threads; records are kept in index order, so the report
/// does not depend on the job count.
struct property_options {
    std::uint64_t seed = 7;
    std::size_t trials = 100;
    std::size_t jobs = 1;
    std::optional<double> tolerance;  // replaces the suite's default tolerance
};

enum class trial_status { pass, fail, skip };
std::string to_string(trial_status s);

struct trial_record {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    trial_status status = trial_status::skip;
    std::string detail;
};

struct suite_report {
    std::string suite;
    std::string description;
    std::uint64_t seed = 0;
    std::size_t requested = 0;
    std::optional<double> tolerance;  // absent when the suite judges verdicts only
    std::size_t passed = 0, failed = 0, skipped = 0;
    std::vector<trial_record> records;

    std::size_t judged() const { return passed + failed; }
    /// Every requested trial was judged and none failed.
    bool ok() const { return failed == 0 && judged() == requested; }
};

struct suite_info {
    std::string name;
    std::string description;
    std::optional<double> tolerance;
};

const std::vector<suite_info>& property_suites();

/// Throws an input error for an unknown suite name.
suite_report run_suite(const std::string& name, const property_options& options);

}  // namespace platmatch
