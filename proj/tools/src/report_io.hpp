#pragma once

#include "platmatch/matching.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace platmatch::cli {

/// 17 significant digits, enough to round-trip a double.
std::string format_double(double x);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t x);

struct csv_table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or line break.
std::string to_csv(const csv_table& t);
/// Inverse of to_csv; the first record is the header. Throws an input error on malformed text.
csv_table parse_csv(const std::string& text);

/// Rows (firm_id, individual_id, matched) for every pair, firms in order, then individuals.
csv_table matching_table(const matching& mu, const std::vector<int>& firm_ids, const std::vector<int>& individual_ids);
/// Rebuilds the incidence matrix from matching_table output.
matching read_matching(const csv_table& t, const std::vector<int>& firm_ids, const std::vector<int>& individual_ids);

}  // namespace platmatch::cli
