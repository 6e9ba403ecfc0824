#include "report_io.hpp"

#include "platmatch/errors.hpp"

#include <algorithm>
#include <cstdio>

namespace platmatch::cli {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

namespace {

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void append_record(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) out += ',';
        out += quote(fields[k]);
    }
    out += "\r\n";
}

}  // namespace

std::string to_csv(const csv_table& t) {
    std::string out;
    append_record(out, t.header);
    for (const auto& r : t.rows) append_record(out, r);
    return out;
}

csv_table parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, any = false;
    std::size_t i = 0;
    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        any = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
            } else {
                field += c;
            }
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field.empty()) fail(errc::input, "csv: quote inside an unquoted field");
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            field += c;
            any = true;
        }
        ++i;
    }
    if (quoted) fail(errc::input, "csv: unterminated quoted field");
    if (any || !field.empty() || !record.empty()) end_record();
    if (records.empty()) fail(errc::input, "csv: missing header");
    csv_table t;
    t.header = std::move(records.front());
    for (std::size_t k = 1; k < records.size(); ++k) {
        if (records[k].size() != t.header.size())
            fail(errc::input, "csv: record " + std::to_string(k) + " has " + std::to_string(records[k].size()) +
                                  " fields, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(records[k]));
    }
    return t;
}

csv_table matching_table(const matching& mu, const std::vector<int>& firm_ids, const std::vector<int>& individual_ids) {
    csv_table t{{"firm_id", "individual_id", "matched"}, {}};
    for (std::size_t j = 0; j < mu.n_firms(); ++j)
        for (std::size_t i = 0; i < mu.n_individuals(); ++i)
            t.rows.push_back({std::to_string(firm_ids[j]), std::to_string(individual_ids[i]), mu.at(j, i) ? "1" : "0"});
    return t;
}

matching read_matching(const csv_table& t, const std::vector<int>& firm_ids, const std::vector<int>& individual_ids) {
    if (t.header != std::vector<std::string>{"firm_id", "individual_id", "matched"})
        fail(errc::input, "matching csv: unexpected header");
    auto index_of = [](const std::vector<int>& ids, const std::string& s, const char* what) {
        const int id = std::stoi(s);
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) fail(errc::input, std::string("matching csv: unknown ") + what + " id " + s);
        return static_cast<std::size_t>(it - ids.begin());
    };
    matching mu(firm_ids.size(), individual_ids.size());
    for (const auto& r : t.rows) {
        if (r[2] != "0" && r[2] != "1") fail(errc::input, "matching csv: matched must be 0 or 1");
        mu.set(index_of(firm_ids, r[0], "firm"), index_of(individual_ids, r[1], "individual"), r[2] == "1");
    }
    return mu;
}

}  // namespace platmatch::cli
