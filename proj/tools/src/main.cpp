#include "commands.hpp"
#include "platmatch/properties.hpp"
#include "scenario.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace platmatch::cli;

namespace {

struct flags {
    std::string out = ".";
    std::string format = "both";
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::size_t jobs = 1;
    std::string suite = "all";
    std::size_t trials = 100;
};

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    return true;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int emit(const run_result& r, const flags& f) {
    fs::create_directories(f.out);
    if (f.format != "csv") write_file(fs::path(f.out) / "report.json", render_report(r));
    if (f.format != "json")
        for (const auto& [name, table] : r.tables) write_file(fs::path(f.out) / name, to_csv(table));
    if (r.report.contains("error")) std::cerr << r.report["error"].dump() << "\n";
    std::cout << r.report["status"].get<std::string>() << " (exit " << r.code << ")\n";
    return r.code;
}

int execute(const std::string& sub, const flags& f) {
    run_options o;
    o.seed = f.seed;
    o.tolerance = f.tolerance;
    o.jobs = f.jobs;
    o.suite = f.suite;
    o.trials = f.trials;

    std::optional<scenario> sc;
    std::string text;
    if (!f.scenario_path.empty()) {
        if (!read_file(f.scenario_path, text))
            return emit(load_failure(sub, load_error(load_error::category::io, {"cannot open scenario file '" + f.scenario_path + "'"}), text), f);
        try {
            sc = parse_scenario(text);
        } catch (const load_error& e) {
            return emit(load_failure(sub, e, text), f);
        }
    }
    return emit(run(sub, sc, text, o), f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matching-platform solver, comparative statics and property suites"};
    app.require_subcommand(1);
    flags f;
    app.add_option("--out", f.out, "Output directory for report.json and CSV files")->capture_default_str();
    app.add_option("--seed", f.seed, "Seed for randomized restarts and property suites");
    app.add_option("--jobs", f.jobs, "Worker threads for property suites")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tolerance", f.tolerance, "Override the documented tolerance of the subcommand");
    app.add_option("--format", f.format, "Which outputs to write")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();

    const std::map<std::string, std::string> help = {
        {"solve", "Solve a scenario and write the matching"},
        {"oracle", "Compare the threshold solver with unrestricted brute force"},
        {"check", "Check supermodular orders, threshold structure and first-order conditions"},
        {"compstat", "Apply the scenario's payoff shift and compare the optimal matchings"},
        {"mvpd", "Solve a distributor scenario and run its merger experiment"},
        {"monopcomp", "Solve a retail-platform scenario and run its partition experiment"},
        {"properties", "Run seeded property suites"},
    };
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, help.at(name));
        auto* opt = sub->add_option("scenario", f.scenario_path, "Scenario JSON file");
        if (name != "properties") opt->required();
        if (name == "properties") {
            std::string suites = "all";
            for (const auto& s : platmatch::property_suites()) suites += ", " + s.name;
            sub->add_option("--suite", f.suite, "Suite to run: " + suites)->capture_default_str();
            sub->add_option("--trials", f.trials, "Judged trials per suite")->check(CLI::PositiveNumber)->capture_default_str();
        }
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (f.suite != "all") {
        bool known = false;
        for (const auto& s : platmatch::property_suites()) known = known || s.name == f.suite;
        if (!known) {
            std::cerr << "unknown suite '" << f.suite << "'\n";
            return exit_validation;
        }
    }
    try {
        return execute(app.get_subcommands().front()->get_name(), f);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return exit_identity;
    }
}
