#include "platmatch/errors.hpp"
#include "platmatch/properties.hpp"

#include <doctest.h>

#include <set>

using namespace platmatch;

TEST_CASE("suite catalogue") {
    std::set<std::string> names;
    for (const auto& s : property_suites()) {
        CHECK_FALSE(s.description.empty());
        CHECK(names.insert(s.name).second);
    }
    for (const char* n : {"oracle", "threshold", "monotonicity", "mechanism", "mvpd", "ces", "amazon", "partition"})
        CHECK(names.count(n) == 1);
    try {
        run_suite("no_such_suite", {});
        FAIL("expected an input error");
    } catch (const error& e) {
        CHECK(e.kind() == errc::input);
    }
}

TEST_CASE("suite reports are complete and ordered") {
    property_options o;
    o.seed = 3;
    o.trials = 10;
    auto r = run_suite("tail", o);
    CHECK(r.suite == "tail");
    CHECK(r.requested == 10);
    CHECK(r.judged() == 10);
    CHECK(r.passed + r.failed + r.skipped == r.records.size());
    for (std::size_t k = 1; k < r.records.size(); ++k) CHECK(r.records[k - 1].index < r.records[k].index);
    REQUIRE(r.tolerance.has_value());
    CHECK(*r.tolerance == 1e-10);
    CHECK(r.ok());

    o.tolerance = 1e-6;
    CHECK(*run_suite("tail", o).tolerance == 1e-6);
}

TEST_CASE("job count does not change the records") {
    for (const char* name : {"oracle", "ces", "partition"}) {
        property_options one;
        one.seed = 5;
        one.trials = 16;
        property_options many = one;
        many.jobs = 4;
        auto a = run_suite(name, one), b = run_suite(name, many);
        REQUIRE(a.records.size() == b.records.size());
        CHECK(a.passed == b.passed);
        CHECK(a.failed == b.failed);
        CHECK(a.skipped == b.skipped);
        for (std::size_t k = 0; k < a.records.size(); ++k) {
            CHECK(a.records[k].seed == b.records[k].seed);
            CHECK(a.records[k].status == b.records[k].status);
            CHECK(a.records[k].detail == b.records[k].detail);
        }
    }
}

TEST_CASE("different seeds draw different trials") {
    property_options a, b;
    a.trials = b.trials = 4;
    b.seed = a.seed + 1;
    CHECK(run_suite("ces", a).records[0].seed != run_suite("ces", b).records[0].seed);
}
