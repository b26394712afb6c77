#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "lab/acceptance.hpp"

using namespace lab;

TEST_CASE("acceptance battery") {
    double total = 0.0;
    for (const auto& r : run_acceptance()) {
        std::printf("criterion %2d %-38s %s  (%.1fs)%s%s\n", r.id,
                    r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        std::fflush(stdout);
        CHECK_MESSAGE(r.pass, r.name << ": " << r.detail);
        total += r.seconds;
    }
    std::printf("total %.1fs\n", total);
    CHECK(total < 900.0);
}

TEST_CASE("criterion id validation") {
    CHECK_THROWS_AS(run_criterion(0), std::invalid_argument);
    CHECK_THROWS_AS(run_criterion(12), std::invalid_argument);
}
