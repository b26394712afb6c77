#pragma once

#include <string>
#include <vector>

// The release gate: every criterion the suite must satisfy, runnable one at
// a time or as a battery.  Each criterion reports a single pass flag plus a
// human-readable detail line with the measured quantities.

namespace lab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// ids run 1..11; throws std::invalid_argument outside that range.
CriterionResult run_criterion(int id);

// Runs all criteria in order.  Exceptions inside a criterion are caught and
// reported as failures.
std::vector<CriterionResult> run_acceptance();

// ids considered cheap enough for a smoke run (about 30 seconds total).
std::vector<int> quick_criteria();

}  // namespace lab
