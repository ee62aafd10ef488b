#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ppp::verify {

struct Options {
    bool quick = false;            // smaller Monte Carlo budgets, same tolerances
    std::uint64_t seed = 20240611;
};

struct CriterionResult {
    int id = 0;
    bool pass = false;
    std::string line;       // "criterion N: PASS|FAIL name: details", no timings
    double seconds = 0;
    double budget = 0;      // seconds
};

constexpr int kCriteria = 12;

// Criterion 12 needs whole-suite output to compare; in-process it re-runs 1..11
// and compares the lines.
CriterionResult run_criterion(int id, const Options& opt);

// Runs 1..12, writes one line each to `out` and timings to `diag` (may be null).
// Returns true when every criterion passed.
bool run_all(const Options& opt, std::ostream& out, std::ostream* diag);

}  // namespace ppp::verify
