#pragma once

// The acceptance suites behind `kfiou selftest`: closed-form spot values,
// bound/property fuzzing, oracle agreement, gradient verification, trend
// reproduction and determinism. Each suite reports check/failure counts and
// keeps the first few failing cases in printable form.

#include <string>
#include <vector>

namespace rbox {

struct SuiteResult {
    std::string name;
    long checks = 0;
    long failures = 0;
    std::vector<std::string> failure_messages;  // truncated
    std::vector<std::string> notes;             // informational, e.g. computed EVar values
    double seconds = 0.0;

    bool passed() const { return failures == 0; }
};

std::vector<std::string> selftest_suite_names();

/// Run one suite by name (throws std::invalid_argument for unknown names).
SuiteResult run_selftest_suite(const std::string& name);

/// Run every suite in order.
std::vector<SuiteResult> run_selftest();

}  // namespace rbox
