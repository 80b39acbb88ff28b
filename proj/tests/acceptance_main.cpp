// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <iostream>

#include "magjac/selfcheck.hpp"

int main() {
    auto results = magjac::run_acceptance(&std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    std::cout << (failed == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failed) + " criteria FAILED")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
