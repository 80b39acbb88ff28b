#ifndef MAGJAC_SELFCHECK_HPP
#define MAGJAC_SELFCHECK_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace magjac {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Run the full acceptance suite (ten criteria). When `progress` is non-null,
/// one "PASS/FAIL <id> <name>" line is printed per criterion as it finishes.
std::vector<CheckResult> run_acceptance(std::ostream* progress = nullptr);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace magjac

#endif
