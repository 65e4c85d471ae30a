#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace triflex {

/// Deliberate breakages for exercising the selftest machinery itself.
enum class FaultInjection { None, FlipA3Sign };

struct CheckResult {
    std::string name;
    bool pass{false};
    std::string detail;
};

/// Runs every module's invariant/property checks, streaming one pass/fail
/// line per property to `out`. Returns the individual results.
std::vector<CheckResult> run_selftest(std::ostream& out,
                                      FaultInjection fault = FaultInjection::None);

}  // namespace triflex
