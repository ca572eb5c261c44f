#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdtsp {

struct VerifyOptions {
    bool full = false;  // quick: exhaustive n <= 3; full adds the fuzz suites
    std::uint64_t seed = 1;
    // Test hook: deliberately mis-enumerates the inter-block exchange so the
    // suite must detect precedence violations (negative control).
    bool inject_n2_fault = false;
};

struct PropResult {
    std::string id;
    long cases = 0;
    long failures = 0;
    std::string note;
};

struct VerifyReport {
    std::vector<PropResult> props;

    bool ok() const {
        for (const auto& p : props)
            if (p.failures != 0) return false;
        return true;
    }
};

// Runs the structural property suites (counting, block algebra, operator
// feasibility, initial-tour construction, insertion decomposition).
VerifyReport run_verification(const VerifyOptions& options);

std::string format_report(const VerifyReport& report);

}  // namespace pdtsp
