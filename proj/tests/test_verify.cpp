#include "doctest.h"
#include "pdtsp/verify.hpp"

using namespace pdtsp;

TEST_CASE("quick verification passes on a correct build") {
    VerifyOptions options;
    VerifyReport report = run_verification(options);
    CHECK(report.ok());

    bool found_counting = false;
    for (const auto& p : report.props) {
        CHECK(p.cases > 0);
        if (p.id.rfind("3.1", 0) == 0) {
            found_counting = true;
            CHECK(p.note.find("n=2: 6") != std::string::npos);
            CHECK(p.note.find("n=3: 90") != std::string::npos);
        }
    }
    CHECK(found_counting);

    std::string text = format_report(report);
    CHECK(text.find("verification passed") != std::string::npos);
    CHECK(text.find("[ ok ]") != std::string::npos);
}

TEST_CASE("negative control: a flipped inter-block precondition is detected") {
    VerifyOptions options;
    options.inject_n2_fault = true;
    VerifyReport report = run_verification(options);
    CHECK_FALSE(report.ok());

    bool n2_failed = false;
    for (const auto& p : report.props) {
        if (p.id.rfind("4.3", 0) == 0) n2_failed = p.failures > 0;
    }
    CHECK(n2_failed);
    CHECK(format_report(report).find("[FAIL]") != std::string::npos);
}
