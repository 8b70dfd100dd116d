#pragma once

// Identity-verification suites.  Each suite turns one block of closed-form
// identities into VerificationCases (two evaluation routes, residual,
// tolerance, pass flag) under a seeded generator, and aggregates into a
// machine-readable report.

#include <cstdint>
#include <string>
#include <vector>

#include "qtrace/scalar.hpp"

namespace qtrace {

inline constexpr const char* artifact_version = "0.1.0";

struct VerificationCase {
    std::string name;
    std::string params;
    std::string route_lhs;
    std::string route_rhs;
    cplx lhs{};
    cplx rhs{};
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string error;  // non-empty when evaluation itself failed
};

struct VerificationReport {
    std::string suite;
    std::vector<VerificationCase> cases;
    int total = 0;
    int passed = 0;
    int failed = 0;
    double wall_ms = 0.0;
    std::string config_echo;
    bool all_pass() const { return failed == 0 && total > 0; }
};

struct SuiteOptions {
    std::uint64_t seed = 7;
    double tol_override = -1.0;  // > 0 replaces every case tolerance
    int grid_n = 3;              // side of the good-region grid in the trace suite
    PrecisionCfg cfg{};
};

std::vector<std::string> suite_names();
VerificationReport run_suite(const std::string& name, const SuiteOptions& opt);

// JSON serialization (canonical ordering: cases sorted by name).
std::string report_to_json(const VerificationReport& rep);

}  // namespace qtrace
