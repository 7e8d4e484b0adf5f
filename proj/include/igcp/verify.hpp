#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace igcp::verify {

// One cross-check: pass means value <= threshold (op "le") or
// value >= threshold (op "ge").
struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string op = "le";
    bool pass = false;
    std::string status = "ok";  // or "budget_exceeded"
};

std::vector<std::string> suite_names();

// Runs a named suite with a fixed master seed; "all" runs every suite.
// Throws std::invalid_argument for unknown names.
std::vector<CheckResult> run_suite(const std::string& name, uint64_t seed);

// deterministic JSON rendering (17 significant digits, fixed key order)
std::string report_json(const std::string& suite, uint64_t seed,
                        const std::vector<CheckResult>& checks);

}  // namespace igcp::verify
