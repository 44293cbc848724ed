#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace signorini {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;                     // one-line summary of the measured values
    std::map<std::string, double> metrics;  // named measurements, for reports
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> only;  // criteria to run (empty: 1..10)
    std::function<void(const CriterionResult&)> on_result;
};

// Runs the numerical acceptance criteria 1-10 on the built-in problems at the
// documented tolerances. Criterion 11 (the property suites) lives in the test binary.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

std::string format_result(const CriterionResult& r);
std::string results_json(const std::vector<CriterionResult>& results);

}  // namespace signorini
