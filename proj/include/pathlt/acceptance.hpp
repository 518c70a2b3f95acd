#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathlt {

using json = nlohmann::json;

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    json measured;
};

struct AcceptanceOptions {
    std::string baseline;          // regression file; created when missing
    bool update_baseline = false;  // overwrite stored values with this run
    std::vector<int> only;         // empty = all criteria
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    bool all_pass() const;
    json to_json() const;
};

// Runs the criteria in order and prints one PASS/FAIL line per criterion to log.
AcceptanceReport run_acceptance(const AcceptanceOptions& opt, std::ostream& log);

}  // namespace pathlt
