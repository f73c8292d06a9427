#pragma once

#include <string>
#include <vector>

#include "planforge/core.hpp"

namespace planforge::dataset {

/// One JSONL row: the parsed problem plus the verbatim line so unknown fields
/// survive a round-trip untouched.
struct DatasetRecord {
    PlanningProblem problem;
    std::string raw_line;
};

std::vector<DatasetRecord> load_jsonl(const std::string& path);
std::vector<DatasetRecord> parse_jsonl(const std::string& content);

/// Reads a single-problem JSON file (used by verify-plan).
PlanningProblem load_problem_file(const std::string& path);

}  // namespace planforge::dataset
