#pragma once

#include <map>
#include <string>
#include <vector>

#include "planforge/core.hpp"

namespace planforge::metrics {

/// Whitespace-only normalization: trim plus collapse of internal whitespace
/// runs. Case is preserved because plan-style answers are format-sensitive.
std::string normalize_whitespace(const std::string& s);

/// Looser normalization for short answers: case-fold, collapse whitespace,
/// join "9.9 %" style percent spacing, strip surrounding punctuation.
std::string normalize_answer(const std::string& s);

/// Text after the last "Answer:" marker (case-insensitive), else the last
/// non-empty line.
std::string extract_final_answer(const std::string& text);

/// 1 iff the whitespace-normalized strings are equal.
int exact_match(const std::string& prediction, const std::string& gold);

/// 1 iff the extracted, answer-normalized prediction equals the normalized gold.
int answer_accuracy(const std::string& prediction, const std::string& gold);

/// Token-bag F1 between the extracted prediction answer and the gold answer,
/// both under answer normalization. 0 when either side has no tokens.
double token_f1(const std::string& prediction, const std::string& gold);

/// Half-open interval bucketing [e_i, e_{i+1}) over complexity_attrs[attr];
/// the final bucket is unbounded above, values below the first edge go to a
/// "<e0" bucket, records missing the attribute go to "unknown".
std::map<std::string, std::vector<std::string>> bucket_by_complexity(
    const std::vector<PlanningProblem>& records, const std::string& attr,
    const std::vector<double>& edges);

std::string bucket_label_for(double value, const std::vector<double>& edges);

}  // namespace planforge::metrics
