#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planforge/core.hpp"
#include "planforge/gateway.hpp"
#include "planforge/prompts.hpp"

namespace planforge::agents {

/// Per-algorithm suitability scores in [0,1] from the selection prompt, with
/// the model's reasoning kept verbatim.
struct PriorScores {
    std::map<AlgorithmId, double> scores;
    std::string reasoning;
};

// --- reply parsers (pure; exposed for tests and the Python bindings) --------

/// Splits a constraint-agent reply into items: lines starting with a list
/// marker (-, *, or digits followed by . or )) win; if none are present every
/// non-empty line is an item (separator-only lines are skipped).
std::vector<std::string> parse_constraint_items(const std::string& raw);

/// Parses feedback plus the integer after the LAST "Score:" marker, clamped
/// to [-100,100]. The last occurrence is used because feedback often quotes
/// the rubric earlier in the reply.
std::optional<VerificationResult> try_parse_verification(const std::string& reply);

/// Parses the ("name", float) pairs of the selection reply. Later pairs for
/// the same algorithm win; scores are clamped to [0,1]. Empty optional when
/// no recognizable pair exists.
std::optional<std::map<AlgorithmId, double>> try_parse_prior_scores(const std::string& reply);

/// "1" -> true, "0" -> false after trimming; anything else is unparseable.
std::optional<bool> try_parse_completion(const std::string& reply);

// --- agent operations --------------------------------------------------------
// Each issues at most two gateway calls: the original plus one amended
// re-prompt on a parse failure, then a hard error.

ConstraintSet extract_constraints(const PlanningProblem& problem,
                                  const std::optional<std::string>& constraint_types,
                                  const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

VerificationResult verify_plan(const PlanningProblem& problem, const PlanCandidate& plan,
                               const ConstraintSet& constraints,
                               const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

PriorScores llm_priors(const PlanningProblem& problem, const std::optional<std::string>& feedback,
                       const std::optional<std::string>& context,
                       const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

std::string self_reflect(const std::string& previous_response,
                         const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

/// Binary completion check used by the tree searches.
bool completion_check(const PlanningProblem& problem, const std::string& intermediate_steps,
                      const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

/// "- item" lines used by the verification prompt's constraint slot.
std::string format_constraint_list(const ConstraintSet& constraints);

}  // namespace planforge::agents
