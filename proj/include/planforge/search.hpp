#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "planforge/agents.hpp"
#include "planforge/core.hpp"
#include "planforge/gateway.hpp"
#include "planforge/prompts.hpp"

namespace planforge::search {

struct SearchConfig {
    int bon_n = 5;
    double bon_temperature = 0.7;
    int tot_children = 3;
    int tot_iteration_budget = 20;
    double tot_temperature = 0.7;
    int rebase_width = 10;
    double rebase_temperature = 0.7;
    int max_depth = 20;
};

struct SearchNode {
    std::string id;
    std::optional<std::string> parent;
    int depth = 0;
    std::string text;
    std::optional<int> reward;
    std::optional<bool> complete;
};

struct SearchOutcome {
    PlanCandidate best_plan;
    int best_reward = -100;
    int llm_calls = 0;
    int explored_nodes = 0;
};

/// Verification hook the searches score candidates with. The default one
/// goes through the verification agent so every score is a logged
/// verification call.
using VerifyFn =
    std::function<VerificationResult(const PlanningProblem&, const PlanCandidate&)>;

VerifyFn make_agent_verifier(const ConstraintSet& constraints,
                             const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

/// Samples bon_n complete plans, verifies each, returns the max-reward one
/// (first on ties). An unparseable verification marks that candidate -100
/// instead of aborting the batch.
SearchOutcome best_of_n(const PlanningProblem& problem, gateway::Gateway& gw,
                        const VerifyFn& verify, const prompts::PromptLibrary& prompts,
                        const SearchConfig& cfg, const std::string& context = "");

/// Greedy stepwise tree search. Every explored path (one generated child
/// node) costs exactly three logical calls: step generation, step reward,
/// and completion check. Descends into the best child until it reports
/// complete, the path budget is spent, or max_depth is hit.
SearchOutcome tot_search(const PlanningProblem& problem, gateway::Gateway& gw,
                         const VerifyFn& verify, const prompts::PromptLibrary& prompts,
                         const SearchConfig& cfg, const std::string& context = "");

/// Reward-balanced search: per depth, frontier nodes are ranked by reward and
/// the current width budget is split across them proportionally (top rank
/// gets at least one child); the budget starts at rebase_width and drops by
/// one after every expansion round. Terminates on the first complete node.
SearchOutcome rebase_search(const PlanningProblem& problem, gateway::Gateway& gw,
                            const VerifyFn& verify, const prompts::PromptLibrary& prompts,
                            const SearchConfig& cfg, const std::string& context = "");

/// Rank-proportional child allocation for one REBASE round, exposed for
/// direct testing. Rewards are shifted to [0,200] so negative scores cannot
/// invert the split; allocations are non-increasing in rank, the top rank is
/// floored at one child, and overshoot from rounding is trimmed bottom-up.
std::vector<int> rebase_allocation(const std::vector<int>& rewards_ranked_desc, int width);

}  // namespace planforge::search
