#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planforge/agents.hpp"
#include "planforge/core.hpp"
#include "planforge/gateway.hpp"
#include "planforge/prompts.hpp"
#include "planforge/search.hpp"
#include "planforge/selector.hpp"

namespace planforge::orchestrator {

enum class Framework { BoN, ToT, Rebase, Mixture, ZeroShotCoT, MultiAgentBaseline };

std::string_view to_string(Framework f);
std::optional<Framework> framework_from_string(std::string_view name);

struct OrchestratorConfig {
    int threshold = 95;
    int max_refinement_iterations = 5;
    Framework framework = Framework::Mixture;
    int baseline_iterations = 3;
    bool persist_bandit_across_problems = false;
    std::optional<std::string> constraint_types;  // optional insert for the constraint prompt
};

struct SolveResult {
    PlanCandidate final_plan;
    int final_reward = -100;
    std::optional<std::string> answer;
    int iterations_used = 0;
    std::vector<SelectionDecision> selections;
};

/// The full refinement loop: initial plan, constraints, verification against
/// the threshold, then selection-driven search iterations keeping the best
/// plan seen. Exits as soon as any iteration's verification clears the
/// threshold. When an external bandit state is supplied it is read and
/// updated in place (cross-problem persistence); otherwise each solve starts
/// fresh.
SolveResult solve_mixture(const PlanningProblem& problem, gateway::Gateway& gw,
                          const prompts::PromptLibrary& prompts, const selector::UcbConfig& ucb_cfg,
                          const search::SearchConfig& search_cfg, const OrchestratorConfig& orch_cfg,
                          selector::BanditState* shared_bandit = nullptr);

/// Constraint extraction plus exactly one run of the named algorithm.
SolveResult solve_single(const PlanningProblem& problem, Framework framework,
                         gateway::Gateway& gw, const prompts::PromptLibrary& prompts,
                         const search::SearchConfig& search_cfg,
                         const OrchestratorConfig& orch_cfg);

/// Second-stage execution: carries out the final plan and returns the model's
/// answer text (one LLM call, not re-verified).
std::string execute_plan(const PlanningProblem& problem, const PlanCandidate& plan,
                         const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

/// Single chain-of-thought call.
std::string zero_shot_cot(const PlanningProblem& problem, const prompts::PromptLibrary& prompts,
                          gateway::Gateway& gw);

/// Zero-shot answer followed by iterations-1 self-reflection rounds; returns
/// the last response. Total calls equal iterations.
std::string multi_agent_baseline(const PlanningProblem& problem, int iterations,
                                 const prompts::PromptLibrary& prompts, gateway::Gateway& gw);

}  // namespace planforge::orchestrator
