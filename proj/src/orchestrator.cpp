#include "planforge/orchestrator.hpp"

namespace planforge::orchestrator {

std::string_view to_string(Framework f) {
    switch (f) {
        case Framework::BoN: return "bon";
        case Framework::ToT: return "tot";
        case Framework::Rebase: return "rebase";
        case Framework::Mixture: return "mixture";
        case Framework::ZeroShotCoT: return "zero-shot-cot";
        case Framework::MultiAgentBaseline: return "ma-baseline";
    }
    return "mixture";
}

std::optional<Framework> framework_from_string(std::string_view name) {
    if (name == "bon") return Framework::BoN;
    if (name == "tot") return Framework::ToT;
    if (name == "rebase") return Framework::Rebase;
    if (name == "mixture") return Framework::Mixture;
    if (name == "zero-shot-cot" || name == "zero_shot_cot") return Framework::ZeroShotCoT;
    if (name == "ma-baseline" || name == "multi_agent_baseline") return Framework::MultiAgentBaseline;
    return std::nullopt;
}

namespace {

PlanCandidate generate_initial_plan(const PlanningProblem& problem,
                                    const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    const std::string prompt = prompts.get(prompts::TemplateNames::kInitialPlan)
                                   .render({{"task_description", problem.task_description},
                                            {"statement", problem.statement},
                                            {"context", ""}});
    const std::string text = gw.generate({prompt, 0.0, 8192, "initial_plan"});
    return PlanCandidate::monolithic(text, AlgorithmId::BestOfN);
}

search::SearchOutcome run_algorithm(AlgorithmId a, const PlanningProblem& problem,
                                    gateway::Gateway& gw, const search::VerifyFn& verify,
                                    const prompts::PromptLibrary& prompts,
                                    const search::SearchConfig& cfg, const std::string& context) {
    switch (a) {
        case AlgorithmId::BestOfN: return search::best_of_n(problem, gw, verify, prompts, cfg, context);
        case AlgorithmId::ToT: return search::tot_search(problem, gw, verify, prompts, cfg, context);
        case AlgorithmId::Rebase:
            return search::rebase_search(problem, gw, verify, prompts, cfg, context);
    }
    throw PreconditionError("unknown algorithm");
}

void record_selection(gateway::Gateway& gw, const SelectionDecision& decision,
                      const selector::BanditState& state) {
    json payload{{"decision", decision}, {"bandit_state", selector::bandit_state_to_json(state)}};
    gw.transcript().append(EventKind::Selection, payload.dump());
}

}  // namespace

SolveResult solve_mixture(const PlanningProblem& problem, gateway::Gateway& gw,
                          const prompts::PromptLibrary& prompts, const selector::UcbConfig& ucb_cfg,
                          const search::SearchConfig& search_cfg, const OrchestratorConfig& orch_cfg,
                          selector::BanditState* shared_bandit) {
    if (orch_cfg.framework != Framework::Mixture) {
        throw PreconditionError("solve_mixture: framework must be mixture");
    }

    SolveResult result;
    selector::BanditState local_bandit = selector::BanditState::fresh();
    selector::BanditState& bandit = shared_bandit ? *shared_bandit : local_bandit;

    try {
        result.final_plan = generate_initial_plan(problem, prompts, gw);
        const ConstraintSet constraints =
            agents::extract_constraints(problem, orch_cfg.constraint_types, prompts, gw);
        const search::VerifyFn verify = search::make_agent_verifier(constraints, prompts, gw);

        VerificationResult verdict = agents::verify_plan(problem, result.final_plan, constraints,
                                                         prompts, gw);
        result.final_reward = verdict.reward;
        if (verdict.reward >= orch_cfg.threshold) {
            return result;
        }

        std::string latest_feedback = verdict.feedback;
        for (int iter = 0; iter < orch_cfg.max_refinement_iterations; ++iter) {
            const agents::PriorScores priors =
                agents::llm_priors(problem, latest_feedback, result.final_plan.text, prompts, gw);
            const SelectionDecision decision = selector::select(bandit, priors.scores, ucb_cfg);
            record_selection(gw, decision, bandit);
            result.selections.push_back(decision);

            const search::SearchOutcome outcome = run_algorithm(
                decision.chosen, problem, gw, verify, prompts, search_cfg, latest_feedback);
            result.iterations_used = iter + 1;

            // The chosen algorithm's best plan gets one fresh verification;
            // that grade drives the bandit update and the next feedback,
            // while best-so-far tracking honors every verification seen.
            int update_reward = outcome.best_reward;
            if (!outcome.best_plan.text.empty()) {
                const VerificationResult re_check =
                    agents::verify_plan(problem, outcome.best_plan, constraints, prompts, gw);
                latest_feedback = re_check.feedback;
                update_reward = re_check.reward;
            }
            const int iteration_best = std::max(outcome.best_reward, update_reward);
            if (iteration_best > result.final_reward) {
                result.final_plan = outcome.best_plan;
                result.final_reward = iteration_best;
            }
            bandit = selector::update(std::move(bandit), decision.chosen, update_reward,
                                      orch_cfg.threshold);
            if (result.final_reward >= orch_cfg.threshold) break;
        }
    } catch (const BudgetExceededError& e) {
        gw.transcript().warn(std::string("call ceiling hit, returning best so far: ") + e.what());
    }

    gw.transcript().append(
        EventKind::Result,
        json{{"final_plan", result.final_plan},
             {"final_reward", result.final_reward},
             {"iterations_used", result.iterations_used}}
            .dump());
    return result;
}

SolveResult solve_single(const PlanningProblem& problem, Framework framework,
                         gateway::Gateway& gw, const prompts::PromptLibrary& prompts,
                         const search::SearchConfig& search_cfg,
                         const OrchestratorConfig& orch_cfg) {
    std::optional<AlgorithmId> algorithm;
    switch (framework) {
        case Framework::BoN: algorithm = AlgorithmId::BestOfN; break;
        case Framework::ToT: algorithm = AlgorithmId::ToT; break;
        case Framework::Rebase: algorithm = AlgorithmId::Rebase; break;
        default: throw PreconditionError("solve_single: framework must be bon, tot, or rebase");
    }

    SolveResult result;
    try {
        const ConstraintSet constraints =
            agents::extract_constraints(problem, orch_cfg.constraint_types, prompts, gw);
        const search::VerifyFn verify = search::make_agent_verifier(constraints, prompts, gw);
        const search::SearchOutcome outcome =
            run_algorithm(*algorithm, problem, gw, verify, prompts, search_cfg, "");
        result.final_plan = outcome.best_plan;
        result.final_reward = outcome.best_reward;
        result.iterations_used = outcome.explored_nodes;
    } catch (const BudgetExceededError& e) {
        gw.transcript().warn(std::string("call ceiling hit, returning best so far: ") + e.what());
    }

    gw.transcript().append(
        EventKind::Result,
        json{{"final_plan", result.final_plan},
             {"final_reward", result.final_reward},
             {"iterations_used", result.iterations_used}}
            .dump());
    return result;
}

std::string execute_plan(const PlanningProblem& problem, const PlanCandidate& plan,
                         const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    if (plan.text.empty()) throw PreconditionError("execute_plan: plan is empty");
    const std::string prompt = prompts.get(prompts::TemplateNames::kExecution)
                                   .render({{"problem", problem.statement}, {"plan", plan.text}});
    return gw.generate({prompt, 0.0, 8192, "execute"});
}

std::string zero_shot_cot(const PlanningProblem& problem, const prompts::PromptLibrary& prompts,
                          gateway::Gateway& gw) {
    if (problem.statement.empty()) {
        throw PreconditionError("zero_shot_cot: problem statement is empty");
    }
    const std::string prompt = prompts.get(prompts::TemplateNames::kZeroShot)
                                   .render({{"task_description", problem.task_description},
                                            {"statement", problem.statement}});
    return gw.generate({prompt, 0.0, 8192, "zero_shot"});
}

std::string multi_agent_baseline(const PlanningProblem& problem, int iterations,
                                 const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    if (iterations < 1) throw PreconditionError("multi_agent_baseline: iterations must be >= 1");
    std::string response = zero_shot_cot(problem, prompts, gw);
    for (int i = 1; i < iterations; ++i) {
        response = agents::self_reflect(response, prompts, gw);
    }
    return response;
}

}  // namespace planforge::orchestrator
