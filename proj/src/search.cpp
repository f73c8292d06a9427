#include "planforge/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace planforge::search {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string problem_with_context(const PlanningProblem& problem, const std::string& context) {
    if (context.empty()) return problem.statement;
    return problem.statement + "\n\nFeedback on the previous attempt:\n" + context;
}

json node_to_json(const SearchNode& n) {
    json j{{"id", n.id}, {"depth", n.depth}, {"text", n.text}};
    if (n.parent) j["parent"] = *n.parent;
    if (n.reward) j["reward"] = *n.reward;
    if (n.complete) j["complete"] = *n.complete;
    return j;
}

void emit_tree(gateway::Gateway& gw, std::string_view algorithm,
               const std::vector<SearchNode>& nodes, const std::vector<int>& round_budgets,
               int explored) {
    json nodes_json = json::array();
    for (const auto& n : nodes) nodes_json.push_back(node_to_json(n));
    json payload{{"search", std::string(algorithm)},
                 {"nodes", nodes_json},
                 {"explored", explored}};
    if (!round_budgets.empty()) payload["round_budgets"] = round_budgets;
    gw.transcript().append(EventKind::Result, payload.dump());
}

int verify_or_floor(const VerifyFn& verify, const PlanningProblem& problem,
                    const PlanCandidate& cand, gateway::Gateway& gw) {
    try {
        return verify(problem, cand).reward;
    } catch (const UnparseableScoreError& e) {
        gw.transcript().warn(std::string("verification unreadable, scoring -100: ") + e.what());
        return -100;
    }
}

}  // namespace

VerifyFn make_agent_verifier(const ConstraintSet& constraints,
                             const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    return [&constraints, &prompts, &gw](const PlanningProblem& problem,
                                         const PlanCandidate& plan) {
        return agents::verify_plan(problem, plan, constraints, prompts, gw);
    };
}

SearchOutcome best_of_n(const PlanningProblem& problem, gateway::Gateway& gw,
                        const VerifyFn& verify, const prompts::PromptLibrary& prompts,
                        const SearchConfig& cfg, const std::string& context) {
    if (cfg.bon_n < 1) throw PreconditionError("best_of_n: bon_n must be >= 1");

    std::string context_section;
    if (!context.empty()) {
        context_section = "Feedback on the previous attempt:\n" + context + "\n\n";
    }
    const std::string prompt = prompts.get(prompts::TemplateNames::kInitialPlan)
                                   .render({{"task_description", problem.task_description},
                                            {"statement", problem.statement},
                                            {"context", context_section}});

    const int start_calls = gw.transcript().llm_call_count();
    SearchOutcome outcome;
    outcome.best_plan = PlanCandidate::monolithic("", AlgorithmId::BestOfN);
    std::vector<SearchNode> nodes;
    bool have_best = false;

    try {
        for (int i = 0; i < cfg.bon_n; ++i) {
            const std::string text =
                gw.generate({prompt, cfg.bon_temperature, 8192, "bon.sample"});
            PlanCandidate cand = PlanCandidate::monolithic(text, AlgorithmId::BestOfN);
            const int reward = verify_or_floor(verify, problem, cand, gw);
            nodes.push_back(SearchNode{"b" + std::to_string(i), std::nullopt, 0, text, reward,
                                       std::nullopt});
            ++outcome.explored_nodes;
            if (!have_best || reward > outcome.best_reward) {
                outcome.best_plan = std::move(cand);
                outcome.best_reward = reward;
                have_best = true;
            }
        }
    } catch (const BudgetExceededError& e) {
        gw.transcript().warn(std::string("call ceiling hit, returning best so far: ") + e.what());
    }

    outcome.llm_calls = gw.transcript().llm_call_count() - start_calls;
    emit_tree(gw, "bon", nodes, {}, outcome.explored_nodes);
    return outcome;
}

SearchOutcome tot_search(const PlanningProblem& problem, gateway::Gateway& gw,
                         const VerifyFn& verify, const prompts::PromptLibrary& prompts,
                         const SearchConfig& cfg, const std::string& context) {
    if (cfg.tot_children < 1 || cfg.tot_iteration_budget < 1 || cfg.max_depth < 1) {
        throw PreconditionError("tot_search: budgets must be positive");
    }
    const std::string step_problem = problem_with_context(problem, context);
    const auto& step_tpl = prompts.get(prompts::TemplateNames::kStep);

    const int start_calls = gw.transcript().llm_call_count();
    SearchOutcome outcome;
    outcome.best_plan = PlanCandidate::monolithic("", AlgorithmId::ToT);
    bool have_best = false;
    std::vector<SearchNode> nodes;
    int node_counter = 0;

    struct Child {
        PlanCandidate cand;
        int reward;
        bool complete;
    };

    std::vector<std::string> path_steps;
    std::string parent_id = "root";
    nodes.push_back(SearchNode{"root", std::nullopt, 0, "", std::nullopt, std::nullopt});

    try {
        for (int depth = 1; depth <= cfg.max_depth; ++depth) {
            const int remaining = cfg.tot_iteration_budget - outcome.explored_nodes;
            if (remaining <= 0) break;
            const int k = std::min(cfg.tot_children, remaining);

            std::vector<Child> children;
            std::string joined_steps;
            for (size_t i = 0; i < path_steps.size(); ++i) {
                if (i > 0) joined_steps += '\n';
                joined_steps += path_steps[i];
            }
            const std::string step_prompt = step_tpl.render(
                {{"problem", step_problem}, {"intermediate_steps", joined_steps}});

            for (int i = 0; i < k; ++i) {
                const std::string step_text =
                    trim(gw.generate({step_prompt, cfg.tot_temperature, 8192, "tot.step"}));
                std::vector<std::string> child_steps = path_steps;
                child_steps.push_back(step_text);
                PlanCandidate cand = PlanCandidate::from_steps(std::move(child_steps),
                                                               AlgorithmId::ToT, depth, parent_id);
                const int reward = verify_or_floor(verify, problem, cand, gw);
                const bool complete =
                    agents::completion_check(problem, cand.text, prompts, gw);
                ++outcome.explored_nodes;

                const std::string id = "t" + std::to_string(node_counter++);
                nodes.push_back(SearchNode{id, parent_id, depth, step_text, reward, complete});
                if (!have_best || reward > outcome.best_reward) {
                    outcome.best_plan = cand;
                    outcome.best_reward = reward;
                    have_best = true;
                }
                children.push_back(Child{std::move(cand), reward, complete});
            }

            // Best child by reward, earliest generated on ties.
            size_t best_idx = 0;
            for (size_t i = 1; i < children.size(); ++i) {
                if (children[i].reward > children[best_idx].reward) best_idx = i;
            }
            if (children[best_idx].complete) {
                outcome.best_plan = children[best_idx].cand;
                outcome.best_reward = children[best_idx].reward;
                break;
            }
            path_steps = children[best_idx].cand.steps;
            parent_id = nodes[nodes.size() - children.size() + best_idx].id;
        }
    } catch (const BudgetExceededError& e) {
        gw.transcript().warn(std::string("call ceiling hit, returning best so far: ") + e.what());
    }

    outcome.llm_calls = gw.transcript().llm_call_count() - start_calls;
    emit_tree(gw, "tot", nodes, {}, outcome.explored_nodes);
    return outcome;
}

std::vector<int> rebase_allocation(const std::vector<int>& rewards_ranked_desc, int width) {
    const size_t n = rewards_ranked_desc.size();
    std::vector<int> alloc(n, 0);
    if (n == 0 || width < 1) return alloc;

    double total = 0.0;
    for (int r : rewards_ranked_desc) total += static_cast<double>(clamp_reward(r)) + 100.0;

    if (total <= 0.0) {
        alloc[0] = 1;
        return alloc;
    }
    for (size_t i = 0; i < n; ++i) {
        const double shifted = static_cast<double>(clamp_reward(rewards_ranked_desc[i])) + 100.0;
        alloc[i] = static_cast<int>(
            std::llround(static_cast<double>(width) * shifted / total));
    }
    alloc[0] = std::max(alloc[0], 1);

    int sum = 0;
    for (int c : alloc) sum += c;
    for (size_t i = n; sum > width && i-- > 0;) {
        while (alloc[i] > 0 && sum > width) {
            if (i == 0 && alloc[i] == 1) break;  // keep the top-rank floor
            --alloc[i];
            --sum;
        }
    }
    return alloc;
}

SearchOutcome rebase_search(const PlanningProblem& problem, gateway::Gateway& gw,
                            const VerifyFn& verify, const prompts::PromptLibrary& prompts,
                            const SearchConfig& cfg, const std::string& context) {
    if (cfg.rebase_width < 1) throw PreconditionError("rebase_search: width must be >= 1");
    const std::string step_problem = problem_with_context(problem, context);
    const auto& step_tpl = prompts.get(prompts::TemplateNames::kStep);

    const int start_calls = gw.transcript().llm_call_count();
    SearchOutcome outcome;
    outcome.best_plan = PlanCandidate::monolithic("", AlgorithmId::Rebase);
    bool have_best = false;
    std::vector<SearchNode> nodes;
    std::vector<int> round_budgets;
    int node_counter = 0;

    struct Frontier {
        std::string id;
        std::vector<std::string> steps;
        int reward;  // ranking key; root carries 0 and is alone in its round
    };
    std::vector<Frontier> frontier{{"root", {}, 0}};
    nodes.push_back(SearchNode{"root", std::nullopt, 0, "", std::nullopt, std::nullopt});

    int width = cfg.rebase_width;
    bool done = false;

    try {
        for (int depth = 1; depth <= cfg.max_depth && width >= 1 && !frontier.empty() && !done;
             ++depth) {
            round_budgets.push_back(width);

            // Rank by reward, stable so earlier-generated nodes win ties.
            std::stable_sort(frontier.begin(), frontier.end(),
                             [](const Frontier& a, const Frontier& b) { return a.reward > b.reward; });
            std::vector<int> ranked_rewards;
            ranked_rewards.reserve(frontier.size());
            for (const auto& f : frontier) ranked_rewards.push_back(f.reward);
            const std::vector<int> alloc =
                frontier.size() == 1 ? std::vector<int>{width}
                                     : rebase_allocation(ranked_rewards, width);

            std::vector<Frontier> next_frontier;
            for (size_t rank = 0; rank < frontier.size() && !done; ++rank) {
                const Frontier& parent = frontier[rank];
                std::string joined_steps;
                for (size_t i = 0; i < parent.steps.size(); ++i) {
                    if (i > 0) joined_steps += '\n';
                    joined_steps += parent.steps[i];
                }
                const std::string step_prompt = step_tpl.render(
                    {{"problem", step_problem}, {"intermediate_steps", joined_steps}});

                for (int j = 0; j < alloc[rank] && !done; ++j) {
                    const std::string step_text = trim(
                        gw.generate({step_prompt, cfg.rebase_temperature, 8192, "rebase.step"}));
                    std::vector<std::string> child_steps = parent.steps;
                    child_steps.push_back(step_text);
                    PlanCandidate cand = PlanCandidate::from_steps(
                        std::move(child_steps), AlgorithmId::Rebase, depth, parent.id);
                    const int reward = verify_or_floor(verify, problem, cand, gw);
                    const bool complete =
                        agents::completion_check(problem, cand.text, prompts, gw);
                    ++outcome.explored_nodes;

                    const std::string id = "r" + std::to_string(node_counter++);
                    nodes.push_back(SearchNode{id, parent.id, depth, step_text, reward, complete});
                    if (!have_best || reward > outcome.best_reward) {
                        outcome.best_plan = cand;
                        outcome.best_reward = reward;
                        have_best = true;
                    }
                    if (complete) {
                        outcome.best_plan = std::move(cand);
                        outcome.best_reward = reward;
                        done = true;
                        break;
                    }
                    next_frontier.push_back(Frontier{id, cand.steps, reward});
                }
            }
            frontier = std::move(next_frontier);
            width -= 1;
        }
    } catch (const BudgetExceededError& e) {
        gw.transcript().warn(std::string("call ceiling hit, returning best so far: ") + e.what());
    }

    outcome.llm_calls = gw.transcript().llm_call_count() - start_calls;
    if (outcome.llm_calls > 3 * cfg.rebase_width) {
        gw.transcript().warn("rebase used " + std::to_string(outcome.llm_calls) +
                             " calls, above the 3*width bound of " +
                             std::to_string(3 * cfg.rebase_width));
    }
    emit_tree(gw, "rebase", nodes, round_budgets, outcome.explored_nodes);
    return outcome;
}

}  // namespace planforge::search
