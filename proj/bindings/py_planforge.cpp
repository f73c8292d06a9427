#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "planforge/agents.hpp"
#include "planforge/dataset.hpp"
#include "planforge/eval.hpp"
#include "planforge/metrics.hpp"
#include "planforge/orchestrator.hpp"
#include "planforge/selector.hpp"

namespace py = pybind11;
using namespace planforge;

namespace {

PlanningProblem problem_from_dict(const py::dict& d) {
    PlanningProblem p;
    p.id = d.contains("id") ? d["id"].cast<std::string>() : "problem";
    if (d.contains("task_description")) p.task_description = d["task_description"].cast<std::string>();
    p.statement = d["statement"].cast<std::string>();
    if (d.contains("gold_answer")) p.gold_answer = d["gold_answer"].cast<std::string>();
    if (d.contains("complexity_attrs")) {
        p.complexity_attrs = d["complexity_attrs"].cast<std::map<std::string, double>>();
    }
    return p;
}

gateway::ScriptedBehavior behavior_from_rules(const py::list& rules,
                                              const std::string& default_response) {
    gateway::ScriptedBehavior behavior;
    behavior.default_response = default_response;
    for (const auto& item : rules) {
        const py::dict rule = item.cast<py::dict>();
        gateway::ScriptedRule r;
        r.matcher = rule["match"].cast<std::string>();
        if (rule.contains("regex")) r.is_regex = rule["regex"].cast<bool>();
        if (rule.contains("responses")) {
            r.responses = rule["responses"].cast<std::vector<std::string>>();
        } else {
            r.responses = {rule["response"].cast<std::string>()};
        }
        behavior.rules.push_back(std::move(r));
    }
    return behavior;
}

py::dict solve_scripted(const py::dict& problem_dict, const py::list& rules,
                        const std::string& framework_name, const std::string& default_response,
                        std::uint64_t seed, int threshold, double lambda_prior) {
    const PlanningProblem problem = problem_from_dict(problem_dict);
    const auto framework = orchestrator::framework_from_string(framework_name);
    if (!framework) throw py::value_error("unknown framework: " + framework_name);

    gateway::BackendConfig backend_cfg;
    backend_cfg.kind = gateway::BackendKind::Scripted;
    backend_cfg.scripted = behavior_from_rules(rules, default_response);

    RunTranscript transcript(problem.id);
    gateway::Gateway gw(gateway::make_backend(backend_cfg, seed), transcript, 200);
    prompts::PromptLibrary prompt_lib;

    orchestrator::OrchestratorConfig orch;
    orch.framework = *framework;
    orch.threshold = threshold;
    selector::UcbConfig ucb;
    ucb.lambda_prior = lambda_prior;

    py::dict out;
    py::list selections;
    switch (*framework) {
        case orchestrator::Framework::ZeroShotCoT:
            out["prediction"] = orchestrator::zero_shot_cot(problem, prompt_lib, gw);
            break;
        case orchestrator::Framework::MultiAgentBaseline:
            out["prediction"] =
                orchestrator::multi_agent_baseline(problem, orch.baseline_iterations, prompt_lib, gw);
            break;
        case orchestrator::Framework::Mixture: {
            const auto r = orchestrator::solve_mixture(problem, gw, prompt_lib, ucb,
                                                       search::SearchConfig{}, orch);
            out["prediction"] = r.final_plan.text;
            out["final_reward"] = r.final_reward;
            out["iterations_used"] = r.iterations_used;
            for (const auto& d : r.selections) selections.append(std::string(to_string(d.chosen)));
            break;
        }
        default: {
            const auto r = orchestrator::solve_single(problem, *framework, gw, prompt_lib,
                                                      search::SearchConfig{}, orch);
            out["prediction"] = r.final_plan.text;
            out["final_reward"] = r.final_reward;
            out["iterations_used"] = r.iterations_used;
            break;
        }
    }
    out["selections"] = selections;
    out["llm_calls"] = transcript.llm_call_count();
    return out;
}

}  // namespace

PYBIND11_MODULE(_planforge, m) {
    m.doc() = "Inference-time planning engine: reward-guided search, constraint verification, "
              "and bandit-based algorithm selection";

    py::register_exception<Error>(m, "PlanforgeError");

    py::enum_<AlgorithmId>(m, "Algorithm")
        .value("BEST_OF_N", AlgorithmId::BestOfN)
        .value("TOT", AlgorithmId::ToT)
        .value("REBASE", AlgorithmId::Rebase);

    py::class_<AlgorithmStats>(m, "AlgorithmStats")
        .def(py::init<>())
        .def_readwrite("reward_total", &AlgorithmStats::reward_total)
        .def_readwrite("count", &AlgorithmStats::count)
        .def_readwrite("failures", &AlgorithmStats::failures)
        .def_readwrite("successes_after_failure", &AlgorithmStats::successes_after_failure)
        .def_readwrite("recovery", &AlgorithmStats::recovery)
        .def_readwrite("last_attempt_failed", &AlgorithmStats::last_attempt_failed);

    py::class_<selector::BanditState>(m, "BanditState")
        .def(py::init<>())
        .def_static("fresh", &selector::BanditState::fresh)
        .def_readwrite("per_algorithm", &selector::BanditState::per_algorithm)
        .def_readwrite("total_trials", &selector::BanditState::total_trials);

    py::class_<selector::UcbConfig>(m, "UcbConfig")
        .def(py::init<>())
        .def_readwrite("lambda_prior", &selector::UcbConfig::lambda_prior)
        .def_readwrite("alpha_diversity", &selector::UcbConfig::alpha_diversity)
        .def_readwrite("alpha_recovery", &selector::UcbConfig::alpha_recovery)
        .def_readwrite("exploration_cap", &selector::UcbConfig::exploration_cap)
        .def_readwrite("compounding_prior_decay", &selector::UcbConfig::compounding_prior_decay);

    py::enum_<selector::Strategy>(m, "Strategy")
        .value("FULL_UCB", selector::Strategy::FullUcb)
        .value("UCB_NO_DIV_REC", selector::Strategy::UcbNoDivRec)
        .value("SEQUENTIAL", selector::Strategy::Sequential);

    py::class_<SelectionDecision>(m, "SelectionDecision")
        .def_readonly("chosen", &SelectionDecision::chosen)
        .def_readonly("ucb_scores", &SelectionDecision::ucb_scores)
        .def_readonly("priors", &SelectionDecision::priors)
        .def_readonly("trial_index", &SelectionDecision::trial_index);

    // UcbConfig.strategy bridged by name to keep the enum optional.
    m.def("set_strategy", [](selector::UcbConfig& cfg, selector::Strategy s) { cfg.strategy = s; },
          py::arg("config"), py::arg("strategy"));

    m.def("ucb_scores", &selector::ucb_scores, py::arg("state"), py::arg("priors"),
          py::arg("config") = selector::UcbConfig{},
          "Modified UCB score per algorithm: normalized reward + capped exploration + decayed "
          "prior + diversity bonus + recovery bonus");
    m.def("select", &selector::select, py::arg("state"), py::arg("priors"),
          py::arg("config") = selector::UcbConfig{});
    m.def("update", &selector::update, py::arg("state"), py::arg("algorithm"),
          py::arg("raw_reward"), py::arg("threshold") = 95);

    m.def(
        "simulate_bandit",
        [](const std::vector<double>& means, int trials, std::uint64_t seed,
           const selector::UcbConfig& cfg, int threshold) {
            const auto r = selector::simulate_bandit(means, trials, seed, cfg, threshold);
            py::dict out;
            out["selection_counts"] = r.selection_counts;
            out["final_window_counts"] = r.final_window_counts;
            py::list choices;
            for (AlgorithmId a : r.choices) choices.append(a);
            out["choices"] = choices;
            return out;
        },
        py::arg("means"), py::arg("trials") = 500, py::arg("seed") = 0,
        py::arg("config") = selector::UcbConfig{}, py::arg("threshold") = 95);

    m.def("exact_match", &metrics::exact_match, py::arg("prediction"), py::arg("gold"));
    m.def("answer_accuracy", &metrics::answer_accuracy, py::arg("prediction"), py::arg("gold"));
    m.def("token_f1", &metrics::token_f1, py::arg("prediction"), py::arg("gold"));

    m.def(
        "parse_verification_reply",
        [](const std::string& reply) -> py::object {
            const auto parsed = agents::try_parse_verification(reply);
            if (!parsed) return py::none();
            return py::make_tuple(parsed->feedback, parsed->reward);
        },
        py::arg("reply"), "Returns (feedback, reward) or None when no score marker is present");
    m.def(
        "parse_prior_scores",
        [](const std::string& reply) -> py::object {
            const auto parsed = agents::try_parse_prior_scores(reply);
            if (!parsed) return py::none();
            return py::cast(*parsed);
        },
        py::arg("reply"));
    m.def("parse_constraint_items", &agents::parse_constraint_items, py::arg("reply"));
    m.def(
        "parse_completion",
        [](const std::string& reply) -> py::object {
            const auto parsed = agents::try_parse_completion(reply);
            if (!parsed) return py::none();
            return py::cast(*parsed);
        },
        py::arg("reply"));

    m.def("solve_scripted", &solve_scripted, py::arg("problem"), py::arg("rules"),
          py::arg("framework") = "mixture", py::arg("default_response") = "",
          py::arg("seed") = 0, py::arg("threshold") = 95, py::arg("lambda_prior") = 1.0,
          "Runs one problem against a scripted rule-table backend and returns prediction, "
          "reward, selections, and the logical call count");
}
