#include "planforge/eval.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "planforge/metrics.hpp"

namespace planforge::eval {

namespace {

selector::Strategy strategy_from_string(const std::string& s) {
    if (s == "full_ucb") return selector::Strategy::FullUcb;
    if (s == "ucb_no_div_rec") return selector::Strategy::UcbNoDivRec;
    if (s == "sequential") return selector::Strategy::Sequential;
    throw ConfigError("unknown ucb strategy: " + s);
}

std::string strategy_to_string(selector::Strategy s) {
    switch (s) {
        case selector::Strategy::FullUcb: return "full_ucb";
        case selector::Strategy::UcbNoDivRec: return "ucb_no_div_rec";
        case selector::Strategy::Sequential: return "sequential";
    }
    return "full_ucb";
}

}  // namespace

RunConfig run_config_from_json(const json& j, const std::string& backend_name) {
    RunConfig cfg;

    if (j.contains("orchestrator")) {
        const json& o = j["orchestrator"];
        cfg.orch.threshold = o.value("threshold", 95);
        cfg.orch.max_refinement_iterations = o.value("max_refinement_iterations", 5);
        cfg.orch.baseline_iterations = o.value("baseline_iterations", 3);
        cfg.orch.persist_bandit_across_problems = o.value("persist_bandit_across_problems", false);
        if (o.contains("constraint_types")) {
            cfg.orch.constraint_types = o["constraint_types"].get<std::string>();
        }
    }
    if (cfg.orch.threshold < -100 || cfg.orch.threshold > 100) {
        throw ConfigError("threshold must lie in [-100,100]");
    }

    if (j.contains("ucb")) {
        const json& u = j["ucb"];
        cfg.ucb.lambda_prior = u.value("lambda_prior", 1.0);
        cfg.ucb.alpha_diversity = u.value("alpha_diversity", 0.5);
        cfg.ucb.alpha_recovery = u.value("alpha_recovery", 0.5);
        cfg.ucb.exploration_cap = u.value("exploration_cap", 5.0);
        cfg.ucb.strategy = strategy_from_string(u.value("strategy", "full_ucb"));
        cfg.ucb.compounding_prior_decay = u.value("compounding_prior_decay", false);
    }

    if (j.contains("search")) {
        const json& s = j["search"];
        cfg.search.bon_n = s.value("bon_n", 5);
        cfg.search.bon_temperature = s.value("bon_temperature", 0.7);
        cfg.search.tot_children = s.value("tot_children", 3);
        cfg.search.tot_iteration_budget = s.value("tot_iteration_budget", 20);
        cfg.search.tot_temperature = s.value("tot_temperature", 0.7);
        cfg.search.rebase_width = s.value("rebase_width", 10);
        cfg.search.rebase_temperature = s.value("rebase_temperature", 0.7);
        cfg.search.max_depth = s.value("max_depth", 20);
    }

    if (j.contains("backends")) {
        const json& backends = j["backends"];
        if (!backends.contains(backend_name)) {
            throw ConfigError("backend '" + backend_name + "' not defined in config");
        }
        cfg.backend = gateway::backend_config_from_json(backends[backend_name]);
    } else if (!backend_name.empty() && backend_name != "scripted") {
        throw ConfigError("config has no backends section for '" + backend_name + "'");
    }

    if (j.contains("harness")) {
        const json& h = j["harness"];
        if (h.contains("metrics")) cfg.metrics = h["metrics"].get<std::vector<std::string>>();
        cfg.execute_answer = h.value("execute_answer", false);
        cfg.call_ceiling = h.value("call_ceiling", 200);
        cfg.parallelism = h.value("parallelism", 4);
    }

    if (j.contains("prompts")) {
        for (auto it = j["prompts"].begin(); it != j["prompts"].end(); ++it) {
            cfg.prompt_overrides[it.key()] = it.value().get<std::string>();
        }
    }
    return cfg;
}

json run_config_to_json(const RunConfig& cfg, const std::string& framework) {
    json backend{{"kind", cfg.backend.kind == gateway::BackendKind::Scripted
                              ? "scripted"
                              : (cfg.backend.kind == gateway::BackendKind::HttpGemini
                                     ? "http_gemini"
                                     : "http_openai_compatible")},
                 {"endpoint", cfg.backend.endpoint},
                 {"model_name", cfg.backend.model_name},
                 {"api_key_env", cfg.backend.api_key_env},
                 {"timeout_ms", cfg.backend.timeout_ms},
                 {"max_retries", cfg.backend.max_retries},
                 {"retry_backoff_ms", cfg.backend.retry_backoff_ms}};
    json j{{"framework", framework},
           {"seed", cfg.seed},
           {"orchestrator",
            {{"threshold", cfg.orch.threshold},
             {"max_refinement_iterations", cfg.orch.max_refinement_iterations},
             {"baseline_iterations", cfg.orch.baseline_iterations},
             {"persist_bandit_across_problems", cfg.orch.persist_bandit_across_problems}}},
           {"ucb",
            {{"lambda_prior", cfg.ucb.lambda_prior},
             {"alpha_diversity", cfg.ucb.alpha_diversity},
             {"alpha_recovery", cfg.ucb.alpha_recovery},
             {"exploration_cap", cfg.ucb.exploration_cap},
             {"strategy", strategy_to_string(cfg.ucb.strategy)},
             {"compounding_prior_decay", cfg.ucb.compounding_prior_decay}}},
           {"search",
            {{"bon_n", cfg.search.bon_n},
             {"bon_temperature", cfg.search.bon_temperature},
             {"tot_children", cfg.search.tot_children},
             {"tot_iteration_budget", cfg.search.tot_iteration_budget},
             {"tot_temperature", cfg.search.tot_temperature},
             {"rebase_width", cfg.search.rebase_width},
             {"rebase_temperature", cfg.search.rebase_temperature},
             {"max_depth", cfg.search.max_depth}}},
           {"backend", backend},
           {"harness",
            {{"metrics", cfg.metrics},
             {"execute_answer", cfg.execute_answer},
             {"call_ceiling", cfg.call_ceiling},
             {"parallelism", cfg.parallelism}}}};
    return j;
}

double metric_value(const std::string& metric, const std::string& prediction,
                    const std::string& gold) {
    if (metric == "exact_match" || metric == "em") {
        return metrics::exact_match(prediction, gold);
    }
    if (metric == "accuracy") {
        return metrics::answer_accuracy(prediction, gold);
    }
    if (metric == "f1") {
        return metrics::token_f1(prediction, gold);
    }
    throw ConfigError("unknown metric: " + metric);
}

json EvalReport::to_json() const {
    json per_problem_json = json::array();
    for (const auto& p : per_problem) {
        json pj{{"id", p.id},
                {"metrics", p.metric_values},
                {"llm_calls", p.llm_calls},
                {"chosen_algorithms", p.chosen_algorithms},
                {"final_reward", p.final_reward},
                {"prediction", p.prediction},
                {"failed", p.failed}};
        per_problem_json.push_back(std::move(pj));
    }
    return json{{"framework", framework},
                {"problems", per_problem.size()},
                {"aggregate", aggregate},
                {"per_problem", per_problem_json},
                {"per_bucket", per_bucket},
                {"selection_frequency", selection_frequency}};
}

namespace {

struct SolveOutput {
    std::string prediction;
    std::vector<std::string> chosen;
    int final_reward = -100;
};

SolveOutput solve_one(const PlanningProblem& problem, const RunConfig& cfg,
                      const prompts::PromptLibrary& prompt_lib, gateway::Gateway& gw,
                      selector::BanditState* shared_bandit, std::mutex* bandit_mutex) {
    SolveOutput out;
    switch (cfg.orch.framework) {
        case orchestrator::Framework::ZeroShotCoT:
            out.prediction = orchestrator::zero_shot_cot(problem, prompt_lib, gw);
            return out;
        case orchestrator::Framework::MultiAgentBaseline:
            out.prediction = orchestrator::multi_agent_baseline(
                problem, cfg.orch.baseline_iterations, prompt_lib, gw);
            return out;
        case orchestrator::Framework::Mixture: {
            orchestrator::SolveResult r;
            if (shared_bandit != nullptr) {
                std::lock_guard lock(*bandit_mutex);
                r = orchestrator::solve_mixture(problem, gw, prompt_lib, cfg.ucb, cfg.search,
                                                cfg.orch, shared_bandit);
            } else {
                r = orchestrator::solve_mixture(problem, gw, prompt_lib, cfg.ucb, cfg.search,
                                                cfg.orch, nullptr);
            }
            for (const auto& d : r.selections) out.chosen.emplace_back(to_string(d.chosen));
            out.final_reward = r.final_reward;
            if (cfg.execute_answer && !r.final_plan.text.empty()) {
                out.prediction = orchestrator::execute_plan(problem, r.final_plan, prompt_lib, gw);
            } else {
                out.prediction = r.final_plan.text;
            }
            return out;
        }
        default: {
            orchestrator::SolveResult r = orchestrator::solve_single(
                problem, cfg.orch.framework, gw, prompt_lib, cfg.search, cfg.orch);
            out.final_reward = r.final_reward;
            if (cfg.execute_answer && !r.final_plan.text.empty()) {
                out.prediction = orchestrator::execute_plan(problem, r.final_plan, prompt_lib, gw);
            } else {
                out.prediction = r.final_plan.text;
            }
            return out;
        }
    }
}

}  // namespace

EvalReport run_eval(const std::vector<dataset::DatasetRecord>& records, const RunConfig& cfg,
                    const std::string& out_dir, const BackendFactory& factory) {
    prompts::PromptLibrary prompt_lib;
    for (const auto& [slot, path] : cfg.prompt_overrides) {
        prompt_lib.override_from_file(slot, path);
    }

    EvalReport report;
    report.framework = std::string(orchestrator::to_string(cfg.orch.framework));
    report.per_problem.resize(records.size());
    std::vector<json> transcripts(records.size());

    selector::BanditState shared_bandit = selector::BanditState::fresh();
    std::mutex bandit_mutex;
    selector::BanditState* bandit_ptr =
        cfg.orch.persist_bandit_across_problems ? &shared_bandit : nullptr;

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            const PlanningProblem& problem = records[i].problem;
            RunTranscript transcript(problem.id);
            gateway::Gateway gw(factory(problem), transcript, cfg.call_ceiling);

            ProblemReport& pr = report.per_problem[i];
            pr.id = problem.id;
            try {
                SolveOutput out =
                    solve_one(problem, cfg, prompt_lib, gw, bandit_ptr, &bandit_mutex);
                pr.prediction = out.prediction;
                pr.chosen_algorithms = out.chosen;
                pr.final_reward = out.final_reward;
                if (problem.gold_answer) {
                    for (const auto& m : cfg.metrics) {
                        pr.metric_values[m] = metric_value(m, out.prediction, *problem.gold_answer);
                    }
                }
            } catch (const std::exception& e) {
                pr.failed = true;
                transcript.warn(std::string("problem failed: ") + e.what());
                for (const auto& m : cfg.metrics) pr.metric_values[m] = 0.0;
            }
            pr.llm_calls = transcript.llm_call_count();
            transcripts[i] = transcript.to_json();
        }
    };

    const int workers =
        std::max(1, std::min<int>(cfg.parallelism, static_cast<int>(records.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Aggregates are plain means over the problems carrying each metric.
    std::map<std::string, std::pair<double, int>> sums;
    double call_sum = 0.0;
    for (const auto& pr : report.per_problem) {
        call_sum += pr.llm_calls;
        for (const auto& [m, v] : pr.metric_values) {
            sums[m].first += v;
            sums[m].second += 1;
        }
    }
    for (const auto& [m, sv] : sums) {
        if (sv.second > 0) report.aggregate[m] = sv.first / sv.second;
    }
    if (!report.per_problem.empty()) {
        report.aggregate["mean_llm_calls"] = call_sum / static_cast<double>(records.size());
    }

    std::map<std::string, int> selection_counts;
    int total_selections = 0;
    for (const auto& pr : report.per_problem) {
        for (const auto& a : pr.chosen_algorithms) {
            ++selection_counts[a];
            ++total_selections;
        }
    }
    if (total_selections > 0) {
        for (AlgorithmId a : kAllAlgorithms) {
            const auto it = selection_counts.find(std::string(to_string(a)));
            const int n = it == selection_counts.end() ? 0 : it->second;
            report.selection_frequency[std::string(to_string(a))] =
                static_cast<double>(n) / static_cast<double>(total_selections);
        }
    }

    if (cfg.bucket_attr && !cfg.bucket_edges.empty()) {
        std::vector<PlanningProblem> problems;
        problems.reserve(records.size());
        for (const auto& r : records) problems.push_back(r.problem);
        const auto buckets =
            metrics::bucket_by_complexity(problems, *cfg.bucket_attr, cfg.bucket_edges);
        std::map<std::string, const ProblemReport*> by_id;
        for (const auto& pr : report.per_problem) by_id[pr.id] = &pr;
        for (const auto& [label, ids] : buckets) {
            std::map<std::string, std::pair<double, int>> bucket_sums;
            for (const auto& id : ids) {
                const ProblemReport* pr = by_id.at(id);
                for (const auto& [m, v] : pr->metric_values) {
                    bucket_sums[m].first += v;
                    bucket_sums[m].second += 1;
                }
            }
            for (const auto& [m, sv] : bucket_sums) {
                if (sv.second > 0) report.per_bucket[label][m] = sv.first / sv.second;
            }
        }
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        {
            std::ofstream out(std::filesystem::path(out_dir) / "report.json", std::ios::binary);
            out << report.to_json().dump(2) << '\n';
        }
        {
            std::ofstream out(std::filesystem::path(out_dir) / "transcripts.jsonl",
                              std::ios::binary);
            for (const auto& t : transcripts) out << t.dump() << '\n';
        }
        {
            std::ofstream out(std::filesystem::path(out_dir) / "config.json", std::ios::binary);
            out << run_config_to_json(cfg, report.framework).dump(2) << '\n';
        }
    }
    return report;
}

EvalReport run_eval(const std::vector<dataset::DatasetRecord>& records, const RunConfig& cfg,
                    const std::string& out_dir) {
    return run_eval(records, cfg, out_dir, [&cfg](const PlanningProblem&) {
        return gateway::make_backend(cfg.backend, cfg.seed);
    });
}

}  // namespace planforge::eval
