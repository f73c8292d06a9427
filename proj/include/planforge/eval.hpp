#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planforge/dataset.hpp"
#include "planforge/gateway.hpp"
#include "planforge/orchestrator.hpp"
#include "planforge/prompts.hpp"
#include "planforge/search.hpp"
#include "planforge/selector.hpp"

namespace planforge::eval {

/// Everything one evaluation run needs, loadable from a single JSON config
/// document (backends, ucb, search, orchestrator, metrics, prompt overrides).
struct RunConfig {
    orchestrator::OrchestratorConfig orch;
    selector::UcbConfig ucb;
    search::SearchConfig search;
    gateway::BackendConfig backend;
    std::vector<std::string> metrics{"exact_match"};
    bool execute_answer = false;
    int call_ceiling = 200;
    int parallelism = 4;
    std::uint64_t seed = 0;
    std::optional<std::string> bucket_attr;
    std::vector<double> bucket_edges;
    std::map<std::string, std::string> prompt_overrides;  // slot -> file path
};

struct ProblemReport {
    std::string id;
    std::map<std::string, double> metric_values;
    int llm_calls = 0;
    std::vector<std::string> chosen_algorithms;
    int final_reward = -100;
    std::string prediction;
    bool failed = false;
};

struct EvalReport {
    std::string framework;
    std::vector<ProblemReport> per_problem;
    std::map<std::string, double> aggregate;  // metric -> mean, plus mean_llm_calls
    std::map<std::string, std::map<std::string, double>> per_bucket;
    std::map<std::string, double> selection_frequency;

    json to_json() const;
};

/// Builds a fresh backend per problem so scripted rotation state never leaks
/// across problems or worker threads.
using BackendFactory = std::function<std::shared_ptr<gateway::Backend>(const PlanningProblem&)>;

RunConfig run_config_from_json(const json& j, const std::string& backend_name);
json run_config_to_json(const RunConfig& cfg, const std::string& framework);

/// Solves every record with the configured framework, computes metrics,
/// aggregates, buckets, tallies selection frequencies and call counts, and
/// writes report.json, transcripts.jsonl, and the resolved config snapshot
/// to out_dir (when non-empty). Per-problem errors score 0 and never abort
/// the run.
EvalReport run_eval(const std::vector<dataset::DatasetRecord>& records, const RunConfig& cfg,
                    const std::string& out_dir, const BackendFactory& factory);

/// Convenience overload using the config's backend for every problem.
EvalReport run_eval(const std::vector<dataset::DatasetRecord>& records, const RunConfig& cfg,
                    const std::string& out_dir);

double metric_value(const std::string& metric, const std::string& prediction,
                    const std::string& gold);

}  // namespace planforge::eval
