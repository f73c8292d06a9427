#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "planforge/agents.hpp"
#include "planforge/dataset.hpp"
#include "planforge/eval.hpp"
#include "planforge/gateway.hpp"
#include "planforge/metrics.hpp"
#include "planforge/orchestrator.hpp"
#include "planforge/selector.hpp"

namespace pf = planforge;

namespace {

pf::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pf::ConfigError("cannot open config: " + path);
    pf::json j;
    in >> j;
    return j;
}

std::vector<double> parse_csv_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

int cmd_run(const std::string& dataset_path, const std::string& framework_name,
            const std::string& backend_name, const std::string& config_path,
            const std::string& out_dir, std::uint64_t seed, int parallel,
            const std::string& bucket_attr, const std::string& bucket_edges_csv) {
    auto framework = pf::orchestrator::framework_from_string(framework_name);
    if (!framework) {
        std::cerr << "unknown framework: " << framework_name << "\n";
        return 2;
    }

    pf::json config = config_path.empty() ? pf::json::object() : load_json_file(config_path);
    pf::eval::RunConfig cfg = pf::eval::run_config_from_json(config, backend_name);
    cfg.orch.framework = *framework;
    cfg.seed = seed;
    if (parallel > 0) cfg.parallelism = parallel;
    if (!bucket_attr.empty()) {
        cfg.bucket_attr = bucket_attr;
        cfg.bucket_edges = parse_csv_doubles(bucket_edges_csv);
    }

    const auto records = pf::dataset::load_jsonl(dataset_path);
    const pf::eval::EvalReport report = pf::eval::run_eval(records, cfg, out_dir);

    std::cout << "framework: " << report.framework << "\n";
    std::cout << "problems:  " << report.per_problem.size() << "\n";
    for (const auto& [m, v] : report.aggregate) {
        std::cout << m << ": " << v << "\n";
    }
    if (!report.selection_frequency.empty()) {
        std::cout << "selection frequency:";
        for (const auto& [a, f] : report.selection_frequency) std::cout << ' ' << a << '=' << f;
        std::cout << "\n";
    }
    if (!out_dir.empty()) std::cout << "report written to " << out_dir << "/report.json\n";
    return 0;
}

int cmd_verify_plan(const std::string& problem_path, const std::string& plan_path,
                    const std::string& config_path, const std::string& backend_name,
                    std::uint64_t seed) {
    const pf::PlanningProblem problem = pf::dataset::load_problem_file(problem_path);
    std::ifstream plan_in(plan_path, std::ios::binary);
    if (!plan_in) {
        std::cerr << "cannot open plan file: " << plan_path << "\n";
        return 2;
    }
    std::ostringstream plan_ss;
    plan_ss << plan_in.rdbuf();

    pf::json config = config_path.empty() ? pf::json::object() : load_json_file(config_path);
    pf::eval::RunConfig cfg = pf::eval::run_config_from_json(config, backend_name);

    pf::RunTranscript transcript(problem.id);
    pf::gateway::Gateway gw(pf::gateway::make_backend(cfg.backend, seed), transcript,
                            cfg.call_ceiling);
    pf::prompts::PromptLibrary prompts;
    for (const auto& [slot, path] : cfg.prompt_overrides) prompts.override_from_file(slot, path);

    const pf::ConstraintSet constraints =
        pf::agents::extract_constraints(problem, cfg.orch.constraint_types, prompts, gw);
    const pf::PlanCandidate plan =
        pf::PlanCandidate::monolithic(plan_ss.str(), pf::AlgorithmId::BestOfN);
    const pf::VerificationResult verdict =
        pf::agents::verify_plan(problem, plan, constraints, prompts, gw);

    std::cout << verdict.feedback << "\n\nScore: " << verdict.reward << "\n";
    return 0;
}

int cmd_selector_sim(const std::string& arms_csv, int trials, std::uint64_t seed,
                     const std::string& strategy, int threshold) {
    const std::vector<double> means = parse_csv_doubles(arms_csv);
    pf::selector::UcbConfig cfg;
    if (strategy == "sequential") cfg.strategy = pf::selector::Strategy::Sequential;
    else if (strategy == "ucb_no_div_rec") cfg.strategy = pf::selector::Strategy::UcbNoDivRec;

    const auto result = pf::selector::simulate_bandit(means, trials, seed, cfg, threshold);
    std::cout << "trials: " << trials << "\n";
    for (pf::AlgorithmId a : pf::kAllAlgorithms) {
        std::cout << pf::to_string(a) << ": selected " << result.selection_counts.at(a)
                  << " times (" << result.final_window_counts.at(a)
                  << " of the final window)\n";
    }
    const auto& stats = result.final_state.per_algorithm;
    for (pf::AlgorithmId a : pf::kAllAlgorithms) {
        const auto& s = stats.at(a);
        std::cout << pf::to_string(a) << ": reward_total=" << s.reward_total
                  << " count=" << s.count << " failures=" << s.failures
                  << " recovery=" << s.recovery << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inference-time planning engine: reward-guided search over natural-language "
                 "plans with constraint-verified refinement"};
    app.require_subcommand(1);

    // run
    std::string dataset_path, framework = "mixture", backend = "scripted", config_path, out_dir;
    std::uint64_t seed = 0;
    int parallel = 0;
    std::string bucket_attr, bucket_edges;
    auto* run = app.add_subcommand("run", "Evaluate a JSONL dataset with one framework");
    run->add_option("--dataset", dataset_path, "JSONL dataset path")->required();
    run->add_option("--framework", framework,
                    "bon|tot|rebase|mixture|zero-shot-cot|ma-baseline");
    run->add_option("--backend", backend, "backend name from the config's backends section");
    run->add_option("--config", config_path, "JSON config path");
    run->add_option("--out", out_dir, "output directory for report and transcripts");
    run->add_option("--seed", seed, "deterministic seed for scripted backends");
    run->add_option("--parallel", parallel, "worker pool size");
    run->add_option("--bucket-attr", bucket_attr, "complexity attribute to bucket by");
    run->add_option("--bucket-edges", bucket_edges, "comma-separated bucket edges");

    // verify-plan
    std::string problem_path, plan_path, vp_config, vp_backend = "scripted";
    auto* verify = app.add_subcommand("verify-plan", "Extract constraints and verify one plan");
    verify->add_option("--problem", problem_path, "JSON problem file")->required();
    verify->add_option("--plan", plan_path, "plan text file")->required();
    verify->add_option("--config", vp_config, "JSON config path");
    verify->add_option("--backend", vp_backend, "backend name");

    // selector-sim
    std::string arms = "0.9,0.5,0.1", strategy = "full_ucb";
    int trials = 500, threshold = 95;
    std::uint64_t sim_seed = 0;
    auto* sim = app.add_subcommand("selector-sim", "Bandit sanity harness over scripted arms");
    sim->add_option("--arms", arms, "comma-separated mean normalized rewards (three arms)");
    sim->add_option("--trials", trials, "number of trials");
    sim->add_option("--seed", sim_seed, "rng seed");
    sim->add_option("--strategy", strategy, "full_ucb|ucb_no_div_rec|sequential");
    sim->add_option("--threshold", threshold, "failure threshold on raw rewards");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(dataset_path, framework, backend, config_path, out_dir, seed, parallel,
                           bucket_attr, bucket_edges);
        }
        if (verify->parsed()) {
            return cmd_verify_plan(problem_path, plan_path, vp_config, vp_backend, seed);
        }
        if (sim->parsed()) {
            return cmd_selector_sim(arms, trials, sim_seed, strategy, threshold);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
