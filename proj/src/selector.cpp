#include "planforge/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace planforge::selector {

BanditState BanditState::fresh() {
    BanditState s;
    for (AlgorithmId a : kAllAlgorithms) s.per_algorithm[a] = AlgorithmStats{};
    return s;
}

std::map<AlgorithmId, double> ucb_scores(const BanditState& state,
                                         const std::map<AlgorithmId, double>& priors,
                                         const UcbConfig& cfg) {
    for (AlgorithmId a : kAllAlgorithms) {
        if (!state.per_algorithm.count(a)) {
            throw PreconditionError("ucb_scores: state is missing an algorithm");
        }
    }
    double reward_max = 0.0;
    for (const auto& [a, stats] : state.per_algorithm) {
        reward_max = std::max(reward_max, stats.reward_total);
    }
    if (reward_max <= 0.0) reward_max = 1.0;

    const double t = static_cast<double>(state.total_trials);
    const double prior_weight = cfg.compounding_prior_decay
                                    ? cfg.lambda_prior * state.prior_decay_multiplier
                                    : cfg.lambda_prior / (1.0 + t);
    const bool with_div_rec = cfg.strategy != Strategy::UcbNoDivRec;

    std::map<AlgorithmId, double> scores;
    for (const auto& [a, stats] : state.per_algorithm) {
        const double count = static_cast<double>(stats.count);
        const double normalized_reward = stats.reward_total / (count * reward_max);
        const double exploration =
            std::min(std::sqrt(2.0 * std::log(t + 1.0) / count), cfg.exploration_cap);
        auto it = priors.find(a);
        const double prior = it == priors.end() ? 0.5 : it->second;
        double score = normalized_reward + exploration + prior_weight * prior;
        if (with_div_rec) {
            score += cfg.alpha_diversity / (count + 1.0);
            score += cfg.alpha_recovery * stats.recovery;
        }
        scores[a] = score;
    }
    return scores;
}

SelectionDecision select(const BanditState& state, const std::map<AlgorithmId, double>& priors,
                         const UcbConfig& cfg) {
    SelectionDecision decision;
    decision.trial_index = state.total_trials;
    decision.priors = priors;

    if (cfg.strategy == Strategy::Sequential) {
        decision.chosen = kAllAlgorithms[static_cast<size_t>(state.total_trials % 3)];
        return decision;
    }

    decision.ucb_scores = ucb_scores(state, priors, cfg);
    AlgorithmId best = AlgorithmId::BestOfN;
    double best_score = -std::numeric_limits<double>::infinity();
    for (AlgorithmId a : kAllAlgorithms) {  // canonical order; strict > keeps the earliest on ties
        const double s = decision.ucb_scores.at(a);
        if (s > best_score) {
            best_score = s;
            best = a;
        }
    }
    decision.chosen = best;
    return decision;
}

BanditState update(BanditState state, AlgorithmId a, int raw_reward, int threshold) {
    auto it = state.per_algorithm.find(a);
    if (it == state.per_algorithm.end()) {
        throw PreconditionError("update: algorithm not present in state");
    }
    AlgorithmStats& stats = it->second;

    const int clamped = clamp_reward(raw_reward);
    stats.reward_total += (static_cast<double>(clamped) + 100.0) / 200.0;
    stats.count += 1;
    state.total_trials += 1;

    if (clamped < threshold) {
        stats.failures += 1;
        stats.last_attempt_failed = true;
    } else {
        if (stats.last_attempt_failed) stats.successes_after_failure += 1;
        stats.last_attempt_failed = false;
    }
    stats.recovery = static_cast<double>(stats.successes_after_failure) /
                     (static_cast<double>(stats.failures) + 1.0);

    state.prior_decay_multiplier /= 1.0 + static_cast<double>(state.total_trials);
    return state;
}

json bandit_state_to_json(const BanditState& state) {
    json arms = json::object();
    for (const auto& [a, stats] : state.per_algorithm) {
        arms[std::string(to_string(a))] = stats;
    }
    return json{{"per_algorithm", arms},
                {"total_trials", state.total_trials},
                {"prior_decay_multiplier", state.prior_decay_multiplier}};
}

SimulationResult simulate_bandit(const std::vector<double>& arm_means, int trials,
                                 std::uint64_t seed, const UcbConfig& cfg, int threshold,
                                 int final_window) {
    if (arm_means.size() != kAllAlgorithms.size()) {
        throw PreconditionError("simulate_bandit: exactly three arm means required");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SimulationResult result;
    result.final_state = BanditState::fresh();
    std::map<AlgorithmId, double> priors;
    for (AlgorithmId a : kAllAlgorithms) {
        priors[a] = 0.5;
        result.selection_counts[a] = 0;
        result.final_window_counts[a] = 0;
    }

    for (int t = 0; t < trials; ++t) {
        const SelectionDecision d = select(result.final_state, priors, cfg);
        const double mean = arm_means[static_cast<size_t>(d.chosen)];
        const int raw = unit(rng) < mean ? 100 : -100;
        result.final_state = update(std::move(result.final_state), d.chosen, raw, threshold);
        result.choices.push_back(d.chosen);
        result.selection_counts[d.chosen] += 1;
        if (t >= trials - final_window) result.final_window_counts[d.chosen] += 1;
    }
    return result;
}

}  // namespace planforge::selector
