#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "planforge/agents.hpp"
#include "planforge/core.hpp"

namespace planforge::selector {

enum class Strategy { FullUcb, UcbNoDivRec, Sequential };

struct UcbConfig {
    double lambda_prior = 1.0;
    double alpha_diversity = 0.5;
    double alpha_recovery = 0.5;
    double exploration_cap = 5.0;
    Strategy strategy = Strategy::FullUcb;
    /// When true, the prior decay compounds across selections (the
    /// self-assignment reading of the selection algorithm) instead of the
    /// default lambda/(1+T) form. Both are transcripted.
    bool compounding_prior_decay = false;
};

/// Bandit state over the three algorithms. Counts start at 1 and T at 0, so
/// T always equals the sum of (count - 1) across arms.
struct BanditState {
    std::map<AlgorithmId, AlgorithmStats> per_algorithm;
    int total_trials = 0;
    /// Compounded decay multiplier, advanced once per trial by update(); only
    /// read when compounding_prior_decay is set.
    double prior_decay_multiplier = 1.0;

    static BanditState fresh();
};

/// The modified-UCB score per algorithm:
///
///   UCB(a) = R(a) / (C(a) * R_max)
///          + min(sqrt(2 ln(T+1) / C(a)), M)
///          + (lambda_prior / (1+T)) * Prior(a)
///          + alpha_diversity / (C(a)+1)
///          + alpha_recovery * Rec(a)
///
/// with R_max = max over arms of accumulated reward, replaced by 1 when the
/// max is <= 0. The last two terms are dropped under UcbNoDivRec.
std::map<AlgorithmId, double> ucb_scores(const BanditState& state,
                                         const std::map<AlgorithmId, double>& priors,
                                         const UcbConfig& cfg);

/// Argmax of ucb_scores with canonical-order tie-break; Sequential ignores
/// the scores and rotates BestOfN -> ToT -> Rebase by trial index.
SelectionDecision select(const BanditState& state, const std::map<AlgorithmId, double>& priors,
                         const UcbConfig& cfg);

/// Applies one observed raw reward in [-100,100]: normalizes it to [0,1],
/// bumps count/trials, and maintains the failure/recovery bookkeeping against
/// the given threshold (a trial below the threshold is a failure; a success
/// directly following a failure on the same arm raises the recovery score
/// successes_after_failure / (failures + 1)).
BanditState update(BanditState state, AlgorithmId a, int raw_reward, int threshold);

json bandit_state_to_json(const BanditState& state);

// --- scripted-arm simulation (sanity harness for the policy) -----------------

struct SimulationResult {
    std::vector<AlgorithmId> choices;
    std::map<AlgorithmId, int> selection_counts;
    std::map<AlgorithmId, int> final_window_counts;
    BanditState final_state;
};

/// Runs the policy against three scripted arms paying raw +100 with the given
/// per-arm probability and raw -100 otherwise, so each arm's mean normalized
/// reward equals its probability exactly. Priors are fixed at 0.5.
SimulationResult simulate_bandit(const std::vector<double>& arm_means, int trials,
                                 std::uint64_t seed, const UcbConfig& cfg, int threshold = 95,
                                 int final_window = 100);

}  // namespace planforge::selector
