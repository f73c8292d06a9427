#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace planforge {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class AuthError : public Error {
public:
    using Error::Error;
};

class BudgetExceededError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class EmptyConstraintsError : public Error {
public:
    using Error::Error;
};

class UnparseableScoreError : public Error {
public:
    using Error::Error;
};

class UnparseableScoresError : public Error {
public:
    using Error::Error;
};

class CompletionParseError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class DatasetError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Algorithm identifiers
// ---------------------------------------------------------------------------

/// The three inference-time algorithms. The enumerator order is the canonical
/// order used for deterministic tie-breaks everywhere.
enum class AlgorithmId { BestOfN = 0, ToT = 1, Rebase = 2 };

inline constexpr std::array<AlgorithmId, 3> kAllAlgorithms = {
    AlgorithmId::BestOfN, AlgorithmId::ToT, AlgorithmId::Rebase};

std::string_view to_string(AlgorithmId a);
std::optional<AlgorithmId> algorithm_from_string(std::string_view name);

/// Total order BestOfN < ToT < Rebase. Returns <0, 0, >0 like strcmp.
inline int canonical_order(AlgorithmId a, AlgorithmId b) {
    return static_cast<int>(a) - static_cast<int>(b);
}

// ---------------------------------------------------------------------------
// Domain value types
// ---------------------------------------------------------------------------

/// One unit of work: a task framing plus a concrete problem statement.
struct PlanningProblem {
    std::string id;
    std::string task_description;
    std::string statement;
    std::optional<std::string> gold_answer;
    std::map<std::string, double> complexity_attrs;
};

/// Output of the constraint agent. `raw` keeps the verbatim model reply for
/// transcripting; `constraints` is the parsed item list (non-empty whenever
/// raw is non-empty).
struct ConstraintSet {
    std::vector<std::string> constraints;
    std::string raw;

    bool empty() const { return constraints.empty(); }
};

/// A generated plan. `steps` is empty for monolithic plans; when present it
/// is authoritative and `text` is the newline join of the steps.
struct PlanCandidate {
    std::string text;
    std::vector<std::string> steps;
    AlgorithmId origin = AlgorithmId::BestOfN;
    int depth = 0;
    std::optional<std::string> parent_id;

    static PlanCandidate monolithic(std::string text, AlgorithmId origin);
    static PlanCandidate from_steps(std::vector<std::string> steps, AlgorithmId origin,
                                    int depth, std::optional<std::string> parent_id);
};

/// Parsed verification-agent reply: free-text feedback plus an integer
/// reward clamped to [-100, 100].
struct VerificationResult {
    std::string feedback;
    int reward = 0;
};

inline int clamp_reward(long long raw) {
    if (raw < -100) return -100;
    if (raw > 100) return 100;
    return static_cast<int>(raw);
}

/// Per-algorithm bandit bookkeeping. Counts initialize at 1; accumulated
/// rewards are normalized to [0,1] before they land here, so
/// 0 <= reward_total <= count holds for every update sequence.
struct AlgorithmStats {
    double reward_total = 0.0;
    int count = 1;
    int failures = 0;
    int successes_after_failure = 0;
    double recovery = 0.0;
    bool last_attempt_failed = false;
};

/// One selection-agent decision: the chosen algorithm, the UCB score per
/// algorithm it was derived from, the LLM priors in force, and the trial
/// index at decision time.
struct SelectionDecision {
    AlgorithmId chosen = AlgorithmId::BestOfN;
    std::map<AlgorithmId, double> ucb_scores;
    std::map<AlgorithmId, double> priors;
    int trial_index = 0;
};

// ---------------------------------------------------------------------------
// Run transcript
// ---------------------------------------------------------------------------

enum class EventKind { Generation, Verification, Selection, Result, Warning };

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view name);

struct TranscriptEvent {
    std::int64_t timestamp_us = 0;
    EventKind kind = EventKind::Generation;
    std::string payload;
};

/// Append-only log of every model exchange, reward, selection decision, and
/// outcome for one problem. llm_call_count equals the number of generation
/// events plus verification events; the gateway appends exactly one such
/// event per logical call, so the count is exact by construction.
class RunTranscript {
public:
    explicit RunTranscript(std::string problem_id) : problem_id_(std::move(problem_id)) {}

    RunTranscript(const RunTranscript&) = delete;
    RunTranscript& operator=(const RunTranscript&) = delete;

    void append(EventKind kind, std::string payload);
    void warn(std::string message) { append(EventKind::Warning, std::move(message)); }

    const std::string& problem_id() const { return problem_id_; }
    int llm_call_count() const { return llm_calls_.load(); }

    std::vector<TranscriptEvent> events() const;
    int count_events(EventKind kind) const;

    json to_json() const;
    /// Rebuilds a transcript from its serialized form (replay/analysis).
    static std::unique_ptr<RunTranscript> from_json(const json& j);

private:
    std::string problem_id_;
    mutable std::mutex mutex_;
    std::vector<TranscriptEvent> events_;
    std::atomic<int> llm_calls_{0};
};

// ---------------------------------------------------------------------------
// JSON serialization (round-trips byte-exact through nlohmann dump())
// ---------------------------------------------------------------------------

void to_json(json& j, const AlgorithmId& a);
void from_json(const json& j, AlgorithmId& a);
void to_json(json& j, const PlanningProblem& p);
void from_json(const json& j, PlanningProblem& p);
void to_json(json& j, const ConstraintSet& c);
void from_json(const json& j, ConstraintSet& c);
void to_json(json& j, const PlanCandidate& p);
void from_json(const json& j, PlanCandidate& p);
void to_json(json& j, const VerificationResult& v);
void from_json(const json& j, VerificationResult& v);
void to_json(json& j, const AlgorithmStats& s);
void from_json(const json& j, AlgorithmStats& s);
void to_json(json& j, const SelectionDecision& d);
void from_json(const json& j, SelectionDecision& d);
void to_json(json& j, const TranscriptEvent& e);
void from_json(const json& j, TranscriptEvent& e);

}  // namespace planforge
