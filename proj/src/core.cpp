#include "planforge/core.hpp"

#include <chrono>
#include <memory>

namespace planforge {

std::string_view to_string(AlgorithmId a) {
    switch (a) {
        case AlgorithmId::BestOfN: return "bon";
        case AlgorithmId::ToT: return "tot";
        case AlgorithmId::Rebase: return "rebase";
    }
    return "bon";
}

std::optional<AlgorithmId> algorithm_from_string(std::string_view name) {
    if (name == "bon" || name == "best_of_n") return AlgorithmId::BestOfN;
    if (name == "tot") return AlgorithmId::ToT;
    if (name == "rebase") return AlgorithmId::Rebase;
    return std::nullopt;
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Generation: return "generation";
        case EventKind::Verification: return "verification";
        case EventKind::Selection: return "selection";
        case EventKind::Result: return "result";
        case EventKind::Warning: return "warning";
    }
    return "generation";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
    if (name == "generation") return EventKind::Generation;
    if (name == "verification") return EventKind::Verification;
    if (name == "selection") return EventKind::Selection;
    if (name == "result") return EventKind::Result;
    if (name == "warning") return EventKind::Warning;
    return std::nullopt;
}

PlanCandidate PlanCandidate::monolithic(std::string text, AlgorithmId origin) {
    PlanCandidate p;
    p.text = std::move(text);
    p.origin = origin;
    p.depth = 0;
    return p;
}

PlanCandidate PlanCandidate::from_steps(std::vector<std::string> steps, AlgorithmId origin,
                                        int depth, std::optional<std::string> parent_id) {
    if ((depth == 0) != !parent_id.has_value()) {
        throw PreconditionError("PlanCandidate: depth is 0 iff parent_id is absent");
    }
    PlanCandidate p;
    std::string joined;
    for (size_t i = 0; i < steps.size(); ++i) {
        if (i > 0) joined += '\n';
        joined += steps[i];
    }
    p.text = std::move(joined);
    p.steps = std::move(steps);
    p.origin = origin;
    p.depth = depth;
    p.parent_id = std::move(parent_id);
    return p;
}

void RunTranscript::append(EventKind kind, std::string payload) {
    const auto now = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    {
        std::lock_guard lock(mutex_);
        events_.push_back(TranscriptEvent{now, kind, std::move(payload)});
    }
    if (kind == EventKind::Generation || kind == EventKind::Verification) {
        llm_calls_.fetch_add(1, std::memory_order_relaxed);
    }
}

std::vector<TranscriptEvent> RunTranscript::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

int RunTranscript::count_events(EventKind kind) const {
    std::lock_guard lock(mutex_);
    int n = 0;
    for (const auto& e : events_) {
        if (e.kind == kind) ++n;
    }
    return n;
}

json RunTranscript::to_json() const {
    std::lock_guard lock(mutex_);
    json j;
    j["problem_id"] = problem_id_;
    j["llm_call_count"] = llm_calls_.load();
    j["events"] = events_;
    return j;
}

std::unique_ptr<RunTranscript> RunTranscript::from_json(const json& j) {
    auto t = std::make_unique<RunTranscript>(j.at("problem_id").get<std::string>());
    for (const auto& ej : j.at("events")) {
        TranscriptEvent e = ej.get<TranscriptEvent>();
        std::lock_guard lock(t->mutex_);
        t->events_.push_back(e);
        if (e.kind == EventKind::Generation || e.kind == EventKind::Verification) {
            t->llm_calls_.fetch_add(1, std::memory_order_relaxed);
        }
    }
    return t;
}

// --- serialization -----------------------------------------------------------

void to_json(json& j, const AlgorithmId& a) { j = std::string(to_string(a)); }

void from_json(const json& j, AlgorithmId& a) {
    auto parsed = algorithm_from_string(j.get<std::string>());
    if (!parsed) throw DatasetError("unknown algorithm id: " + j.get<std::string>());
    a = *parsed;
}

void to_json(json& j, const PlanningProblem& p) {
    j = json{{"id", p.id},
             {"task_description", p.task_description},
             {"statement", p.statement}};
    if (p.gold_answer) j["gold_answer"] = *p.gold_answer;
    if (!p.complexity_attrs.empty()) j["complexity_attrs"] = p.complexity_attrs;
}

void from_json(const json& j, PlanningProblem& p) {
    j.at("id").get_to(p.id);
    p.task_description = j.value("task_description", "");
    j.at("statement").get_to(p.statement);
    if (j.contains("gold_answer") && !j["gold_answer"].is_null()) {
        p.gold_answer = j["gold_answer"].get<std::string>();
    }
    if (j.contains("complexity_attrs") && !j["complexity_attrs"].is_null()) {
        p.complexity_attrs = j["complexity_attrs"].get<std::map<std::string, double>>();
    }
}

void to_json(json& j, const ConstraintSet& c) {
    j = json{{"constraints", c.constraints}, {"raw", c.raw}};
}

void from_json(const json& j, ConstraintSet& c) {
    j.at("constraints").get_to(c.constraints);
    j.at("raw").get_to(c.raw);
}

void to_json(json& j, const PlanCandidate& p) {
    j = json{{"text", p.text},
             {"steps", p.steps},
             {"origin", p.origin},
             {"depth", p.depth}};
    if (p.parent_id) j["parent_id"] = *p.parent_id;
}

void from_json(const json& j, PlanCandidate& p) {
    j.at("text").get_to(p.text);
    j.at("steps").get_to(p.steps);
    j.at("origin").get_to(p.origin);
    j.at("depth").get_to(p.depth);
    if (j.contains("parent_id") && !j["parent_id"].is_null()) {
        p.parent_id = j["parent_id"].get<std::string>();
    }
}

void to_json(json& j, const VerificationResult& v) {
    j = json{{"feedback", v.feedback}, {"reward", v.reward}};
}

void from_json(const json& j, VerificationResult& v) {
    j.at("feedback").get_to(v.feedback);
    j.at("reward").get_to(v.reward);
}

void to_json(json& j, const AlgorithmStats& s) {
    j = json{{"reward_total", s.reward_total},
             {"count", s.count},
             {"failures", s.failures},
             {"successes_after_failure", s.successes_after_failure},
             {"recovery", s.recovery},
             {"last_attempt_failed", s.last_attempt_failed}};
}

void from_json(const json& j, AlgorithmStats& s) {
    j.at("reward_total").get_to(s.reward_total);
    j.at("count").get_to(s.count);
    j.at("failures").get_to(s.failures);
    j.at("successes_after_failure").get_to(s.successes_after_failure);
    j.at("recovery").get_to(s.recovery);
    j.at("last_attempt_failed").get_to(s.last_attempt_failed);
}

namespace {

json score_map_to_json(const std::map<AlgorithmId, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[std::string(to_string(k))] = v;
    return j;
}

std::map<AlgorithmId, double> score_map_from_json(const json& j) {
    std::map<AlgorithmId, double> m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto a = algorithm_from_string(it.key());
        if (!a) throw DatasetError("unknown algorithm id: " + it.key());
        m[*a] = it.value().get<double>();
    }
    return m;
}

}  // namespace

void to_json(json& j, const SelectionDecision& d) {
    j = json{{"chosen", d.chosen},
             {"ucb_scores", score_map_to_json(d.ucb_scores)},
             {"priors", score_map_to_json(d.priors)},
             {"trial_index", d.trial_index}};
}

void from_json(const json& j, SelectionDecision& d) {
    j.at("chosen").get_to(d.chosen);
    d.ucb_scores = score_map_from_json(j.at("ucb_scores"));
    d.priors = score_map_from_json(j.at("priors"));
    j.at("trial_index").get_to(d.trial_index);
}

void to_json(json& j, const TranscriptEvent& e) {
    j = json{{"t", e.timestamp_us}, {"kind", std::string(to_string(e.kind))}, {"payload", e.payload}};
}

void from_json(const json& j, TranscriptEvent& e) {
    j.at("t").get_to(e.timestamp_us);
    auto kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw DatasetError("unknown event kind");
    e.kind = *kind;
    j.at("payload").get_to(e.payload);
}

}  // namespace planforge
