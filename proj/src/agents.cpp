#include "planforge/agents.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace planforge::agents {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string rtrim(const std::string& s) {
    size_t e = s.size();
    while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(0, e);
}

bool separator_only(const std::string& line) {
    bool any = false;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c != '-' && c != '=' && c != '_' && c != '~') return false;
        any = true;
    }
    return any;
}

}  // namespace

std::vector<std::string> parse_constraint_items(const std::string& raw) {
    static const std::regex marker(R"(^\s*(?:[-*]|\d+[.)])\s+(.+)$)");
    std::vector<std::string> items;
    std::vector<std::string> fallback;
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::smatch m;
        if (std::regex_match(line, m, marker)) {
            items.push_back(trim(m[1].str()));
        } else if (!trim(line).empty() && !separator_only(line)) {
            fallback.push_back(trim(line));
        }
    }
    return items.empty() ? fallback : items;
}

std::optional<VerificationResult> try_parse_verification(const std::string& reply) {
    static const std::regex score_re(R"([Ss][Cc][Oo][Rr][Ee]\s*:?\s*\**\s*:?\s*([+-]?\d+))");
    std::optional<VerificationResult> result;
    auto begin = std::sregex_iterator(reply.begin(), reply.end(), score_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        VerificationResult v;
        v.feedback = rtrim(reply.substr(0, static_cast<size_t>(m.position(0))));
        const std::string digits = m[1].str();
        try {
            v.reward = clamp_reward(std::stoll(digits));
        } catch (const std::out_of_range&) {
            v.reward = digits.front() == '-' ? -100 : 100;
        }
        result = std::move(v);
    }
    return result;
}

std::optional<std::map<AlgorithmId, double>> try_parse_prior_scores(const std::string& reply) {
    static const std::regex pair_re(
        R"re(\(\s*["']([^"']+)["']\s*,\s*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)\s*\))re");
    std::map<AlgorithmId, double> scores;
    auto begin = std::sregex_iterator(reply.begin(), reply.end(), pair_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        std::string name = (*it)[1].str();
        std::string key;
        for (char c : name) {
            if (std::isalnum(static_cast<unsigned char>(c))) {
                key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
        }
        std::optional<AlgorithmId> a;
        if (key == "bestofn" || key == "bon") a = AlgorithmId::BestOfN;
        else if (key == "rebase") a = AlgorithmId::Rebase;
        else if (key == "tot" || key == "treeofthought" || key == "treeofthoughts") a = AlgorithmId::ToT;
        if (!a) continue;
        scores[*a] = std::clamp(std::stod((*it)[2].str()), 0.0, 1.0);
    }
    if (scores.empty()) return std::nullopt;
    return scores;
}

std::optional<bool> try_parse_completion(const std::string& reply) {
    const std::string t = trim(reply);
    if (t == "1") return true;
    if (t == "0") return false;
    return std::nullopt;
}

std::string format_constraint_list(const ConstraintSet& constraints) {
    std::string out;
    for (const auto& c : constraints.constraints) {
        if (!out.empty()) out += '\n';
        out += "- " + c;
    }
    return out;
}

ConstraintSet extract_constraints(const PlanningProblem& problem,
                                  const std::optional<std::string>& constraint_types,
                                  const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    if (problem.statement.empty()) {
        throw PreconditionError("extract_constraints: problem statement is empty");
    }
    std::string types_section;
    if (constraint_types && !constraint_types->empty()) {
        types_section = "\nThese constraints may include:\n\n" + *constraint_types + "\n";
    }
    const std::string prompt = prompts.get(prompts::TemplateNames::kConstraint)
                                   .render({{"problem", problem.statement},
                                            {"constraint_types", types_section}});

    std::string raw = gw.generate({prompt, 0.0, 8192, "constraint"});
    auto items = parse_constraint_items(raw);
    if (items.empty()) {
        const std::string amended =
            prompt + "\n\nList each constraint on its own line starting with '- '.";
        raw = gw.generate({amended, 0.0, 8192, "constraint.retry"});
        items = parse_constraint_items(raw);
        if (items.empty()) {
            throw EmptyConstraintsError("constraint agent produced no parseable items for problem '" +
                                        problem.id + "'");
        }
    }
    return ConstraintSet{std::move(items), std::move(raw)};
}

VerificationResult verify_plan(const PlanningProblem& problem, const PlanCandidate& plan,
                               const ConstraintSet& constraints,
                               const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    if (constraints.empty()) {
        throw PreconditionError("verify_plan: constraint set is empty");
    }
    const std::string prompt = prompts.get(prompts::TemplateNames::kVerification)
                                   .render({{"problem", problem.statement},
                                            {"plan", plan.text},
                                            {"constraints", format_constraint_list(constraints)}});

    std::string reply = gw.generate({prompt, 0.0, 8192, "verify.plan"});
    auto parsed = try_parse_verification(reply);
    if (!parsed) {
        const std::string amended =
            prompt +
            "\n\nReminder: end your reply with a single line in the exact format "
            "'Score: <integer between -100 and 100>'.";
        reply = gw.generate({amended, 0.0, 8192, "verify.plan.retry"});
        parsed = try_parse_verification(reply);
        if (!parsed) {
            throw UnparseableScoreError("verification reply carries no 'Score:' integer");
        }
    }
    return *parsed;
}

PriorScores llm_priors(const PlanningProblem& problem, const std::optional<std::string>& feedback,
                       const std::optional<std::string>& context,
                       const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    const std::string prompt =
        prompts.get(prompts::TemplateNames::kSelection)
            .render({{"problem", problem.statement},
                     {"requirements", feedback.value_or("None provided")},
                     {"context", context.value_or("None provided")}});

    std::string reply = gw.generate({prompt, 0.0, 8192, "selection.priors"});
    auto scores = try_parse_prior_scores(reply);
    if (!scores) {
        const std::string amended =
            prompt +
            "\n\nReminder: end your reply with the exact list format "
            "[(\"Best of N\", float), (\"Rebase\", float), (\"ToT\", float)].";
        reply = gw.generate({amended, 0.0, 8192, "selection.priors.retry"});
        scores = try_parse_prior_scores(reply);
        if (!scores) {
            throw UnparseableScoresError("selection reply carries no parseable score list");
        }
    }
    for (AlgorithmId a : kAllAlgorithms) {
        if (!scores->count(a)) {
            (*scores)[a] = 0.5;
            gw.transcript().warn("prior score missing for '" + std::string(to_string(a)) +
                                 "'; defaulting to 0.5");
        }
    }
    return PriorScores{std::move(*scores), std::move(reply)};
}

std::string self_reflect(const std::string& previous_response,
                         const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    if (previous_response.empty()) {
        throw PreconditionError("self_reflect: previous response is empty");
    }
    const std::string prompt = prompts.get(prompts::TemplateNames::kReflection)
                                   .render({{"previous_response", previous_response}});
    return gw.generate({prompt, 0.0, 8192, "reflect"});
}

bool completion_check(const PlanningProblem& problem, const std::string& intermediate_steps,
                      const prompts::PromptLibrary& prompts, gateway::Gateway& gw) {
    const std::string prompt = prompts.get(prompts::TemplateNames::kCompletion)
                                   .render({{"problem", problem.statement},
                                            {"intermediate_steps", intermediate_steps}});
    std::string reply = gw.generate({prompt, 0.0, 16, "verify.completion"});
    auto parsed = try_parse_completion(reply);
    if (!parsed) {
        const std::string amended =
            prompt + "\n\nReminder: reply with exactly one character: '1' or '0'.";
        reply = gw.generate({amended, 0.0, 16, "verify.completion.retry"});
        parsed = try_parse_completion(reply);
        if (!parsed) {
            throw CompletionParseError("completion reply is neither '1' nor '0'");
        }
    }
    return *parsed;
}

}  // namespace planforge::agents
