#include "planforge/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace planforge::metrics {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> tokens;
    std::istringstream in(s);
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
}

std::string format_edge(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

std::string normalize_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (is_space(c)) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out += ' ';
        in_run = false;
        out += c;
    }
    return out;
}

std::string normalize_answer(const std::string& s) {
    std::string lowered;
    lowered.reserve(s.size());
    for (char c : s) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::string collapsed = normalize_whitespace(lowered);

    // "9.9 %" -> "9.9%"
    std::string joined;
    for (size_t i = 0; i < collapsed.size(); ++i) {
        if (collapsed[i] == ' ' && i + 1 < collapsed.size() && collapsed[i + 1] == '%') continue;
        joined += collapsed[i];
    }

    static const std::string punct = ".,;:!?()[]{}\"'`";
    size_t b = 0;
    size_t e = joined.size();
    while (b < e && punct.find(joined[b]) != std::string::npos) ++b;
    while (e > b && punct.find(joined[e - 1]) != std::string::npos) --e;
    return joined.substr(b, e - b);
}

std::string extract_final_answer(const std::string& text) {
    static const std::string marker = "answer:";
    std::string lowered;
    lowered.reserve(text.size());
    for (char c : text) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    const size_t pos = lowered.rfind(marker);
    if (pos != std::string::npos) {
        return text.substr(pos + marker.size());
    }
    // Fall back to the last non-empty line.
    std::istringstream in(text);
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
        if (!normalize_whitespace(line).empty()) last = line;
    }
    return last;
}

int exact_match(const std::string& prediction, const std::string& gold) {
    if (gold.empty()) throw PreconditionError("exact_match: gold is empty");
    return normalize_whitespace(prediction) == normalize_whitespace(gold) ? 1 : 0;
}

int answer_accuracy(const std::string& prediction, const std::string& gold) {
    if (gold.empty()) throw PreconditionError("answer_accuracy: gold is empty");
    return normalize_answer(extract_final_answer(prediction)) == normalize_answer(gold) ? 1 : 0;
}

double token_f1(const std::string& prediction, const std::string& gold) {
    if (gold.empty()) throw PreconditionError("token_f1: gold is empty");
    const auto pred_tokens = tokenize(normalize_answer(extract_final_answer(prediction)));
    const auto gold_tokens = tokenize(normalize_answer(gold));
    if (pred_tokens.empty() || gold_tokens.empty()) return 0.0;

    std::map<std::string, int> gold_counts;
    for (const auto& t : gold_tokens) ++gold_counts[t];
    int overlap = 0;
    for (const auto& t : pred_tokens) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            ++overlap;
            --it->second;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::string bucket_label_for(double value, const std::vector<double>& edges) {
    if (value < edges.front()) return "<" + format_edge(edges.front());
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        if (value >= edges[i] && value < edges[i + 1]) {
            return "[" + format_edge(edges[i]) + "," + format_edge(edges[i + 1]) + ")";
        }
    }
    return "≥" + format_edge(edges.back());
}

std::map<std::string, std::vector<std::string>> bucket_by_complexity(
    const std::vector<PlanningProblem>& records, const std::string& attr,
    const std::vector<double>& edges) {
    if (edges.empty()) throw PreconditionError("bucket_by_complexity: edges are empty");
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i] < edges[i + 1])) {
            throw PreconditionError("bucket_by_complexity: edges must be strictly increasing");
        }
    }
    std::map<std::string, std::vector<std::string>> buckets;
    for (const auto& r : records) {
        auto it = r.complexity_attrs.find(attr);
        if (it == r.complexity_attrs.end()) {
            buckets["unknown"].push_back(r.id);
        } else {
            buckets[bucket_label_for(it->second, edges)].push_back(r.id);
        }
    }
    return buckets;
}

}  // namespace planforge::metrics
