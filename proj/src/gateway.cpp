#include "planforge/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

namespace planforge::gateway {

ScriptedBackend::ScriptedBackend(ScriptedBehavior behavior, std::uint64_t seed)
    : behavior_(std::move(behavior)), seed_(seed), hit_counts_(behavior_.rules.size(), 0) {}

std::string ScriptedBackend::complete(const GenerationRequest& req) {
    std::lock_guard lock(mutex_);
    for (size_t i = 0; i < behavior_.rules.size(); ++i) {
        const auto& rule = behavior_.rules[i];
        bool hit = false;
        if (rule.is_regex) {
            hit = std::regex_search(req.prompt, std::regex(rule.matcher));
        } else {
            hit = req.prompt.find(rule.matcher) != std::string::npos;
        }
        if (!hit) continue;
        if (rule.responses.empty()) return behavior_.default_response;
        const std::uint64_t idx = (seed_ + hit_counts_[i]++) % rule.responses.size();
        return rule.responses[idx];
    }
    return behavior_.default_response;
}

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.api_key_env.empty()) {
        throw ConfigError("http backend requires api_key_env");
    }
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("environment variable '" + cfg_.api_key_env + "' is not set");
    }
    api_key_ = key;
}

std::string HttpBackend::post_once(const GenerationRequest& req) {
    httplib::Client client(cfg_.endpoint);
    client.set_connection_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(cfg_.timeout_ms));

    std::string path;
    json body;
    httplib::Headers headers;
    if (cfg_.kind == BackendKind::HttpOpenAiCompatible) {
        path = "/v1/chat/completions";
        body = json{{"model", cfg_.model_name},
                    {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
                    {"temperature", req.temperature},
                    {"max_tokens", req.max_output}};
        headers.emplace("Authorization", "Bearer " + api_key_);
    } else {
        path = "/v1beta/models/" + cfg_.model_name + ":generateContent?key=" + api_key_;
        body = json{{"contents",
                     json::array({json{{"parts", json::array({json{{"text", req.prompt}}})}}})},
                    {"generationConfig",
                     json{{"temperature", req.temperature}, {"maxOutputTokens", req.max_output}}}};
    }

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransportError("connection to " + cfg_.endpoint + " failed: " +
                             httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
        throw AuthError("authentication rejected (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status >= 500) {
        throw TransportError("server error HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw TransportError("unexpected HTTP " + std::to_string(res->status) + ": " + res->body);
    }

    const json reply = json::parse(res->body);
    try {
        if (cfg_.kind == BackendKind::HttpOpenAiCompatible) {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        }
        return reply.at("candidates")
            .at(0)
            .at("content")
            .at("parts")
            .at(0)
            .at("text")
            .get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed completion body: ") + e.what());
    }
}

std::string HttpBackend::complete(const GenerationRequest& req) {
    int attempt = 0;
    for (;;) {
        try {
            return post_once(req);
        } catch (const TransportError&) {
            if (attempt >= cfg_.max_retries) throw;
            ++attempt;
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.retry_backoff_ms));
        }
    }
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg, std::uint64_t seed) {
    if (cfg.kind == BackendKind::Scripted) {
        return std::make_shared<ScriptedBackend>(cfg.scripted, seed);
    }
    return std::make_shared<HttpBackend>(cfg);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, RunTranscript& transcript, int call_ceiling)
    : backend_(std::move(backend)), transcript_(transcript), call_ceiling_(call_ceiling) {}

std::string Gateway::generate(const GenerationRequest& req) {
    if (req.prompt.empty()) throw PreconditionError("generate: prompt is empty");
    if (transcript_.llm_call_count() >= call_ceiling_) {
        throw BudgetExceededError("per-problem LLM call ceiling (" +
                                  std::to_string(call_ceiling_) + ") reached");
    }
    const std::string response = backend_->complete(req);
    const bool is_verification = req.tag.rfind("verify", 0) == 0;
    json payload{{"tag", req.tag},
                 {"temperature", req.temperature},
                 {"prompt", req.prompt},
                 {"response", response}};
    transcript_.append(is_verification ? EventKind::Verification : EventKind::Generation,
                       payload.dump());
    return response;
}

std::vector<std::string> Gateway::sample_n(const GenerationRequest& req, int n) {
    if (n < 1) throw PreconditionError("sample_n: n must be >= 1");
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.push_back(generate(req));
    }
    return out;
}

ScriptedBehavior scripted_behavior_from_json(const json& j) {
    ScriptedBehavior b;
    b.default_response = j.value("default_response", "");
    if (j.contains("rules")) {
        for (const auto& rj : j["rules"]) {
            ScriptedRule rule;
            rule.matcher = rj.at("match").get<std::string>();
            rule.is_regex = rj.value("regex", false);
            if (rj.contains("responses")) {
                rule.responses = rj["responses"].get<std::vector<std::string>>();
            } else if (rj.contains("response")) {
                rule.responses = {rj["response"].get<std::string>()};
            }
            b.rules.push_back(std::move(rule));
        }
    }
    return b;
}

BackendConfig backend_config_from_json(const json& j) {
    BackendConfig cfg;
    const std::string kind = j.value("kind", "scripted");
    if (kind == "scripted") {
        cfg.kind = BackendKind::Scripted;
    } else if (kind == "http_openai_compatible") {
        cfg.kind = BackendKind::HttpOpenAiCompatible;
    } else if (kind == "http_gemini") {
        cfg.kind = BackendKind::HttpGemini;
    } else {
        throw ConfigError("unknown backend kind: " + kind);
    }
    cfg.endpoint = j.value("endpoint", "");
    cfg.model_name = j.value("model_name", "");
    cfg.api_key_env = j.value("api_key_env", "");
    cfg.timeout_ms = j.value("timeout_ms", 60000);
    cfg.max_retries = j.value("max_retries", 3);
    cfg.retry_backoff_ms = j.value("retry_backoff_ms", 500);
    if (j.contains("scripted")) cfg.scripted = scripted_behavior_from_json(j["scripted"]);
    return cfg;
}

}  // namespace planforge::gateway
