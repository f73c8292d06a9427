#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "planforge/core.hpp"

namespace planforge::gateway {

/// A single text-generation request. Tags identify the issuing agent or
/// algorithm ("constraint", "verify.plan", "bon.sample", ...); tags starting
/// with "verify" are logged as verification events, everything else as
/// generation events.
struct GenerationRequest {
    std::string prompt;
    double temperature = 0.0;
    int max_output = 8192;
    std::string tag;
};

enum class BackendKind { HttpOpenAiCompatible, HttpGemini, Scripted };

/// One scripted rule: first rule whose matcher hits the prompt wins. A rule
/// may carry several responses; repeated hits rotate through them (offset by
/// the backend seed), which is how sample_n gets distinct candidates.
struct ScriptedRule {
    std::string matcher;
    bool is_regex = false;
    std::vector<std::string> responses;
};

struct ScriptedBehavior {
    std::vector<ScriptedRule> rules;
    std::string default_response;
};

struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    std::string endpoint;      // base URL for http kinds
    std::string model_name;
    std::string api_key_env;   // env var NAME; the key itself never lives in config
    int timeout_ms = 60000;
    int max_retries = 3;
    int retry_backoff_ms = 500;
    ScriptedBehavior scripted;
};

/// Completion provider. Implementations must be safe for concurrent calls.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const GenerationRequest& req) = 0;
};

class ScriptedBackend : public Backend {
public:
    ScriptedBackend(ScriptedBehavior behavior, std::uint64_t seed);
    std::string complete(const GenerationRequest& req) override;

private:
    ScriptedBehavior behavior_;
    std::uint64_t seed_;
    std::mutex mutex_;
    std::vector<std::uint64_t> hit_counts_;
};

class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig cfg);
    std::string complete(const GenerationRequest& req) override;

private:
    std::string post_once(const GenerationRequest& req);

    BackendConfig cfg_;
    std::string api_key_;
};

/// Builds a backend from config; resolves the API key env var for http kinds
/// (missing var is an error before any call goes out).
std::shared_ptr<Backend> make_backend(const BackendConfig& cfg, std::uint64_t seed);

/// Uniform entry point used by every agent and search. Owns the per-problem
/// call ceiling and writes one generation/verification event per logical call
/// into the transcript; transport retries never multiply the logical count.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, RunTranscript& transcript, int call_ceiling = 200);

    std::string generate(const GenerationRequest& req);
    std::vector<std::string> sample_n(const GenerationRequest& req, int n);

    RunTranscript& transcript() { return transcript_; }
    int call_ceiling() const { return call_ceiling_; }

private:
    std::shared_ptr<Backend> backend_;
    RunTranscript& transcript_;
    int call_ceiling_;
};

ScriptedBehavior scripted_behavior_from_json(const json& j);
BackendConfig backend_config_from_json(const json& j);

}  // namespace planforge::gateway
