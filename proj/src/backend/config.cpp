#include "traceforge/backend/config.hpp"

#include "traceforge/core/errors.hpp"

namespace traceforge {
namespace {

template <typename T>
void read_if_present(const Json& j, const char* field, T& out) {
    if (j.is_object() && j.contains(field)) out = j.at(field).get<T>();
}

}  // namespace

void validate_backend_config(const BackendConfig& cfg) {
    if (cfg.timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
    if (cfg.max_retries < 0) throw ConfigError("max_retries must be non-negative");
    if (cfg.max_concurrent_requests < 1) throw ConfigError("max_concurrent_requests must be at least 1");
}

Json backend_config_to_json(const BackendConfig& cfg) {
    Json j;
    j["endpoint_url"] = cfg.endpoint_url;
    j["model_name"] = cfg.model_name;
    j["api_key_env_var"] = cfg.api_key_env_var;
    j["timeout_ms"] = cfg.timeout_ms;
    j["max_retries"] = cfg.max_retries;
    j["max_concurrent_requests"] = cfg.max_concurrent_requests;
    return j;
}

BackendConfig backend_config_from_json(const Json& j) {
    BackendConfig cfg;
    read_if_present(j, "endpoint_url", cfg.endpoint_url);
    read_if_present(j, "model_name", cfg.model_name);
    read_if_present(j, "api_key_env_var", cfg.api_key_env_var);
    read_if_present(j, "timeout_ms", cfg.timeout_ms);
    read_if_present(j, "max_retries", cfg.max_retries);
    read_if_present(j, "max_concurrent_requests", cfg.max_concurrent_requests);
    validate_backend_config(cfg);
    return cfg;
}

Json retriever_config_to_json(const RetrieverConfig& cfg) {
    Json j;
    j["endpoint_url"] = cfg.endpoint_url;
    j["timeout_ms"] = cfg.timeout_ms;
    j["max_retries"] = cfg.max_retries;
    return j;
}

RetrieverConfig retriever_config_from_json(const Json& j) {
    RetrieverConfig cfg;
    read_if_present(j, "endpoint_url", cfg.endpoint_url);
    read_if_present(j, "timeout_ms", cfg.timeout_ms);
    read_if_present(j, "max_retries", cfg.max_retries);
    if (cfg.timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
    if (cfg.max_retries < 0) throw ConfigError("max_retries must be non-negative");
    return cfg;
}

void validate_generation_request(const GenerationRequest& req) {
    if (req.n_samples < 1) throw ValidationError("n_samples must be at least 1");
    if (req.temperature < 0.0) throw ValidationError("temperature must be non-negative");
    if (req.max_output_tokens < 1) throw ValidationError("max_output_tokens must be at least 1");
    if (req.chain_context.empty()) throw ValidationError("empty prompt");
}

}  // namespace traceforge
