#pragma once

#include <string>
#include <vector>

#include "traceforge/core/json_codec.hpp"

namespace traceforge {

// One remote endpoint. The API key is read from the environment variable
// named here at client construction; the key itself never appears in
// config files, logs, manifests, or errors.
struct BackendConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env_var;
    int timeout_ms = 30000;
    int max_retries = 2;
    int max_concurrent_requests = 8;
};

void validate_backend_config(const BackendConfig& cfg);
Json backend_config_to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const Json& j);

struct RetrieverConfig {
    std::string endpoint_url;  // empty selects the in-memory corpus retriever
    int timeout_ms = 30000;
    int max_retries = 2;
};

Json retriever_config_to_json(const RetrieverConfig& cfg);
RetrieverConfig retriever_config_from_json(const Json& j);

struct GenerationRequest {
    std::string prompt_template_id;
    std::string chain_context;  // fully rendered prompt text
    double temperature = 0.0;
    int n_samples = 1;
    int max_output_tokens = 256;
    std::vector<std::string> stop_sequences;
};

void validate_generation_request(const GenerationRequest& req);

}  // namespace traceforge
