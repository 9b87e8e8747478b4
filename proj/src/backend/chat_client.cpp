#include "traceforge/backend/chat_client.hpp"

#include <cstdlib>

#include "traceforge/backend/http.hpp"
#include "traceforge/core/errors.hpp"

namespace traceforge {

ChatClient::ChatClient(BackendConfig config, std::shared_ptr<RequestLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
    validate_backend_config(config_);
    if (config_.endpoint_url.empty()) throw ConfigError("chat backend has no endpoint_url");
    if (!config_.api_key_env_var.empty()) {
        const char* key = std::getenv(config_.api_key_env_var.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("environment variable " + config_.api_key_env_var + " is not set");
        }
        api_key_ = key;
    }
}

std::vector<std::string> ChatClient::complete(const GenerationRequest& request) {
    validate_generation_request(request);
    std::vector<std::string> out = request_batch(request, request.n_samples);
    while (static_cast<int>(out.size()) < request.n_samples) {
        std::vector<std::string> extra = request_batch(request, 1);
        out.insert(out.end(), extra.begin(), extra.end());
    }
    if (static_cast<int>(out.size()) > request.n_samples) out.resize(request.n_samples);
    return out;
}

std::vector<std::string> ChatClient::request_batch(const GenerationRequest& request, int n) {
    Json body;
    body["model"] = config_.model_name;
    body["messages"] = Json::array({Json{{"role", "user"}, {"content", request.chain_context}}});
    body["temperature"] = request.temperature;
    body["n"] = n;
    body["max_tokens"] = request.max_output_tokens;
    if (!request.stop_sequences.empty()) body["stop"] = request.stop_sequences;

    std::vector<std::pair<std::string, std::string>> headers;
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    HttpTarget target = split_url(config_.endpoint_url);
    target.path += "/chat/completions";
    PostSpec spec{config_.timeout_ms, config_.max_retries};
    std::string what = "chat completion (" + request.prompt_template_id + ")";

    RequestLimiter::Guard guard(limiter_.get());
    Json response = http_post_json(target, headers, body, spec, what);

    if (!response.contains("choices") || !response.at("choices").is_array() ||
        response.at("choices").empty()) {
        throw BackendError(what + ": response has no choices");
    }
    std::vector<std::string> out;
    for (const Json& choice : response.at("choices")) {
        if (!choice.contains("message") || !choice.at("message").contains("content") ||
            !choice.at("message").at("content").is_string()) {
            throw BackendError(what + ": choice has no message content");
        }
        out.push_back(choice.at("message").at("content").get<std::string>());
    }
    return out;
}

}  // namespace traceforge
