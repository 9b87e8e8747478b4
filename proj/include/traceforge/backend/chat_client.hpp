#pragma once

#include <memory>
#include <string>
#include <vector>

#include "traceforge/backend/config.hpp"
#include "traceforge/util/limiter.hpp"

namespace traceforge {

// OpenAI-compatible chat-completions client. Asks for n samples in one
// request and tops up with single-sample calls when the server returns
// fewer (some implementations ignore n). Every attempt honors the shared
// request limiter and the configured timeout/retry budget.
class ChatClient {
public:
    ChatClient(BackendConfig config, std::shared_ptr<RequestLimiter> limiter);

    std::vector<std::string> complete(const GenerationRequest& request);

private:
    std::vector<std::string> request_batch(const GenerationRequest& request, int n);

    BackendConfig config_;
    std::string api_key_;
    std::shared_ptr<RequestLimiter> limiter_;
};

}  // namespace traceforge
