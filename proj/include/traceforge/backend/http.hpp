#pragma once

#include <string>
#include <utility>
#include <vector>

#include "traceforge/core/json_codec.hpp"

namespace traceforge {

struct HttpTarget {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading slash, possibly multi-segment
};

// Splits an http(s) URL into the client base and the request path.
HttpTarget split_url(const std::string& url);

struct PostSpec {
    int timeout_ms = 30000;
    int max_retries = 2;
};

// JSON POST with bounded retries: transport failures, HTTP 429, and 5xx
// are retried with exponential backoff; other non-200 statuses fail
// immediately. Errors carry `what` plus status context, never request
// headers, so credentials cannot leak into messages.
Json http_post_json(const HttpTarget& target,
                    const std::vector<std::pair<std::string, std::string>>& headers, const Json& body,
                    const PostSpec& spec, const std::string& what);

}  // namespace traceforge
