#include "traceforge/backend/http.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <httplib.h>

#include "traceforge/core/errors.hpp"

namespace traceforge {
namespace {

std::string truncate(const std::string& text, std::size_t limit = 200) {
    if (text.size() <= limit) return text;
    return text.substr(0, limit) + "...";
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpTarget split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos || (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0)) {
        throw ConfigError("endpoint URL must start with http:// or https://: '" + url + "'");
    }
    std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, ""};
    std::string path = url.substr(slash);
    if (path == "/") path = "";
    return {url.substr(0, slash), path};
}

Json http_post_json(const HttpTarget& target,
                    const std::vector<std::pair<std::string, std::string>>& headers, const Json& body,
                    const PostSpec& spec, const std::string& what) {
    std::string payload = body.dump();
    std::string last_error;
    int attempts = spec.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            int backoff_ms = std::min(100 << (attempt - 1), 2000);
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        }
        httplib::Client client(target.base);
        client.set_connection_timeout(std::chrono::milliseconds(spec.timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(spec.timeout_ms));
        client.set_write_timeout(std::chrono::milliseconds(spec.timeout_ms));
        httplib::Headers request_headers;
        for (const auto& [key, value] : headers) request_headers.emplace(key, value);
        auto res = client.Post(target.path.empty() ? "/" : target.path, request_headers, payload,
                               "application/json");
        if (!res) {
            last_error = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            try {
                return Json::parse(res->body);
            } catch (const Json::parse_error& e) {
                throw BackendError(what + ": response is not valid JSON: " + std::string(e.what()));
            }
        }
        std::string detail = "status " + std::to_string(res->status) + ": " + truncate(res->body);
        if (!retryable_status(res->status)) throw BackendError(what + ": " + detail);
        last_error = detail;
    }
    throw BackendError(what + ": giving up after " + std::to_string(attempts) + " attempts, last: " + last_error);
}

}  // namespace traceforge
