#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace dialnorm::http {

/// "scheme://host[:port]" plus the request path.
struct Url {
    std::string origin;
    std::string path;
};

/// Throws ConfigError for anything that is not an absolute http(s) URL.
Url parse_url(const std::string& url);

struct Response {
    int status = 0;
    std::string body;
    /// Value of a Retry-After header in seconds, or -1.
    double retry_after = -1.0;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// One POST with a JSON body. Connection-level failures throw
/// TransportError(1, ...); any HTTP status is returned to the caller.
Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   std::chrono::milliseconds timeout);

}  // namespace dialnorm::http
