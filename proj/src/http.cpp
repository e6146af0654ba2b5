#include <httplib.h>

#include "dialnorm/http.hpp"

#include "dialnorm/error.hpp"

#include <cstdlib>

namespace dialnorm::http {

Url parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("not an absolute URL: '" + url + "'");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme '" + scheme + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    Url out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (out.origin.size() <= scheme_end + 3) throw ConfigError("URL has no host: '" + url + "'");
    return out;
}

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   std::chrono::milliseconds timeout) {
    httplib::Client client(url.origin);
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);
    auto res = client.Post(url.path, hdrs, body, "application/json");
    if (!res) {
        throw TransportError(1, "POST " + url.origin + url.path + " failed: " + httplib::to_string(res.error()));
    }
    Response out;
    out.status = res->status;
    out.body = res->body;
    if (res->has_header("Retry-After")) {
        const std::string v = res->get_header_value("Retry-After");
        char* end = nullptr;
        const double secs_after = std::strtod(v.c_str(), &end);
        if (end != v.c_str()) out.retry_after = secs_after;
    }
    return out;
}

}  // namespace dialnorm::http
