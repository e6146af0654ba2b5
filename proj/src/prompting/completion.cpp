#include "dialnorm/prompting/completion.hpp"

#include "dialnorm/digest.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace dialnorm::prompt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string unique_suffix() {
    static std::atomic<unsigned long> counter{0};
    std::ostringstream os;
    os << std::this_thread::get_id() << '.' << counter++;
    return os.str();
}

}  // namespace

void Setup::validate() const {
    if (name.empty()) throw ConfigError("setup needs a name");
    if (model_id.empty()) throw ConfigError("setup '" + name + "' needs a model_id");
    http::parse_url(endpoint);
    if (!(temperature >= 0.0)) throw ConfigError("setup '" + name + "': temperature must be >= 0");
    if (max_tokens < 1) throw ConfigError("setup '" + name + "': max_tokens must be positive");
}

std::vector<Setup> canonical_setups() {
    const std::string gpt_endpoint = env_or("DIALNORM_GPT_ENDPOINT", "https://api.openai.com/v1/chat/completions");
    const std::string llama_endpoint =
        env_or("DIALNORM_LLAMA_ENDPOINT", "http://localhost:8000/v1/chat/completions");
    const std::string gpt = "gpt-4o-2024-11-20";
    const std::string llama = env_or("DIALNORM_LLAMA_MODEL", "meta-llama/Llama-3.1-70B-Instruct");
    return {
        {"GPT 3s+RBN", gpt_endpoint, gpt, ShotMode::ThreeShot, true},
        {"GPT 3s", gpt_endpoint, gpt, ShotMode::ThreeShot, false},
        {"Llama 3s+RBN", llama_endpoint, llama, ShotMode::ThreeShot, true},
        {"Llama 9s", llama_endpoint, llama, ShotMode::NineShot, false},
    };
}

Setup canonical_setup(std::string_view name) {
    const auto wanted = lower_ascii(name);
    std::string names;
    for (auto& s : canonical_setups()) {
        if (lower_ascii(s.name) == wanted) return s;
        names += (names.empty() ? "" : ", ") + s.name;
    }
    throw LookupError("unknown setup '" + std::string(name) + "' (known: " + names + ")");
}

CompletionCache::CompletionCache(fs::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) throw ConfigError("cache directory must not be empty");
}

std::string CompletionCache::key(std::string_view model_id, double temperature, std::string_view prompt) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, temperature);
    std::string material(model_id);
    material += '\0';
    material.append(buf, res.ptr);
    material += '\0';
    material.append(prompt);
    return sha256_hex(material);
}

fs::path CompletionCache::path_for(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".txt");
}

std::optional<std::string> CompletionCache::get(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string CompletionCache::put(const std::string& key, const std::string& value) {
    const fs::path final_path = path_for(key);
    fs::create_directories(final_path.parent_path());
    const fs::path tmp = final_path.string() + ".tmp." + unique_suffix();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write cache entry " + tmp.string());
        out << value;
        if (!out.flush()) throw Error("cannot write cache entry " + tmp.string());
    }
    // A hard link publishes the entry atomically and fails if one exists,
    // so the first writer wins.
    std::error_code ec;
    fs::create_hard_link(tmp, final_path, ec);
    fs::remove(tmp);
    if (ec && ec != std::errc::file_exists) throw Error("cannot store cache entry: " + ec.message());
    auto stored = get(key);
    if (!stored) throw Error("cache entry vanished: " + final_path.string());
    return *stored;
}

RateLimiter::RateLimiter(double per_second)
    : interval_(per_second > 0.0 ? std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                       std::chrono::duration<double>(1.0 / per_second))
                                 : std::chrono::steady_clock::duration::zero()),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    if (interval_ == std::chrono::steady_clock::duration::zero()) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

HttpChatClient::HttpChatClient(RetryPolicy retry, std::string api_key, double rate_per_second, int max_in_flight)
    : retry_(retry), api_key_(std::move(api_key)), limiter_(rate_per_second), in_flight_(std::clamp(max_in_flight, 1, 1024)) {
    if (retry_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
}

std::string HttpChatClient::api_key_from_env() {
    return env_or("DIALNORM_API_KEY", env_or("OPENAI_API_KEY", ""));
}

std::string HttpChatClient::request_body(const Setup& setup, const std::string& prompt) {
    return json{{"model", setup.model_id},
                {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                {"temperature", setup.temperature},
                {"max_tokens", setup.max_tokens}}
        .dump();
}

std::string HttpChatClient::chat(const Setup& setup, const std::string& prompt) {
    const auto url = http::parse_url(setup.endpoint);
    const std::string body = request_body(setup, prompt);
    http::Headers headers;
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{in_flight_};

    std::string last_error;
    auto delay = retry_.base_delay;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(delay);
            delay = std::min(retry_.max_delay, std::chrono::duration_cast<std::chrono::milliseconds>(delay * retry_.multiplier));
        }
        limiter_.acquire();
        http::Response res;
        try {
            res = http::post_json(url, body, headers, retry_.timeout);
        } catch (const TransportError& e) {
            last_error = e.reason();
            spdlog::debug("attempt {} to {} failed: {}", attempt, setup.endpoint, last_error);
            continue;
        }
        if (res.status == 429 || res.status >= 500) {
            last_error = "HTTP " + std::to_string(res.status);
            if (res.retry_after > 0.0) {
                delay = std::max(delay, std::min(retry_.max_delay, std::chrono::milliseconds(static_cast<long long>(res.retry_after * 1000.0))));
            }
            spdlog::debug("attempt {} to {} got {}", attempt, setup.endpoint, last_error);
            continue;
        }
        if (res.status != 200) {
            throw TransportError(attempt, setup.endpoint + " answered HTTP " + std::to_string(res.status) + ": " +
                                              res.body.substr(0, 200));
        }
        const auto j = json::parse(res.body, nullptr, false);
        try {
            if (j.is_discarded()) throw ContentError("reply is not JSON");
            const auto& content = j.at("choices").at(0).at("message").at("content");
            if (!content.is_string()) throw ContentError("reply has no text content");
            return content.get<std::string>();
        } catch (const json::exception&) {
            throw ContentError("reply lacks choices[0].message.content");
        }
    }
    throw TransportError(retry_.max_attempts, setup.endpoint + ": " + last_error);
}

std::string postprocess_completion(std::string_view raw) {
    std::string s = unicode::trim(raw);
    constexpr std::string_view label = "Standard Greek:";
    if (s.starts_with(label)) s = unicode::trim(std::string_view(s).substr(label.size()));
    if (s.empty()) throw ContentError("empty completion");
    return s;
}

std::string complete(const Setup& setup, const std::string& prompt, CompletionCache* cache, ChatClient& client) {
    const std::string key = CompletionCache::key(setup.model_id, setup.temperature, prompt);
    if (cache) {
        if (auto hit = cache->get(key)) return *hit;
    }
    std::string text = postprocess_completion(client.chat(setup, prompt));
    return cache ? cache->put(key, text) : text;
}

NormalizedOutput normalize_one(const Setup& setup, const Region& region, const std::string& text, CompletionCache* cache,
                               ChatClient& client, const RuleBook& rules) {
    NormalizedOutput out;
    std::string input = text;
    if (setup.rbn_enabled) {
        input = normalize_rbn(rules, region, text);
        out.rbn_applied = input != unicode::nfc(text);
    }
    const std::string prompt = build_prompt(region, input, setup.shot_mode);
    out.prompt_digest = CompletionCache::key(setup.model_id, setup.temperature, prompt);
    out.text = complete(setup, prompt, cache, client);
    return out;
}

}  // namespace dialnorm::prompt
