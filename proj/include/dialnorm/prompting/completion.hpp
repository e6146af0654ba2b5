#pragma once

#include "dialnorm/http.hpp"
#include "dialnorm/prompting/prompt.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

namespace dialnorm::prompt {

struct Setup {
    std::string name;
    std::string endpoint;
    std::string model_id;
    ShotMode shot_mode = ShotMode::ThreeShot;
    bool rbn_enabled = true;
    double temperature = 0.0;
    int max_tokens = 256;

    /// ConfigError on an empty name/model, bad URL, negative temperature or
    /// non-positive max_tokens.
    void validate() const;
};

/// "GPT 3s+RBN", "GPT 3s", "Llama 3s+RBN", "Llama 9s". The Llama endpoint
/// comes from DIALNORM_LLAMA_ENDPOINT when set.
std::vector<Setup> canonical_setups();
/// Case-insensitive lookup in canonical_setups(); LookupError lists the names.
Setup canonical_setup(std::string_view name);

/// One file per completion at <dir>/<first two hex>/<digest>.txt.
/// Entries are never overwritten.
class CompletionCache {
public:
    explicit CompletionCache(std::filesystem::path dir);

    /// sha256 hex of model_id, temperature and prompt, NUL-separated.
    static std::string key(std::string_view model_id, double temperature, std::string_view prompt);

    std::filesystem::path path_for(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    /// Stores `value` unless an entry exists; returns the stored entry.
    std::string put(const std::string& key, const std::string& value);
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
};

/// Minimum spacing between request starts, shared by all callers.
class RateLimiter {
public:
    /// `per_second` <= 0 disables limiting.
    explicit RateLimiter(double per_second = 0.0);
    void acquire();

private:
    std::chrono::steady_clock::duration interval_;
    std::mutex mu_;
    std::chrono::steady_clock::time_point next_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{30000};
    std::chrono::milliseconds timeout{120000};
};

/// Raw chat completion for one prompt, no caching.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string chat(const Setup& setup, const std::string& prompt) = 0;
};

/// OpenAI-compatible /v1/chat/completions client. 429 and 5xx replies and
/// connection failures are retried with exponential backoff; other 4xx
/// replies fail at once. At most `max_in_flight` requests run concurrently.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(RetryPolicy retry = {}, std::string api_key = api_key_from_env(), double rate_per_second = 0.0,
                            int max_in_flight = 4);

    std::string chat(const Setup& setup, const std::string& prompt) override;

    /// DIALNORM_API_KEY, else OPENAI_API_KEY, else empty.
    static std::string api_key_from_env();
    static std::string request_body(const Setup& setup, const std::string& prompt);

private:
    RetryPolicy retry_;
    std::string api_key_;
    RateLimiter limiter_;
    std::counting_semaphore<1024> in_flight_;
};

/// Trims whitespace and a leading "Standard Greek:" echo. ContentError when
/// nothing is left.
std::string postprocess_completion(std::string_view raw);

/// Cache lookup, then client call on a miss. A null cache always calls out.
std::string complete(const Setup& setup, const std::string& prompt, CompletionCache* cache, ChatClient& client);

struct NormalizedOutput {
    std::string text;
    std::string prompt_digest;
    bool rbn_applied = false;
};

/// Optional rule-based pass, then prompt and complete. `rbn_applied` is true
/// when the rules changed the input.
NormalizedOutput normalize_one(const Setup& setup, const Region& region, const std::string& text, CompletionCache* cache,
                               ChatClient& client, const RuleBook& rules = default_rules());

}  // namespace dialnorm::prompt
