#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotmetrics/backends/cache.hpp"
#include "cotmetrics/error.hpp"

namespace cotmetrics::backends {

struct RetryPolicy {
    int max_retries = 3;
    double backoff_base_seconds = 0.5;
};

struct ScoringBackendConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env; // environment variable holding the key
    double request_timeout_seconds = 60.0;
    int max_parallel_requests = 4;
    RetryPolicy retry;

    void validate() const {
        if (max_parallel_requests < 1)
            throw error(errc::config_error, "max_parallel_requests must be >= 1");
        if (request_timeout_seconds <= 0)
            throw error(errc::config_error, "request_timeout_seconds must be > 0");
    }
};

struct VerifierBackendConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env;
    double request_timeout_seconds = 60.0;
    int max_parallel_requests = 4;
    double temperature = 0.0; // greedy decoding, always
    RetryPolicy retry;

    void validate() const {
        if (temperature != 0.0)
            throw error(errc::config_error, "verifier decoding must be greedy (temperature 0)");
        if (max_parallel_requests < 1)
            throw error(errc::config_error, "max_parallel_requests must be >= 1");
        if (request_timeout_seconds <= 0)
            throw error(errc::config_error, "request_timeout_seconds must be > 0");
    }
};

/// One forced-answer scoring request: a fully rendered context and the answer
/// continuation to score under it.
struct ScoringQuery {
    std::string context;
    std::string answer;
};

/// Scores fixed continuations, returning one log-probability per unit of the
/// answer. Units are whatever the backend tokenizes the answer into.
class ScoringBackend {
public:
    virtual ~ScoringBackend() = default;
    virtual std::vector<double> answer_logprobs(const ScoringQuery& query) = 0;
    /// Backend-reported tokenization of arbitrary text, when available.
    virtual std::optional<std::vector<std::string>> tokenize(std::string_view) { return std::nullopt; }
    virtual std::string identity() const = 0;
    virtual bool reachable() { return true; }
};

/// Issues chat completions (verifier calls and trace sampling).
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string chat_completion(const nlohmann::json& messages,
                                        const nlohmann::json& decoding_params) = 0;
    virtual std::string identity() const = 0;
    virtual bool reachable() { return true; }
};

/// Bounds the number of concurrently executing backend calls.
class Limiter {
public:
    explicit Limiter(int capacity) : capacity_(capacity) {}

    class Guard {
    public:
        explicit Guard(Limiter& l) : limiter_(l) {
            std::unique_lock lock(limiter_.mutex_);
            limiter_.cv_.wait(lock, [&] { return limiter_.in_use_ < limiter_.capacity_; });
            ++limiter_.in_use_;
        }
        ~Guard() {
            {
                std::lock_guard lock(limiter_.mutex_);
                --limiter_.in_use_;
            }
            limiter_.cv_.notify_one();
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        Limiter& limiter_;
    };

private:
    friend class Guard;
    std::mutex mutex_;
    std::condition_variable cv_;
    int capacity_;
    int in_use_ = 0;
};

/// Scoring backend behind the response cache. Hits bypass the inner backend
/// entirely, including its concurrency limit.
class CachedScoringBackend : public ScoringBackend {
public:
    CachedScoringBackend(std::shared_ptr<ScoringBackend> inner, std::shared_ptr<ResponseCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    std::vector<double> answer_logprobs(const ScoringQuery& query) override {
        nlohmann::json payload{{"op", "score"}, {"context", query.context}, {"answer", query.answer}};
        CacheKey key = CacheKey::make(inner_->identity(), payload.dump());
        if (auto hit = cache_->get(key))
            return nlohmann::json::parse(*hit).get<std::vector<double>>();
        auto logprobs = inner_->answer_logprobs(query);
        cache_->put(key, nlohmann::json(logprobs).dump());
        return logprobs;
    }

    std::optional<std::vector<std::string>> tokenize(std::string_view text) override {
        return inner_->tokenize(text);
    }
    std::string identity() const override { return inner_->identity(); }
    bool reachable() override { return inner_->reachable(); }

private:
    std::shared_ptr<ScoringBackend> inner_;
    std::shared_ptr<ResponseCache> cache_;
};

class CachedChatBackend : public ChatBackend {
public:
    CachedChatBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<ResponseCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    std::string chat_completion(const nlohmann::json& messages,
                                const nlohmann::json& decoding_params) override {
        nlohmann::json payload{{"op", "chat"}, {"messages", messages}, {"params", decoding_params}};
        CacheKey key = CacheKey::make(inner_->identity(), payload.dump());
        if (auto hit = cache_->get(key)) return *hit;
        std::string reply = inner_->chat_completion(messages, decoding_params);
        cache_->put(key, reply);
        return reply;
    }

    std::string identity() const override { return inner_->identity(); }
    bool reachable() override { return inner_->reachable(); }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<ResponseCache> cache_;
};

/// Scoring backend behind a shared in-flight limiter.
class LimitedScoringBackend : public ScoringBackend {
public:
    LimitedScoringBackend(std::shared_ptr<ScoringBackend> inner, std::shared_ptr<Limiter> limiter)
        : inner_(std::move(inner)), limiter_(std::move(limiter)) {}

    std::vector<double> answer_logprobs(const ScoringQuery& query) override {
        Limiter::Guard guard(*limiter_);
        return inner_->answer_logprobs(query);
    }

    std::optional<std::vector<std::string>> tokenize(std::string_view text) override {
        return inner_->tokenize(text);
    }
    std::string identity() const override { return inner_->identity(); }
    bool reachable() override { return inner_->reachable(); }

private:
    std::shared_ptr<ScoringBackend> inner_;
    std::shared_ptr<Limiter> limiter_;
};

class LimitedChatBackend : public ChatBackend {
public:
    LimitedChatBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<Limiter> limiter)
        : inner_(std::move(inner)), limiter_(std::move(limiter)) {}

    std::string chat_completion(const nlohmann::json& messages,
                                const nlohmann::json& decoding_params) override {
        Limiter::Guard guard(*limiter_);
        return inner_->chat_completion(messages, decoding_params);
    }

    std::string identity() const override { return inner_->identity(); }
    bool reachable() override { return inner_->reachable(); }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<Limiter> limiter_;
};

} // namespace cotmetrics::backends
