#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cotmetrics/backends/backend.hpp"
#include "cotmetrics/error.hpp"

namespace cotmetrics::backends {

namespace detail {

inline double backoff_jitter() {
    thread_local std::mt19937 rng{std::random_device{}()};
    return std::uniform_real_distribution<double>(0.5, 1.5)(rng);
}

/// JSON-over-HTTP POST with exponential backoff. Rate-limit and server errors
/// retry; a server-provided Retry-After delay is honored when present.
class JsonHttpClient {
public:
    JsonHttpClient(std::string endpoint_url, std::string api_key, double timeout_seconds,
                   RetryPolicy retry)
        : endpoint_url_(std::move(endpoint_url)), api_key_(std::move(api_key)), retry_(retry),
          client_(endpoint_url_) {
        auto timeout = std::chrono::milliseconds(static_cast<long>(timeout_seconds * 1000));
        client_.set_connection_timeout(timeout);
        client_.set_read_timeout(timeout);
        client_.set_write_timeout(timeout);
        if (!api_key_.empty()) client_.set_bearer_token_auth(api_key_);
    }

    nlohmann::json post(const std::string& path, const nlohmann::json& body) {
        std::string last_failure;
        for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
            if (attempt > 0) std::this_thread::sleep_for(backoff_delay(attempt));
            httplib::Result res = [&] {
                std::lock_guard lock(mutex_);
                return client_.Post(path, body.dump(), "application/json");
            }();
            if (!res) {
                last_failure = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                auto parsed = nlohmann::json::parse(res->body, nullptr, false);
                if (parsed.is_discarded())
                    throw error(errc::backend_unavailable,
                                endpoint_url_ + path + " returned unparseable JSON");
                return parsed;
            }
            if (res->status == 429 || res->status >= 500) {
                last_failure = "HTTP " + std::to_string(res->status);
                if (res->has_header("Retry-After")) {
                    retry_after_seconds_ = std::atof(res->get_header_value("Retry-After").c_str());
                }
                continue;
            }
            throw error(errc::backend_unavailable, endpoint_url_ + path + " returned HTTP " +
                                                       std::to_string(res->status) + ": " + res->body);
        }
        throw error(errc::backend_unavailable, endpoint_url_ + path + " failed after " +
                                                   std::to_string(retry_.max_retries + 1) +
                                                   " attempts (" + last_failure + ")");
    }

    bool reachable() {
        using clock = std::chrono::steady_clock;
        std::lock_guard lock(mutex_);
        auto now = clock::now();
        if (last_probe_ && now - *last_probe_ < std::chrono::seconds(5)) return last_probe_result_;
        httplib::Client probe(endpoint_url_);
        probe.set_connection_timeout(std::chrono::seconds(2));
        probe.set_read_timeout(std::chrono::seconds(2));
        auto res = probe.Get("/v1/models");
        last_probe_ = now;
        last_probe_result_ = static_cast<bool>(res);
        return last_probe_result_;
    }

    const std::string& endpoint_url() const { return endpoint_url_; }

private:
    std::chrono::milliseconds backoff_delay(int attempt) {
        double seconds;
        if (retry_after_seconds_ > 0) {
            seconds = retry_after_seconds_;
            retry_after_seconds_ = 0;
        } else {
            seconds = retry_.backoff_base_seconds * std::pow(2.0, attempt - 1) * backoff_jitter();
        }
        return std::chrono::milliseconds(static_cast<long>(seconds * 1000));
    }

    std::string endpoint_url_;
    std::string api_key_;
    RetryPolicy retry_;
    double retry_after_seconds_ = 0;
    std::mutex mutex_;
    httplib::Client client_;
    std::optional<std::chrono::steady_clock::time_point> last_probe_;
    bool last_probe_result_ = false;
};

inline std::string resolve_api_key(const std::string& env_name) {
    if (env_name.empty()) return "";
    const char* value = std::getenv(env_name.c_str());
    if (value == nullptr)
        throw error(errc::config_error, "API key environment variable " + env_name + " is not set");
    return value;
}

} // namespace detail

/// Scores fixed continuations via the OpenAI-compatible completions endpoint
/// with echoed prompt log-probabilities (the contract vLLM and similar
/// servers implement): the prompt is context + answer, and the answer units
/// are the echoed tokens whose text offset falls inside the answer region.
class HttpScoringBackend : public ScoringBackend {
public:
    explicit HttpScoringBackend(const ScoringBackendConfig& config)
        : config_(config), client_(config.endpoint_url, detail::resolve_api_key(config.api_key_env),
                                   config.request_timeout_seconds, config.retry) {
        config_.validate();
    }

    std::vector<double> answer_logprobs(const ScoringQuery& query) override {
        nlohmann::json body{
            {"model", config_.model_name}, {"prompt", query.context + query.answer},
            {"max_tokens", 0},             {"echo", true},
            {"logprobs", 0},               {"temperature", 0},
        };
        nlohmann::json reply = client_.post("/v1/completions", body);
        if (!reply.contains("choices") || reply["choices"].empty())
            throw error(errc::backend_unavailable, "scoring reply has no choices");
        const auto& choice = reply["choices"][0];
        if (!choice.contains("logprobs") || choice["logprobs"].is_null())
            throw error(errc::scoring_unsupported,
                        "backend did not return log-probabilities; echo+logprobs unsupported");
        const auto& lp = choice["logprobs"];
        const auto& token_logprobs = lp.at("token_logprobs");
        const auto& offsets = lp.at("text_offset");
        std::vector<double> result;
        for (size_t i = 0; i < token_logprobs.size() && i < offsets.size(); ++i) {
            if (offsets[i].get<size_t>() < query.context.size()) continue;
            if (token_logprobs[i].is_null())
                throw error(errc::scoring_unsupported, "missing log-probability in answer region");
            result.push_back(token_logprobs[i].get<double>());
        }
        if (result.empty())
            throw error(errc::scoring_unsupported, "backend scored no tokens in the answer region");
        return result;
    }

    std::string identity() const override {
        return "openai-completions:" + client_.endpoint_url() + ":" + config_.model_name;
    }

    bool reachable() override { return client_.reachable(); }

private:
    ScoringBackendConfig config_;
    detail::JsonHttpClient client_;
};

/// Chat completions against an OpenAI-compatible endpoint.
class HttpChatBackend : public ChatBackend {
public:
    HttpChatBackend(std::string endpoint_url, std::string model_name, std::string api_key_env,
                    double timeout_seconds, RetryPolicy retry)
        : model_name_(std::move(model_name)),
          client_(std::move(endpoint_url), detail::resolve_api_key(api_key_env), timeout_seconds,
                  retry) {}

    explicit HttpChatBackend(const VerifierBackendConfig& config)
        : HttpChatBackend(config.endpoint_url, config.model_name, config.api_key_env,
                          config.request_timeout_seconds, config.retry) {
        config.validate();
    }

    std::string chat_completion(const nlohmann::json& messages,
                                const nlohmann::json& decoding_params) override {
        nlohmann::json body = decoding_params.is_object() ? decoding_params
                                                          : nlohmann::json::object();
        body["model"] = model_name_;
        body["messages"] = messages;
        nlohmann::json reply = client_.post("/v1/chat/completions", body);
        if (!reply.contains("choices") || reply["choices"].empty())
            throw error(errc::backend_unavailable, "chat reply has no choices");
        return reply["choices"][0].at("message").at("content").get<std::string>();
    }

    std::string identity() const override {
        return "openai-chat:" + client_.endpoint_url() + ":" + model_name_;
    }

    bool reachable() override { return client_.reachable(); }

private:
    std::string model_name_;
    detail::JsonHttpClient client_;
};

} // namespace cotmetrics::backends
