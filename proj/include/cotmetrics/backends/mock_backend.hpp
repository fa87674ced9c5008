#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cotmetrics/backends/backend.hpp"
#include "cotmetrics/backends/digest.hpp"
#include "cotmetrics/text.hpp"

namespace cotmetrics::backends {

/// Deterministic scoring backend for tests and offline runs. A probability
/// function maps each query to the per-unit answer probability; the mock
/// reports one log-probability per whitespace word of the answer.
class MockScoringBackend : public ScoringBackend {
public:
    using ProbFn = std::function<double(const ScoringQuery&)>;

    MockScoringBackend(ProbFn prob_fn, std::string identity)
        : prob_fn_(std::move(prob_fn)), identity_(std::move(identity)) {}

    std::vector<double> answer_logprobs(const ScoringQuery& query) override {
        InFlightGuard guard(*this);
        ++calls_;
        if (call_delay_.count() > 0) std::this_thread::sleep_for(call_delay_);
        double p = prob_fn_(query);
        size_t n = text::split_whitespace(query.answer).size();
        if (n == 0) n = 1;
        return std::vector<double>(n, std::log(p));
    }

    std::optional<std::vector<std::string>> tokenize(std::string_view text) override {
        return text::split_whitespace(text);
    }

    std::string identity() const override { return "mock-scoring:" + identity_; }

    size_t calls() const { return calls_.load(); }
    int max_in_flight() const { return max_in_flight_.load(); }
    void set_call_delay(std::chrono::milliseconds d) { call_delay_ = d; }

private:
    struct InFlightGuard {
        explicit InFlightGuard(MockScoringBackend& b) : backend(b) {
            int now = ++backend.in_flight_;
            int seen = backend.max_in_flight_.load();
            while (now > seen && !backend.max_in_flight_.compare_exchange_weak(seen, now)) {}
        }
        ~InFlightGuard() { --backend.in_flight_; }
        MockScoringBackend& backend;
    };

    ProbFn prob_fn_;
    std::string identity_;
    std::atomic<size_t> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    std::chrono::milliseconds call_delay_{0};
};

/// Per-unit probability fixed at p for every query.
inline MockScoringBackend::ProbFn constant_prob(double p) {
    return [p](const ScoringQuery&) { return p; };
}

/// Deterministic pseudo-random probability in (0.05, 0.95), content-addressed
/// on the query. Stable across runs, processes, and parallelism levels.
inline MockScoringBackend::ProbFn hashed_prob() {
    return [](const ScoringQuery& q) {
        std::string digest = sha256_hex(q.context + "\x1f" + q.answer);
        unsigned long v = std::stoul(digest.substr(0, 8), nullptr, 16);
        return 0.05 + 0.9 * (static_cast<double>(v) / 4294967295.0);
    };
}

/// Deterministic chat backend; the reply function sees the full message list
/// and decoding parameters.
class MockChatBackend : public ChatBackend {
public:
    using ReplyFn = std::function<std::string(const nlohmann::json& messages,
                                              const nlohmann::json& decoding_params)>;

    MockChatBackend(ReplyFn reply_fn, std::string identity)
        : reply_fn_(std::move(reply_fn)), identity_(std::move(identity)) {}

    std::string chat_completion(const nlohmann::json& messages,
                                const nlohmann::json& decoding_params) override {
        ++calls_;
        {
            std::lock_guard lock(mutex_);
            last_request_ = nlohmann::json{{"messages", messages}, {"params", decoding_params}};
        }
        return reply_fn_(messages, decoding_params);
    }

    std::string identity() const override { return "mock-chat:" + identity_; }

    size_t calls() const { return calls_.load(); }
    nlohmann::json last_request() const {
        std::lock_guard lock(mutex_);
        return last_request_;
    }

private:
    ReplyFn reply_fn_;
    std::string identity_;
    std::atomic<size_t> calls_{0};
    mutable std::mutex mutex_;
    nlohmann::json last_request_;
};

/// Reply function keyed only on the last user message content.
inline MockChatBackend::ReplyFn prompt_keyed_reply(
    std::function<std::string(const std::string& prompt)> fn) {
    return [fn = std::move(fn)](const nlohmann::json& messages, const nlohmann::json&) {
        std::string prompt;
        for (const auto& m : messages)
            if (m.value("role", "") == "user") prompt = m.value("content", "");
        return fn(prompt);
    };
}

/// Built-in verifier mock used by --mock-backends runs: echoes the final
/// whitespace token of the reasoning section, or the no-answer sentinel when
/// the reasoning is empty. Identical answers with and without the question.
inline MockChatBackend::ReplyFn echo_last_token_verifier() {
    return prompt_keyed_reply([](const std::string& prompt) {
        constexpr std::string_view marker = "Reasoning Traces:\n";
        size_t pos = prompt.rfind(marker);
        std::string reasoning = pos == std::string::npos ? prompt : prompt.substr(pos + marker.size());
        auto words = text::split_whitespace(reasoning);
        if (words.empty()) return std::string("no answer found");
        return "<answer>" + words.back() + "</answer>";
    });
}

} // namespace cotmetrics::backends
