#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cotmetrics/backends/backend.hpp"
#include "cotmetrics/error.hpp"
#include "cotmetrics/metrics/cir.hpp"
#include "cotmetrics/trace/templates.hpp"
#include "cotmetrics/trace/trace.hpp"
#include "cotmetrics/trace/truncation.hpp"

namespace cotmetrics::backends {

/// Context under which a truncated trace is forced to answer early: the
/// reasoning system prompt, the question, and a think segment closed off at
/// the prefix, with the answer tag opened so the original answer is the
/// continuation being scored.
inline std::string forced_answer_context(const trace::TemplateSet& templates,
                                         const std::string& question,
                                         const std::string& think_prefix,
                                         const trace::Delimiters& delims = {}) {
    return templates.body(trace::TemplateId::reason_system) + "\n" + question + "\n" +
           delims.think_open + think_prefix + delims.think_close + "\n" + delims.answer_open;
}

/// Likelihood the model assigns to the original answer given a think prefix.
/// geometric_mean: exp of the mean per-unit log-probability (length
/// normalized); joint: exp of the summed log-probabilities.
inline double answer_likelihood(ScoringBackend& backend, const trace::TemplateSet& templates,
                                const std::string& question, const std::string& think_prefix,
                                const std::string& answer_text,
                                metrics::LikelihoodMode mode = metrics::LikelihoodMode::geometric_mean,
                                const trace::Delimiters& delims = {}) {
    if (answer_text.empty()) throw error(errc::empty_answer, "cannot score an empty answer");
    ScoringQuery query{forced_answer_context(templates, question, think_prefix, delims), answer_text};
    std::vector<double> logprobs = backend.answer_logprobs(query);
    if (logprobs.empty())
        throw error(errc::scoring_unsupported, "backend returned no per-unit log-probabilities");
    double sum = std::accumulate(logprobs.begin(), logprobs.end(), 0.0);
    double aggregated = mode == metrics::LikelihoodMode::geometric_mean
                            ? sum / static_cast<double>(logprobs.size())
                            : sum;
    return std::clamp(std::exp(aggregated), 0.0, 1.0);
}

struct ProfileOptions {
    metrics::LikelihoodMode likelihood_mode = metrics::LikelihoodMode::geometric_mean;
    int max_parallel = 4;
    trace::Delimiters delimiters;
};

/// Score the answer at every scheduled prefix plus the full trace. Calls run
/// concurrently up to max_parallel; entries come back in schedule order and
/// failures are annotated with the prefix length that failed.
inline metrics::LikelihoodProfile likelihood_profile(ScoringBackend& backend,
                                                     const trace::TemplateSet& templates,
                                                     const trace::ReasoningTrace& t,
                                                     const trace::TruncationSchedule& schedule,
                                                     const ProfileOptions& opts = {}) {
    const size_t total_units = t.unit_count();
    for (size_t k : schedule.prefix_lengths)
        if (k > total_units)
            throw error(errc::out_of_range,
                        "schedule entry " + std::to_string(k) + " exceeds T=" + std::to_string(total_units));

    struct Task {
        size_t k;          // 0 marks the full-trace slot
        std::string prefix;
    };
    std::vector<Task> tasks;
    tasks.reserve(schedule.size() + 1);
    for (size_t k : schedule.prefix_lengths) tasks.push_back({k, t.prefix_text(k)});
    tasks.push_back({0, t.full_unit_text()});

    std::vector<double> values(tasks.size(), 0.0);
    std::vector<std::pair<size_t, std::string>> failures(tasks.size());
    std::vector<std::optional<errc>> failure_codes(tasks.size());
    std::atomic<size_t> next{0};

    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                values[i] = answer_likelihood(backend, templates, t.question, tasks[i].prefix,
                                              t.answer_text, opts.likelihood_mode, opts.delimiters);
            } catch (const error& e) {
                failure_codes[i] = e.code();
                failures[i] = {tasks[i].k, e.what()};
            } catch (const std::exception& e) {
                failure_codes[i] = errc::backend_unavailable;
                failures[i] = {tasks[i].k, e.what()};
            }
        }
    };

    size_t n_workers = std::min<size_t>(std::max(opts.max_parallel, 1), tasks.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (size_t i = 0; i < tasks.size(); ++i) {
        if (failure_codes[i]) {
            std::string where = failures[i].first == 0 ? "full trace"
                                                       : "prefix k=" + std::to_string(failures[i].first);
            throw error(*failure_codes[i], "scoring failed at " + where + ": " + failures[i].second);
        }
    }

    metrics::LikelihoodProfile profile;
    profile.total_units = total_units;
    profile.likelihood_mode = opts.likelihood_mode;
    profile.schedule_mode = schedule.mode;
    for (size_t i = 0; i + 1 < tasks.size(); ++i)
        profile.entries.push_back({tasks[i].k, values[i]});
    profile.p_full = values.back();
    return profile;
}

struct CirEvaluation {
    metrics::LikelihoodProfile profile;
    metrics::CirResult result;
};

/// Full CIR computation for one trace under a schedule mode.
inline CirEvaluation evaluate_cir(ScoringBackend& backend, const trace::TemplateSet& templates,
                                  const trace::ReasoningTrace& t, trace::ScheduleMode schedule_mode,
                                  const ProfileOptions& opts = {}) {
    if (t.answer_text.empty())
        throw error(errc::empty_answer, "trace " + t.trace_id + " has an empty answer");
    trace::TruncationSchedule schedule = trace::make_schedule(schedule_mode, t.unit_count());
    CirEvaluation eval;
    eval.profile = likelihood_profile(backend, templates, t, schedule, opts);
    eval.result = metrics::cir_from_profile(eval.profile);
    return eval;
}

} // namespace cotmetrics::backends
