#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cotmetrics/error.hpp"
#include "cotmetrics/metrics/bernoulli_js.hpp"
#include "cotmetrics/trace/truncation.hpp"

namespace cotmetrics::metrics {

enum class LikelihoodMode { geometric_mean, joint };

inline const char* likelihood_mode_name(LikelihoodMode m) {
    return m == LikelihoodMode::geometric_mean ? "geometric_mean" : "joint";
}

/// Answer likelihood at each scheduled prefix length plus the full trace.
struct LikelihoodProfile {
    struct Entry {
        size_t k;
        double p_k;
    };
    std::vector<Entry> entries; // k strictly increasing, k <= total_units
    double p_full = 0.0;        // p_T, likelihood under the complete trace
    size_t total_units = 0;     // T
    LikelihoodMode likelihood_mode = LikelihoodMode::geometric_mean;
    trace::ScheduleMode schedule_mode = trace::ScheduleMode::explicit_list;

    void validate() const {
        auto check01 = [](double p) {
            if (!(p >= 0.0 && p <= 1.0))
                throw error(errc::domain_error, "likelihood outside [0, 1]");
        };
        check01(p_full);
        size_t prev = 0;
        for (const auto& e : entries) {
            check01(e.p_k);
            if (e.k <= prev || e.k > total_units)
                throw error(errc::domain_error,
                            "profile prefix lengths must be strictly increasing and <= T");
            prev = e.k;
        }
    }
};

/// Per-prefix divergences and their mean.
struct CirResult {
    std::vector<std::pair<size_t, double>> per_prefix_js;
    double cir = 0.0;
    trace::ScheduleMode schedule_mode = trace::ScheduleMode::explicit_list;
};

/// Eq.-style aggregation: JS of each prefix likelihood against the full-trace
/// likelihood, averaged. An empty profile yields 0.
///
/// A decile profile omits the scoring call at k = T, whose divergence is
/// identically zero; the zero term still participates in the mean so that a
/// decile profile averages over all ten percentile blocks and agrees with the
/// every-unit average on block-constant profiles.
inline CirResult cir_from_profile(const LikelihoodProfile& profile) {
    profile.validate();
    CirResult result;
    result.schedule_mode = profile.schedule_mode;
    result.per_prefix_js.reserve(profile.entries.size() + 1);
    double sum = 0.0;
    for (const auto& e : profile.entries) {
        double js = bernoulli_js(e.p_k, profile.p_full);
        result.per_prefix_js.emplace_back(e.k, js);
        sum += js;
    }
    if (profile.schedule_mode == trace::ScheduleMode::deciles &&
        (profile.entries.empty() || profile.entries.back().k != profile.total_units) &&
        profile.total_units > 0) {
        result.per_prefix_js.emplace_back(profile.total_units,
                                          bernoulli_js(profile.p_full, profile.p_full));
    }
    if (!result.per_prefix_js.empty())
        result.cir = sum / static_cast<double>(result.per_prefix_js.size());
    return result;
}

} // namespace cotmetrics::metrics
