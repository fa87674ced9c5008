#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "cotmetrics/error.hpp"

namespace cotmetrics::trace {

enum class ScheduleMode { every_unit, deciles, explicit_list };

inline const char* schedule_mode_name(ScheduleMode m) {
    switch (m) {
        case ScheduleMode::every_unit: return "every_unit";
        case ScheduleMode::deciles: return "deciles";
        case ScheduleMode::explicit_list: return "explicit";
    }
    return "unknown";
}

/// Strictly increasing prefix lengths in [1, T] at which a trace is truncated
/// and the answer is force-scored.
struct TruncationSchedule {
    ScheduleMode mode = ScheduleMode::every_unit;
    std::vector<size_t> prefix_lengths;

    size_t size() const { return prefix_lengths.size(); }
    bool empty() const { return prefix_lengths.empty(); }
    bool contains(size_t k) const {
        return std::binary_search(prefix_lengths.begin(), prefix_lengths.end(), k);
    }
};

/// Every prefix: [1..T].
inline TruncationSchedule every_unit_schedule(size_t total_units) {
    TruncationSchedule s;
    s.mode = ScheduleMode::every_unit;
    s.prefix_lengths.resize(total_units);
    for (size_t i = 0; i < total_units; ++i) s.prefix_lengths[i] = i + 1;
    return s;
}

/// Prefixes at every 10th percentile below the full trace:
/// {ceil(j*T/10) : j = 1..9}, deduplicated. The j=10 point is the full trace
/// itself and is never scheduled; its divergence term is identically zero.
inline TruncationSchedule decile_schedule(size_t total_units) {
    TruncationSchedule s;
    s.mode = ScheduleMode::deciles;
    for (size_t j = 1; j <= 9; ++j) {
        size_t k = (j * total_units + 9) / 10; // ceil(j*T/10)
        if (k >= 1 && (s.prefix_lengths.empty() || s.prefix_lengths.back() != k))
            s.prefix_lengths.push_back(k);
    }
    return s;
}

/// User-supplied prefix list, canonicalized to a strictly increasing sequence.
/// Entries outside [1, T] are rejected.
inline TruncationSchedule explicit_schedule(std::vector<size_t> prefix_lengths, size_t total_units) {
    for (size_t k : prefix_lengths) {
        if (k < 1 || k > total_units)
            throw error(errc::out_of_range, "prefix length " + std::to_string(k) +
                                                " outside [1, " + std::to_string(total_units) + "]");
    }
    std::sort(prefix_lengths.begin(), prefix_lengths.end());
    prefix_lengths.erase(std::unique(prefix_lengths.begin(), prefix_lengths.end()),
                         prefix_lengths.end());
    TruncationSchedule s;
    s.mode = ScheduleMode::explicit_list;
    s.prefix_lengths = std::move(prefix_lengths);
    return s;
}

inline TruncationSchedule make_schedule(ScheduleMode mode, size_t total_units) {
    switch (mode) {
        case ScheduleMode::every_unit: return every_unit_schedule(total_units);
        case ScheduleMode::deciles: return decile_schedule(total_units);
        case ScheduleMode::explicit_list:
            throw error(errc::config_error, "explicit schedule requires a prefix list");
    }
    throw error(errc::config_error, "unknown schedule mode");
}

} // namespace cotmetrics::trace
