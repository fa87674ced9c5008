#pragma once

#include <functional>
#include <string>
#include <utility>

#include "cotmetrics/trace/sanitize.hpp"

namespace cotmetrics::metrics {

enum class SrStrictLevel { sr, sr_minus };

inline const char* sr_strict_level_name(SrStrictLevel l) {
    return l == SrStrictLevel::sr ? "SR" : "SR_minus";
}

/// Accepts two decoded verifier answers as agreeing.
using AnswerComparator = std::function<bool(const std::string&, const std::string&)>;

struct SrVerdictPolicy {
    // Eq.-literal mode: two "no answer found" replies still agree. Off by
    // default; mutual verifier failure signals insufficiency rather than
    // a recovered answer.
    bool mutual_no_answer_agrees = false;
};

/// 1 iff the comparator accepts the two decoded answers and neither verifier
/// reply was a no-answer sentinel (unless the literal policy is enabled).
inline int sr_verdict(const std::string& answer_with_question,
                      const std::string& answer_without_question,
                      std::pair<bool, bool> no_answer_flags, const AnswerComparator& comparator,
                      const SrVerdictPolicy& policy = {}) {
    bool match = comparator(answer_with_question, answer_without_question);
    if (policy.mutual_no_answer_agrees) return match ? 1 : 0;
    if (no_answer_flags.first || no_answer_flags.second) return 0;
    return match ? 1 : 0;
}

/// Full record of one SR evaluation.
struct SrResult {
    trace::SanitizedTrace sanitized;
    std::string answer_with_question;
    std::string answer_without_question;
    int sr = 0;
    SrStrictLevel strict_level = SrStrictLevel::sr;
    std::pair<bool, bool> no_answer_flags{false, false};
};

} // namespace cotmetrics::metrics
