#pragma once

#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotmetrics/error.hpp"
#include "cotmetrics/text.hpp"

namespace cotmetrics::trace {

/// The four delimiter strings bounding think and answer segments.
/// Defaults match the reasoning prompt; other model families use variants.
struct Delimiters {
    std::string think_open = "<think>";
    std::string think_close = "</think>";
    std::string answer_open = "<answer>";
    std::string answer_close = "</answer>";

    std::vector<std::string_view> all() const {
        return {think_open, think_close, answer_open, answer_close};
    }
};

/// Splits think text into the units truncation prefixes are measured in.
/// `joiner` is the declared joining rule: units interleaved with it
/// reconstruct the text the scoring backend sees.
struct Unitizer {
    std::function<std::vector<std::string>(std::string_view)> split;
    std::string joiner;

    static Unitizer whitespace_words() {
        return {[](std::string_view s) { return text::split_whitespace(s); }, " "};
    }
};

struct ParseOptions {
    Delimiters delimiters;
    Unitizer unitizer = Unitizer::whitespace_words();
};

struct ReasoningTrace {
    std::string trace_id;
    std::string task_id;
    std::string question;
    std::string think_text;
    std::string answer_text;
    std::string raw_completion; // empty when assembled from pre-split fields
    std::vector<std::string> think_units;
    std::string unit_joiner = " ";

    size_t unit_count() const { return think_units.size(); }

    /// Text of the first k units under the declared joining rule.
    std::string prefix_text(size_t k) const {
        std::string out;
        for (size_t i = 0; i < k && i < think_units.size(); ++i) {
            if (i > 0) out += unit_joiner;
            out += think_units[i];
        }
        return out;
    }

    std::string full_unit_text() const { return prefix_text(think_units.size()); }
};

namespace detail {

// Position of the next occurrence of any delimiter at or after `from`,
// together with which one it is. npos when none occur.
inline std::pair<size_t, size_t> next_delimiter(std::string_view s, size_t from,
                                                const std::vector<std::string_view>& delims) {
    size_t best_pos = std::string_view::npos;
    size_t best_idx = 0;
    for (size_t i = 0; i < delims.size(); ++i) {
        size_t p = s.find(delims[i], from);
        if (p < best_pos) {
            best_pos = p;
            best_idx = i;
        }
    }
    return {best_pos, best_idx};
}

// Extracts the segment opened by `open` starting at or after `from`. The
// segment must be closed by `close` before any other delimiter appears;
// anything else is malformed.
inline std::pair<std::string, size_t> extract_segment(std::string_view s, size_t from,
                                                      std::string_view open, std::string_view close,
                                                      errc missing_code, const Delimiters& d) {
    size_t open_pos = s.find(open, from);
    if (open_pos == std::string_view::npos)
        throw error(missing_code, "no \"" + std::string(open) + "\" segment found");
    size_t content_begin = open_pos + open.size();
    auto [next_pos, next_idx] = next_delimiter(s, content_begin, d.all());
    if (next_pos == std::string_view::npos)
        throw error(errc::malformed_delimiters,
                    "\"" + std::string(open) + "\" opened without matching \"" + std::string(close) + "\"");
    std::string_view found = d.all()[next_idx];
    if (found != close)
        throw error(errc::malformed_delimiters,
                    "expected \"" + std::string(close) + "\" after \"" + std::string(open) +
                        "\" but found \"" + std::string(found) + "\"");
    std::string content(text::trim(s.substr(content_begin, next_pos - content_begin)));
    return {std::move(content), next_pos + found.size()};
}

} // namespace detail

/// Parse a raw model completion into its first well-formed think segment and
/// the first well-formed answer segment after it. Segment contents are stored
/// verbatim apart from outer whitespace trimming, so they never contain a
/// delimiter string.
inline ReasoningTrace parse_trace(std::string_view raw_completion, std::string trace_id,
                                  std::string task_id, std::string question,
                                  const ParseOptions& opts = {}) {
    const Delimiters& d = opts.delimiters;
    auto [think, after_think] = detail::extract_segment(raw_completion, 0, d.think_open, d.think_close,
                                                        errc::missing_think, d);
    auto [answer, after_answer] = detail::extract_segment(raw_completion, after_think, d.answer_open,
                                                          d.answer_close, errc::missing_answer, d);
    (void)after_answer;

    ReasoningTrace t;
    t.trace_id = std::move(trace_id);
    t.task_id = std::move(task_id);
    t.question = std::move(question);
    t.think_text = std::move(think);
    t.answer_text = std::move(answer);
    t.raw_completion = std::string(raw_completion);
    t.think_units = opts.unitizer.split(t.think_text);
    t.unit_joiner = opts.unitizer.joiner;
    return t;
}

/// Assemble a trace from pre-split think/answer fields (JSONL inputs may ship
/// them instead of a raw completion).
inline ReasoningTrace make_trace(std::string trace_id, std::string task_id, std::string question,
                                 std::string think_text, std::string answer_text,
                                 const ParseOptions& opts = {}) {
    ReasoningTrace t;
    t.trace_id = std::move(trace_id);
    t.task_id = std::move(task_id);
    t.question = std::move(question);
    t.think_text = std::string(text::trim(think_text));
    t.answer_text = std::string(text::trim(answer_text));
    t.think_units = opts.unitizer.split(t.think_text);
    t.unit_joiner = opts.unitizer.joiner;
    return t;
}

/// Inverse of parse_trace for well-formed traces.
inline std::string serialize_completion(const ReasoningTrace& t, const Delimiters& d = {}) {
    return d.think_open + t.think_text + d.think_close + "\n" + d.answer_open + t.answer_text +
           d.answer_close;
}

} // namespace cotmetrics::trace
