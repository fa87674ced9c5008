#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cotmetrics/error.hpp"
#include "cotmetrics/text.hpp"

namespace cotmetrics::trace {

enum class SanitizeLevel { answer_only, answer_and_paraphrase };

inline const char* sanitize_level_name(SanitizeLevel l) {
    return l == SanitizeLevel::answer_only ? "answer_only" : "answer_and_paraphrase";
}

/// Think text with answer leakage removed; the input handed to the verifier.
struct SanitizedTrace {
    std::string text;
    size_t removed_answer_count = 0;
    size_t removed_sentence_count = 0;
    SanitizeLevel level = SanitizeLevel::answer_only;
};

/// Answer string as matched during removal: lowercased, trimmed, internal
/// whitespace collapsed.
inline std::string normalize_answer_for_removal(std::string_view answer) {
    return text::collapse_whitespace(text::lower(answer));
}

namespace detail {

inline bool matches_ci_at(std::string_view s, size_t pos, std::string_view needle_lower) {
    if (pos + needle_lower.size() > s.size()) return false;
    for (size_t j = 0; j < needle_lower.size(); ++j)
        if (text::to_lower(s[pos + j]) != needle_lower[j]) return false;
    return true;
}

// One left-to-right deletion pass. Where a deletion leaves whitespace on both
// sides, the combined run collapses to a single space.
inline std::string remove_answer_pass(std::string_view input, std::string_view needle_lower,
                                      size_t& deletions) {
    std::string out;
    out.reserve(input.size());
    size_t i = 0;
    while (i < input.size()) {
        if (matches_ci_at(input, i, needle_lower)) {
            ++deletions;
            size_t j = i + needle_lower.size();
            bool left_ws = !out.empty() && text::is_space(out.back());
            bool right_ws = j < input.size() && text::is_space(input[j]);
            if (left_ws && right_ws) {
                while (!out.empty() && text::is_space(out.back())) out.pop_back();
                while (j < input.size() && text::is_space(input[j])) ++j;
                if (!out.empty() && j < input.size()) out.push_back(' ');
            }
            i = j;
            continue;
        }
        out.push_back(input[i]);
        ++i;
    }
    return out;
}

} // namespace detail

/// Delete every case-insensitive occurrence of the normalized answer from the
/// think text. Passes repeat until a fixed point so deletions that splice two
/// halves into a fresh occurrence cannot leak the answer; this also makes the
/// operation idempotent.
inline SanitizedTrace remove_answer(std::string_view think_text, std::string_view answer_text) {
    SanitizedTrace result;
    result.level = SanitizeLevel::answer_only;
    std::string needle = normalize_answer_for_removal(answer_text);
    if (needle.empty()) {
        result.text = std::string(think_text);
        return result;
    }
    std::string current(think_text);
    size_t total = 0;
    for (;;) {
        size_t deletions = 0;
        std::string next = detail::remove_answer_pass(current, needle, deletions);
        total += deletions;
        if (deletions == 0) break;
        current = std::move(next);
    }
    if (total > 0) current = std::string(text::trim(current));
    result.text = std::move(current);
    result.removed_answer_count = total;
    return result;
}

/// Sentence spans partitioning `s`; each span keeps its terminator
/// ('.', '?', '!' or newline) so kept spans reassemble verbatim. A line with
/// no terminator is a single sentence.
inline std::vector<std::string_view> split_sentences(std::string_view s) {
    std::vector<std::string_view> spans;
    size_t begin = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.' || c == '?' || c == '!' || c == '\n') {
            spans.push_back(s.substr(begin, i - begin + 1));
            begin = i + 1;
        }
    }
    if (begin < s.size()) spans.push_back(s.substr(begin));
    return spans;
}

inline std::set<std::string> word_trigrams(std::string_view s) {
    auto words = text::word_tokens(s);
    std::set<std::string> grams;
    for (size_t i = 0; i + 3 <= words.size(); ++i)
        grams.insert(words[i] + '\x1f' + words[i + 1] + '\x1f' + words[i + 2]);
    return grams;
}

/// Jaccard similarity between word-3-gram sets; 0 when either set is empty.
inline double trigram_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() || b.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& g : a)
        if (b.count(g)) ++inter;
    size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct ScrubOptions {
    double overlap_threshold = 0.5;
};

/// Drop every sentence whose word-3-gram overlap with the question reaches
/// the threshold. Sentences sharing no 3-gram with the question are never
/// dropped, regardless of threshold.
inline SanitizedTrace scrub_question_paraphrases(const SanitizedTrace& sanitized,
                                                 std::string_view question,
                                                 const ScrubOptions& opts = {}) {
    if (sanitized.level != SanitizeLevel::answer_only)
        throw error(errc::domain_error, "scrub expects an answer_only sanitized trace");

    auto question_grams = word_trigrams(question);
    SanitizedTrace result;
    result.level = SanitizeLevel::answer_and_paraphrase;
    result.removed_answer_count = sanitized.removed_answer_count;

    std::string kept;
    size_t dropped = 0;
    for (std::string_view span : split_sentences(sanitized.text)) {
        auto grams = word_trigrams(span);
        size_t inter = 0;
        for (const auto& g : grams)
            if (question_grams.count(g)) ++inter;
        double jaccard = trigram_jaccard(grams, question_grams);
        if (inter > 0 && jaccard >= opts.overlap_threshold) {
            ++dropped;
        } else {
            kept += span;
        }
    }
    result.text = dropped > 0 ? std::string(text::trim(kept)) : sanitized.text;
    result.removed_sentence_count = dropped;
    return result;
}

} // namespace cotmetrics::trace
