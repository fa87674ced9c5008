#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "cotmetrics/text.hpp"
#include "cotmetrics/trace/trace.hpp"

namespace cotmetrics::grading {

namespace detail {

/// Canonical form of a signed decimal token, or nullopt when the token is not
/// one. "007.50" -> "7.5", "+3" -> "3", "-0.0" -> "0", ".5" -> "0.5".
inline std::optional<std::string> canonical_decimal(std::string_view token) {
    if (token.empty()) return std::nullopt;
    size_t i = 0;
    bool negative = false;
    if (token[i] == '+' || token[i] == '-') {
        negative = token[i] == '-';
        ++i;
    }
    std::string int_part, frac_part;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i])))
        int_part.push_back(token[i++]);
    if (i < token.size() && token[i] == '.') {
        ++i;
        while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i])))
            frac_part.push_back(token[i++]);
    }
    if (i != token.size()) return std::nullopt;
    if (int_part.empty() && frac_part.empty()) return std::nullopt;

    size_t first = int_part.find_first_not_of('0');
    int_part = first == std::string::npos ? "" : int_part.substr(first);
    size_t last = frac_part.find_last_not_of('0');
    frac_part = last == std::string::npos ? "" : frac_part.substr(0, last + 1);

    if (int_part.empty()) int_part = "0";
    std::string out;
    bool is_zero = int_part == "0" && frac_part.empty();
    if (negative && !is_zero) out.push_back('-');
    out += int_part;
    if (!frac_part.empty()) {
        out.push_back('.');
        out += frac_part;
    }
    return out;
}

inline std::string_view strip_answer_tags(std::string_view s, const trace::Delimiters& d) {
    s = text::trim(s);
    if (text::starts_with(s, d.answer_open) && s.size() >= d.answer_open.size() + d.answer_close.size() &&
        s.substr(s.size() - d.answer_close.size()) == d.answer_close) {
        s = s.substr(d.answer_open.size(),
                     s.size() - d.answer_open.size() - d.answer_close.size());
        s = text::trim(s);
    }
    return s;
}

} // namespace detail

struct NormalizeOptions {
    bool lowercase = true;
    trace::Delimiters delimiters;
};

/// Canonical answer string: surrounding answer tags stripped, whitespace
/// collapsed, lowercased, and each decimal-number token reduced to canonical
/// form. Idempotent.
inline std::string normalize_answer(std::string_view answer, const NormalizeOptions& opts = {}) {
    std::string_view body = detail::strip_answer_tags(answer, opts.delimiters);
    std::string collapsed = text::collapse_whitespace(body);
    if (opts.lowercase) collapsed = text::lower(collapsed);

    std::string out;
    out.reserve(collapsed.size());
    for (auto& token : text::split_whitespace(collapsed)) {
        if (!out.empty()) out.push_back(' ');
        if (auto canon = detail::canonical_decimal(token))
            out += *canon;
        else
            out += token;
    }
    return out;
}

} // namespace cotmetrics::grading
