#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotmetrics/error.hpp"
#include "cotmetrics/grading/normalize.hpp"
#include "cotmetrics/text.hpp"

namespace cotmetrics::grading {

enum class GraderKind { exact_match, numeric, sorted_list, set_match };

inline const char* grader_kind_name(GraderKind k) {
    switch (k) {
        case GraderKind::exact_match: return "exact_match";
        case GraderKind::numeric: return "numeric";
        case GraderKind::sorted_list: return "sorted_list";
        case GraderKind::set_match: return "set_match";
    }
    return "unknown";
}

inline GraderKind grader_kind_from_name(std::string_view name) {
    if (name == "exact_match") return GraderKind::exact_match;
    if (name == "numeric") return GraderKind::numeric;
    if (name == "sorted_list") return GraderKind::sorted_list;
    if (name == "set_match") return GraderKind::set_match;
    throw error(errc::config_error, "unknown grader kind \"" + std::string(name) + "\"");
}

struct GraderSpec {
    GraderKind kind = GraderKind::exact_match;
    double numeric_tolerance = 1e-6;
    std::string list_delimiter; // empty = whitespace
    bool case_sensitive = false;
    bool grader_backed_sr_comparator = false; // SR agreement via this grader instead of normalized_exact

    static GraderSpec from_json(const nlohmann::json& j) {
        GraderSpec spec;
        spec.kind = grader_kind_from_name(j.at("kind").get<std::string>());
        if (j.contains("tolerance")) spec.numeric_tolerance = j.at("tolerance").get<double>();
        if (spec.numeric_tolerance < 0)
            throw error(errc::config_error, "numeric tolerance must be >= 0");
        if (j.contains("delimiter")) spec.list_delimiter = j.at("delimiter").get<std::string>();
        if (j.contains("case_sensitive")) spec.case_sensitive = j.at("case_sensitive").get<bool>();
        if (j.contains("sr_comparator"))
            spec.grader_backed_sr_comparator = j.at("sr_comparator").get<std::string>() == "grader";
        return spec;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = grader_kind_name(kind);
        if (kind == GraderKind::numeric) j["tolerance"] = numeric_tolerance;
        if (!list_delimiter.empty()) j["delimiter"] = list_delimiter;
        if (case_sensitive) j["case_sensitive"] = true;
        if (grader_backed_sr_comparator) j["sr_comparator"] = "grader";
        return j;
    }
};

struct GradeResult {
    double score = 0.0;
    std::optional<std::string> diagnostic;
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view s, const std::string& delimiter) {
    if (delimiter.empty()) return text::split_whitespace(s);
    std::vector<std::string> parts;
    size_t begin = 0;
    for (;;) {
        size_t pos = s.find(delimiter, begin);
        if (pos == std::string_view::npos) {
            parts.emplace_back(text::trim(s.substr(begin)));
            break;
        }
        parts.emplace_back(text::trim(s.substr(begin, pos - begin)));
        begin = pos + delimiter.size();
    }
    while (!parts.empty() && parts.back().empty()) parts.pop_back();
    return parts;
}

inline std::optional<double> parse_number(const std::string& normalized) {
    if (normalized.empty()) return std::nullopt;
    try {
        size_t consumed = 0;
        double v = std::stod(normalized, &consumed);
        if (consumed != normalized.size() || !std::isfinite(v)) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace detail

/// Score a predicted answer against gold under one grader spec. Always in
/// [0, 1]; garbage answers score 0 with a diagnostic instead of throwing, so
/// a bad rollout can never crash a training step.
inline GradeResult grade_with_spec(const GraderSpec& spec, std::string_view predicted,
                                   std::string_view gold) {
    NormalizeOptions norm;
    norm.lowercase = !spec.case_sensitive;
    std::string p = normalize_answer(predicted, norm);
    std::string g = normalize_answer(gold, norm);

    switch (spec.kind) {
        case GraderKind::exact_match:
            return {p == g ? 1.0 : 0.0, std::nullopt};
        case GraderKind::numeric: {
            auto pv = detail::parse_number(p);
            auto gv = detail::parse_number(g);
            if (!pv) return {0.0, "unparseable numeric answer: \"" + p + "\""};
            if (!gv) return {0.0, "unparseable numeric gold answer: \"" + g + "\""};
            return {std::abs(*pv - *gv) <= spec.numeric_tolerance ? 1.0 : 0.0, std::nullopt};
        }
        case GraderKind::sorted_list: {
            auto pl = detail::split_list(p, spec.list_delimiter);
            auto gl = detail::split_list(g, spec.list_delimiter);
            size_t longest = std::max(pl.size(), gl.size());
            if (longest == 0) return {1.0, std::nullopt};
            size_t matches = 0;
            for (size_t i = 0; i < std::min(pl.size(), gl.size()); ++i)
                if (pl[i] == gl[i]) ++matches;
            return {static_cast<double>(matches) / static_cast<double>(longest), std::nullopt};
        }
        case GraderKind::set_match: {
            auto pl = detail::split_list(p, spec.list_delimiter);
            auto gl = detail::split_list(g, spec.list_delimiter);
            std::set<std::string> ps(pl.begin(), pl.end());
            std::set<std::string> gs(gl.begin(), gl.end());
            return {ps == gs ? 1.0 : 0.0, std::nullopt};
        }
    }
    return {0.0, "unknown grader kind"};
}

/// task_id -> grader mapping. A "*" entry, when present, grades tasks with no
/// registration of their own.
class GraderRegistry {
public:
    void register_task(const std::string& task_id, GraderSpec spec) { specs_[task_id] = spec; }

    bool has_task(const std::string& task_id) const {
        return specs_.count(task_id) > 0 || specs_.count("*") > 0;
    }

    const GraderSpec& spec_for(const std::string& task_id) const {
        auto it = specs_.find(task_id);
        if (it != specs_.end()) return it->second;
        it = specs_.find("*");
        if (it != specs_.end()) return it->second;
        throw error(errc::unknown_task, task_id);
    }

    GradeResult grade_outcome(const std::string& task_id, std::string_view predicted,
                              std::string_view gold) const {
        return grade_with_spec(spec_for(task_id), predicted, gold);
    }

    static GraderRegistry from_json(const nlohmann::json& tasks) {
        GraderRegistry reg;
        for (auto it = tasks.begin(); it != tasks.end(); ++it)
            reg.register_task(it.key(), GraderSpec::from_json(it.value()));
        return reg;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [task, spec] : specs_) j[task] = spec.to_json();
        return j;
    }

    bool empty() const { return specs_.empty(); }

private:
    std::map<std::string, GraderSpec> specs_;
};

/// Agreement test behind SR's verdict. "normalized_exact" compares canonical
/// answer strings; "grader:<task_id>" accepts iff the task grader scores the
/// pair 1.0 both ways.
inline bool compare_answers(const std::string& a, const std::string& b,
                            const std::string& comparator_id,
                            const GraderRegistry* registry = nullptr) {
    if (comparator_id == "normalized_exact") return normalize_answer(a) == normalize_answer(b);
    constexpr std::string_view prefix = "grader:";
    if (text::starts_with(comparator_id, prefix)) {
        if (registry == nullptr)
            throw error(errc::unknown_comparator, comparator_id + " (no registry available)");
        std::string task_id = comparator_id.substr(prefix.size());
        return registry->grade_outcome(task_id, a, b).score == 1.0 &&
               registry->grade_outcome(task_id, b, a).score == 1.0;
    }
    throw error(errc::unknown_comparator, comparator_id);
}

} // namespace cotmetrics::grading
