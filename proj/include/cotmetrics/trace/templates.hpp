#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "cotmetrics/error.hpp"

namespace cotmetrics::trace {

enum class TemplateId {
    reason_system,
    direct_answer_system,
    expert_trace,
    verifier_with_question,
    verifier_without_question,
};

inline constexpr std::array<TemplateId, 5> kAllTemplates = {
    TemplateId::reason_system,     TemplateId::direct_answer_system,
    TemplateId::expert_trace,      TemplateId::verifier_with_question,
    TemplateId::verifier_without_question,
};

inline const char* template_name(TemplateId id) {
    switch (id) {
        case TemplateId::reason_system: return "reason_system";
        case TemplateId::direct_answer_system: return "direct_answer_system";
        case TemplateId::expert_trace: return "expert_trace";
        case TemplateId::verifier_with_question: return "verifier_with_question";
        case TemplateId::verifier_without_question: return "verifier_without_question";
    }
    return "unknown";
}

inline TemplateId template_from_name(std::string_view name) {
    for (TemplateId id : kAllTemplates)
        if (name == template_name(id)) return id;
    throw error(errc::unknown_template, std::string(name));
}

// Packaged default bodies. Placeholders are the literal strings {question}
// and {reasoning}; any other braces are plain text.

inline constexpr std::string_view kReasonSystemBody =
    R"TPL(A conversation between User and Assistant. The user asks a question, and the Assistant solves it. The Assistant first thinks about the reasoning process in the mind and then provides the user with the answer. The reasoning process and answer are enclosed within <think> </think> and <answer> </answer> tags, respectively, i.e.,
<think> reasoning process here </think>
<answer>answer here</answer>
Do not explain your reasoning inside the answer tags, provide only the final answer. When an example is provided, you should strictly follow the format of the output/answer in that example.
)TPL";

inline constexpr std::string_view kDirectAnswerSystemBody =
    R"TPL(Answer the question directly. Provide your full answer between <answer> answer here </answer>. Do not return any preamble, explanation, or reasoning.
)TPL";

inline constexpr std::string_view kExpertTraceBody =
    R"TPL(Demonstrate, step by step, a clear solution to the following question. Give clear intermediate steps and computations so that, as a teacher, another student can learn how to solve this task. Make sure a verifier can follow the reasoning process and deduce the same answer as the one you provided. Encode the reasoning process between <think> and </think> tags. Provide your final answer in the <answer> and </answer> tags. Do not explain your reasoning inside the answer tags; provide only the final answer.
)TPL";

inline constexpr std::string_view kVerifierWithQuestionBody =
    R"TPL(You are an expert verifier. You are given:
- A Question
- Reasoning Traces from another model

Your job:
1. Following exactly the reasoning traces for the question and return the answer the other model generated.
2. Do not make any assumptions or use any external knowledge, solely follow the reasoning traces step by step without any deviation.
3. If you can't answer, reply no answer found
4. Place your answer between <answer> and </answer>.

Question:
{question}

Reasoning Traces:
{reasoning}
)TPL";

inline constexpr std::string_view kVerifierWithoutQuestionBody =
    R"TPL(You are an expert verifier. You are given:
- Reasoning Traces from another model

Your job:
1. Following exactly the reasoning traces and return the answer the other model generated.
2. Do not make any assumptions or use any external knowledge, solely follow the reasoning traces step by step without any deviation.
3. If you can't answer, reply no answer found
4. Place your answer between <answer> and </answer>.

Reasoning Traces:
{reasoning}
)TPL";

inline std::string_view default_template_body(TemplateId id) {
    switch (id) {
        case TemplateId::reason_system: return kReasonSystemBody;
        case TemplateId::direct_answer_system: return kDirectAnswerSystemBody;
        case TemplateId::expert_trace: return kExpertTraceBody;
        case TemplateId::verifier_with_question: return kVerifierWithQuestionBody;
        case TemplateId::verifier_without_question: return kVerifierWithoutQuestionBody;
    }
    throw error(errc::unknown_template, "bad template id");
}

inline constexpr std::string_view kQuestionPlaceholder = "{question}";
inline constexpr std::string_view kReasoningPlaceholder = "{reasoning}";

/// Byte-exact placeholder substitution. Every placeholder present in the body
/// must be bound; unknown brace text is left untouched.
inline std::string render_template_body(std::string_view body,
                                        const std::map<std::string, std::string>& bindings) {
    std::string out(body);
    for (std::string_view ph : {kQuestionPlaceholder, kReasoningPlaceholder}) {
        if (out.find(ph) == std::string::npos) continue;
        std::string key(ph.substr(1, ph.size() - 2));
        auto it = bindings.find(key);
        if (it == bindings.end()) throw error(errc::missing_binding, key);
        size_t pos = 0;
        while ((pos = out.find(ph, pos)) != std::string::npos) {
            out.replace(pos, ph.size(), it->second);
            pos += it->second.size();
        }
    }
    return out;
}

/// The five prompt templates with optional per-template file overrides.
class TemplateSet {
public:
    const std::string& body(TemplateId id) const {
        auto it = overrides_.find(id);
        if (it != overrides_.end()) return it->second;
        return defaults_[static_cast<size_t>(id)];
    }

    void set_override(TemplateId id, std::string body) { overrides_[id] = std::move(body); }

    void load_override_file(TemplateId id, const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw error(errc::io_error, "cannot read template file " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        set_override(id, ss.str());
    }

    std::string render(TemplateId id, const std::map<std::string, std::string>& bindings) const {
        return render_template_body(body(id), bindings);
    }

    TemplateSet() {
        for (TemplateId id : kAllTemplates)
            defaults_[static_cast<size_t>(id)] = std::string(default_template_body(id));
    }

private:
    std::array<std::string, 5> defaults_;
    std::map<TemplateId, std::string> overrides_;
};

} // namespace cotmetrics::trace
