#pragma once

#include <stdexcept>
#include <string>

namespace cotmetrics {

enum class errc {
    // trace parsing / templating
    missing_think,
    missing_answer,
    malformed_delimiters,
    out_of_range,
    missing_binding,
    unknown_template,
    // metrics
    domain_error,
    length_mismatch,
    degenerate_input,
    // grading
    unknown_task,
    unknown_comparator,
    // backends
    backend_unavailable,
    scoring_unsupported,
    empty_answer,
    malformed_verifier_reply,
    // config / io
    config_error,
    io_error,
    key_mismatch,
    invalid_request,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::missing_think: return "missing_think";
        case errc::missing_answer: return "missing_answer";
        case errc::malformed_delimiters: return "malformed_delimiters";
        case errc::out_of_range: return "out_of_range";
        case errc::missing_binding: return "missing_binding";
        case errc::unknown_template: return "unknown_template";
        case errc::domain_error: return "domain_error";
        case errc::length_mismatch: return "length_mismatch";
        case errc::degenerate_input: return "degenerate_input";
        case errc::unknown_task: return "unknown_task";
        case errc::unknown_comparator: return "unknown_comparator";
        case errc::backend_unavailable: return "backend_unavailable";
        case errc::scoring_unsupported: return "scoring_unsupported";
        case errc::empty_answer: return "empty_answer";
        case errc::malformed_verifier_reply: return "malformed_verifier_reply";
        case errc::config_error: return "config_error";
        case errc::io_error: return "io_error";
        case errc::key_mismatch: return "key_mismatch";
        case errc::invalid_request: return "invalid_request";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace cotmetrics
