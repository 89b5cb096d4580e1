#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bubblelab {

/// Coarse failure category. The CLI maps categories to process exit codes
/// (usage -> 2, data -> 3, numeric -> 4); library code only throws.
enum class ErrorCategory { Usage, Data, Numeric };

/// Single exception type carried through the engine. `code` is a stable,
/// machine-readable identifier (e.g. "singular_design", "window_too_short")
/// so callers and the CLI can react without string-matching the message.
class EngineError : public std::runtime_error {
public:
    EngineError(ErrorCategory category, std::string code, const std::string& message)
        : std::runtime_error(message), category_(category), code_(std::move(code)) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }
    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    ErrorCategory category_;
    std::string code_;
};

[[nodiscard]] inline EngineError usage_error(std::string code, const std::string& message) {
    return EngineError(ErrorCategory::Usage, std::move(code), message);
}

[[nodiscard]] inline EngineError data_error(std::string code, const std::string& message) {
    return EngineError(ErrorCategory::Data, std::move(code), message);
}

[[nodiscard]] inline EngineError numeric_error(std::string code, const std::string& message) {
    return EngineError(ErrorCategory::Numeric, std::move(code), message);
}

}  // namespace bubblelab
