#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kumpul {

enum class ErrorCode {
    validation,   // bad input or payload; never retried
    not_found,
    conflict,     // illegal state transition, duplicate id
    storage,      // backing store failure
    unavailable,  // remote peer unreachable or timed out; retryable
    protocol,     // peer answered with a malformed response
    internal,
};

const char* to_string(ErrorCode code) noexcept;

struct FieldError {
    std::string field;
    std::string message;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<FieldError> fields = {})
        : std::runtime_error(message), code_(code), fields_(std::move(fields)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<FieldError>& field_errors() const noexcept { return fields_; }

    /// Whether a job that failed with this error should go back to the queue.
    bool retryable() const noexcept {
        return code_ == ErrorCode::unavailable || code_ == ErrorCode::storage;
    }

private:
    ErrorCode code_;
    std::vector<FieldError> fields_;
};

[[noreturn]] inline void throw_validation(const std::string& field, const std::string& message) {
    throw Error(ErrorCode::validation, field + ": " + message, {{field, message}});
}

[[noreturn]] inline void throw_not_found(const std::string& what) {
    throw Error(ErrorCode::not_found, what + " not found");
}

} // namespace kumpul
