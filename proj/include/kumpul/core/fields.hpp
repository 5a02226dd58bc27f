#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kumpul/core/error.hpp"
#include "kumpul/core/json.hpp"

namespace kumpul {

/// Accumulates field-level problems while reading a JSON configuration so
/// that a caller sees every mistake at once.
class FieldErrors {
public:
    void add(std::string field, std::string message) { errors_.push_back({std::move(field), std::move(message)}); }
    bool empty() const noexcept { return errors_.empty(); }
    const std::vector<FieldError>& errors() const noexcept { return errors_; }

    /// Throws Error(validation) carrying every collected entry.
    void raise_if_any(std::string_view what) const;

private:
    std::vector<FieldError> errors_;
};

std::string join_path(std::string_view parent, std::string_view key);

/// Reads typed members of one JSON object, reporting into FieldErrors.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path, FieldErrors& errors);

    bool ok() const noexcept { return object_ != nullptr; }
    bool has(const char* key) const;
    const Json* raw(const char* key) const;
    void allow_only(std::initializer_list<std::string_view> keys);

    std::optional<std::string> string(const char* key, bool required = false, bool non_empty = true);
    std::optional<long long> integer(const char* key, bool required = false);
    std::optional<double> number(const char* key, bool required = false);
    std::optional<bool> boolean(const char* key);
    std::optional<std::vector<std::string>> strings(const char* key, bool required = false);
    /// String restricted to `choices`.
    std::optional<std::string> choice(const char* key, std::initializer_list<std::string_view> choices);

    const std::string& path() const noexcept { return path_; }
    std::string field(std::string_view key) const { return join_path(path_, key); }
    FieldErrors& errors() noexcept { return errors_; }

private:
    const Json* object_ = nullptr;
    std::string path_;
    FieldErrors& errors_;
};

} // namespace kumpul
