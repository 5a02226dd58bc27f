#include "kumpul/core/fields.hpp"

#include <algorithm>

namespace kumpul {

void FieldErrors::raise_if_any(std::string_view what) const {
    if (errors_.empty()) {
        return;
    }
    std::string message = std::string(what) + ": ";
    for (std::size_t i = 0; i < errors_.size(); ++i) {
        if (i != 0) {
            message += "; ";
        }
        message += errors_[i].field + " " + errors_[i].message;
    }
    throw Error(ErrorCode::validation, message, errors_);
}

std::string join_path(std::string_view parent, std::string_view key) {
    if (parent.empty()) {
        return std::string(key);
    }
    return std::string(parent) + "." + std::string(key);
}

ObjectReader::ObjectReader(const Json& j, std::string path, FieldErrors& errors)
    : path_(std::move(path)), errors_(errors) {
    if (j.is_object()) {
        object_ = &j;
    } else {
        errors_.add(path_.empty() ? "$" : path_, "must be an object");
    }
}

bool ObjectReader::has(const char* key) const {
    return object_ != nullptr && object_->contains(key) && !(*object_)[key].is_null();
}

const Json* ObjectReader::raw(const char* key) const {
    return has(key) ? &(*object_)[key] : nullptr;
}

void ObjectReader::allow_only(std::initializer_list<std::string_view> keys) {
    if (object_ == nullptr) {
        return;
    }
    for (const auto& [k, _] : object_->items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            errors_.add(field(k), "is not a recognised field");
        }
    }
}

std::optional<std::string> ObjectReader::string(const char* key, bool required, bool non_empty) {
    const Json* v = raw(key);
    if (v == nullptr) {
        if (required) errors_.add(field(key), "is required");
        return std::nullopt;
    }
    if (!v->is_string()) {
        errors_.add(field(key), "must be a string");
        return std::nullopt;
    }
    auto s = v->get<std::string>();
    if (non_empty && s.empty()) {
        errors_.add(field(key), "must not be empty");
        return std::nullopt;
    }
    return s;
}

std::optional<long long> ObjectReader::integer(const char* key, bool required) {
    const Json* v = raw(key);
    if (v == nullptr) {
        if (required) errors_.add(field(key), "is required");
        return std::nullopt;
    }
    if (!v->is_number_integer()) {
        errors_.add(field(key), "must be an integer");
        return std::nullopt;
    }
    return v->get<long long>();
}

std::optional<double> ObjectReader::number(const char* key, bool required) {
    const Json* v = raw(key);
    if (v == nullptr) {
        if (required) errors_.add(field(key), "is required");
        return std::nullopt;
    }
    if (!v->is_number()) {
        errors_.add(field(key), "must be a number");
        return std::nullopt;
    }
    return v->get<double>();
}

std::optional<bool> ObjectReader::boolean(const char* key) {
    const Json* v = raw(key);
    if (v == nullptr) {
        return std::nullopt;
    }
    if (!v->is_boolean()) {
        errors_.add(field(key), "must be a boolean");
        return std::nullopt;
    }
    return v->get<bool>();
}

std::optional<std::vector<std::string>> ObjectReader::strings(const char* key, bool required) {
    const Json* v = raw(key);
    if (v == nullptr) {
        if (required) errors_.add(field(key), "is required");
        return std::nullopt;
    }
    if (!v->is_array() || !std::all_of(v->begin(), v->end(), [](const Json& e) { return e.is_string(); })) {
        errors_.add(field(key), "must be a list of strings");
        return std::nullopt;
    }
    return v->get<std::vector<std::string>>();
}

std::optional<std::string> ObjectReader::choice(const char* key, std::initializer_list<std::string_view> choices) {
    auto s = string(key);
    if (s && std::find(choices.begin(), choices.end(), *s) == choices.end()) {
        std::string allowed;
        for (auto c : choices) {
            allowed += allowed.empty() ? "" : ", ";
            allowed += c;
        }
        errors_.add(field(key), "must be one of: " + allowed);
        return std::nullopt;
    }
    return s;
}

} // namespace kumpul
