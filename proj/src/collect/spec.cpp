#include "kumpul/collect/spec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"
#include "kumpul/core/text.hpp"
#include "kumpul/prep/filters.hpp"

namespace kumpul::collect {

namespace {

bool known_target(const std::string& t) {
    static const std::vector<std::string> plain = {"record_id", "url",   "author",       "published_at",
                                                   "title",     "text",  "language",     "location.lat",
                                                   "location.lon", "raw_ref"};
    if (std::find(plain.begin(), plain.end(), t) != plain.end()) {
        return true;
    }
    return t.rfind("extras.", 0) == 0 && t.size() > 7;
}

std::map<std::string, std::string> read_string_map(const Json& j, const std::string& path, FieldErrors& errors,
                                                   bool allow_scalars) {
    std::map<std::string, std::string> out;
    if (!j.is_object()) {
        errors.add(path, "must be an object of strings");
        return out;
    }
    for (const auto& [k, v] : j.items()) {
        if (v.is_string()) {
            out[k] = v.get<std::string>();
        } else if (allow_scalars && (v.is_number() || v.is_boolean())) {
            out[k] = v.dump();
        } else {
            errors.add(join_path(path, k), "must be a string");
        }
    }
    return out;
}

FieldMapping read_mapping(const Json& j, const std::string& path, FieldErrors& errors) {
    FieldMapping m;
    ObjectReader r(j, path, errors);
    if (!r.ok()) return m;
    r.allow_only({"fields", "defaults", "timestamp_format"});
    if (auto f = r.raw("fields")) {
        m.fields = read_string_map(*f, r.field("fields"), errors, false);
    }
    if (auto d = r.raw("defaults")) {
        m.defaults = read_string_map(*d, r.field("defaults"), errors, true);
    }
    if (auto fmt = r.string("timestamp_format")) {
        m.timestamp_format = *fmt;
    }
    for (const auto& [target, _] : m.fields) {
        if (!known_target(target)) {
            errors.add(r.field("fields." + target), "is not a Record field");
        }
    }
    for (const auto& [target, _] : m.defaults) {
        if (!known_target(target)) {
            errors.add(r.field("defaults." + target), "is not a Record field");
        }
    }
    if (!m.fields.contains("text") && !m.defaults.contains("text")) {
        errors.add(r.field("fields.text"), "text must be mapped");
    }
    return m;
}

const Json* lookup(const Json& item, const std::string& key) {
    if (auto it = item.find(key); it != item.end()) {
        return &*it;
    }
    const Json* cur = &item;
    std::size_t start = 0;
    while (start <= key.size()) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!cur->is_object()) {
            return nullptr;
        }
        auto it = cur->find(part);
        if (it == cur->end()) {
            return nullptr;
        }
        cur = &*it;
        if (dot == std::string::npos) {
            return cur;
        }
        start = dot + 1;
    }
    return nullptr;
}

std::optional<std::string> scalar_text(const Json& v) {
    if (v.is_null()) return std::nullopt;
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

double parse_coordinate(const std::string& s, const char* which) {
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw Error(ErrorCode::validation, fmt::format("{} '{}' is not a number", which, s));
    }
    return value;
}

} // namespace

const std::string* ConnectorSpec::param(const std::string& key) const {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
}

FieldMapping field_mapping_from_json(const Json& j) {
    FieldErrors errors;
    auto m = read_mapping(j, "mapping", errors);
    errors.raise_if_any("invalid field mapping");
    return m;
}

Json to_json(const FieldMapping& m) {
    return Json{{"fields", m.fields}, {"defaults", m.defaults}, {"timestamp_format", m.timestamp_format}};
}

ConnectorSpec connector_spec_from_json(const Json& j) {
    FieldErrors errors;
    ConnectorSpec spec;
    ObjectReader r(j, "", errors);
    if (r.ok()) {
        r.allow_only({"connector_kind", "source_name", "source_category", "params", "mapping", "keywords",
                      "date_range", "name"});
        if (auto k = r.string("connector_kind", true)) spec.connector_kind = *k;
        if (auto s = r.string("source_name", true)) spec.source_name = *s;
        if (auto c = r.string("source_category")) {
            if (auto parsed = parse_source_category(*c)) {
                spec.source_category = *parsed;
            } else {
                errors.add("source_category", "must be one of: social_media, news, ecommerce_review, academic");
            }
        }
        if (auto p = r.raw("params")) {
            spec.params = read_string_map(*p, "params", errors, true);
        }
        if (auto m = r.raw("mapping")) {
            spec.mapping = read_mapping(*m, "mapping", errors);
        }
        if (auto kw = r.strings("keywords")) spec.keywords = *kw;
        if (auto dr = r.raw("date_range")) {
            ObjectReader d(*dr, "date_range", errors);
            if (d.ok()) {
                d.allow_only({"start", "end"});
                auto start = d.string("start", true);
                auto end = d.string("end", true);
                auto ps = start ? parse_rfc3339(*start) : std::nullopt;
                auto pe = end ? parse_rfc3339(*end) : std::nullopt;
                if (start && !ps) errors.add("date_range.start", "must be an RFC 3339 timestamp");
                if (end && !pe) errors.add("date_range.end", "must be an RFC 3339 timestamp");
                if (ps && pe) {
                    if (*ps > *pe) {
                        errors.add("date_range.start", "must not be after date_range.end");
                    }
                    spec.date_range = DateRange{to_seconds(*ps), to_seconds(*pe)};
                }
            }
        }
        spec.name = r.string("name");
    }
    errors.raise_if_any("invalid connector spec");
    return spec;
}

Json to_json(const ConnectorSpec& spec) {
    Json j = {{"connector_kind", spec.connector_kind},
              {"source_name", spec.source_name},
              {"source_category", std::string(to_string(spec.source_category))},
              {"params", spec.params}};
    if (spec.mapping) j["mapping"] = to_json(*spec.mapping);
    if (!spec.keywords.empty()) j["keywords"] = spec.keywords;
    if (spec.date_range) {
        j["date_range"] = {{"start", format_rfc3339(spec.date_range->start)},
                           {"end", format_rfc3339(spec.date_range->end)}};
    }
    if (spec.name) j["name"] = *spec.name;
    return j;
}

FieldMapping require_mapping(const ConnectorSpec& spec) {
    if (spec.mapping) {
        if (!spec.mapping->fields.contains("text") && !spec.mapping->defaults.contains("text")) {
            throw_validation("mapping.fields.text", "text must be mapped");
        }
        return *spec.mapping;
    }
    if (const auto* raw = spec.param("mapping")) {
        Json j;
        try {
            j = Json::parse(*raw);
        } catch (const Json::parse_error&) {
            throw_validation("params.mapping", "must hold a JSON field mapping");
        }
        return field_mapping_from_json(j);
    }
    throw_validation("mapping", "a field mapping with a text entry is required");
}

namespace {

// "extras.*" -> "<key>" copies every scalar member of the object at <key>,
// plus flat "<key>.<name>" columns as produced by CSV export.
void copy_wildcard_extras(const Json& item, const std::string& key, std::map<std::string, std::string>& out) {
    if (const Json* obj = lookup(item, key); obj != nullptr && obj->is_object()) {
        for (const auto& [name, value] : obj->items()) {
            if (auto s = scalar_text(value)) {
                out[name] = *s;
            }
        }
    }
    const std::string prefix = key + ".";
    for (const auto& [name, value] : item.items()) {
        if (name.size() > prefix.size() && name.rfind(prefix, 0) == 0) {
            if (auto s = scalar_text(value); s && !s->empty()) {
                out[name.substr(prefix.size())] = *s;
            }
        }
    }
}

} // namespace

Record map_item(const Json& item, const FieldMapping& mapping, const ConnectorSpec& spec, std::size_t index,
                Timestamp collected_at) {
    if (!item.is_object()) {
        throw Error(ErrorCode::validation, "item is not an object");
    }
    auto get = [&](const std::string& target) -> std::optional<std::string> {
        if (auto it = mapping.fields.find(target); it != mapping.fields.end()) {
            if (const Json* v = lookup(item, it->second)) {
                if (auto s = scalar_text(*v)) {
                    return s;
                }
            }
        }
        if (auto it = mapping.defaults.find(target); it != mapping.defaults.end()) {
            return it->second;
        }
        return std::nullopt;
    };

    Record r;
    r.record_id = get("record_id").value_or(fmt::format("item-{:06}", index + 1));
    r.source = spec.source_name;
    r.source_category = spec.source_category;
    r.collected_at = collected_at;
    r.url = get("url");
    r.author = get("author");
    r.title = get("title");
    r.text = get("text").value_or("");
    r.language = get("language");
    r.raw_ref = get("raw_ref");
    if (auto ts = get("published_at")) {
        auto parsed = parse_timestamp(*ts, mapping.timestamp_format);
        if (!parsed) {
            throw Error(ErrorCode::validation,
                        fmt::format("published_at '{}' does not match format '{}'", *ts, mapping.timestamp_format));
        }
        r.published_at = *parsed;
    }
    auto lat = get("location.lat");
    auto lon = get("location.lon");
    if (lat.has_value() != lon.has_value()) {
        throw Error(ErrorCode::validation, "location needs both lat and lon");
    }
    if (lat) {
        r.location = Location{parse_coordinate(*lat, "location.lat"), parse_coordinate(*lon, "location.lon")};
    }
    std::set<std::string> extra_targets;
    for (const auto& [target, _] : mapping.fields) extra_targets.insert(target);
    for (const auto& [target, _] : mapping.defaults) extra_targets.insert(target);
    for (const auto& target : extra_targets) {
        if (target == "extras.*") {
            if (auto it = mapping.fields.find(target); it != mapping.fields.end()) {
                copy_wildcard_extras(item, it->second, r.extras);
            }
        } else if (target.rfind("extras.", 0) == 0) {
            if (auto v = get(target)) {
                r.extras[target.substr(7)] = *v;
            }
        }
    }
    // Empty strings are stored as absent.
    for (auto* opt : {&r.url, &r.author, &r.title, &r.language, &r.raw_ref}) {
        if (*opt && (*opt)->empty()) {
            opt->reset();
        }
    }
    if (auto violations = validate_record(r); !violations.empty()) {
        throw Error(ErrorCode::validation, violations.front().message);
    }
    return r;
}

bool passes_spec_filters(const Record& r, const ConnectorSpec& spec) {
    if (spec.date_range) {
        if (!r.published_at || *r.published_at < spec.date_range->start || *r.published_at > spec.date_range->end) {
            return false;
        }
    }
    if (!spec.keywords.empty()) {
        const prep::KeywordMatcher matcher(spec.keywords, {}, prep::MatchMode::substring);
        return matcher.keep(r);
    }
    return true;
}

} // namespace kumpul::collect
