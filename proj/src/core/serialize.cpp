#include "kumpul/core/serialize.hpp"

#include <set>

#include <fmt/format.h>

#include "kumpul/core/csv.hpp"
#include "kumpul/core/error.hpp"

namespace kumpul {

namespace {

const std::set<std::string, std::less<>> kRecordFields = {
    "record_id", "source", "source_category", "url", "author", "published_at", "collected_at",
    "title", "text", "language", "location", "extras", "raw_ref"};

std::string require_string(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) {
        throw_validation(field, "required string field missing");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw_validation(field, "expected a string");
    }
    return it->get<std::string>();
}

Timestamp require_time(const std::string& s, const char* field) {
    auto t = parse_rfc3339(s);
    if (!t) {
        throw_validation(field, "expected an RFC 3339 timestamp");
    }
    return to_seconds(*t);
}

std::string format_double(double v) {
    return fmt::format("{}", v);
}

} // namespace

Json to_json(const Record& r) {
    Json j = Json::object();
    j["record_id"] = r.record_id;
    j["source"] = r.source;
    j["source_category"] = std::string(to_string(r.source_category));
    if (r.url) j["url"] = *r.url;
    if (r.author) j["author"] = *r.author;
    if (r.published_at) j["published_at"] = format_rfc3339(*r.published_at);
    j["collected_at"] = format_rfc3339(r.collected_at);
    if (r.title) j["title"] = *r.title;
    j["text"] = r.text;
    if (r.language) j["language"] = *r.language;
    if (r.location) j["location"] = Json{{"lat", r.location->lat}, {"lon", r.location->lon}};
    Json extras = Json::object();
    for (const auto& [k, v] : r.extras) {
        extras[k] = v;
    }
    j["extras"] = std::move(extras);
    if (r.raw_ref) j["raw_ref"] = *r.raw_ref;
    return j;
}

Record record_from_json(const Json& j) {
    if (!j.is_object()) {
        throw_validation("record", "expected a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (!kRecordFields.contains(key)) {
            throw_validation(key, "unknown record field");
        }
    }
    Record r;
    r.record_id = require_string(j, "record_id");
    r.source = require_string(j, "source");
    const auto cat = require_string(j, "source_category");
    auto parsed = parse_source_category(cat);
    if (!parsed) {
        throw_validation("source_category", "unknown category '" + cat + "'");
    }
    r.source_category = *parsed;
    r.url = optional_string(j, "url");
    r.author = optional_string(j, "author");
    if (auto p = optional_string(j, "published_at")) {
        r.published_at = require_time(*p, "published_at");
    }
    r.collected_at = require_time(require_string(j, "collected_at"), "collected_at");
    r.title = optional_string(j, "title");
    r.text = require_string(j, "text");
    r.language = optional_string(j, "language");
    if (auto it = j.find("location"); it != j.end() && !it->is_null()) {
        if (!it->is_object() || !it->contains("lat") || !it->contains("lon") || !(*it)["lat"].is_number() ||
            !(*it)["lon"].is_number()) {
            throw_validation("location", "expected {lat, lon} numbers");
        }
        r.location = Location{(*it)["lat"].get<double>(), (*it)["lon"].get<double>()};
    }
    if (auto it = j.find("extras"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw_validation("extras", "expected an object of strings");
        }
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) {
                throw_validation("extras." + k, "expected a string");
            }
            r.extras[k] = v.get<std::string>();
        }
    }
    r.raw_ref = optional_string(j, "raw_ref");
    return r;
}

Json to_json(const Dataset& d) {
    Json j = Json::object();
    j["dataset_id"] = d.dataset_id;
    j["name"] = d.name;
    j["kind"] = std::string(to_string(d.kind));
    j["parent_ids"] = d.parent_ids;
    if (d.created_by_job) j["created_by_job"] = *d.created_by_job;
    j["record_count"] = d.record_count;
    j["created_at"] = format_rfc3339(d.created_at);
    return j;
}

Dataset dataset_from_json(const Json& j) {
    Dataset d;
    d.dataset_id = require_string(j, "dataset_id");
    d.name = require_string(j, "name");
    auto kind = parse_dataset_kind(require_string(j, "kind"));
    if (!kind) {
        throw_validation("kind", "unknown dataset kind");
    }
    d.kind = *kind;
    if (auto it = j.find("parent_ids"); it != j.end()) {
        d.parent_ids = it->get<std::vector<std::string>>();
    }
    d.created_by_job = optional_string(j, "created_by_job");
    d.record_count = j.value("record_count", std::size_t{0});
    auto created = parse_rfc3339(require_string(j, "created_at"));
    if (!created) {
        throw_validation("created_at", "expected an RFC 3339 timestamp");
    }
    d.created_at = *created;
    return d;
}

void write_jsonl(std::ostream& out, const std::vector<Record>& records) {
    for (const auto& r : records) {
        out << to_json(r).dump() << '\n';
    }
}

std::vector<std::string> csv_header(const std::vector<Record>& records) {
    std::set<std::string> extra_keys;
    for (const auto& r : records) {
        for (const auto& [k, _] : r.extras) {
            extra_keys.insert(k);
        }
    }
    std::vector<std::string> header = {"record_id", "source", "source_category", "url", "author",
                                       "published_at", "collected_at", "title", "text", "language",
                                       "location.lat", "location.lon"};
    for (const auto& k : extra_keys) {
        header.push_back("extras." + k);
    }
    header.emplace_back("raw_ref");
    return header;
}

void write_csv(std::ostream& out, const std::vector<Record>& records) {
    const auto header = csv_header(records);
    csv::write_row(out, header);
    for (const auto& r : records) {
        std::vector<std::string> row = {
            r.record_id,
            r.source,
            std::string(to_string(r.source_category)),
            r.url.value_or(""),
            r.author.value_or(""),
            r.published_at ? format_rfc3339(*r.published_at) : "",
            format_rfc3339(r.collected_at),
            r.title.value_or(""),
            r.text,
            r.language.value_or(""),
            r.location ? format_double(r.location->lat) : "",
            r.location ? format_double(r.location->lon) : "",
        };
        for (std::size_t i = 12; i + 1 < header.size(); ++i) {
            auto it = r.extras.find(header[i].substr(7));
            row.push_back(it == r.extras.end() ? "" : it->second);
        }
        row.push_back(r.raw_ref.value_or(""));
        csv::write_row(out, row);
    }
}

} // namespace kumpul
