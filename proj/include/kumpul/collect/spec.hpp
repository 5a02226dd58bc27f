#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"
#include "kumpul/core/time.hpp"

namespace kumpul::collect {

/// Maps Record fields to keys of a source item. Recognised targets:
/// record_id, url, author, published_at, title, text, language,
/// location.lat, location.lon, raw_ref and extras.<name>. Keys may be
/// dotted paths into nested objects ("user.screen_name"). The target
/// "extras.*" copies every scalar under the source key, either a nested
/// object or flat "<key>.<name>" columns.
struct FieldMapping {
    std::map<std::string, std::string> fields;
    /// Constant values used when a target is unmapped or the item lacks it.
    std::map<std::string, std::string> defaults;
    /// "rfc3339", "unix", "unix_ms" or a strptime pattern.
    std::string timestamp_format = "rfc3339";

    bool operator==(const FieldMapping&) const = default;
};

struct DateRange {
    Timestamp start{};
    Timestamp end{};

    bool operator==(const DateRange&) const = default;
};

struct ConnectorSpec {
    std::string connector_kind;
    std::string source_name;
    SourceCategory source_category = SourceCategory::social_media;
    std::map<std::string, std::string> params;
    std::optional<FieldMapping> mapping;
    std::vector<std::string> keywords;
    std::optional<DateRange> date_range;
    /// Name of the dataset to create; defaults to source_name.
    std::optional<std::string> name;

    bool operator==(const ConnectorSpec&) const = default;

    const std::string* param(const std::string& key) const;
};

/// Strict parse of the collect job payload. Connector-specific parameter
/// checks happen in the connector's validate().
ConnectorSpec connector_spec_from_json(const Json& j);
Json to_json(const ConnectorSpec& spec);

FieldMapping field_mapping_from_json(const Json& j);
Json to_json(const FieldMapping& m);

/// The mapping attached to the spec, or one given as a JSON string in
/// params["mapping"]. Throws validation when neither exists or text is
/// unmapped.
FieldMapping require_mapping(const ConnectorSpec& spec);

/// Converts one source item (a JSON object) into a Record. Throws
/// Error(validation) describing why the item is unusable. Items without a
/// record_id mapping get "item-NNNNNN" where NNNNNN is index + 1.
Record map_item(const Json& item, const FieldMapping& mapping, const ConnectorSpec& spec, std::size_t index,
                Timestamp collected_at);

/// Collection-time narrowing by the spec's keywords (any, substring over
/// title and text) and date range (inclusive; undated items excluded).
bool passes_spec_filters(const Record& r, const ConnectorSpec& spec);

} // namespace kumpul::collect
