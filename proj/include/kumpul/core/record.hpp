#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kumpul/core/time.hpp"

namespace kumpul {

enum class SourceCategory { social_media, news, ecommerce_review, academic };

std::string_view to_string(SourceCategory c) noexcept;
std::optional<SourceCategory> parse_source_category(std::string_view s) noexcept;

struct Location {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const Location&) const = default;
};

/// One normalized text item in the common schema. Source-agnostic: nothing
/// downstream of a connector needs to know which platform produced it.
struct Record {
    std::string record_id;
    std::string source;
    SourceCategory source_category = SourceCategory::social_media;
    std::optional<std::string> url;
    std::optional<std::string> author;
    std::optional<Timestamp> published_at;
    Timestamp collected_at{};
    std::optional<std::string> title;
    std::string text;
    std::optional<std::string> language;
    std::optional<Location> location;
    std::map<std::string, std::string> extras;
    std::optional<std::string> raw_ref;

    bool operator==(const Record&) const = default;
};

enum class Violation {
    empty_record_id,
    empty_source,
    empty_text,
    out_of_bounds_location,
    invalid_language,
};

std::string_view to_string(Violation v) noexcept;

struct RecordViolation {
    Violation code;
    std::string message;
};

/// Every invariant the record breaks; empty means valid.
std::vector<RecordViolation> validate_record(const Record& r);

/// The text keyword and relevancy decisions look at: title and text joined
/// by a space when a title is present.
std::string searchable_text(const Record& r);

enum class DatasetKind { raw, merged, preprocessed };

std::string_view to_string(DatasetKind k) noexcept;
std::optional<DatasetKind> parse_dataset_kind(std::string_view s) noexcept;

struct Dataset {
    std::string dataset_id;
    std::string name;
    DatasetKind kind = DatasetKind::raw;
    std::vector<std::string> parent_ids;
    std::optional<std::string> created_by_job;
    std::size_t record_count = 0;
    Instant created_at{};

    bool operator==(const Dataset&) const = default;
};

/// Checks the kind/parent-count rule. Returns an explanation on failure.
std::optional<std::string> check_dataset_shape(const Dataset& d);

struct DatasetContents {
    Dataset meta;
    std::vector<Record> records;
};

/// Concatenates parents in the given order. With two or more parents the
/// result is kind=merged and every record_id becomes "<parent_id>/<record_id>";
/// a single parent yields an id-preserving copy (kind=preprocessed) that
/// records the lineage. No deduplication happens here.
DatasetContents merge_datasets(const std::vector<DatasetContents>& parents);

} // namespace kumpul
