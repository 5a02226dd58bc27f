#include "kumpul/core/record.hpp"

#include <algorithm>

#include "kumpul/core/error.hpp"

namespace kumpul {

std::string_view to_string(SourceCategory c) noexcept {
    switch (c) {
    case SourceCategory::social_media: return "social_media";
    case SourceCategory::news: return "news";
    case SourceCategory::ecommerce_review: return "ecommerce_review";
    case SourceCategory::academic: return "academic";
    }
    return "social_media";
}

std::optional<SourceCategory> parse_source_category(std::string_view s) noexcept {
    for (auto c : {SourceCategory::social_media, SourceCategory::news, SourceCategory::ecommerce_review,
                   SourceCategory::academic}) {
        if (to_string(c) == s) {
            return c;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Violation v) noexcept {
    switch (v) {
    case Violation::empty_record_id: return "empty_record_id";
    case Violation::empty_source: return "empty_source";
    case Violation::empty_text: return "empty_text";
    case Violation::out_of_bounds_location: return "out_of_bounds_location";
    case Violation::invalid_language: return "invalid_language";
    }
    return "unknown";
}

std::vector<RecordViolation> validate_record(const Record& r) {
    std::vector<RecordViolation> out;
    if (r.record_id.empty()) {
        out.push_back({Violation::empty_record_id, "record_id must be non-empty"});
    }
    if (r.source.empty()) {
        out.push_back({Violation::empty_source, "source must be non-empty"});
    }
    if (r.text.empty()) {
        out.push_back({Violation::empty_text, "text is empty"});
    }
    if (r.location) {
        const auto& loc = *r.location;
        if (!(loc.lat >= -90.0 && loc.lat <= 90.0) || !(loc.lon >= -180.0 && loc.lon <= 180.0)) {
            out.push_back({Violation::out_of_bounds_location, "location outside lat [-90,90] / lon [-180,180]"});
        }
    }
    if (r.language) {
        const auto& lang = *r.language;
        const bool ok = !lang.empty() && std::all_of(lang.begin(), lang.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || c == '-';
        });
        if (!ok) {
            out.push_back({Violation::invalid_language, "language must be a lowercase code"});
        }
    }
    return out;
}

std::string searchable_text(const Record& r) {
    if (r.title && !r.title->empty()) {
        return *r.title + " " + r.text;
    }
    return r.text;
}

std::string_view to_string(DatasetKind k) noexcept {
    switch (k) {
    case DatasetKind::raw: return "raw";
    case DatasetKind::merged: return "merged";
    case DatasetKind::preprocessed: return "preprocessed";
    }
    return "raw";
}

std::optional<DatasetKind> parse_dataset_kind(std::string_view s) noexcept {
    for (auto k : {DatasetKind::raw, DatasetKind::merged, DatasetKind::preprocessed}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_dataset_shape(const Dataset& d) {
    const auto n = d.parent_ids.size();
    switch (d.kind) {
    case DatasetKind::raw:
        if (n != 0) {
            return "raw dataset cannot have parents";
        }
        break;
    case DatasetKind::merged:
        if (n < 2) {
            return "merged dataset needs at least two parents";
        }
        break;
    case DatasetKind::preprocessed:
        if (n < 1) {
            return "preprocessed dataset needs at least one parent";
        }
        break;
    }
    if (std::find(d.parent_ids.begin(), d.parent_ids.end(), d.dataset_id) != d.parent_ids.end() &&
        !d.dataset_id.empty()) {
        return "dataset cannot be its own parent";
    }
    return std::nullopt;
}

DatasetContents merge_datasets(const std::vector<DatasetContents>& parents) {
    if (parents.empty()) {
        throw_validation("inputs", "at least one parent dataset is required");
    }
    DatasetContents out;
    const bool namespaced = parents.size() >= 2;
    out.meta.kind = namespaced ? DatasetKind::merged : DatasetKind::preprocessed;
    std::size_t total = 0;
    for (const auto& p : parents) {
        total += p.records.size();
    }
    out.records.reserve(total);
    for (const auto& p : parents) {
        out.meta.parent_ids.push_back(p.meta.dataset_id);
        for (const auto& r : p.records) {
            Record copy = r;
            if (namespaced) {
                copy.record_id = p.meta.dataset_id + "/" + r.record_id;
            }
            out.records.push_back(std::move(copy));
        }
    }
    out.meta.record_count = out.records.size();
    return out;
}

} // namespace kumpul
