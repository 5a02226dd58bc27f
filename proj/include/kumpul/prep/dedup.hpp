#pragma once

#include <string>
#include <vector>

#include "kumpul/core/record.hpp"

namespace kumpul::prep {

enum class DedupMode { exact, near };

struct DedupConfig {
    DedupMode mode = DedupMode::exact;
    /// Maximum SimHash Hamming distance treated as a near duplicate, 0..64.
    int near_threshold = 3;
};

struct DedupResult {
    std::vector<Record> kept;             // input order preserved
    std::vector<std::string> removed_ids; // input order preserved
};

/// Groups duplicates transitively: equal normalize_text(text), equal url
/// (both present), and in near mode SimHash distance <= near_threshold.
/// Each group keeps the record with the earliest published_at (missing
/// timestamps last), ties broken by record_id ascending.
DedupResult filter_dedup(std::vector<Record> records, const DedupConfig& config);

/// Keep-rule ordering: true when `a` should survive over `b`.
bool keeps_over(const Record& a, const Record& b);

} // namespace kumpul::prep
