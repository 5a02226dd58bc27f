#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"
#include "kumpul/langid/langid.hpp"

namespace kumpul::collect {

/// Which filter of the matching pipeline is expected to remove a record.
enum class Label { keep, duplicate, non_target_language, keyword_excluded, irrelevant };

std::string_view to_string(Label l) noexcept;
std::optional<Label> parse_label(std::string_view s) noexcept;

/// Relevancy context the generated corpus is built around.
inline constexpr const char* kSyntheticContext = "Kebijakan harga BBM dan dampaknya terhadap kehidupan sehari-hari";
/// Phrase planted in every keyword-excluded record.
inline constexpr const char* kPoisonPhrase = "blackberry messenger";
/// All generated published_at values fall inside this window.
inline constexpr const char* kSyntheticWindowStart = "2022-09-01T00:00:00Z";
inline constexpr const char* kSyntheticWindowEnd = "2022-09-30T23:59:59Z";

/// Noise either as fractions of total (rounded half away from zero) or as
/// explicit counts. Whatever remains is labeled keep.
struct SyntheticManifest {
    std::size_t total = 0;
    std::uint64_t seed = 0;
    double duplicate_fraction = 0.0;
    double non_target_language_fraction = 0.0;
    double keyword_excluded_fraction = 0.0;
    double irrelevant_fraction = 0.0;
    std::optional<std::map<Label, std::size_t>> counts;
    std::string source_name = "synthetic";

    /// Per-label record counts, keep included. Throws validation on
    /// fractions outside [0, 1], a noise total above `total`, or duplicates
    /// without any original to copy.
    std::map<Label, std::size_t> label_counts() const;
};

/// Keys: total, seed, source_name, duplicate_fraction,
/// non_target_language_fraction, keyword_excluded_fraction,
/// irrelevant_fraction, or a "counts" object keyed by label.
SyntheticManifest synthetic_manifest_from_json(const Json& j);
Json to_json(const SyntheticManifest& m);

struct SyntheticCorpus {
    std::vector<Record> records;
    std::vector<Label> labels; // parallel to records

    std::map<Label, std::size_t> counts() const;
};

/// Pure function of (manifest, english_pool, profiles). Record ids are
/// "syn-NNNNNN" in emission order; each duplicate is an exact copy of an
/// earlier original except for its id. The label is also stored in
/// extras["label"].
///
/// When profiles are given, draws the default detector would misjudge are
/// rejected: Indonesian texts must detect as "id", English ones as anything
/// else. This keeps the labels exact for the matching pipeline.
SyntheticCorpus generate_synthetic(const SyntheticManifest& manifest, const std::vector<std::string>& english_pool,
                                   const std::vector<langid::LanguageProfile>& profiles = {});

/// Uses the bundled English seed corpus and language profiles.
SyntheticCorpus generate_synthetic(const SyntheticManifest& manifest);

} // namespace kumpul::collect
