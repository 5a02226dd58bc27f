#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kumpul/core/record.hpp"

namespace kumpul::langid {

inline constexpr std::size_t kProfileSize = 300;
inline constexpr std::string_view kUnknown = "unknown";

/// Character n-grams (n = 1..3) ranked by frequency, most frequent first.
class LanguageProfile {
public:
    LanguageProfile() = default;
    LanguageProfile(std::string language, std::vector<std::string> ranked, std::string built_from = {});

    const std::string& language() const noexcept { return language_; }
    const std::vector<std::string>& ngrams() const noexcept { return ranked_; }
    const std::string& built_from() const noexcept { return built_from_; }

    /// Rank of the n-gram, or size() when absent.
    std::size_t rank_of(const std::string& ngram) const;
    std::size_t size() const noexcept { return ranked_.size(); }

    bool operator==(const LanguageProfile& other) const {
        return language_ == other.language_ && ranked_ == other.ranked_;
    }

private:
    std::string language_;
    std::vector<std::string> ranked_;
    std::string built_from_;
    std::unordered_map<std::string, std::size_t> rank_;
};

/// Top-`limit` n-grams of the normalized text. Tokens are padded with '_'
/// on both sides; n-grams made only of padding are skipped. Ties are broken
/// by byte order of the n-gram.
std::vector<std::string> ranked_ngrams(const std::vector<std::string>& texts, std::size_t limit = kProfileSize);

/// Throws Error(validation) on an empty corpus.
LanguageProfile build_profile(const std::vector<std::string>& corpus, const std::string& language,
                              const std::string& built_from = {});

struct DetectOptions {
    /// Relative gap (second - best) / second below which the text is
    /// reported as unknown.
    double margin = 0.05;
    /// Shorter normalized texts (in code points) are reported as unknown.
    std::size_t min_chars = 20;
};

struct Detection {
    std::string language;   // a profile's code or "unknown"
    double score = 0.0;     // 1 - best distance / max distance, in [0, 1]
    double margin = 0.0;    // relative gap to the runner-up
    bool known() const { return language != kUnknown; }
};

/// Out-of-place rank distance against every profile. Equal distances are
/// resolved by language code ascending, so profile order never matters.
/// Throws Error(validation) when `profiles` is empty.
Detection detect(std::string_view text, const std::vector<LanguageProfile>& profiles,
                 const DetectOptions& options = {});

enum class UnknownPolicy { drop, keep };

/// Annotates each record's language and keeps those whose detected language
/// is a target (unknown handled by policy). Throws Error(validation) when a
/// target has no loaded profile.
std::vector<Record> filter_language(std::vector<Record> records, const std::vector<LanguageProfile>& profiles,
                                    const std::set<std::string>& targets, UnknownPolicy unknown_policy,
                                    const DetectOptions& options = {});

// Files ---------------------------------------------------------------------

/// One n-gram per line, rank order, UTF-8.
void save_profile(const LanguageProfile& profile, const std::filesystem::path& path);
LanguageProfile load_profile(const std::filesystem::path& path, const std::string& language);
/// Loads every "<lang>.txt" in the directory, sorted by language code.
std::vector<LanguageProfile> load_profiles(const std::filesystem::path& dir);

std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Deterministic seed split: every tenth sentence (index % 10 == 9) is held
/// out for evaluation, the rest build the profile.
struct SeedSplit {
    std::vector<std::string> train;
    std::vector<std::string> held_out;
};
SeedSplit split_seed(const std::vector<std::string>& sentences);

/// Builds a profile from the training split of every "<lang>.txt" in
/// `seeds_dir` and writes it to `out_dir`/<lang>.txt. Returns the number of
/// training sentences per language.
std::map<std::string, std::size_t> build_profiles_from_seeds(const std::filesystem::path& seeds_dir,
                                                             const std::filesystem::path& out_dir);

} // namespace kumpul::langid
