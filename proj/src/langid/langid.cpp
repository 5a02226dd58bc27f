#include "kumpul/langid/langid.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/text.hpp"

namespace kumpul::langid {

LanguageProfile::LanguageProfile(std::string language, std::vector<std::string> ranked, std::string built_from)
    : language_(std::move(language)), ranked_(std::move(ranked)), built_from_(std::move(built_from)) {
    rank_.reserve(ranked_.size());
    for (std::size_t i = 0; i < ranked_.size(); ++i) {
        rank_.emplace(ranked_[i], i);
    }
}

std::size_t LanguageProfile::rank_of(const std::string& ngram) const {
    auto it = rank_.find(ngram);
    return it == rank_.end() ? ranked_.size() : it->second;
}

std::vector<std::string> ranked_ngrams(const std::vector<std::string>& texts, std::size_t limit) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& text : texts) {
        for (const auto& token : tokenize(text)) {
            std::u32string padded = U"_" + decode_utf8(token) + U"_";
            for (std::size_t n = 1; n <= 3; ++n) {
                for (std::size_t i = 0; i + n <= padded.size(); ++i) {
                    auto gram = padded.substr(i, n);
                    if (gram.find_first_not_of(U'_') == std::u32string::npos) {
                        continue;
                    }
                    ++counts[encode_utf8(gram)];
                }
            }
        }
    }
    std::vector<std::pair<std::string, std::size_t>> entries(counts.begin(), counts.end());
    const auto keep = std::min(limit, entries.size());
    auto by_rank = [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    };
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(), by_rank);
    std::vector<std::string> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.push_back(std::move(entries[i].first));
    }
    return out;
}

LanguageProfile build_profile(const std::vector<std::string>& corpus, const std::string& language,
                              const std::string& built_from) {
    if (corpus.empty()) {
        throw_validation("corpus", "cannot build a profile from an empty corpus");
    }
    return LanguageProfile(language, ranked_ngrams(corpus, kProfileSize), built_from);
}

Detection detect(std::string_view text, const std::vector<LanguageProfile>& profiles, const DetectOptions& options) {
    if (profiles.empty()) {
        throw_validation("profiles", "no language profiles loaded");
    }
    Detection unknown{std::string(kUnknown), 0.0, 0.0};
    if (utf8_length(normalize_text(text)) < options.min_chars) {
        return unknown;
    }
    const auto doc = ranked_ngrams({std::string(text)}, kProfileSize);
    if (doc.empty()) {
        return unknown;
    }

    std::vector<std::pair<std::size_t, const LanguageProfile*>> distances;
    distances.reserve(profiles.size());
    for (const auto& profile : profiles) {
        std::size_t distance = 0;
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const auto r = profile.rank_of(doc[i]);
            distance += r == profile.size() ? kProfileSize : (r > i ? r - i : i - r);
        }
        distances.emplace_back(distance, &profile);
    }
    std::sort(distances.begin(), distances.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second->language() < b.second->language();
    });

    const double best = static_cast<double>(distances[0].first);
    const double max_distance = static_cast<double>(doc.size() * kProfileSize);
    Detection d;
    d.score = 1.0 - best / max_distance;
    if (distances.size() == 1) {
        d.margin = 1.0;
    } else {
        const double second = static_cast<double>(distances[1].first);
        d.margin = second > 0.0 ? (second - best) / second : 0.0;
    }
    d.language = d.margin < options.margin ? std::string(kUnknown) : distances[0].second->language();
    return d;
}

std::vector<Record> filter_language(std::vector<Record> records, const std::vector<LanguageProfile>& profiles,
                                    const std::set<std::string>& targets, UnknownPolicy unknown_policy,
                                    const DetectOptions& options) {
    for (const auto& t : targets) {
        const bool loaded = std::any_of(profiles.begin(), profiles.end(),
                                        [&](const LanguageProfile& p) { return p.language() == t; });
        if (!loaded) {
            throw_validation("language.targets", fmt::format("no profile loaded for '{}'", t));
        }
    }
    std::vector<Record> kept;
    kept.reserve(records.size());
    for (auto& r : records) {
        const auto detection = detect(r.text, profiles, options);
        r.language = detection.language;
        const bool keep = detection.known() ? targets.contains(detection.language)
                                            : unknown_policy == UnknownPolicy::keep;
        if (keep) {
            kept.push_back(std::move(r));
        }
    }
    return kept;
}

void save_profile(const LanguageProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::storage, "cannot write profile " + path.string());
    }
    for (const auto& gram : profile.ngrams()) {
        out << gram << '\n';
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot read " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

LanguageProfile load_profile(const std::filesystem::path& path, const std::string& language) {
    auto grams = read_lines(path);
    if (grams.size() > kProfileSize) {
        throw_validation(path.string(), "profile longer than the rank limit");
    }
    return LanguageProfile(language, std::move(grams), path.filename().string());
}

std::vector<LanguageProfile> load_profiles(const std::filesystem::path& dir) {
    std::map<std::string, std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.emplace(entry.path().stem().string(), entry.path());
        }
    }
    if (ec) {
        throw Error(ErrorCode::not_found, "cannot list profiles in " + dir.string());
    }
    std::vector<LanguageProfile> out;
    for (const auto& [lang, path] : files) {
        out.push_back(load_profile(path, lang));
    }
    return out;
}

SeedSplit split_seed(const std::vector<std::string>& sentences) {
    SeedSplit split;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        (i % 10 == 9 ? split.held_out : split.train).push_back(sentences[i]);
    }
    return split;
}

std::map<std::string, std::size_t> build_profiles_from_seeds(const std::filesystem::path& seeds_dir,
                                                             const std::filesystem::path& out_dir) {
    if (!std::filesystem::is_directory(seeds_dir)) {
        throw_validation("seeds", "not a directory: " + seeds_dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(seeds_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::filesystem::create_directories(out_dir);
    std::map<std::string, std::size_t> built;
    for (const auto& file : files) {
        const auto language = file.stem().string();
        const auto split = split_seed(read_lines(file));
        save_profile(build_profile(split.train, language), out_dir / (language + ".txt"));
        built[language] = split.train.size();
    }
    return built;
}

} // namespace kumpul::langid
