#include "kumpul/prep/filters.hpp"

#include <algorithm>

#include "kumpul/core/error.hpp"
#include "kumpul/core/text.hpp"

namespace kumpul::prep {

std::vector<Record> filter_date(std::vector<Record> records, Timestamp start, Timestamp end,
                                MissingTimestampPolicy policy) {
    if (start > end) {
        throw_validation("date.start", "start must not be after end");
    }
    std::erase_if(records, [&](const Record& r) {
        if (!r.published_at) {
            return policy == MissingTimestampPolicy::drop;
        }
        return *r.published_at < start || *r.published_at > end;
    });
    return records;
}

KeywordMatcher::KeywordMatcher(std::vector<std::string> include, std::vector<std::string> exclude, MatchMode mode)
    : mode_(mode) {
    auto convert = [](const std::vector<std::string>& terms) {
        std::vector<Term> out;
        for (const auto& t : terms) {
            Term term{normalize_text(t), tokenize(t)};
            if (!term.canonical.empty()) {
                out.push_back(std::move(term));
            }
        }
        return out;
    };
    include_ = convert(include);
    exclude_ = convert(exclude);
}

bool KeywordMatcher::any_match(const std::vector<Term>& terms, const std::string& canonical,
                               const std::vector<std::string>& tokens) const {
    for (const auto& term : terms) {
        if (mode_ == MatchMode::substring) {
            if (canonical.find(term.canonical) != std::string::npos) {
                return true;
            }
        } else if (!term.tokens.empty() &&
                   std::search(tokens.begin(), tokens.end(), term.tokens.begin(), term.tokens.end()) != tokens.end()) {
            return true;
        }
    }
    return false;
}

bool KeywordMatcher::keep(const Record& record) const {
    const std::string haystack = searchable_text(record);
    const std::string canonical = normalize_text(haystack);
    std::vector<std::string> tokens;
    if (mode_ == MatchMode::whole_word) {
        tokens = tokenize(canonical);
    }
    if (!include_.empty() && !any_match(include_, canonical, tokens)) {
        return false;
    }
    return !any_match(exclude_, canonical, tokens);
}

std::vector<Record> filter_keyword(std::vector<Record> records, const std::vector<std::string>& include,
                                   const std::vector<std::string>& exclude, MatchMode mode) {
    const KeywordMatcher matcher(include, exclude, mode);
    std::erase_if(records, [&](const Record& r) { return !matcher.keep(r); });
    return records;
}

} // namespace kumpul::prep
