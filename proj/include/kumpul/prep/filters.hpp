#pragma once

#include <string>
#include <vector>

#include "kumpul/core/record.hpp"
#include "kumpul/core/time.hpp"

namespace kumpul::prep {

enum class MissingTimestampPolicy { drop, keep };
enum class MatchMode { substring, whole_word };

/// Keeps start <= published_at <= end. Throws validation when start > end.
std::vector<Record> filter_date(std::vector<Record> records, Timestamp start, Timestamp end,
                                MissingTimestampPolicy policy = MissingTimestampPolicy::drop);

/// Term matcher over normalize_text(title + " " + text). Terms are
/// normalized the same way; whole_word matches the term's token sequence
/// contiguously within the record's token sequence.
class KeywordMatcher {
public:
    KeywordMatcher(std::vector<std::string> include, std::vector<std::string> exclude, MatchMode mode);

    bool keep(const Record& record) const;

private:
    struct Term {
        std::string canonical;
        std::vector<std::string> tokens;
    };
    bool any_match(const std::vector<Term>& terms, const std::string& canonical,
                   const std::vector<std::string>& tokens) const;

    std::vector<Term> include_;
    std::vector<Term> exclude_;
    MatchMode mode_;
};

std::vector<Record> filter_keyword(std::vector<Record> records, const std::vector<std::string>& include,
                                   const std::vector<std::string>& exclude, MatchMode mode = MatchMode::substring);

} // namespace kumpul::prep
