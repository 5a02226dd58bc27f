#include <cctype>
#include <map>

#include <fmt/format.h>

#include "kumpul/analysis/analysis.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"

namespace kumpul::analysis {

namespace {

struct TrendParams {
    std::string bucket = "day";
    long long bucket_secs = 86400;
    long long offset_secs = 0;
    std::string offset_text = "+00:00";
};

std::optional<long long> parse_offset(const std::string& s) {
    if (s == "Z" || s == "UTC") {
        return 0;
    }
    if (s.size() != 6 || (s[0] != '+' && s[0] != '-') || s[3] != ':') {
        return std::nullopt;
    }
    auto digit = [&](std::size_t i) { return std::isdigit(static_cast<unsigned char>(s[i])) != 0; };
    if (!digit(1) || !digit(2) || !digit(4) || !digit(5)) {
        return std::nullopt;
    }
    const int hh = (s[1] - '0') * 10 + (s[2] - '0');
    const int mm = (s[4] - '0') * 10 + (s[5] - '0');
    if (hh > 14 || mm > 59) {
        return std::nullopt;
    }
    const long long secs = hh * 3600LL + mm * 60LL;
    return s[0] == '-' ? -secs : secs;
}

TrendParams read_params(const AnalysisRequest& request) {
    FieldErrors errors;
    ObjectReader r(request.params, "params", errors);
    r.allow_only({"bucket", "tz_offset"});
    TrendParams p;
    if (auto b = r.choice("bucket", {"hour", "day", "week"})) {
        p.bucket = *b;
        p.bucket_secs = *b == "hour" ? 3600 : *b == "day" ? 86400 : 7 * 86400;
    }
    if (auto tz = r.string("tz_offset")) {
        if (auto off = parse_offset(*tz)) {
            p.offset_secs = *off;
            const long long a = *off < 0 ? -*off : *off;
            p.offset_text = fmt::format("{}{:02}:{:02}", *off < 0 ? '-' : '+', a / 3600, (a % 3600) / 60);
        } else {
            errors.add("params.tz_offset", "must look like +07:00");
        }
    }
    errors.raise_if_any("invalid trend params");
    return p;
}

long long floor_div(long long a, long long b) {
    return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0);
}

constexpr long long kMaxBuckets = 100000;

// 1970-01-01 was a Thursday, so Monday-aligned weeks start 3 days earlier.
constexpr long long kWeekShift = 3 * 86400;

long long bucket_index(long long local_secs, const TrendParams& p) {
    if (p.bucket == "week") {
        return floor_div(local_secs + kWeekShift, p.bucket_secs);
    }
    return floor_div(local_secs, p.bucket_secs);
}

long long bucket_start_local(long long index, const TrendParams& p) {
    return index * p.bucket_secs - (p.bucket == "week" ? kWeekShift : 0);
}

std::string format_local(long long local_secs, const TrendParams& p) {
    std::string s = format_rfc3339(Timestamp{std::chrono::seconds{local_secs}});
    s.pop_back(); // 'Z'
    return s + p.offset_text;
}

} // namespace

Json TrendAnalyzer::describe() const {
    return Json{{"id", id()},
                {"description", "record counts per time bucket, gaps zero-filled"},
                {"params", Json::array({Json{{"name", "bucket"}, {"required", false}, {"description", "hour, day or week"}},
                                        Json{{"name", "tz_offset"}, {"required", false}, {"description", "e.g. +07:00"}}})}};
}

void TrendAnalyzer::validate(const AnalysisRequest& request) const {
    read_params(request);
}

AnalysisResult TrendAnalyzer::analyze(const std::vector<Record>& records, const AnalysisRequest& request) const {
    const auto p = read_params(request);
    std::map<long long, std::size_t> counts;
    std::size_t missing = 0;
    for (const auto& r : records) {
        if (!r.published_at) {
            ++missing;
            continue;
        }
        const long long local = r.published_at->time_since_epoch().count() + p.offset_secs;
        ++counts[bucket_index(local, p)];
    }
    if (counts.empty()) {
        throw Error(ErrorCode::validation, "trend analysis needs at least one record with published_at");
    }
    if (counts.rbegin()->first - counts.begin()->first >= kMaxBuckets) {
        throw_validation("params.bucket", "time span too long for this bucket size");
    }
    AnalysisResult result;
    result.detail = Json::array();
    long long peak_index = counts.begin()->first;
    std::size_t peak = 0;
    for (long long i = counts.begin()->first; i <= counts.rbegin()->first; ++i) {
        const auto it = counts.find(i);
        const std::size_t n = it == counts.end() ? 0 : it->second;
        if (n > peak) {
            peak = n;
            peak_index = i;
        }
        result.detail.push_back(Json{{"bucket_start", format_local(bucket_start_local(i, p), p)}, {"count", n}});
    }
    result.summary = Json{{"bucket", p.bucket},
                          {"tz_offset", p.offset_text},
                          {"buckets", result.detail.size()},
                          {"timestamped", records.size() - missing},
                          {"missing_timestamp", missing},
                          {"peak_bucket", format_local(bucket_start_local(peak_index, p), p)},
                          {"peak_count", peak}};
    return result;
}

} // namespace kumpul::analysis
