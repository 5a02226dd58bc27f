#include "kumpul/core/time.hpp"

#include <charconv>
#include <ctime>

#include <fmt/format.h>

namespace kumpul {

namespace {

using namespace std::chrono;

std::string format_date_time(sys_seconds t) {
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) {
        return false;
    }
    const char* first = s.data() + pos;
    const char* last = first + len;
    for (const char* p = first; p != last; ++p) {
        if (*p < '0' || *p > '9') {
            return false;
        }
    }
    return std::from_chars(first, last, out).ec == std::errc{};
}

} // namespace

std::string format_rfc3339(Timestamp t) {
    return format_date_time(t) + "Z";
}

std::string format_rfc3339(Instant t) {
    const auto secs = floor<seconds>(t);
    const auto ms = (t - secs).count();
    return fmt::format("{}.{:03d}Z", format_date_time(secs), ms);
}

std::optional<Instant> parse_rfc3339(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    if (s.size() < 20 || !read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
        !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') || !read_int(s, 11, 2, h) ||
        s[13] != ':' || !read_int(s, 14, 2, mi) || s[16] != ':' || !read_int(s, 17, 2, se)) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 60) {
        return std::nullopt;
    }
    std::size_t pos = 19;
    milliseconds frac{0};
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int digits = 0;
        int value = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (digits < 3) {
                value = value * 10 + (s[pos] - '0');
            }
            ++digits;
            ++pos;
        }
        if (digits == 0) {
            return std::nullopt;
        }
        for (int i = digits; i < 3; ++i) {
            value *= 10;
        }
        frac = milliseconds{value};
    }
    if (pos >= s.size()) {
        return std::nullopt;
    }
    minutes offset{0};
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        if (!read_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_int(s, pos + 4, 2, om) || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset = hours{oh} + minutes{om};
        if (s[pos] == '-') {
            offset = -offset;
        }
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) {
        return std::nullopt;
    }
    const auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
    return time_point_cast<milliseconds>(local - offset) + frac;
}

std::optional<Timestamp> parse_timestamp(std::string_view s, std::string_view format) {
    if (format.empty() || format == "rfc3339") {
        auto t = parse_rfc3339(s);
        if (!t) {
            return std::nullopt;
        }
        return to_seconds(*t);
    }
    if (format == "unix" || format == "unix_ms") {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            return std::nullopt;
        }
        if (format == "unix_ms") {
            return floor<seconds>(sys_time<milliseconds>{milliseconds{v}});
        }
        return Timestamp{seconds{v}};
    }
    std::tm tm{};
    const std::string input(s);
    const std::string pattern(format);
    const char* end = ::strptime(input.c_str(), pattern.c_str(), &tm);
    if (end == nullptr || *end != '\0') {
        return std::nullopt;
    }
    const year_month_day ymd{year{tm.tm_year + 1900}, month{static_cast<unsigned>(tm.tm_mon + 1)},
                             day{static_cast<unsigned>(tm.tm_mday)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return sys_days{ymd} + hours{tm.tm_hour} + minutes{tm.tm_min} + seconds{tm.tm_sec};
}

} // namespace kumpul
