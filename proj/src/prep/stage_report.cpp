#include "kumpul/prep/stage_report.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"

namespace kumpul::prep {

double reduction_pct(std::size_t removed, std::size_t denominator) {
    if (denominator == 0) {
        return 0.0;
    }
    // Non-negative operands, so adding half the divisor rounds half away from zero.
    const unsigned long long tenths =
        (static_cast<unsigned long long>(removed) * 2000ULL + denominator) / (2ULL * denominator);
    return static_cast<double>(tenths) / 10.0;
}

StageReport compute_stage_report(std::size_t raw_count, const std::vector<StageCount>& stages) {
    StageReport report;
    report.raw_count = raw_count;
    std::size_t current = raw_count;
    for (const auto& s : stages) {
        if (s.output_count > current) {
            throw Error(ErrorCode::validation,
                        fmt::format("stage {} increased the record count from {} to {}", s.name, current, s.output_count));
        }
        StageEntry e;
        e.name = s.name;
        e.enabled = s.enabled;
        e.input_count = current;
        e.output_count = s.output_count;
        e.removed = current - s.output_count;
        e.reduction_pct = reduction_pct(e.removed, current);
        report.stages.push_back(e);
        current = s.output_count;
    }
    report.final_count = current;
    report.total_removed = raw_count - current;
    report.total_reduction_pct = reduction_pct(report.total_removed, raw_count);
    return report;
}

StageReport compute_stage_report(const std::vector<std::size_t>& counts, const std::vector<std::string>& names) {
    if (counts.empty()) {
        throw Error(ErrorCode::validation, "stage counts must include the raw count");
    }
    if (!names.empty() && names.size() != counts.size() - 1) {
        throw Error(ErrorCode::validation, "one stage name per count after raw is required");
    }
    std::vector<StageCount> stages;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        stages.push_back({names.empty() ? fmt::format("stage{}", i) : names[i - 1], counts[i], true});
    }
    return compute_stage_report(counts.front(), stages);
}

std::string check_stage_report(const StageReport& r) {
    std::size_t current = r.raw_count;
    std::size_t sum = 0;
    for (const auto& s : r.stages) {
        if (s.input_count != current) return fmt::format("stage {} input {} != previous output {}", s.name, s.input_count, current);
        if (s.output_count > s.input_count) return fmt::format("stage {} output exceeds input", s.name);
        if (s.removed != s.input_count - s.output_count) return fmt::format("stage {} removed mismatch", s.name);
        if (s.reduction_pct != reduction_pct(s.removed, s.input_count)) return fmt::format("stage {} reduction mismatch", s.name);
        if (!s.enabled && s.removed != 0) return fmt::format("disabled stage {} removed records", s.name);
        sum += s.removed;
        current = s.output_count;
    }
    if (r.final_count != current) return "final_count differs from last stage output";
    if (r.total_removed != sum || r.total_removed != r.raw_count - r.final_count) return "total_removed mismatch";
    if (r.total_reduction_pct != reduction_pct(r.total_removed, r.raw_count)) return "total_reduction_pct mismatch";
    return {};
}

Json to_json(const StageReport& report) {
    Json stages = Json::array();
    for (const auto& s : report.stages) {
        stages.push_back(Json{{"name", s.name},
                              {"enabled", s.enabled},
                              {"input_count", s.input_count},
                              {"output_count", s.output_count},
                              {"removed", s.removed},
                              {"reduction_pct", s.reduction_pct}});
    }
    return Json{{"stages", std::move(stages)},
                {"raw_count", report.raw_count},
                {"final_count", report.final_count},
                {"total_removed", report.total_removed},
                {"total_reduction_pct", report.total_reduction_pct}};
}

StageReport stage_report_from_json(const Json& j) {
    try {
        StageReport r;
        for (const auto& s : j.at("stages")) {
            StageEntry e;
            e.name = s.at("name").get<std::string>();
            e.enabled = s.value("enabled", true);
            e.input_count = s.at("input_count").get<std::size_t>();
            e.output_count = s.at("output_count").get<std::size_t>();
            e.removed = s.at("removed").get<std::size_t>();
            e.reduction_pct = s.at("reduction_pct").get<double>();
            r.stages.push_back(std::move(e));
        }
        r.raw_count = j.at("raw_count").get<std::size_t>();
        r.final_count = j.at("final_count").get<std::size_t>();
        r.total_removed = j.at("total_removed").get<std::size_t>();
        r.total_reduction_pct = j.at("total_reduction_pct").get<double>();
        return r;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed stage report: ") + e.what());
    }
}

std::string stage_label(const std::string& name) {
    if (name == "dedup") return "After deduplication";
    if (name == "date") return "After date filtering";
    if (name == "language") return "After language detection";
    if (name == "keyword") return "After keyword filtering";
    if (name == "relevancy") return "After relevancy classification";
    return "After " + name;
}

std::string group_thousands(std::size_t n) {
    const std::string digits = std::to_string(n);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (digits.size() - i) % 3 == 0) {
            out.push_back(',');
        }
        out.push_back(digits[i]);
    }
    return out;
}

std::string render_stage_table(const StageReport& report) {
    using Row = std::array<std::string, 4>;
    std::vector<Row> rows;
    rows.push_back({"Stage", "Records", "Removed", "Reduction"});
    rows.push_back({"Raw collected data", group_thousands(report.raw_count), "", ""});
    for (const auto& s : report.stages) {
        if (!s.enabled) {
            continue;
        }
        rows.push_back({stage_label(s.name), group_thousands(s.output_count), group_thousands(s.removed),
                        fmt::format("-{:.1f}%", s.reduction_pct)});
    }
    rows.push_back({"Total", group_thousands(report.final_count), group_thousands(report.total_removed),
                    fmt::format("-{:.1f}%", report.total_reduction_pct)});

    std::array<std::size_t, 4> width{};
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < 4; ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    auto line = [&](const Row& row) {
        std::string s = fmt::format("{:<{}}", row[0], width[0]);
        for (std::size_t c = 1; c < 4; ++c) {
            s += fmt::format("  {:>{}}", row[c], width[c]);
        }
        while (!s.empty() && s.back() == ' ') {
            s.pop_back();
        }
        return s + "\n";
    };
    std::string rule(width[0] + width[1] + width[2] + width[3] + 6, '-');
    std::string out = line(rows.front()) + rule + "\n";
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        out += line(rows[i]);
    }
    out += rule + "\n" + line(rows.back());
    return out;
}

} // namespace kumpul::prep
