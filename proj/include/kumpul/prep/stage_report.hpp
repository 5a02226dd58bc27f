#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kumpul/core/json.hpp"

namespace kumpul::prep {

struct StageEntry {
    std::string name;
    bool enabled = true;
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    std::size_t removed = 0;
    double reduction_pct = 0.0;

    bool operator==(const StageEntry&) const = default;
};

struct StageReport {
    std::vector<StageEntry> stages;
    std::size_t raw_count = 0;
    std::size_t final_count = 0;
    std::size_t total_removed = 0;
    double total_reduction_pct = 0.0;

    bool operator==(const StageReport&) const = default;
};

struct StageCount {
    std::string name;
    std::size_t output_count = 0;
    bool enabled = true;
};

/// removed / denominator * 100, rounded half away from zero to one decimal.
/// Computed in integer tenths so that values such as 20.55 cannot drift.
double reduction_pct(std::size_t removed, std::size_t denominator);

/// Each stage's percentage uses that stage's input (the previous stage's
/// output) as denominator; the total uses raw. Throws Error(internal) when a
/// count increases.
StageReport compute_stage_report(std::size_t raw_count, const std::vector<StageCount>& stages);

/// counts = [raw, after stage 1, ...]; stages are named by `names` when
/// given, otherwise "stage1", "stage2", ...
StageReport compute_stage_report(const std::vector<std::size_t>& counts, const std::vector<std::string>& names = {});

/// Empty string when the report satisfies every accounting invariant,
/// otherwise a description of the first breach.
std::string check_stage_report(const StageReport& report);

Json to_json(const StageReport& report);
StageReport stage_report_from_json(const Json& j);

std::string stage_label(const std::string& name);

/// Aligned text table: Stage, Records, Removed, Reduction. Disabled stages
/// are omitted; reductions carry a leading minus and a percent sign.
std::string render_stage_table(const StageReport& report);

/// "12847" -> "12,847".
std::string group_thousands(std::size_t n);

} // namespace kumpul::prep
