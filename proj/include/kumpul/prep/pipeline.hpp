#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"
#include "kumpul/core/time.hpp"
#include "kumpul/langid/langid.hpp"
#include "kumpul/prep/dedup.hpp"
#include "kumpul/prep/filters.hpp"
#include "kumpul/prep/stage_report.hpp"
#include "kumpul/relevancy/relevancy.hpp"

namespace kumpul::store {
class Datastore;
}

namespace kumpul::prep {

/// Execution order of the stages; configuration order is irrelevant.
inline const std::vector<std::string> kStageOrder = {"dedup", "date", "language", "keyword", "relevancy"};

struct DateStage {
    Timestamp start{};
    Timestamp end{};
    MissingTimestampPolicy missing_timestamp_policy = MissingTimestampPolicy::drop;
};

struct LanguageStage {
    std::set<std::string> targets;
    langid::UnknownPolicy unknown_policy = langid::UnknownPolicy::drop;
};

struct KeywordStage {
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    MatchMode match = MatchMode::substring;
};

/// An absent stage is disabled and passes its input through unchanged.
struct PipelineConfig {
    std::optional<DedupConfig> dedup;
    std::optional<DateStage> date;
    std::optional<LanguageStage> language;
    std::optional<KeywordStage> keyword;
    std::optional<relevancy::RelevancyConfig> relevancy;
};

/// Strict parse: unknown keys, wrong types and out-of-range values are
/// reported together as one validation error with per-field entries.
/// A stage given as null is treated as absent.
PipelineConfig pipeline_config_from_json(const Json& j);
Json to_json(const PipelineConfig& config);

/// Preprocess job payload: {"inputs": [dataset ref...], "config": PipelineConfig, "name"?: string}.
struct PreprocessRequest {
    std::vector<std::string> inputs;
    PipelineConfig config;
    std::optional<std::string> name;
};
PreprocessRequest preprocess_request_from_json(const Json& j);
Json to_json(const PreprocessRequest& request);

using ClassifierFactory = std::function<std::unique_ptr<relevancy::Classifier>(const relevancy::RelevancyConfig&)>;

struct PipelineEnv {
    std::vector<langid::LanguageProfile> profiles;
    langid::DetectOptions detect;
    relevancy::RemoteOptions remote;
    /// Overrides make_classifier when set.
    ClassifierFactory classifier_factory;
};

struct PipelineOutput {
    std::vector<Record> records;
    StageReport report;
    std::vector<std::string> dedup_removed_ids;
};

/// Runs the enabled stages in kStageOrder over already merged records.
PipelineOutput apply_pipeline(std::vector<Record> records, const PipelineConfig& config, const PipelineEnv& env);

struct PipelineRun {
    std::string dataset_id;
    std::optional<std::string> merged_dataset_id;
    StageReport report;
};

/// Resolves the inputs, merges them (storing the merged dataset when there
/// are several), applies the pipeline and stores the preprocessed dataset
/// with its lineage.
PipelineRun run_pipeline(store::Datastore& store, const PreprocessRequest& request, const PipelineEnv& env,
                         const std::optional<std::string>& job_id = std::nullopt);

} // namespace kumpul::prep
