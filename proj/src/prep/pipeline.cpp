#include "kumpul/prep/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"
#include "kumpul/store/datastore.hpp"

namespace kumpul::prep {

namespace {

std::optional<Timestamp> read_time(ObjectReader& r, const char* key) {
    auto s = r.string(key, true);
    if (!s) {
        return std::nullopt;
    }
    auto t = parse_rfc3339(*s);
    if (!t) {
        r.errors().add(r.field(key), "must be an RFC 3339 timestamp");
        return std::nullopt;
    }
    return to_seconds(*t);
}

std::optional<DedupConfig> read_dedup(const Json& j, FieldErrors& errors) {
    ObjectReader r(j, "dedup", errors);
    if (!r.ok()) return std::nullopt;
    r.allow_only({"mode", "near_threshold"});
    DedupConfig c;
    if (auto mode = r.choice("mode", {"exact", "near"})) {
        c.mode = *mode == "near" ? DedupMode::near : DedupMode::exact;
    }
    if (auto k = r.integer("near_threshold")) {
        if (*k < 0 || *k > 64) {
            errors.add("dedup.near_threshold", "must lie in [0, 64]");
        } else {
            c.near_threshold = static_cast<int>(*k);
        }
    }
    return c;
}

std::optional<DateStage> read_date(const Json& j, FieldErrors& errors) {
    ObjectReader r(j, "date", errors);
    if (!r.ok()) return std::nullopt;
    r.allow_only({"start", "end", "missing_timestamp_policy"});
    DateStage c;
    auto start = read_time(r, "start");
    auto end = read_time(r, "end");
    if (start) c.start = *start;
    if (end) c.end = *end;
    if (start && end && *start > *end) {
        errors.add("date.start", "must not be after date.end");
    }
    if (auto p = r.choice("missing_timestamp_policy", {"drop", "keep"})) {
        c.missing_timestamp_policy = *p == "keep" ? MissingTimestampPolicy::keep : MissingTimestampPolicy::drop;
    }
    return c;
}

std::optional<LanguageStage> read_language(const Json& j, FieldErrors& errors) {
    ObjectReader r(j, "language", errors);
    if (!r.ok()) return std::nullopt;
    r.allow_only({"targets", "unknown_policy"});
    LanguageStage c;
    if (auto targets = r.strings("targets", true)) {
        if (targets->empty()) {
            errors.add("language.targets", "must name at least one language");
        }
        for (const auto& t : *targets) {
            if (t.empty() || t == langid::kUnknown) {
                errors.add("language.targets", fmt::format("'{}' is not a language code", t));
            }
            c.targets.insert(t);
        }
    }
    if (auto p = r.choice("unknown_policy", {"drop", "keep"})) {
        c.unknown_policy = *p == "keep" ? langid::UnknownPolicy::keep : langid::UnknownPolicy::drop;
    }
    return c;
}

std::optional<KeywordStage> read_keyword(const Json& j, FieldErrors& errors) {
    ObjectReader r(j, "keyword", errors);
    if (!r.ok()) return std::nullopt;
    r.allow_only({"include", "exclude", "match"});
    KeywordStage c;
    if (auto v = r.strings("include")) c.include = *v;
    if (auto v = r.strings("exclude")) c.exclude = *v;
    if (auto m = r.choice("match", {"substring", "whole_word"})) {
        c.match = *m == "whole_word" ? MatchMode::whole_word : MatchMode::substring;
    }
    return c;
}

std::optional<relevancy::RelevancyConfig> read_relevancy(const Json& j, FieldErrors& errors) {
    ObjectReader r(j, "relevancy", errors);
    if (!r.ok()) return std::nullopt;
    r.allow_only({"context", "classifier", "threshold", "endpoint"});
    relevancy::RelevancyConfig c;
    if (auto ctx = r.string("context", true)) c.context = *ctx;
    if (auto k = r.choice("classifier", {"baseline", "remote"})) {
        c.classifier = *k == "remote" ? relevancy::ClassifierKind::remote : relevancy::ClassifierKind::baseline;
    }
    if (auto t = r.number("threshold")) {
        if (!(*t >= 0.0 && *t <= 1.0)) {
            errors.add("relevancy.threshold", "must lie in [0, 1]");
        } else {
            c.threshold = *t;
        }
    }
    c.endpoint = r.string("endpoint");
    if (c.classifier == relevancy::ClassifierKind::remote && !c.endpoint && !r.has("endpoint")) {
        errors.add("relevancy.endpoint", "is required for the remote classifier");
    }
    return c;
}

PipelineConfig read_config(const Json& j, const std::string& path, FieldErrors& errors) {
    PipelineConfig c;
    ObjectReader r(j, path, errors);
    if (!r.ok()) return c;
    r.allow_only({"dedup", "date", "language", "keyword", "relevancy"});
    FieldErrors nested;
    if (auto v = r.raw("dedup")) c.dedup = read_dedup(*v, nested);
    if (auto v = r.raw("date")) c.date = read_date(*v, nested);
    if (auto v = r.raw("language")) c.language = read_language(*v, nested);
    if (auto v = r.raw("keyword")) c.keyword = read_keyword(*v, nested);
    if (auto v = r.raw("relevancy")) c.relevancy = read_relevancy(*v, nested);
    for (const auto& e : nested.errors()) {
        errors.add(join_path(path, e.field), e.message);
    }
    return c;
}

} // namespace

PipelineConfig pipeline_config_from_json(const Json& j) {
    FieldErrors errors;
    auto c = read_config(j, "", errors);
    errors.raise_if_any("invalid pipeline config");
    return c;
}

Json to_json(const PipelineConfig& c) {
    Json j = Json::object();
    if (c.dedup) {
        j["dedup"] = {{"mode", c.dedup->mode == DedupMode::near ? "near" : "exact"},
                      {"near_threshold", c.dedup->near_threshold}};
    }
    if (c.date) {
        j["date"] = {{"start", format_rfc3339(c.date->start)},
                     {"end", format_rfc3339(c.date->end)},
                     {"missing_timestamp_policy",
                      c.date->missing_timestamp_policy == MissingTimestampPolicy::keep ? "keep" : "drop"}};
    }
    if (c.language) {
        j["language"] = {{"targets", c.language->targets},
                         {"unknown_policy", c.language->unknown_policy == langid::UnknownPolicy::keep ? "keep" : "drop"}};
    }
    if (c.keyword) {
        j["keyword"] = {{"include", c.keyword->include},
                        {"exclude", c.keyword->exclude},
                        {"match", c.keyword->match == MatchMode::whole_word ? "whole_word" : "substring"}};
    }
    if (c.relevancy) {
        Json r = {{"context", c.relevancy->context},
                  {"classifier", c.relevancy->classifier == relevancy::ClassifierKind::remote ? "remote" : "baseline"},
                  {"threshold", c.relevancy->threshold}};
        if (c.relevancy->endpoint) {
            r["endpoint"] = *c.relevancy->endpoint;
        }
        j["relevancy"] = std::move(r);
    }
    return j;
}

PreprocessRequest preprocess_request_from_json(const Json& j) {
    FieldErrors errors;
    PreprocessRequest req;
    ObjectReader r(j, "", errors);
    if (r.ok()) {
        r.allow_only({"inputs", "config", "name"});
        if (auto inputs = r.strings("inputs", true)) {
            if (inputs->empty()) {
                errors.add("inputs", "must name at least one dataset");
            }
            std::set<std::string> seen;
            for (const auto& in : *inputs) {
                if (in.empty()) {
                    errors.add("inputs", "dataset references must be non-empty");
                } else if (!seen.insert(in).second) {
                    errors.add("inputs", fmt::format("'{}' is listed twice", in));
                }
            }
            req.inputs = *inputs;
        }
        if (auto cfg = r.raw("config")) {
            req.config = read_config(*cfg, "config", errors);
        } else {
            errors.add("config", "is required");
        }
        req.name = r.string("name");
    }
    errors.raise_if_any("invalid preprocess payload");
    return req;
}

Json to_json(const PreprocessRequest& request) {
    Json j = {{"inputs", request.inputs}, {"config", to_json(request.config)}};
    if (request.name) {
        j["name"] = *request.name;
    }
    return j;
}

PipelineOutput apply_pipeline(std::vector<Record> records, const PipelineConfig& config, const PipelineEnv& env) {
    const std::size_t raw = records.size();
    std::vector<StageCount> counts;
    PipelineOutput out;

    for (const auto& stage : kStageOrder) {
        bool enabled = false;
        if (stage == "dedup" && config.dedup) {
            enabled = true;
            auto result = filter_dedup(std::move(records), *config.dedup);
            records = std::move(result.kept);
            out.dedup_removed_ids = std::move(result.removed_ids);
        } else if (stage == "date" && config.date) {
            enabled = true;
            records = filter_date(std::move(records), config.date->start, config.date->end,
                                  config.date->missing_timestamp_policy);
        } else if (stage == "language" && config.language) {
            enabled = true;
            records = langid::filter_language(std::move(records), env.profiles, config.language->targets,
                                              config.language->unknown_policy, env.detect);
        } else if (stage == "keyword" && config.keyword) {
            enabled = true;
            records = filter_keyword(std::move(records), config.keyword->include, config.keyword->exclude,
                                     config.keyword->match);
        } else if (stage == "relevancy" && config.relevancy) {
            enabled = true;
            auto classifier = env.classifier_factory ? env.classifier_factory(*config.relevancy)
                                                     : relevancy::make_classifier(*config.relevancy, env.remote);
            records = relevancy::filter_relevancy(std::move(records), *config.relevancy, *classifier);
        }
        counts.push_back({stage, records.size(), enabled});
    }
    out.report = compute_stage_report(raw, counts);
    out.records = std::move(records);
    return out;
}

PipelineRun run_pipeline(store::Datastore& store, const PreprocessRequest& request, const PipelineEnv& env,
                         const std::optional<std::string>& job_id) {
    if (request.inputs.empty()) {
        throw_validation("inputs", "must name at least one dataset");
    }
    std::vector<DatasetContents> parents;
    for (const auto& ref : request.inputs) {
        DatasetContents c;
        c.meta = store.resolve_dataset(ref);
        c.records = store.read_all_records(c.meta.dataset_id);
        parents.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < parents.size(); ++i) {
        for (std::size_t k = i + 1; k < parents.size(); ++k) {
            if (parents[i].meta.dataset_id == parents[k].meta.dataset_id) {
                throw_validation("inputs", "dataset " + parents[i].meta.dataset_id + " is listed twice");
            }
        }
    }

    auto merged = merge_datasets(parents);
    PipelineRun run;
    std::string parent_id = parents.front().meta.dataset_id;
    if (parents.size() >= 2) {
        Dataset meta = merged.meta;
        std::string joined;
        for (const auto& p : parents) {
            joined += joined.empty() ? "" : "+";
            joined += p.meta.name;
        }
        meta.name = "merged:" + joined;
        meta.created_by_job = job_id;
        parent_id = store.commit_dataset(meta, merged.records);
        run.merged_dataset_id = parent_id;
    }

    auto output = apply_pipeline(std::move(merged.records), request.config, env);

    Dataset meta;
    meta.kind = DatasetKind::preprocessed;
    meta.parent_ids = {parent_id};
    meta.created_by_job = job_id;
    meta.name = request.name.value_or(parents.size() == 1 ? parents.front().meta.name + ":preprocessed"
                                                          : "preprocessed:" + parent_id);
    run.dataset_id = store.commit_dataset(meta, output.records);
    run.report = std::move(output.report);
    spdlog::info("pipeline stored {} ({} of {} records kept)", run.dataset_id, run.report.final_count,
                 run.report.raw_count);
    return run;
}

} // namespace kumpul::prep
