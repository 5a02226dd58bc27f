#include "kumpul/analysis/analysis.hpp"

#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"
#include "kumpul/store/datastore.hpp"

namespace kumpul::analysis {

AnalysisRequest analysis_request_from_json(const Json& j) {
    FieldErrors errors;
    AnalysisRequest req;
    ObjectReader r(j, "", errors);
    if (r.ok()) {
        if (r.has("dataset_ids") || (r.raw("dataset_id") && r.raw("dataset_id")->is_array())) {
            errors.add("dataset_id", "an analysis runs on exactly one dataset");
        } else if (auto id = r.string("dataset_id", true)) {
            req.dataset_id = *id;
        }
        r.allow_only({"dataset_id", "dataset_ids", "analyzer", "text_column", "params"});
        if (auto a = r.string("analyzer", true)) req.analyzer = *a;
        if (auto c = r.string("text_column")) {
            if (*c != "text" && *c != "title" && *c != "title+text" && !(c->rfind("extras.", 0) == 0 && c->size() > 7)) {
                errors.add("text_column", "must be text, title, title+text or extras.<key>");
            }
            req.text_column = *c;
        }
        if (auto p = r.raw("params")) {
            if (!p->is_object()) {
                errors.add("params", "must be an object");
            } else {
                req.params = *p;
            }
        }
    }
    errors.raise_if_any("invalid analysis request");
    return req;
}

Json to_json(const AnalysisRequest& r) {
    return Json{{"dataset_id", r.dataset_id}, {"analyzer", r.analyzer}, {"text_column", r.text_column},
                {"params", r.params}};
}

Json to_json(const AnalysisResult& r) {
    return Json{{"analyzer_id", r.analyzer_id},
                {"dataset_id", r.dataset_id},
                {"summary", r.summary},
                {"detail", r.detail},
                {"produced_at", format_rfc3339(r.produced_at)}};
}

AnalysisResult analysis_result_from_json(const Json& j) {
    try {
        AnalysisResult r;
        r.analyzer_id = j.at("analyzer_id").get<std::string>();
        r.dataset_id = j.at("dataset_id").get<std::string>();
        r.summary = j.at("summary");
        r.detail = j.at("detail");
        auto t = parse_rfc3339(j.at("produced_at").get<std::string>());
        if (!t) {
            throw_validation("produced_at", "must be an RFC 3339 timestamp");
        }
        r.produced_at = *t;
        return r;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed analysis result: ") + e.what());
    }
}

std::string column_text(const Record& r, const std::string& column) {
    if (column == "text") return r.text;
    if (column == "title") return r.title.value_or("");
    if (column == "title+text") return searchable_text(r);
    if (column.rfind("extras.", 0) == 0) {
        auto it = r.extras.find(column.substr(7));
        return it == r.extras.end() ? std::string{} : it->second;
    }
    throw_validation("text_column", "unknown column " + column);
}

// Registry ------------------------------------------------------------------

void AnalyzerRegistry::register_analyzer(const std::string& id, AnalyzerFactory factory) {
    if (id.empty() || !factory) {
        throw_validation("analyzer", "registration needs an id and a factory");
    }
    std::lock_guard lock(mutex_);
    if (!factories_.emplace(id, std::move(factory)).second) {
        throw Error(ErrorCode::conflict, fmt::format("analyzer '{}' is already registered", id));
    }
}

std::unique_ptr<Analyzer> AnalyzerRegistry::create(const std::string& id) const {
    AnalyzerFactory factory;
    {
        std::lock_guard lock(mutex_);
        auto it = factories_.find(id);
        if (it == factories_.end()) {
            throw_validation("analyzer", fmt::format("unknown analyzer '{}'", id));
        }
        factory = it->second;
    }
    return factory();
}

bool AnalyzerRegistry::contains(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return factories_.contains(id);
}

std::vector<std::string> AnalyzerRegistry::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : factories_) {
        out.push_back(id);
    }
    return out;
}

Json AnalyzerRegistry::catalog() const {
    Json out = Json::array();
    for (const auto& id : ids()) {
        out.push_back(create(id)->describe());
    }
    return out;
}

void AnalyzerRegistry::add_builtins() {
    register_analyzer("sentiment", [] { return std::make_unique<SentimentAnalyzer>(); });
    register_analyzer("trend", [] { return std::make_unique<TrendAnalyzer>(); });
    register_analyzer("network", [] { return std::make_unique<NetworkAnalyzer>(); });
    register_analyzer("terms", [] { return std::make_unique<TermsAnalyzer>(); });
}

AnalyzerRegistry& AnalyzerRegistry::global() {
    static AnalyzerRegistry* registry = [] {
        auto* r = new AnalyzerRegistry;
        r->add_builtins();
        return r;
    }();
    return *registry;
}

void register_analyzer(const std::string& id, AnalyzerFactory factory) {
    AnalyzerRegistry::global().register_analyzer(id, std::move(factory));
}

AnalysisRequest validate_analysis_payload(const Json& payload, const AnalyzerRegistry& registry) {
    auto request = analysis_request_from_json(payload);
    registry.create(request.analyzer)->validate(request);
    return request;
}

AnalysisResult run_analysis(const store::Datastore& store, const AnalysisRequest& request, Instant now,
                            const AnalyzerRegistry& registry) {
    auto analyzer = registry.create(request.analyzer);
    analyzer->validate(request);
    const Dataset dataset = store.resolve_dataset(request.dataset_id);
    const auto records = store.read_all_records(dataset.dataset_id);
    AnalysisResult result = analyzer->analyze(records, request);
    result.analyzer_id = analyzer->id();
    result.dataset_id = dataset.dataset_id;
    result.produced_at = now;
    return result;
}

} // namespace kumpul::analysis
