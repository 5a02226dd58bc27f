#include "kumpul/collect/connector.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "kumpul/collect/synthetic.hpp"
#include "kumpul/core/csv.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/store/datastore.hpp"

namespace kumpul::collect {

namespace {

constexpr std::size_t kReportedSkips = 20;

Json param_doc(const char* name, bool required, const char* description) {
    return Json{{"name", name}, {"required", required}, {"description", description}};
}

const std::string& require_param(const ConnectorSpec& spec, const std::string& key) {
    const auto* v = spec.param(key);
    if (v == nullptr || v->empty()) {
        throw_validation("params." + key, fmt::format("required for the {} connector", spec.connector_kind));
    }
    return *v;
}

std::optional<double> number_param(const ConnectorSpec& spec, const std::string& key) {
    const auto* v = spec.param(key);
    if (v == nullptr) {
        return std::nullopt;
    }
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw_validation("params." + key, "must be a number");
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& p, const CollectContext& ctx) {
    return p.is_relative() && !ctx.base_dir.empty() ? ctx.base_dir / p : p;
}

void map_all(const std::vector<std::pair<std::string, Json>>& items, const ConnectorSpec& spec,
             const CollectContext& ctx, CollectOutput& out) {
    const auto mapping = require_mapping(spec);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& [ref, item] = items[i];
        if (item.is_discarded()) {
            out.skipped.push_back({ref, "malformed JSON"});
            continue;
        }
        try {
            out.records.push_back(map_item(item, mapping, spec, i, ctx.collected_at));
        } catch (const Error& e) {
            out.skipped.push_back({ref, e.what()});
        }
    }
}

struct UrlParts {
    std::string base;
    std::string path;
};

UrlParts split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0) {
        throw_validation("params.url", "expected an absolute http URL");
    }
    const auto slash = url.find('/', scheme + 3);
    return {url.substr(0, slash), slash == std::string::npos ? "/" : url.substr(slash)};
}

SyntheticManifest manifest_from_spec(const ConnectorSpec& spec, const CollectContext& ctx) {
    Json j;
    if (const auto* path = spec.param("manifest_path")) {
        std::ifstream in(resolve(*path, ctx));
        if (!in) {
            throw_validation("params.manifest_path", "cannot read " + *path);
        }
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error&) {
            throw_validation("params.manifest_path", "is not valid JSON");
        }
    } else {
        j = Json::object();
        auto total = number_param(spec, "total");
        if (!total) {
            throw_validation("params.total", "required for the synthetic connector");
        }
        j["total"] = static_cast<long long>(*total);
        if (auto seed = number_param(spec, "seed")) {
            j["seed"] = static_cast<long long>(*seed);
        } else {
            throw_validation("params.seed", "required for the synthetic connector");
        }
        for (const char* label : {"duplicate", "non_target_language", "keyword_excluded", "irrelevant"}) {
            if (auto f = number_param(spec, std::string(label) + "_fraction")) {
                j[std::string(label) + "_fraction"] = *f;
            }
            if (auto n = number_param(spec, std::string(label) + "_count")) {
                j["counts"][label] = static_cast<long long>(*n);
            }
        }
    }
    if (!j.is_object()) {
        throw_validation("params.manifest_path", "must hold a JSON object");
    }
    j["source_name"] = spec.source_name;
    return synthetic_manifest_from_json(j);
}

} // namespace

// Registry ------------------------------------------------------------------

void ConnectorRegistry::register_connector(const std::string& kind, ConnectorFactory factory) {
    if (kind.empty() || !factory) {
        throw_validation("connector_kind", "registration needs a kind and a factory");
    }
    std::lock_guard lock(mutex_);
    if (!factories_.emplace(kind, std::move(factory)).second) {
        throw Error(ErrorCode::conflict, fmt::format("connector kind '{}' is already registered", kind));
    }
}

std::unique_ptr<Connector> ConnectorRegistry::create(const std::string& kind) const {
    ConnectorFactory factory;
    {
        std::lock_guard lock(mutex_);
        auto it = factories_.find(kind);
        if (it == factories_.end()) {
            throw_validation("connector_kind", fmt::format("unknown connector kind '{}'", kind));
        }
        factory = it->second;
    }
    return factory();
}

bool ConnectorRegistry::contains(const std::string& kind) const {
    std::lock_guard lock(mutex_);
    return factories_.contains(kind);
}

std::vector<std::string> ConnectorRegistry::kinds() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [k, _] : factories_) {
        out.push_back(k);
    }
    return out;
}

Json ConnectorRegistry::catalog() const {
    Json out = Json::array();
    for (const auto& kind : kinds()) {
        out.push_back(create(kind)->describe());
    }
    return out;
}

void ConnectorRegistry::add_builtins() {
    register_connector("file", [] { return std::make_unique<FileConnector>(); });
    register_connector("http_feed", [] { return std::make_unique<HttpFeedConnector>(); });
    register_connector("synthetic", [] { return std::make_unique<SyntheticConnector>(); });
}

ConnectorRegistry& ConnectorRegistry::global() {
    static ConnectorRegistry* registry = [] {
        auto* r = new ConnectorRegistry;
        r->add_builtins();
        return r;
    }();
    return *registry;
}

void register_connector(const std::string& kind, ConnectorFactory factory) {
    ConnectorRegistry::global().register_connector(kind, std::move(factory));
}

ConnectorSpec validate_collect_payload(const Json& payload, const ConnectorRegistry& registry) {
    auto spec = connector_spec_from_json(payload);
    registry.create(spec.connector_kind)->validate(spec);
    if (const auto* f = spec.param("max_skip_fraction")) {
        auto v = number_param(spec, "max_skip_fraction");
        if (!v || *v < 0.0 || *v > 1.0) {
            throw_validation("params.max_skip_fraction", "must lie in [0, 1], got " + *f);
        }
    }
    return spec;
}

// File -----------------------------------------------------------------------

Json FileConnector::describe() const {
    return Json{{"kind", "file"},
                {"description", "JSON Lines or CSV file mapped to the common schema"},
                {"params", Json::array({param_doc("path", true, "input file"),
                                        param_doc("format", true, "jsonl or csv"),
                                        param_doc("max_skip_fraction", false, "abort above this share of invalid items")})},
                {"mapping", true}};
}

void FileConnector::validate(const ConnectorSpec& spec) const {
    require_param(spec, "path");
    const auto& format = require_param(spec, "format");
    if (format != "jsonl" && format != "csv") {
        throw_validation("params.format", "must be jsonl or csv");
    }
    require_mapping(spec);
}

CollectOutput FileConnector::collect(const ConnectorSpec& spec, const CollectContext& ctx) const {
    validate(spec);
    const auto path = resolve(*spec.param("path"), ctx);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_validation("params.path", "cannot read " + path.string());
    }
    std::vector<std::pair<std::string, Json>> items;
    if (*spec.param("format") == "jsonl") {
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.find_first_not_of(" \t") == std::string::npos) {
                continue;
            }
            items.emplace_back(fmt::format("line {}", n), Json::parse(line, nullptr, false));
        }
    } else {
        auto header = csv::read_row(in);
        if (!header) {
            return {};
        }
        if (!header->empty() && header->front().rfind("\xEF\xBB\xBF", 0) == 0) {
            header->front().erase(0, 3);
        }
        std::size_t row = 1;
        while (auto fields = csv::read_row(in)) {
            ++row;
            if (fields->size() == 1 && fields->front().empty()) {
                continue;
            }
            Json obj = Json::object();
            if (fields->size() != header->size()) {
                // Kept as a non-object so mapping reports it as skipped.
                items.emplace_back(fmt::format("row {}", row), Json(nullptr));
                continue;
            }
            for (std::size_t c = 0; c < header->size(); ++c) {
                if (!(*fields)[c].empty()) {
                    obj[(*header)[c]] = (*fields)[c];
                }
            }
            items.emplace_back(fmt::format("row {}", row), std::move(obj));
        }
    }
    CollectOutput out;
    map_all(items, spec, ctx, out);
    return out;
}

// HTTP feed ------------------------------------------------------------------

Json HttpFeedConnector::describe() const {
    return Json{{"kind", "http_feed"},
                {"description", "HTTP endpoint returning a JSON array of objects"},
                {"params", Json::array({param_doc("url", true, "http URL answering GET"),
                                        param_doc("timeout_secs", false, "request timeout, default 30")})},
                {"mapping", true}};
}

void HttpFeedConnector::validate(const ConnectorSpec& spec) const {
    split_url(require_param(spec, "url"));
    if (auto t = number_param(spec, "timeout_secs"); t && *t <= 0) {
        throw_validation("params.timeout_secs", "must be positive");
    }
    require_mapping(spec);
}

CollectOutput HttpFeedConnector::collect(const ConnectorSpec& spec, const CollectContext& ctx) const {
    validate(spec);
    const auto parts = split_url(*spec.param("url"));
    const auto timeout = static_cast<time_t>(number_param(spec, "timeout_secs").value_or(30));
    httplib::Client client(parts.base);
    client.set_connection_timeout(timeout, 0);
    client.set_read_timeout(timeout, 0);
    auto res = client.Get(parts.path);
    if (!res) {
        throw Error(ErrorCode::unavailable,
                    fmt::format("feed {} unreachable: {}", *spec.param("url"), httplib::to_string(res.error())));
    }
    if (res->status != 200) {
        throw Error(res->status >= 500 ? ErrorCode::unavailable : ErrorCode::validation,
                    fmt::format("feed {} answered HTTP {}", *spec.param("url"), res->status));
    }
    Json body = Json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.is_array()) {
        throw Error(ErrorCode::protocol, "feed did not return a JSON array");
    }
    std::vector<std::pair<std::string, Json>> items;
    for (std::size_t i = 0; i < body.size(); ++i) {
        items.emplace_back(fmt::format("item {}", i + 1), std::move(body[i]));
    }
    CollectOutput out;
    map_all(items, spec, ctx, out);
    return out;
}

// Synthetic ------------------------------------------------------------------

Json SyntheticConnector::describe() const {
    Json params = Json::array({param_doc("total", true, "number of records"), param_doc("seed", true, "RNG seed"),
                               param_doc("manifest_path", false, "manifest JSON file instead of inline params")});
    for (const char* label : {"duplicate", "non_target_language", "keyword_excluded", "irrelevant"}) {
        params.push_back(param_doc(fmt::format("{}_fraction", label).c_str(), false, "share of total"));
        params.push_back(param_doc(fmt::format("{}_count", label).c_str(), false, "exact count"));
    }
    return Json{{"kind", "synthetic"},
                {"description", "deterministic labeled corpus for pipeline checks"},
                {"params", std::move(params)},
                {"mapping", false}};
}

void SyntheticConnector::validate(const ConnectorSpec& spec) const {
    if (spec.param("manifest_path") == nullptr) {
        manifest_from_spec(spec, {});
    } else {
        require_param(spec, "manifest_path");
    }
}

CollectOutput SyntheticConnector::collect(const ConnectorSpec& spec, const CollectContext& ctx) const {
    auto corpus = generate_synthetic(manifest_from_spec(spec, ctx));
    CollectOutput out;
    out.records = std::move(corpus.records);
    for (auto& r : out.records) {
        r.source_category = spec.source_category;
        r.collected_at = ctx.collected_at;
    }
    return out;
}

// Collection -----------------------------------------------------------------

Json to_json(const CollectionResult& r) {
    Json skipped = Json::array();
    for (const auto& s : r.skipped_items) {
        skipped.push_back(Json{{"ref", s.ref}, {"reason", s.reason}});
    }
    return Json{{"dataset_id", r.dataset_id},
                {"count", r.count},
                {"skipped", r.skipped},
                {"filtered", r.filtered},
                {"skipped_items", std::move(skipped)}};
}

CollectionResult run_collection(store::Datastore& store, const ConnectorSpec& spec, const CollectContext& ctx,
                                const std::optional<std::string>& job_id, const ConnectorRegistry& registry) {
    auto connector = registry.create(spec.connector_kind);
    connector->validate(spec);
    auto output = connector->collect(spec, ctx);

    CollectionResult result;
    std::vector<Record> kept;
    std::set<std::string> ids;
    for (auto& r : output.records) {
        if (!ids.insert(r.record_id).second) {
            output.skipped.push_back({r.record_id, "duplicate record_id"});
            continue;
        }
        if (!passes_spec_filters(r, spec)) {
            ++result.filtered;
            continue;
        }
        kept.push_back(std::move(r));
    }

    const std::size_t items = ids.size() + output.skipped.size();
    const double max_skip = number_param(spec, "max_skip_fraction").value_or(kMaxSkipFraction);
    if (items > 0 && static_cast<double>(output.skipped.size()) > max_skip * static_cast<double>(items)) {
        std::string first = output.skipped.front().ref + ": " + output.skipped.front().reason;
        throw Error(ErrorCode::validation, fmt::format("{} of {} items were invalid (first: {})",
                                                       output.skipped.size(), items, first));
    }

    Dataset meta;
    meta.kind = DatasetKind::raw;
    meta.name = spec.name.value_or(spec.source_name);
    meta.created_by_job = job_id;
    result.dataset_id = store.commit_dataset(meta, kept);
    result.count = kept.size();
    result.skipped = output.skipped.size();
    for (std::size_t i = 0; i < output.skipped.size() && i < kReportedSkips; ++i) {
        result.skipped_items.push_back(output.skipped[i]);
    }
    spdlog::info("collected {} records into {} ({} skipped, {} filtered)", result.count, result.dataset_id,
                 result.skipped, result.filtered);
    return result;
}

} // namespace kumpul::collect
