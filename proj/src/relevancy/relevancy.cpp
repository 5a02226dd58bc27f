#include "kumpul/relevancy/relevancy.hpp"

#include <algorithm>
#include <future>
#include <set>

#include <httplib.h>
#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/text.hpp"

namespace kumpul::relevancy {

namespace {

std::set<std::string> token_set(std::string_view s) {
    auto tokens = tokenize(s);
    return {std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end())};
}

void check_request(const RelevancyRequest& request) {
    if (request.context.empty()) {
        throw_validation("context", "must be non-empty");
    }
    if (request.texts.empty()) {
        throw_validation("texts", "must be a non-empty list");
    }
    if (!(request.threshold >= 0.0 && request.threshold <= 1.0)) {
        throw_validation("threshold", "must lie in [0, 1]");
    }
}

} // namespace

double baseline_score(std::string_view context, std::string_view text) {
    const auto a = token_set(context);
    const auto b = token_set(text);
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    std::size_t shared = 0;
    for (const auto& t : a) {
        shared += b.count(t);
    }
    const std::size_t united = a.size() + b.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(united);
}

std::vector<RelevancyVerdict> BaselineClassifier::classify(const RelevancyRequest& request) {
    std::vector<RelevancyVerdict> out;
    out.reserve(request.texts.size());
    for (const auto& text : request.texts) {
        const double score = baseline_score(request.context, text);
        out.push_back({score >= request.threshold, score, id()});
    }
    return out;
}

// Remote ---------------------------------------------------------------------

RemoteClassifier::RemoteClassifier(std::string endpoint, RemoteOptions options) : options_(options) {
    if (options_.batch_size == 0 || options_.max_in_flight == 0) {
        throw_validation("remote", "batch size and in-flight limit must be positive");
    }
    // Split "http://host:port/prefix" into the client base and request path.
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw_validation("endpoint", "expected an absolute http(s) URL");
    }
    const auto slash = endpoint.find('/', scheme + 3);
    base_url_ = endpoint.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    const std::string suffix = "/classify";
    const bool has_suffix =
        prefix.size() >= suffix.size() && prefix.compare(prefix.size() - suffix.size(), suffix.size(), suffix) == 0;
    path_ = has_suffix ? prefix : prefix + suffix;
}

std::string RemoteClassifier::id() const {
    return last_id_;
}

std::vector<RelevancyVerdict> RemoteClassifier::classify_batch(const RelevancyRequest& batch) const {
    httplib::Client client(base_url_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path_, request_to_json(batch).dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::unavailable,
                    fmt::format("relevancy server {} unreachable: {}", base_url_, httplib::to_string(res.error())));
    }
    if (res->status != 200) {
        throw Error(ErrorCode::unavailable, fmt::format("relevancy server answered HTTP {}", res->status));
    }
    Json body;
    try {
        body = Json::parse(res->body);
    } catch (const Json::parse_error&) {
        throw Error(ErrorCode::protocol, "relevancy server returned invalid JSON");
    }
    return verdicts_from_json(body, batch.texts.size(), batch.threshold);
}

std::vector<RelevancyVerdict> RemoteClassifier::classify(const RelevancyRequest& request) {
    std::vector<RelevancyRequest> batches;
    for (std::size_t i = 0; i < request.texts.size(); i += options_.batch_size) {
        const auto end = std::min(request.texts.size(), i + options_.batch_size);
        batches.push_back({request.context,
                           std::vector<std::string>(request.texts.begin() + static_cast<std::ptrdiff_t>(i),
                                                    request.texts.begin() + static_cast<std::ptrdiff_t>(end)),
                           request.threshold});
    }
    std::vector<RelevancyVerdict> out;
    out.reserve(request.texts.size());
    for (std::size_t start = 0; start < batches.size(); start += options_.max_in_flight) {
        const auto stop = std::min(batches.size(), start + options_.max_in_flight);
        std::vector<std::future<std::vector<RelevancyVerdict>>> inflight;
        for (std::size_t b = start; b < stop; ++b) {
            inflight.push_back(std::async(std::launch::async, [this, &batches, b] { return classify_batch(batches[b]); }));
        }
        // Drain every future before rethrowing so no request outlives this call.
        std::exception_ptr first_error;
        for (auto& f : inflight) {
            try {
                auto verdicts = f.get();
                out.insert(out.end(), verdicts.begin(), verdicts.end());
            } catch (...) {
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        }
        if (first_error) {
            std::rethrow_exception(first_error);
        }
    }
    if (!out.empty()) {
        last_id_ = out.front().classifier_id;
    }
    return out;
}

std::vector<RelevancyVerdict> classify(const RelevancyRequest& request, Classifier& classifier) {
    check_request(request);
    auto verdicts = classifier.classify(request);
    if (verdicts.size() != request.texts.size()) {
        throw Error(ErrorCode::protocol, "classifier returned the wrong number of verdicts");
    }
    return verdicts;
}

std::vector<RelevancyVerdict> classify_remote(const std::string& endpoint, const RelevancyRequest& request,
                                              const RemoteOptions& options) {
    RemoteClassifier classifier(endpoint, options);
    return classify(request, classifier);
}

// Wire format ----------------------------------------------------------------

Json request_to_json(const RelevancyRequest& request) {
    Json j = Json::object();
    j["context"] = request.context;
    j["texts"] = request.texts;
    j["threshold"] = request.threshold;
    return j;
}

RelevancyRequest request_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("context") || !j["context"].is_string() || !j.contains("texts") ||
        !j["texts"].is_array()) {
        throw_validation("request", "expected {context, texts, threshold}");
    }
    RelevancyRequest r;
    r.context = j["context"].get<std::string>();
    for (const auto& t : j["texts"]) {
        if (!t.is_string()) {
            throw_validation("texts", "entries must be strings");
        }
        r.texts.push_back(t.get<std::string>());
    }
    if (j.contains("threshold")) {
        if (!j["threshold"].is_number()) {
            throw_validation("threshold", "must be a number");
        }
        r.threshold = j["threshold"].get<double>();
    }
    return r;
}

Json verdicts_to_json(const std::string& classifier_id, const std::vector<RelevancyVerdict>& verdicts) {
    Json list = Json::array();
    for (const auto& v : verdicts) {
        list.push_back(Json{{"relevant", v.relevant}, {"score", v.score}});
    }
    return Json{{"classifier_id", classifier_id}, {"verdicts", std::move(list)}};
}

std::vector<RelevancyVerdict> verdicts_from_json(const Json& j, std::size_t expected, double threshold) {
    if (!j.is_object() || !j.contains("classifier_id") || !j["classifier_id"].is_string() ||
        !j.contains("verdicts") || !j["verdicts"].is_array()) {
        throw Error(ErrorCode::protocol, "relevancy response must be {classifier_id, verdicts[]}");
    }
    const auto& list = j["verdicts"];
    if (list.size() != expected) {
        throw Error(ErrorCode::protocol,
                    fmt::format("relevancy response has {} verdicts for {} texts", list.size(), expected));
    }
    const auto id = j["classifier_id"].get<std::string>();
    std::vector<RelevancyVerdict> out;
    out.reserve(expected);
    for (const auto& v : list) {
        if (!v.is_object() || !v.contains("relevant") || !v["relevant"].is_boolean() || !v.contains("score") ||
            !v["score"].is_number()) {
            throw Error(ErrorCode::protocol, "verdict must be {relevant: bool, score: number}");
        }
        const double score = v["score"].get<double>();
        const bool relevant = v["relevant"].get<bool>();
        if (!(score >= 0.0 && score <= 1.0)) {
            throw Error(ErrorCode::protocol, "verdict score outside [0, 1]");
        }
        if (relevant != (score >= threshold)) {
            throw Error(ErrorCode::protocol, "verdict contradicts the requested threshold");
        }
        out.push_back({relevant, score, id});
    }
    return out;
}

// Filter ----------------------------------------------------------------------

std::unique_ptr<Classifier> make_classifier(const RelevancyConfig& config, const RemoteOptions& remote) {
    if (config.classifier == ClassifierKind::remote) {
        if (!config.endpoint || config.endpoint->empty()) {
            throw_validation("relevancy.endpoint", "required for the remote classifier");
        }
        return std::make_unique<RemoteClassifier>(*config.endpoint, remote);
    }
    return std::make_unique<BaselineClassifier>();
}

std::vector<Record> filter_relevancy(std::vector<Record> records, const RelevancyConfig& config,
                                     Classifier& classifier) {
    if (config.context.empty()) {
        throw_validation("relevancy.context", "must be non-empty");
    }
    if (records.empty()) {
        return records;
    }
    RelevancyRequest request{config.context, {}, config.threshold};
    request.texts.reserve(records.size());
    for (const auto& r : records) {
        request.texts.push_back(searchable_text(r));
    }
    const auto verdicts = classify(request, classifier);
    std::vector<Record> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (verdicts[i].relevant) {
            kept.push_back(std::move(records[i]));
        }
    }
    return kept;
}

} // namespace kumpul::relevancy
