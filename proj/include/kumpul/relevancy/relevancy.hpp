#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"

namespace kumpul::relevancy {

inline constexpr double kDefaultThreshold = 0.1;

struct RelevancyRequest {
    std::string context;
    std::vector<std::string> texts;
    double threshold = kDefaultThreshold;
};

struct RelevancyVerdict {
    bool relevant = false;
    double score = 0.0;
    std::string classifier_id;

    bool operator==(const RelevancyVerdict&) const = default;
};

/// Jaccard similarity of the token sets of context and text; 0 when both
/// are empty.
double baseline_score(std::string_view context, std::string_view text);

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::string id() const = 0;
    /// One verdict per text, same order.
    virtual std::vector<RelevancyVerdict> classify(const RelevancyRequest& request) = 0;
};

class BaselineClassifier final : public Classifier {
public:
    std::string id() const override { return "baseline-jaccard"; }
    std::vector<RelevancyVerdict> classify(const RelevancyRequest& request) override;
};

struct RemoteOptions {
    std::size_t batch_size = 64;
    std::size_t max_in_flight = 4;
    std::chrono::milliseconds timeout{30000};
};

/// Client for a model server speaking the sentence-pair contract:
///   POST <endpoint>/classify  {"context", "texts", "threshold"}
///   200 -> {"classifier_id", "verdicts": [{"relevant", "score"}]}
/// A server wrapping a sentence-pair model should feed it
/// "[CLS] context [SEP] text [SEP]" for each text.
class RemoteClassifier final : public Classifier {
public:
    explicit RemoteClassifier(std::string endpoint, RemoteOptions options = {});
    std::string id() const override;
    /// Transport failures and non-200 answers throw Error(unavailable);
    /// schema violations throw Error(protocol).
    std::vector<RelevancyVerdict> classify(const RelevancyRequest& request) override;

private:
    std::vector<RelevancyVerdict> classify_batch(const RelevancyRequest& batch) const;

    std::string base_url_;
    std::string path_;
    RemoteOptions options_;
    std::string last_id_ = "remote";
};

/// Checks the request invariants, then delegates. Output length and order
/// match request.texts.
std::vector<RelevancyVerdict> classify(const RelevancyRequest& request, Classifier& classifier);

std::vector<RelevancyVerdict> classify_remote(const std::string& endpoint, const RelevancyRequest& request,
                                              const RemoteOptions& options = {});

// Wire format ----------------------------------------------------------------

Json request_to_json(const RelevancyRequest& request);
RelevancyRequest request_from_json(const Json& j);
Json verdicts_to_json(const std::string& classifier_id, const std::vector<RelevancyVerdict>& verdicts);
/// Throws Error(protocol) when the body does not match the contract for a
/// request of `expected` texts at `threshold`.
std::vector<RelevancyVerdict> verdicts_from_json(const Json& j, std::size_t expected, double threshold);

// Filter ----------------------------------------------------------------------

enum class ClassifierKind { baseline, remote };

struct RelevancyConfig {
    std::string context;
    ClassifierKind classifier = ClassifierKind::baseline;
    double threshold = kDefaultThreshold;
    std::optional<std::string> endpoint;
};

std::unique_ptr<Classifier> make_classifier(const RelevancyConfig& config, const RemoteOptions& remote = {});

/// Keeps records the classifier judges relevant to config.context.
std::vector<Record> filter_relevancy(std::vector<Record> records, const RelevancyConfig& config,
                                     Classifier& classifier);

} // namespace kumpul::relevancy
