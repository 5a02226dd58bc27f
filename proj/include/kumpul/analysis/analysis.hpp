#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"
#include "kumpul/core/time.hpp"

namespace kumpul::store {
class Datastore;
}

namespace kumpul::analysis {

/// Analyze job payload: {"dataset_id", "analyzer", "text_column"?, "params"?}.
struct AnalysisRequest {
    std::string dataset_id;
    std::string analyzer;
    /// "text", "title", "title+text" or "extras.<key>".
    std::string text_column = "text";
    Json params = Json::object();
};

AnalysisRequest analysis_request_from_json(const Json& j);
Json to_json(const AnalysisRequest& r);

struct AnalysisResult {
    std::string analyzer_id;
    std::string dataset_id;
    Json summary = Json::object();
    Json detail;
    Instant produced_at{};
};

Json to_json(const AnalysisResult& r);
AnalysisResult analysis_result_from_json(const Json& j);

/// The string an analyzer reads for `column`; missing fields read as "".
std::string column_text(const Record& r, const std::string& column);

class Analyzer {
public:
    virtual ~Analyzer() = default;
    virtual std::string id() const = 0;
    /// Catalog entry: {id, description, params: [...]}.
    virtual Json describe() const = 0;
    /// Submit-time check of request.params; throws Error(validation).
    virtual void validate(const AnalysisRequest& request) const = 0;
    /// Fills summary and detail; the caller stamps ids and produced_at.
    virtual AnalysisResult analyze(const std::vector<Record>& records, const AnalysisRequest& request) const = 0;
};

using AnalyzerFactory = std::function<std::unique_ptr<Analyzer>()>;

class AnalyzerRegistry {
public:
    /// Throws Error(conflict) when the id is taken.
    void register_analyzer(const std::string& id, AnalyzerFactory factory);
    /// Throws Error(validation) for an unknown id.
    std::unique_ptr<Analyzer> create(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;
    Json catalog() const;

    /// Registers sentiment, trend, network and terms.
    void add_builtins();

    static AnalyzerRegistry& global();

private:
    mutable std::mutex mutex_;
    std::map<std::string, AnalyzerFactory> factories_;
};

void register_analyzer(const std::string& id, AnalyzerFactory factory);

/// Parses the payload and checks the analyzer and its params. Payloads
/// naming several datasets are rejected.
AnalysisRequest validate_analysis_payload(const Json& payload,
                                          const AnalyzerRegistry& registry = AnalyzerRegistry::global());

/// Loads the dataset, runs the analyzer and stamps the result.
AnalysisResult run_analysis(const store::Datastore& store, const AnalysisRequest& request, Instant now,
                            const AnalyzerRegistry& registry = AnalyzerRegistry::global());

// Built-in analyzers -----------------------------------------------------------

/// word -> +1 | -1, words normalized.
using Lexicon = std::map<std::string, int>;

/// "word<TAB>+1|-1" per line; '#' starts a comment line.
Lexicon load_lexicon(const std::filesystem::path& path);
std::vector<std::string> load_stopwords(const std::filesystem::path& path);

struct SentimentScore {
    double score = 0.0;
    std::string label; // positive | negative | neutral
};

/// Sum of matched polarities divided by the token count; 0 for no tokens.
SentimentScore score_sentiment(std::string_view text, const Lexicon& lexicon);

/// params: lexicon ("default" or a file path).
class SentimentAnalyzer final : public Analyzer {
public:
    std::string id() const override { return "sentiment"; }
    Json describe() const override;
    void validate(const AnalysisRequest& request) const override;
    AnalysisResult analyze(const std::vector<Record>& records, const AnalysisRequest& request) const override;
};

/// params: bucket (hour | day | week, default day), tz_offset ("+07:00",
/// default "+00:00"). Weeks start on Monday.
class TrendAnalyzer final : public Analyzer {
public:
    std::string id() const override { return "trend"; }
    Json describe() const override;
    void validate(const AnalysisRequest& request) const override;
    AnalysisResult analyze(const std::vector<Record>& records, const AnalysisRequest& request) const override;
};

/// "@handle" mentions, lowercased, in order of first appearance.
std::vector<std::string> extract_mentions(std::string_view text);

/// Mention graph author -> @handle; an edge's weight is the number of
/// records in which the author mentions the handle. Records without an
/// author contribute nothing.
class NetworkAnalyzer final : public Analyzer {
public:
    std::string id() const override { return "network"; }
    Json describe() const override;
    void validate(const AnalysisRequest& request) const override;
    AnalysisResult analyze(const std::vector<Record>& records, const AnalysisRequest& request) const override;
};

/// params: top_k (default 50), stopwords ("default", "none" or a file path).
class TermsAnalyzer final : public Analyzer {
public:
    std::string id() const override { return "terms"; }
    Json describe() const override;
    void validate(const AnalysisRequest& request) const override;
    AnalysisResult analyze(const std::vector<Record>& records, const AnalysisRequest& request) const override;
};

} // namespace kumpul::analysis
