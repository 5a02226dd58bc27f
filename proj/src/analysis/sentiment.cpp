#include <fstream>

#include <fmt/format.h>

#include "kumpul/analysis/analysis.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/core/text.hpp"

namespace kumpul::analysis {

namespace {

std::filesystem::path lexicon_path(const AnalysisRequest& request) {
    FieldErrors errors;
    ObjectReader r(request.params, "params", errors);
    r.allow_only({"lexicon"});
    auto lexicon = r.string("lexicon");
    errors.raise_if_any("invalid sentiment params");
    if (!lexicon || *lexicon == "default") {
        return data_dir() / "lexicon_id.tsv";
    }
    return *lexicon;
}

} // namespace

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw_validation("params.lexicon", "cannot read lexicon " + path.string());
    }
    Lexicon lexicon;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        const std::string polarity = tab == std::string::npos ? "" : line.substr(tab + 1);
        if (polarity != "+1" && polarity != "-1") {
            throw_validation("params.lexicon", fmt::format("{}:{}: expected word<TAB>+1|-1", path.string(), n));
        }
        lexicon[normalize_text(line.substr(0, tab))] = polarity == "+1" ? 1 : -1;
    }
    return lexicon;
}

SentimentScore score_sentiment(std::string_view text, const Lexicon& lexicon) {
    const auto tokens = tokenize(text);
    if (tokens.empty()) {
        return {0.0, "neutral"};
    }
    int sum = 0;
    for (const auto& t : tokens) {
        if (auto it = lexicon.find(t); it != lexicon.end()) {
            sum += it->second;
        }
    }
    const double score = static_cast<double>(sum) / static_cast<double>(tokens.size());
    return {score, sum > 0 ? "positive" : sum < 0 ? "negative" : "neutral"};
}

Json SentimentAnalyzer::describe() const {
    return Json{{"id", id()},
                {"description", "lexicon polarity per record"},
                {"params", Json::array({Json{{"name", "lexicon"},
                                             {"required", false},
                                             {"description", "\"default\" or a word<TAB>+1|-1 file"}}})}};
}

void SentimentAnalyzer::validate(const AnalysisRequest& request) const {
    lexicon_path(request);
}

AnalysisResult SentimentAnalyzer::analyze(const std::vector<Record>& records, const AnalysisRequest& request) const {
    const Lexicon lexicon = load_lexicon(lexicon_path(request));
    AnalysisResult result;
    result.detail = Json::array();
    std::size_t positive = 0, negative = 0, neutral = 0;
    double total = 0.0;
    for (const auto& r : records) {
        const auto s = score_sentiment(column_text(r, request.text_column), lexicon);
        total += s.score;
        (s.label == "positive" ? positive : s.label == "negative" ? negative : neutral) += 1;
        result.detail.push_back(Json{{"record_id", r.record_id}, {"score", s.score}, {"label", s.label}});
    }
    result.summary = Json{{"record_count", records.size()},
                          {"positive", positive},
                          {"negative", negative},
                          {"neutral", neutral},
                          {"mean_score", records.empty() ? 0.0 : total / static_cast<double>(records.size())}};
    return result;
}

} // namespace kumpul::analysis
