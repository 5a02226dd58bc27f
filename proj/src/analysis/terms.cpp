#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "kumpul/analysis/analysis.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/core/fields.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/core/text.hpp"

namespace kumpul::analysis {

namespace {

constexpr long long kDefaultTopK = 50;

struct TermsParams {
    std::size_t top_k = kDefaultTopK;
    std::string stopwords = "default";
};

TermsParams read_params(const AnalysisRequest& request) {
    FieldErrors errors;
    ObjectReader r(request.params, "params", errors);
    r.allow_only({"top_k", "stopwords"});
    TermsParams p;
    if (auto k = r.integer("top_k")) {
        if (*k < 0) {
            errors.add("params.top_k", "must be non-negative");
        } else {
            p.top_k = static_cast<std::size_t>(*k);
        }
    }
    if (auto s = r.string("stopwords")) {
        p.stopwords = *s;
    }
    errors.raise_if_any("invalid terms params");
    return p;
}

} // namespace

std::vector<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw_validation("params.stopwords", "cannot read stopword list " + path.string());
    }
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        out.push_back(normalize_text(line));
    }
    return out;
}

Json TermsAnalyzer::describe() const {
    return Json{{"id", id()},
                {"description", "ranked token frequencies without stopwords"},
                {"params", Json::array({Json{{"name", "top_k"}, {"required", false}, {"description", "entries to return, default 50"}},
                                        Json{{"name", "stopwords"}, {"required", false}, {"description", "default, none or a file path"}}})}};
}

void TermsAnalyzer::validate(const AnalysisRequest& request) const {
    read_params(request);
}

AnalysisResult TermsAnalyzer::analyze(const std::vector<Record>& records, const AnalysisRequest& request) const {
    const auto p = read_params(request);
    std::set<std::string> stop;
    if (p.stopwords == "default") {
        const auto words = load_stopwords(data_dir() / "stopwords.txt");
        stop.insert(words.begin(), words.end());
    } else if (p.stopwords != "none") {
        const auto words = load_stopwords(p.stopwords);
        stop.insert(words.begin(), words.end());
    }

    std::unordered_map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& r : records) {
        for (auto& t : tokenize(column_text(r, request.text_column))) {
            if (!stop.contains(t)) {
                ++counts[std::move(t)];
                ++total;
            }
        }
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > p.top_k) {
        ranked.resize(p.top_k);
    }
    AnalysisResult result;
    result.detail = Json::array();
    for (const auto& [term, n] : ranked) {
        result.detail.push_back(Json{{"term", term}, {"count", n}});
    }
    result.summary = Json{{"total_tokens", total}, {"distinct_terms", counts.size()}, {"returned", ranked.size()}};
    return result;
}

} // namespace kumpul::analysis
