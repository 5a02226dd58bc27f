#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "kumpul/analysis/analysis.hpp"
#include "kumpul/core/fields.hpp"

namespace kumpul::analysis {

namespace {

bool handle_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::isalnum(u) != 0 || c == '_');
}

std::string lower_ascii(std::string s) {
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

struct NodeStats {
    std::set<std::string> in;
    std::set<std::string> out;
    std::size_t weighted_in = 0;
    std::size_t weighted_out = 0;
};

constexpr std::size_t kTopNodes = 10;

} // namespace

std::vector<std::string> extract_mentions(std::string_view text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '@' || (i > 0 && handle_char(text[i - 1]))) {
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && handle_char(text[j])) {
            ++j;
        }
        if (j > i + 1) {
            auto handle = lower_ascii(std::string(text.substr(i + 1, j - i - 1)));
            if (seen.insert(handle).second) {
                out.push_back(std::move(handle));
            }
        }
        i = j - 1;
    }
    return out;
}

Json NetworkAnalyzer::describe() const {
    return Json{{"id", id()}, {"description", "author to @mention graph with degree metrics"}, {"params", Json::array()}};
}

void NetworkAnalyzer::validate(const AnalysisRequest& request) const {
    FieldErrors errors;
    ObjectReader r(request.params, "params", errors);
    r.allow_only({});
    errors.raise_if_any("invalid network params");
}

AnalysisResult NetworkAnalyzer::analyze(const std::vector<Record>& records, const AnalysisRequest& request) const {
    std::map<std::pair<std::string, std::string>, std::size_t> edges;
    for (const auto& r : records) {
        if (!r.author) {
            continue;
        }
        std::string author = lower_ascii(*r.author);
        if (!author.empty() && author.front() == '@') {
            author.erase(0, 1);
        }
        if (author.empty()) {
            continue;
        }
        for (const auto& handle : extract_mentions(column_text(r, request.text_column))) {
            ++edges[{author, handle}];
        }
    }

    std::map<std::string, NodeStats> nodes;
    std::size_t total_weight = 0;
    std::vector<std::pair<std::pair<std::string, std::string>, std::size_t>> sorted(edges.begin(), edges.end());
    for (const auto& [key, w] : sorted) {
        auto& src = nodes[key.first];
        auto& dst = nodes[key.second];
        src.out.insert(key.second);
        src.weighted_out += w;
        dst.in.insert(key.first);
        dst.weighted_in += w;
        total_weight += w;
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    AnalysisResult result;
    Json edge_list = Json::array();
    for (const auto& [key, w] : sorted) {
        edge_list.push_back(Json{{"source", key.first}, {"target", key.second}, {"weight", w}});
    }
    std::vector<std::pair<std::string, const NodeStats*>> ranked;
    for (const auto& [id, stats] : nodes) {
        ranked.emplace_back(id, &stats);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second->weighted_in + a.second->weighted_out > b.second->weighted_in + b.second->weighted_out;
    });
    Json node_list = Json::array();
    Json top = Json::array();
    for (const auto& [id, s] : ranked) {
        const std::size_t weighted = s->weighted_in + s->weighted_out;
        node_list.push_back(Json{{"id", id},
                                 {"in_degree", s->in.size()},
                                 {"out_degree", s->out.size()},
                                 {"weighted_in", s->weighted_in},
                                 {"weighted_out", s->weighted_out},
                                 {"weighted_degree", weighted}});
        if (top.size() < kTopNodes) {
            top.push_back(Json{{"id", id}, {"weighted_degree", weighted}});
        }
    }
    result.detail = Json{{"edges", std::move(edge_list)}, {"nodes", std::move(node_list)}};
    result.summary = Json{{"node_count", nodes.size()},
                          {"edge_count", edges.size()},
                          {"total_weight", total_weight},
                          {"top_nodes", std::move(top)}};
    return result;
}

} // namespace kumpul::analysis
