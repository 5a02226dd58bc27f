#include "kumpul/prep/dedup.hpp"

#include <numeric>
#include <unordered_map>

#include "kumpul/core/error.hpp"
#include "kumpul/core/text.hpp"
#include "kumpul/prep/simhash.hpp"

namespace kumpul::prep {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

void unite_equal_keys(DisjointSets& sets, const std::vector<std::optional<std::string>>& keys) {
    std::unordered_map<std::string_view, std::size_t> first;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!keys[i]) {
            continue;
        }
        auto [it, inserted] = first.emplace(*keys[i], i);
        if (!inserted) {
            sets.unite(it->second, i);
        }
    }
}

void unite_near(DisjointSets& sets, const std::vector<std::uint64_t>& sigs, int threshold) {
    const std::size_t n = sigs.size();
    const int blocks = threshold + 1;
    if (blocks > 16) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (hamming(sigs[i], sigs[j]) <= threshold) {
                    sets.unite(i, j);
                }
            }
        }
        return;
    }
    // Pigeonhole: signatures within `threshold` bits agree exactly on at
    // least one of threshold + 1 disjoint blocks.
    const int width = 64 / blocks;
    for (int b = 0; b < blocks; ++b) {
        const int shift = b * width;
        const int bits = b == blocks - 1 ? 64 - shift : width;
        const std::uint64_t mask = bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < n; ++i) {
            buckets[(sigs[i] >> shift) & mask].push_back(i);
        }
        for (const auto& [_, members] : buckets) {
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) {
                    if (hamming(sigs[members[x]], sigs[members[y]]) <= threshold) {
                        sets.unite(members[x], members[y]);
                    }
                }
            }
        }
    }
}

} // namespace

bool keeps_over(const Record& a, const Record& b) {
    if (a.published_at.has_value() != b.published_at.has_value()) {
        return a.published_at.has_value();
    }
    if (a.published_at && *a.published_at != *b.published_at) {
        return *a.published_at < *b.published_at;
    }
    return a.record_id < b.record_id;
}

DedupResult filter_dedup(std::vector<Record> records, const DedupConfig& config) {
    if (config.near_threshold < 0 || config.near_threshold > 64) {
        throw_validation("dedup.near_threshold", "must lie in [0, 64]");
    }
    const std::size_t n = records.size();
    DisjointSets sets(n);

    std::vector<std::optional<std::string>> canonical(n);
    std::vector<std::optional<std::string>> urls(n);
    for (std::size_t i = 0; i < n; ++i) {
        canonical[i] = normalize_text(records[i].text);
        urls[i] = records[i].url;
    }
    unite_equal_keys(sets, canonical);
    unite_equal_keys(sets, urls);
    if (config.mode == DedupMode::near) {
        std::vector<std::uint64_t> sigs(n);
        for (std::size_t i = 0; i < n; ++i) {
            sigs[i] = simhash64(records[i].text);
        }
        unite_near(sets, sigs, config.near_threshold);
    }

    std::unordered_map<std::size_t, std::size_t> winner;
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = sets.find(i);
        auto [it, inserted] = winner.emplace(root, i);
        if (!inserted && keeps_over(records[i], records[it->second])) {
            it->second = i;
        }
    }

    DedupResult out;
    out.kept.reserve(winner.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (winner[sets.find(i)] == i) {
            out.kept.push_back(std::move(records[i]));
        } else {
            out.removed_ids.push_back(records[i].record_id);
        }
    }
    return out;
}

} // namespace kumpul::prep
