#include <doctest.h>

#include <chrono>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/core/text.hpp"
#include "kumpul/langid/langid.hpp"
#include "kumpul/prep/dedup.hpp"
#include "kumpul/prep/filters.hpp"
#include "kumpul/prep/pipeline.hpp"
#include "kumpul/prep/simhash.hpp"
#include "kumpul/prep/stage_report.hpp"
#include "kumpul/store/datastore.hpp"
#include "dedup_oracle.hpp"
#include "support.hpp"

using namespace kumpul;
using namespace kumpul::prep;
using kumpul::testing::make_record;
using kumpul::testing::ts;
using kumpul::testing::oracle_exact_kept;
using kumpul::testing::random_corpus;

namespace {

std::set<std::string> ids_of(const std::vector<Record>& records) {
    std::set<std::string> out;
    for (const auto& r : records) out.insert(r.record_id);
    return out;
}

std::multiset<std::string> contents(const std::vector<Record>& records) {
    std::multiset<std::string> out;
    for (const auto& r : records) out.insert(to_json(r).dump());
    return out;
}

std::string random_token(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> len(3, 8), letter('a', 'z');
    std::string s;
    for (int i = len(rng); i > 0; --i) s += static_cast<char>(letter(rng));
    return s;
}

const std::vector<langid::LanguageProfile>& profiles() {
    static const auto p = langid::load_profiles(data_dir() / "profiles");
    return p;
}

PipelineEnv env() {
    PipelineEnv e;
    e.profiles = profiles();
    return e;
}

} // namespace

TEST_SUITE("preprocessing") {

TEST_CASE("dedup examples") {
    auto r = filter_dedup({make_record("a", "Harga naik"), make_record("b", "harga  NAIK "), make_record("c", "BBM turun")},
                          {});
    CHECK(ids_of(r.kept) == std::set<std::string>{"a", "c"});
    CHECK(r.removed_ids == std::vector<std::string>{"b"});

    r = filter_dedup({make_record("a", "satu"), make_record("b", "dua"), make_record("c", "tiga")}, {});
    CHECK(r.kept.size() == 3);
    CHECK(r.removed_ids.empty());

    auto x = make_record("x", "judul pertama");
    auto y = make_record("y", "judul lain sama sekali");
    x.url = y.url = "https://news.example/berita/1";
    r = filter_dedup({x, y}, {});
    CHECK(r.kept.size() == 1);

    // Keep rule: earliest timestamp, missing last, then id.
    auto early = make_record("z", "sama");
    early.published_at = ts("2022-09-01T00:00:00Z");
    auto late = make_record("a", "sama");
    late.published_at = ts("2022-09-02T00:00:00Z");
    auto undated = make_record("0", "sama");
    r = filter_dedup({undated, late, early}, {});
    REQUIRE(r.kept.size() == 1);
    CHECK(r.kept[0].record_id == "z");
    r = filter_dedup({make_record("b", "sama"), make_record("a", "sama")}, {});
    CHECK(r.kept[0].record_id == "a");

    CHECK_THROWS_AS(filter_dedup({}, {DedupMode::near, 65}), Error);
    CHECK_THROWS_AS(filter_dedup({}, {DedupMode::near, -1}), Error);
}

TEST_CASE("exact dedup equals the brute-force oracle") {
    std::mt19937_64 rng(424242);
    for (int run = 0; run < 10; ++run) {
        const auto n = std::uniform_int_distribution<std::size_t>(50, 500)(rng);
        const auto corpus = random_corpus(rng, n);
        const auto result = filter_dedup(corpus, {});
        CHECK(ids_of(result.kept) == oracle_exact_kept(corpus));
        CHECK(result.kept.size() + result.removed_ids.size() == corpus.size());
    }
}

TEST_CASE("near mode removes a superset of exact mode") {
    std::mt19937_64 rng(7);
    for (int run = 0; run < 5; ++run) {
        auto corpus = random_corpus(rng, 300);
        // Near variants: one token appended to an existing text.
        for (int i = 0; i < 40; ++i) {
            auto r = corpus[static_cast<std::size_t>(i)];
            r.record_id += "-near";
            r.url.reset();
            r.text += " " + random_token(rng);
            corpus.push_back(r);
        }
        const auto exact = filter_dedup(corpus, {DedupMode::exact, 3});
        for (int threshold : {0, 3, 8, 20}) {
            const auto near = filter_dedup(corpus, {DedupMode::near, threshold});
            const std::set<std::string> removed_exact(exact.removed_ids.begin(), exact.removed_ids.end());
            const std::set<std::string> removed_near(near.removed_ids.begin(), near.removed_ids.end());
            CHECK(std::includes(removed_near.begin(), removed_near.end(), removed_exact.begin(), removed_exact.end()));
            // No two survivors are within the threshold.
            for (std::size_t i = 0; i < near.kept.size(); ++i) {
                for (std::size_t j = i + 1; j < near.kept.size(); ++j) {
                    REQUIRE(hamming(simhash64(near.kept[i].text), simhash64(near.kept[j].text)) > threshold);
                }
            }
        }
    }
}

TEST_CASE("simhash") {
    CHECK(simhash64("") == 0);
    CHECK(hamming(simhash64("harga bbm naik"), simhash64("harga bbm naik")) == 0);
    CHECK(simhash64("Harga  BBM naik") == simhash64("harga bbm naik"));
    CHECK(feature_hash("bbm") != feature_hash("bbn"));

    std::mt19937_64 rng(2022);
    double total = 0.0, oracle = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        std::string a, b;
        for (int k = 0; k < 30; ++k) {
            a += random_token(rng) + " ";
            b += random_token(rng) + " ";
        }
        total += hamming(simhash64(a), simhash64(b));
        oracle += hamming(rng(), rng());
    }
    const double mean = total / 1000.0;
    MESSAGE("mean hamming " << mean << ", independent uniform signatures " << oracle / 1000.0);
    CHECK(oracle / 1000.0 >= 30.0);
    CHECK(oracle / 1000.0 <= 34.0);
    CHECK(mean >= 30.0);
    CHECK(mean <= 34.0);
}

TEST_CASE("filter_date") {
    const auto start = ts("2022-09-01T00:00:00Z");
    const auto end = ts("2022-09-30T23:59:59Z");
    auto at_start = make_record("s", "x");
    at_start.published_at = start;
    auto at_end = make_record("e", "x");
    at_end.published_at = end;
    auto after = make_record("a", "x");
    after.published_at = end + std::chrono::seconds(1);
    auto before = make_record("b", "x");
    before.published_at = start - std::chrono::seconds(1);
    auto undated = make_record("u", "x");

    CHECK(ids_of(filter_date({at_start, at_end, after, before, undated}, start, end)) ==
          std::set<std::string>{"s", "e"});
    CHECK(ids_of(filter_date({undated, after}, start, end, MissingTimestampPolicy::keep)) ==
          std::set<std::string>{"u"});
    CHECK_THROWS_AS(filter_date({}, end, start), Error);
}

TEST_CASE("filter_keyword") {
    const auto promo = make_record("p", "Promo BlackBerry Messenger terbaru");
    const auto harga = make_record("h", "Harga BBM naik");
    const auto sibb = make_record("s", "sibbman datang");
    CHECK(filter_keyword({promo, harga}, {}, {"blackberry messenger"}).size() == 1);
    CHECK(filter_keyword({promo, harga, sibb}, {}, {}).size() == 3);
    CHECK(ids_of(filter_keyword({harga, sibb}, {"bbm"}, {}, MatchMode::whole_word)) == std::set<std::string>{"h"});
    CHECK(ids_of(filter_keyword({harga, sibb}, {"bbm"}, {}, MatchMode::substring)) ==
          std::set<std::string>{"h", "s"});

    // Terms are normalized like the text; the title takes part.
    auto titled = make_record("t", "isi berita");
    titled.title = "Aplikasi BlackBerry   Messenger";
    CHECK(filter_keyword({titled}, {}, {"BLACKBERRY MESSENGER"}).empty());
    CHECK(filter_keyword({titled}, {"berita aplikasi"}, {}, MatchMode::whole_word).empty());
    CHECK(filter_keyword({titled}, {"messenger isi"}, {}, MatchMode::whole_word).size() == 1);
    // Exclusion wins over inclusion.
    CHECK(filter_keyword({promo}, {"promo"}, {"messenger"}).empty());
}

TEST_CASE("compute_stage_report") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto reference = compute_stage_report({12847, 10203, 9451, 7832, 5614});
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(elapsed < std::chrono::seconds(1));
    REQUIRE(reference.stages.size() == 4);
    const std::vector<std::size_t> removed = {2644, 752, 1619, 2218};
    const std::vector<double> pct = {20.6, 7.4, 17.1, 28.3};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(reference.stages[i].removed == removed[i]);
        CHECK(reference.stages[i].reduction_pct == pct[i]);
    }
    CHECK(reference.total_removed == 7233);
    CHECK(reference.total_reduction_pct == 56.3);
    CHECK(check_stage_report(reference).empty());

    const auto flat = compute_stage_report({100, 100});
    CHECK(flat.stages[0].removed == 0);
    CHECK(flat.stages[0].reduction_pct == 0.0);

    const auto hand = compute_stage_report({200, 150, 75});
    CHECK(hand.stages[0].removed == 50);
    CHECK(hand.stages[1].removed == 75);
    CHECK(hand.stages[0].reduction_pct == 25.0);
    CHECK(hand.stages[1].reduction_pct == 50.0);
    CHECK(hand.total_reduction_pct == 62.5);

    CHECK_THROWS_AS(compute_stage_report({10, 11}), Error);
    CHECK(reduction_pct(1, 0) == 0.0);
    // Half away from zero at the tenth: 1/8 = 12.5%, 41/400 = 10.25% -> 10.3.
    CHECK(reduction_pct(1, 8) == 12.5);
    CHECK(reduction_pct(41, 400) == 10.3);
    CHECK(reduction_pct(1, 3) == 33.3);
    CHECK(reduction_pct(2, 3) == 66.7);
}

TEST_CASE("stage report JSON and table") {
    const auto report = compute_stage_report({12847, 10203, 9451, 7832, 5614}, {"dedup", "language", "keyword",
                                                                                 "relevancy"});
    CHECK(stage_report_from_json(to_json(report)) == report);
    const auto table = render_stage_table(report);
    const std::string expected =
        "Stage                           Records  Removed  Reduction\n"
        "-----------------------------------------------------------\n"
        "Raw collected data               12,847\n"
        "After deduplication              10,203    2,644     -20.6%\n"
        "After language detection          9,451      752      -7.4%\n"
        "After keyword filtering           7,832    1,619     -17.1%\n"
        "After relevancy classification    5,614    2,218     -28.3%\n"
        "-----------------------------------------------------------\n"
        "Total                             5,614    7,233     -56.3%\n";
    CHECK(table == expected);
    CHECK(group_thousands(0) == "0");
    CHECK(group_thousands(999) == "999");
    CHECK(group_thousands(1000) == "1,000");
    CHECK(group_thousands(1234567) == "1,234,567");
}

TEST_CASE("pipeline config parsing") {
    const auto cfg = pipeline_config_from_json(Json::parse(R"({
        "relevancy": {"context": "harga bbm"},
        "keyword": {"exclude": ["blackberry messenger"]},
        "dedup": {"mode": "near", "near_threshold": 5},
        "date": null
    })"));
    CHECK(cfg.dedup->mode == DedupMode::near);
    CHECK(cfg.dedup->near_threshold == 5);
    CHECK_FALSE(cfg.date.has_value());
    CHECK(cfg.keyword->match == MatchMode::substring);
    CHECK(cfg.relevancy->threshold == 0.1);
    CHECK(cfg.relevancy->classifier == relevancy::ClassifierKind::baseline);
    CHECK(pipeline_config_from_json(to_json(cfg)).dedup->near_threshold == 5);

    try {
        pipeline_config_from_json(Json::parse(R"({
            "dedup": {"mode": "fuzzy", "near_threshold": 65},
            "language": {"targets": []},
            "relevancy": {"context": "", "classifier": "remote"},
            "colour": 1
        })"));
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::validation);
        std::set<std::string> fields;
        for (const auto& f : e.field_errors()) fields.insert(f.field);
        CHECK(fields.count("dedup.mode") == 1);
        CHECK(fields.count("dedup.near_threshold") == 1);
        CHECK(fields.count("language.targets") == 1);
        CHECK(fields.count("relevancy.context") == 1);
        CHECK(fields.count("relevancy.endpoint") == 1);
        CHECK(fields.count("colour") == 1);
    }
    CHECK_THROWS_AS(pipeline_config_from_json(Json::parse(R"({"date": {"start": "2022-09-02T00:00:00Z",
                                                                       "end": "2022-09-01T00:00:00Z"}})")),
                    Error);
}

TEST_CASE("all stages disabled is the identity") {
    std::mt19937_64 rng(3);
    const auto corpus = random_corpus(rng, 200);
    const auto out = apply_pipeline(corpus, {}, env());
    CHECK(contents(out.records) == contents(corpus));
    REQUIRE(out.report.stages.size() == 5);
    for (const auto& s : out.report.stages) {
        CHECK_FALSE(s.enabled);
        CHECK(s.removed == 0);
    }
    CHECK(out.report.total_removed == 0);
}

TEST_CASE("stages run in the fixed order") {
    // dedup before keyword: the undated duplicate carries the keyword, the
    // dated one survives dedup and is then removed by the keyword stage.
    auto a = make_record("a", "harga bbm naik");
    a.published_at = ts("2022-09-01T00:00:00Z");
    auto b = make_record("b", "HARGA BBM NAIK");
    PipelineConfig cfg;
    cfg.keyword = KeywordStage{{}, {"harga"}, MatchMode::substring};
    cfg.dedup = DedupConfig{};
    const auto out = apply_pipeline({b, a}, cfg, env());
    CHECK(out.records.empty());
    CHECK(out.report.stages[0].name == "dedup");
    CHECK(out.report.stages[0].removed == 1);
    CHECK(out.report.stages[3].name == "keyword");
    CHECK(out.report.stages[3].removed == 1);
    CHECK(out.dedup_removed_ids == std::vector<std::string>{"b"});
}

TEST_CASE("relevancy stage is monotone in the threshold") {
    std::mt19937_64 rng(17);
    const auto corpus = random_corpus(rng, 400);
    std::set<std::string> previous;
    bool first = true;
    for (double threshold : {0.0, 0.05, 0.1, 0.2, 0.4}) {
        PipelineConfig cfg;
        cfg.relevancy = relevancy::RelevancyConfig{"harga bbm naik di pasar", relevancy::ClassifierKind::baseline,
                                                   threshold, std::nullopt};
        const auto kept = ids_of(apply_pipeline(corpus, cfg, env()).records);
        if (!first) {
            CHECK(std::includes(previous.begin(), previous.end(), kept.begin(), kept.end()));
        }
        previous = kept;
        first = false;
    }
}

TEST_CASE("filters never mutate content and reports stay consistent") {
    std::mt19937_64 rng(23);
    const auto corpus = random_corpus(rng, 300);
    std::map<std::string, std::string> original;
    for (const auto& r : corpus) original[r.record_id] = to_json(r).dump();
    for (int trial = 0; trial < 8; ++trial) {
        PipelineConfig cfg;
        if (trial & 1) cfg.dedup = DedupConfig{trial & 4 ? DedupMode::near : DedupMode::exact, 3};
        if (trial & 2) cfg.date = DateStage{ts("2022-09-01T00:00:00Z"), ts("2022-09-01T05:00:00Z"), {}};
        if (trial & 4) cfg.keyword = KeywordStage{{"harga", "bbm", "solar"}, {"mahal"}, MatchMode::whole_word};
        if (trial > 4) cfg.relevancy = relevancy::RelevancyConfig{"harga bbm", relevancy::ClassifierKind::baseline, 0.1, std::nullopt};
        const auto out = apply_pipeline(corpus, cfg, env());
        CHECK(check_stage_report(out.report).empty());
        CHECK(out.report.final_count == out.records.size());
        for (const auto& r : out.records) {
            CHECK(to_json(r).dump() == original.at(r.record_id));
        }
        // Same input, same output.
        CHECK(apply_pipeline(corpus, cfg, env()).report == out.report);
    }
}

TEST_CASE("run_pipeline stores merged and preprocessed datasets with lineage") {
    kumpul::testing::TempDir dir;
    store::Datastore s(dir / "p.db");
    Dataset meta;
    meta.kind = DatasetKind::raw;
    meta.name = "twitter";
    const auto a = s.commit_dataset(meta, {make_record("1", "harga bbm naik"), make_record("2", "rendang")});
    meta.name = "news";
    const auto b = s.commit_dataset(meta, {make_record("1", "Harga BBM naik"), make_record("3", "bbm langka")});

    PreprocessRequest req;
    req.inputs = {"twitter", b};
    req.config.dedup = DedupConfig{};
    req.config.relevancy = relevancy::RelevancyConfig{"harga bbm", relevancy::ClassifierKind::baseline, 0.1, std::nullopt};
    const auto run = run_pipeline(s, req, env(), std::string("job-000007"));
    REQUIRE(run.merged_dataset_id);
    const auto merged = s.get_dataset(*run.merged_dataset_id);
    CHECK(merged.kind == DatasetKind::merged);
    CHECK(merged.record_count == 4);
    CHECK(merged.name == "merged:twitter+news");
    const auto out = s.get_dataset(run.dataset_id);
    CHECK(out.kind == DatasetKind::preprocessed);
    CHECK(out.created_by_job == "job-000007");
    CHECK(out.parent_ids == std::vector<std::string>{*run.merged_dataset_id});
    CHECK(out.record_count == run.report.final_count);
    CHECK(s.get_lineage(run.dataset_id).size() == 4);
    const auto records = s.read_all_records(run.dataset_id);
    CHECK(ids_of(records) == std::set<std::string>{a + "/1", b + "/3"});

    PreprocessRequest single;
    single.inputs = {a};
    const auto copy = run_pipeline(s, single, env());
    CHECK_FALSE(copy.merged_dataset_id.has_value());
    CHECK(s.get_dataset(copy.dataset_id).parent_ids == std::vector<std::string>{a});
    CHECK(s.get_dataset(copy.dataset_id).name == "twitter:preprocessed");

    PreprocessRequest missing;
    missing.inputs = {"ds-404"};
    CHECK_THROWS_AS(run_pipeline(s, missing, env()), Error);
}

} // TEST_SUITE
