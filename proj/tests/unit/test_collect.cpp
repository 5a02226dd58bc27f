#include <doctest.h>

#include <httplib.h>

#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "kumpul/collect/connector.hpp"
#include "kumpul/collect/synthetic.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/core/serialize.hpp"
#include "kumpul/prep/pipeline.hpp"
#include "kumpul/store/datastore.hpp"
#include "support.hpp"

using namespace kumpul;
using namespace kumpul::collect;
using kumpul::testing::fixture;
using kumpul::testing::TempDir;
using kumpul::testing::ts;
using kumpul::testing::write_file;

namespace {

const Json kSimpleMapping = Json::parse(R"({"fields": {"record_id": "id", "text": "body", "published_at": "t"}})");

ConnectorSpec file_spec(const std::filesystem::path& path, const std::string& format, const Json& mapping) {
    Json j = {{"connector_kind", "file"},
              {"source_name", "fixture"},
              {"source_category", "social_media"},
              {"params", {{"path", path.string()}, {"format", format}}},
              {"mapping", mapping}};
    return connector_spec_from_json(j);
}

CollectContext context() {
    return {ts("2022-10-01T00:00:00Z"), {}};
}

class FeedServer {
public:
    FeedServer(int status, std::string body) {
        server_.Get("/feed", [status, body](const httplib::Request&, httplib::Response& res) {
            res.status = status;
            res.set_content(body, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FeedServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return fmt::format("http://127.0.0.1:{}/feed", port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

ConnectorSpec feed_spec(const std::string& url) {
    Json j = {{"connector_kind", "http_feed"},
              {"source_name", "feed"},
              {"source_category", "news"},
              {"params", {{"url", url}}},
              {"mapping", kSimpleMapping}};
    return connector_spec_from_json(j);
}

prep::PipelineConfig matching_pipeline() {
    return prep::pipeline_config_from_json(Json::parse(kumpul::testing::read_file(fixture("walkthrough_pipeline.json"))));
}

prep::PipelineEnv env() {
    prep::PipelineEnv e;
    e.profiles = langid::load_profiles(data_dir() / "profiles");
    return e;
}

std::string strip_prefix(const std::string& id) {
    const auto slash = id.find('/');
    return slash == std::string::npos ? id : id.substr(slash + 1);
}

} // namespace

TEST_SUITE("collection") {

TEST_CASE("jsonl file collection") {
    TempDir dir;
    store::Datastore s(dir / "c.db");
    write_file(dir / "in.jsonl",
               "{\"id\":\"1\",\"body\":\"harga bbm naik\",\"t\":\"2022-09-03T10:00:00Z\"}\n"
               "{\"id\":\"2\",\"body\":\"antre di spbu\"}\n"
               "\n"
               "{\"id\":\"3\",\"body\":\"subsidi dicabut\",\"t\":\"2022-09-04T10:00:00+07:00\"}\n");
    auto result = run_collection(s, file_spec(dir / "in.jsonl", "jsonl", kSimpleMapping), context());
    CHECK(result.count == 3);
    CHECK(result.skipped == 0);
    const auto ds = s.get_dataset(result.dataset_id);
    CHECK(ds.kind == DatasetKind::raw);
    CHECK(ds.name == "fixture");
    CHECK(ds.record_count == 3);
    const auto records = s.read_all_records(result.dataset_id);
    REQUIRE(records.size() == 3);
    CHECK(records[0].record_id == "1");
    CHECK(records[0].source == "fixture");
    CHECK(records[0].collected_at == ts("2022-10-01T00:00:00Z"));
    CHECK_FALSE(records[1].published_at.has_value());
    CHECK(*records[2].published_at == ts("2022-09-04T03:00:00Z"));

    // One malformed line of four is skipped and reported.
    write_file(dir / "bad.jsonl",
               "{\"id\":\"1\",\"body\":\"a\"}\n{\"id\":\"2\",\"body\":\"b\"}\n{not json\n{\"id\":\"4\",\"body\":\"d\"}\n");
    result = run_collection(s, file_spec(dir / "bad.jsonl", "jsonl", kSimpleMapping), context());
    CHECK(result.count == 3);
    CHECK(result.skipped == 1);
    REQUIRE(result.skipped_items.size() == 1);
    CHECK(result.skipped_items[0].ref == "line 3");

    // Mostly invalid input aborts without creating a dataset.
    const auto before = s.count_datasets();
    write_file(dir / "worse.jsonl", "{\"id\":\"1\",\"body\":\"\"}\n[]\n{\"id\":\"3\",\"body\":\"ok\"}\n");
    CHECK_THROWS_AS(run_collection(s, file_spec(dir / "worse.jsonl", "jsonl", kSimpleMapping), context()), Error);
    CHECK(s.count_datasets() == before);

    // A repeated id inside one source is skipped, the first occurrence kept.
    write_file(dir / "dup.jsonl",
               "{\"id\":\"1\",\"body\":\"a\"}\n{\"id\":\"1\",\"body\":\"b\"}\n{\"id\":\"2\",\"body\":\"c\"}\n");
    result = run_collection(s, file_spec(dir / "dup.jsonl", "jsonl", kSimpleMapping), context());
    CHECK(result.count == 2);
    CHECK(result.skipped == 1);
    CHECK(s.read_all_records(result.dataset_id)[0].text == "a");
}

TEST_CASE("csv file collection") {
    TempDir dir;
    store::Datastore s(dir / "c.db");
    write_file(dir / "in.csv",
               "id,body,t,user\n"
               "1,\"harga, bbm naik\",2022-09-03T10:00:00Z,budi\n"
               "2,\"kata \"\"pedas\"\"\nbaris dua\",,sari\n"
               "3,short row\n");
    Json mapping = kSimpleMapping;
    mapping["fields"]["author"] = "user";
    const auto result = run_collection(s, file_spec(dir / "in.csv", "csv", mapping), context());
    CHECK(result.count == 2);
    CHECK(result.skipped == 1);
    const auto records = s.read_all_records(result.dataset_id);
    CHECK(records[0].text == "harga, bbm naik");
    CHECK(*records[0].author == "budi");
    CHECK(records[1].text == "kata \"pedas\"\nbaris dua");
}

TEST_CASE("mapping rules") {
    ConnectorSpec spec;
    spec.connector_kind = "file";
    spec.source_name = "s";
    FieldMapping m;
    m.fields = {{"text", "content.body"}, {"published_at", "ts"}, {"extras.likes", "stats.likes"}};
    m.defaults = {{"language", "id"}};
    m.timestamp_format = "unix";
    const auto r = map_item(Json::parse(R"({"content": {"body": "Halo"}, "ts": 1662000000, "stats": {"likes": 7}})"),
                            m, spec, 4, ts("2022-10-01T00:00:00Z"));
    CHECK(r.record_id == "item-000005");
    CHECK(r.text == "Halo");
    CHECK(*r.published_at == ts("2022-09-01T02:40:00Z"));
    CHECK(r.extras.at("likes") == "7");
    CHECK(*r.language == "id");

    CHECK_THROWS_AS(map_item(Json::parse(R"({"content": {}})"), m, spec, 1, {}), Error);
    CHECK_THROWS_AS(map_item(Json::parse(R"({"content": {"body": "x"}, "ts": "yesterday"})"), m, spec, 1, {}), Error);
    CHECK_THROWS_AS(map_item(Json::parse("[1]"), m, spec, 1, {}), Error);

    FieldMapping no_text;
    no_text.fields = {{"record_id", "id"}};
    spec.mapping = no_text;
    CHECK_THROWS_AS(require_mapping(spec), Error);
    CHECK_THROWS_AS(field_mapping_from_json(Json::parse(R"({"fields": {"text": "a", "colour": "b"}})")), Error);
}

TEST_CASE("registry") {
    ConnectorRegistry registry;
    registry.add_builtins();
    CHECK(registry.kinds() == std::vector<std::string>{"file", "http_feed", "synthetic"});
    CHECK_THROWS_AS(registry.register_connector("file", [] { return std::make_unique<FileConnector>(); }), Error);
    try {
        registry.register_connector("file", [] { return std::make_unique<FileConnector>(); });
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::conflict);
    }
    try {
        registry.create("ftp");
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::validation);
    }
    CHECK(registry.catalog().size() == 3);

    // A new connector only needs registering.
    class Fixed final : public Connector {
    public:
        Json describe() const override { return {{"kind", "fixed"}}; }
        void validate(const ConnectorSpec&) const override {}
        CollectOutput collect(const ConnectorSpec& spec, const CollectContext& ctx) const override {
            Record r;
            r.record_id = "only";
            r.source = spec.source_name;
            r.text = "tetap";
            r.source_category = spec.source_category;
            r.collected_at = ctx.collected_at;
            return {{r}, {}};
        }
    };
    registry.register_connector("fixed", [] { return std::make_unique<Fixed>(); });
    TempDir dir;
    store::Datastore s(dir / "c.db");
    const auto spec = validate_collect_payload(
        Json::parse(R"({"connector_kind": "fixed", "source_name": "f", "source_category": "academic"})"), registry);
    const auto result = run_collection(s, spec, context(), std::nullopt, registry);
    CHECK(result.count == 1);
    CHECK(s.read_all_records(result.dataset_id)[0].source_category == SourceCategory::academic);

    CHECK_THROWS_AS(validate_collect_payload(Json::parse(R"({"connector_kind": "file", "source_name": "f",
        "source_category": "social_media", "params": {"path": "x", "format": "xml"}, "mapping": {"fields": {"text": "t"}}})")),
                    Error);
    CHECK_THROWS_AS(validate_collect_payload(Json::parse(R"({"connector_kind": "file", "source_name": "f",
        "source_category": "blogs", "params": {"path": "x", "format": "csv"}, "mapping": {"fields": {"text": "t"}}})")),
                    Error);
}

TEST_CASE("spec keyword and date narrowing") {
    TempDir dir;
    store::Datastore s(dir / "c.db");
    write_file(dir / "in.jsonl",
               "{\"id\":\"1\",\"body\":\"harga BBM naik\",\"t\":\"2022-09-03T10:00:00Z\"}\n"
               "{\"id\":\"2\",\"body\":\"harga bbm turun\",\"t\":\"2022-08-03T10:00:00Z\"}\n"
               "{\"id\":\"3\",\"body\":\"resep rendang\",\"t\":\"2022-09-03T10:00:00Z\"}\n"
               "{\"id\":\"4\",\"body\":\"bbm lagi\"}\n");
    auto spec = file_spec(dir / "in.jsonl", "jsonl", kSimpleMapping);
    spec.keywords = {"bbm"};
    spec.date_range = DateRange{ts("2022-09-01T00:00:00Z"), ts("2022-09-30T23:59:59Z")};
    const auto result = run_collection(s, spec, context());
    CHECK(result.count == 1);
    CHECK(result.filtered == 3);
    CHECK(s.read_all_records(result.dataset_id)[0].record_id == "1");
}

TEST_CASE("http feed connector") {
    TempDir dir;
    store::Datastore s(dir / "c.db");
    {
        FeedServer feed(200, R"([{"id": "a", "body": "harga bbm"}, {"id": "b", "body": "antre solar"}])");
        const auto result = run_collection(s, feed_spec(feed.url()), context());
        CHECK(result.count == 2);
        CHECK(s.read_all_records(result.dataset_id)[1].source_category == SourceCategory::news);
    }
    auto code_of = [&](int status, const std::string& body) {
        FeedServer feed(status, body);
        try {
            run_collection(s, feed_spec(feed.url()), context());
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::internal;
    };
    CHECK(code_of(503, "[]") == ErrorCode::unavailable);
    CHECK(code_of(404, "[]") == ErrorCode::validation);
    CHECK(code_of(200, R"({"items": []})") == ErrorCode::protocol);
    try {
        run_collection(s, feed_spec("http://127.0.0.1:1/feed"), context());
        FAIL("expected unavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unavailable);
        CHECK(e.retryable());
    }
}

TEST_CASE("synthetic manifest and generator") {
    SyntheticManifest m;
    m.total = 1000;
    m.seed = 42;
    m.duplicate_fraction = 0.2;
    const auto corpus = generate_synthetic(m);
    REQUIRE(corpus.records.size() == 1000);
    CHECK(corpus.counts().at(Label::duplicate) == 200);
    CHECK(corpus.counts().at(Label::keep) == 800);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        ids.insert(corpus.records[i].record_id);
        CHECK(corpus.records[i].extras.at("label") == std::string(to_string(corpus.labels[i])));
        CHECK(validate_record(corpus.records[i]).empty());
    }
    CHECK(ids.size() == 1000);
    CHECK(corpus.records[0].record_id == "syn-000001");

    // Deterministic in the manifest.
    const auto again = generate_synthetic(m);
    for (std::size_t i = 0; i < 1000; ++i) {
        REQUIRE(to_json(again.records[i]) == to_json(corpus.records[i]));
    }
    m.seed = 43;
    CHECK(to_json(generate_synthetic(m).records[0]) != to_json(corpus.records[0]));

    SyntheticManifest clean;
    clean.total = 50;
    clean.seed = 1;
    const auto keep_only = generate_synthetic(clean);
    CHECK(keep_only.counts().at(Label::keep) == 50);
    CHECK(keep_only.counts().at(Label::duplicate) == 0);
    CHECK(keep_only.counts().at(Label::irrelevant) == 0);

    SyntheticManifest empty;
    CHECK(generate_synthetic(empty).records.empty());

    SyntheticManifest bad = m;
    bad.irrelevant_fraction = 0.9;
    CHECK_THROWS_AS(bad.label_counts(), Error);
    bad = m;
    bad.duplicate_fraction = -0.1;
    CHECK_THROWS_AS(bad.label_counts(), Error);
    CHECK_THROWS_AS(synthetic_manifest_from_json(Json::parse(R"({"total": 10, "seed": 1, "noise": 0.5})")), Error);
    CHECK(synthetic_manifest_from_json(to_json(m)).label_counts() == m.label_counts());

    const auto manifest = synthetic_manifest_from_json(Json::parse(kumpul::testing::read_file(fixture("reference_run_manifest.json"))));
    CHECK(manifest.total == 12847);
}

TEST_CASE("empty synthetic collection still yields a dataset") {
    TempDir dir;
    store::Datastore s(dir / "c.db");
    const auto spec = validate_collect_payload(Json::parse(
        R"({"connector_kind": "synthetic", "source_name": "syn", "source_category": "academic", "params": {"total": "0", "seed": "1"}})"));
    const auto result = run_collection(s, spec, context());
    CHECK(result.count == 0);
    CHECK(s.get_dataset(result.dataset_id).record_count == 0);
}

TEST_CASE("matching pipeline removes exactly the labeled records") {
    SyntheticManifest m;
    m.total = 600;
    m.seed = 11;
    m.duplicate_fraction = 0.2;
    m.non_target_language_fraction = 0.1;
    m.keyword_excluded_fraction = 0.05;
    m.irrelevant_fraction = 0.3;
    const auto corpus = generate_synthetic(m);
    const auto out = prep::apply_pipeline(corpus.records, matching_pipeline(), env());
    const auto counts = corpus.counts();
    CHECK(out.report.stages[0].removed == counts.at(Label::duplicate));
    CHECK(out.report.stages[2].removed == counts.at(Label::non_target_language));
    CHECK(out.report.stages[3].removed == counts.at(Label::keyword_excluded));
    CHECK(out.report.stages[4].removed == counts.at(Label::irrelevant));
    std::set<std::string> expected, kept;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        if (corpus.labels[i] == Label::keep) expected.insert(corpus.records[i].record_id);
    }
    for (const auto& r : out.records) kept.insert(r.record_id);
    CHECK(kept == expected);
}

TEST_CASE("pipeline output does not depend on the connector") {
    TempDir dir;
    store::Datastore s(dir / "c.db");
    SyntheticManifest m;
    m.total = 300;
    m.seed = 5;
    m.duplicate_fraction = 0.1;
    m.non_target_language_fraction = 0.1;
    m.keyword_excluded_fraction = 0.1;
    m.irrelevant_fraction = 0.2;

    Json payload = {{"connector_kind", "synthetic"},
                    {"source_name", "syn"},
                    {"source_category", "academic"},
                    {"params", {{"total", "300"}, {"seed", "5"}, {"duplicate_fraction", "0.1"},
                                {"non_target_language_fraction", "0.1"}, {"keyword_excluded_fraction", "0.1"},
                                {"irrelevant_fraction", "0.2"}}}};
    const auto synthetic = run_collection(s, validate_collect_payload(payload), context());

    const auto records = s.read_all_records(synthetic.dataset_id);
    std::ostringstream jsonl;
    write_jsonl(jsonl, records);
    write_file(dir / "export.jsonl", jsonl.str());
    std::ostringstream csv;
    write_csv(csv, records);
    write_file(dir / "export.csv", csv.str());
    const auto mapping = Json::parse(kumpul::testing::read_file(fixture("schema_mapping.json")));
    auto jsonl_spec = file_spec(dir / "export.jsonl", "jsonl", mapping);
    jsonl_spec.source_name = "syn";
    jsonl_spec.source_category = SourceCategory::academic;
    auto csv_spec = file_spec(dir / "export.csv", "csv", mapping);
    csv_spec.source_name = "syn";
    csv_spec.source_category = SourceCategory::academic;
    const auto from_jsonl = run_collection(s, jsonl_spec, context());
    const auto from_csv = run_collection(s, csv_spec, context());

    // The round trip through either format restores the records exactly.
    std::multiset<std::string> original, via_jsonl, via_csv;
    for (const auto& r : records) original.insert(to_json(r).dump());
    for (const auto& r : s.read_all_records(from_jsonl.dataset_id)) via_jsonl.insert(to_json(r).dump());
    for (const auto& r : s.read_all_records(from_csv.dataset_id)) via_csv.insert(to_json(r).dump());
    CHECK(via_jsonl == original);
    CHECK(via_csv == original);

    std::vector<std::set<std::string>> kept;
    std::vector<prep::StageReport> reports;
    for (const auto& id : {synthetic.dataset_id, from_jsonl.dataset_id, from_csv.dataset_id}) {
        prep::PreprocessRequest req;
        req.inputs = {id};
        req.config = matching_pipeline();
        const auto run = prep::run_pipeline(s, req, env());
        std::set<std::string> ids;
        for (const auto& r : s.read_all_records(run.dataset_id)) ids.insert(strip_prefix(r.record_id));
        kept.push_back(ids);
        reports.push_back(run.report);
    }
    CHECK(kept[0] == kept[1]);
    CHECK(kept[0] == kept[2]);
    CHECK(reports[0] == reports[1]);
    CHECK(reports[0] == reports[2]);
}

} // TEST_SUITE
