#include <doctest.h>

#include <atomic>
#include <thread>

#include "kumpul/core/error.hpp"
#include "kumpul/store/datastore.hpp"
#include "support.hpp"

using namespace kumpul;
using kumpul::testing::make_record;
using kumpul::testing::TempDir;

namespace {

Dataset raw_meta(const std::string& name) {
    Dataset d;
    d.name = name;
    d.kind = DatasetKind::raw;
    return d;
}

std::vector<Record> numbered(std::size_t n, const std::string& prefix = "r") {
    std::vector<Record> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(make_record(prefix + std::to_string(i), "teks nomor " + std::to_string(i)));
    }
    return out;
}

} // namespace

TEST_SUITE("datastore") {

TEST_CASE("create, find and list datasets") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto id = s.create_dataset(raw_meta("raw1"));
    CHECK(id == "ds-000001");
    CHECK(s.get_dataset(id).record_count == 0);
    CHECK(s.get_dataset(id).name == "raw1");

    auto dup = raw_meta("again");
    dup.dataset_id = id;
    CHECK_THROWS_AS(s.create_dataset(dup), Error);

    const auto listed = s.list_datasets(0, 100);
    CHECK(std::count_if(listed.begin(), listed.end(), [&](const Dataset& d) { return d.dataset_id == id; }) == 1);
    CHECK(s.count_datasets() == 1);
    CHECK_THROWS_AS(s.get_dataset("ds-404"), Error);
    try {
        s.get_dataset("ds-404");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::not_found);
    }
}

TEST_CASE("append_records") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto id = s.create_dataset(raw_meta("raw1"));
    CHECK(s.append_records(id, {}) == 0);
    CHECK(s.append_records(id, numbered(10)) == 10);
    CHECK(s.get_dataset(id).record_count == 10);

    SUBCASE("invalid record rejects the whole batch") {
        auto batch = numbered(3, "x");
        batch[1].text.clear();
        CHECK_THROWS_AS(s.append_records(id, batch), Error);
        CHECK(s.get_dataset(id).record_count == 10);
        CHECK(s.read_all_records(id).size() == 10);
    }
    SUBCASE("duplicate record id rejected") {
        CHECK_THROWS_AS(s.append_records(id, numbered(1)), Error);
        CHECK(s.get_dataset(id).record_count == 10);
    }
    SUBCASE("unknown dataset") {
        CHECK_THROWS_AS(s.append_records("ds-404", numbered(1)), Error);
    }
}

TEST_CASE("a fault mid-append leaves no partial records") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto id = s.create_dataset(raw_meta("raw1"));
    s.append_records(id, numbered(4, "old"));
    s.set_append_fault([](std::size_t i) {
        if (i == 5) throw std::runtime_error("injected crash");
    });
    CHECK_THROWS(s.append_records(id, numbered(10)));
    s.set_append_fault({});
    CHECK(s.get_dataset(id).record_count == 4);
    CHECK(s.read_all_records(id).size() == 4);
    // The store is still usable afterwards.
    CHECK(s.append_records(id, numbered(10)) == 14);
}

TEST_CASE("read_records paging") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto id = s.create_dataset(raw_meta("raw1"));
    const auto records = numbered(7);
    s.append_records(id, records);
    CHECK(s.read_records(id, 7, 10).empty());
    CHECK(s.read_records(id, 100, 10).empty());
    CHECK(s.read_records(id, 0, 0).empty());
    std::vector<Record> reassembled;
    for (std::size_t off = 0; off < 7; ++off) {
        const auto page = s.read_records(id, off, 1);
        REQUIRE(page.size() == 1);
        reassembled.push_back(page[0]);
    }
    CHECK(reassembled == records);
    CHECK(s.read_records(id, 2, 3) == std::vector<Record>(records.begin() + 2, records.begin() + 5));
    CHECK_THROWS_AS(s.read_records("ds-404", 0, 1), Error);
}

TEST_CASE("records survive reopening byte for byte") {
    TempDir dir;
    auto records = numbered(5);
    records[2].extras = {{"k", "v"}};
    records[3].location = Location{-6.2, 106.816666};
    records[4].published_at = kumpul::testing::ts("2022-09-03T08:15:00Z");
    std::string id;
    {
        store::Datastore s(dir / "s.db");
        id = s.commit_dataset(raw_meta("raw1"), records);
    }
    store::Datastore again(dir / "s.db", store::Mode::read_only);
    CHECK(again.read_all_records(id) == records);
    CHECK_THROWS_AS(again.create_dataset(raw_meta("nope")), Error);
}

TEST_CASE("lineage") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto a = s.commit_dataset(raw_meta("a"), numbered(2));
    const auto b = s.commit_dataset(raw_meta("b"), numbered(3));
    CHECK(s.get_lineage(a).size() == 1);

    Dataset merged;
    merged.name = "a+b";
    merged.kind = DatasetKind::merged;
    merged.parent_ids = {a, b};
    merged.created_by_job = "job-000001";
    const auto m = s.create_dataset(merged);

    Dataset pre;
    pre.name = "clean";
    pre.kind = DatasetKind::preprocessed;
    pre.parent_ids = {m};
    pre.created_by_job = "job-000001";
    const auto p = s.create_dataset(pre);

    const auto tree = s.get_lineage(p);
    CHECK(tree.size() == 4);
    CHECK(tree.dataset.dataset_id == p);
    REQUIRE(tree.parents.size() == 1);
    CHECK(tree.parents[0].dataset.dataset_id == m);
    CHECK(tree.parents[0].dataset.created_by_job == "job-000001");
    REQUIRE(tree.parents[0].parents.size() == 2);
    CHECK(tree.parents[0].parents[1].dataset.dataset_id == b);

    SUBCASE("a parent that does not exist yet cannot be referenced") {
        Dataset cyclic;
        cyclic.dataset_id = "ds-cycle";
        cyclic.name = "cycle";
        cyclic.kind = DatasetKind::preprocessed;
        cyclic.parent_ids = {"ds-cycle"};
        CHECK_THROWS_AS(s.create_dataset(cyclic), Error);
    }
    SUBCASE("shape rule enforced") {
        Dataset bad;
        bad.name = "bad";
        bad.kind = DatasetKind::merged;
        bad.parent_ids = {a};
        CHECK_THROWS_AS(s.create_dataset(bad), Error);
    }
}

TEST_CASE("resolve by name") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto a = s.commit_dataset(raw_meta("twitter"), numbered(1));
    CHECK(s.resolve_dataset("twitter").dataset_id == a);
    CHECK(s.resolve_dataset(a).dataset_id == a);
    s.commit_dataset(raw_meta("twitter"), numbered(1));
    CHECK_THROWS_AS(s.resolve_dataset("twitter"), Error);
    CHECK_THROWS_AS(s.resolve_dataset("nothing"), Error);
}

TEST_CASE("readers never observe a partial append") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto id = s.create_dataset(raw_meta("raw1"));
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        store::Datastore r(dir / "s.db", store::Mode::read_only);
        while (!done) {
            const auto n = r.read_all_records(id).size();
            if (n % 50 != 0) ++bad;
        }
    });
    for (int i = 0; i < 20; ++i) {
        s.append_records(id, numbered(50, "b" + std::to_string(i) + "-"));
    }
    done = true;
    reader.join();
    CHECK(bad == 0);
    CHECK(s.get_dataset(id).record_count == 1000);
}

TEST_CASE("results") {
    TempDir dir;
    store::Datastore s(dir / "s.db");
    const auto rid = s.put_result("job-000001", "analysis", Json{{"x", 1}});
    const auto found = s.find_result(rid);
    REQUIRE(found);
    CHECK(found->ref == rid);
    CHECK(found->body["x"] == 1);
    s.put_result("job-000002", "collection", Json{{"y", 2}}, std::string("ds-000001"));
    CHECK(s.find_result_for_job("job-000002", "ds-000001")->body["y"] == 2);
    CHECK_FALSE(s.find_result_for_job("job-000002", "ds-000009").has_value());
}

} // TEST_SUITE
