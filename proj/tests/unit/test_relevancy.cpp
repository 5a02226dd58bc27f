#include <doctest.h>

#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/text.hpp"
#include "kumpul/relevancy/relevancy.hpp"
#include "support.hpp"

using namespace kumpul;
using namespace kumpul::relevancy;
using kumpul::testing::make_record;

namespace {

// Minimal model server. `respond` turns a parsed request into the reply.
class MockServer {
public:
    using Responder = std::function<void(const RelevancyRequest&, httplib::Response&)>;

    explicit MockServer(Responder respond) : respond_(std::move(respond)) {
        server_.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
            const auto request = request_from_json(Json::parse(req.body));
            {
                std::lock_guard lock(mutex_);
                batch_sizes_.push_back(request.texts.size());
                first_texts_.push_back(request.texts.front());
            }
            respond_(request, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::vector<std::size_t> batch_sizes() {
        std::lock_guard lock(mutex_);
        return batch_sizes_;
    }

private:
    Responder respond_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mutex_;
    std::vector<std::size_t> batch_sizes_;
    std::vector<std::string> first_texts_;
};

void reply(httplib::Response& res, const Json& body) {
    res.set_content(body.dump(), "application/json");
}

// Echoes a score parsed from each text ("t<index>" -> index / 1000).
MockServer::Responder scoring_by_index() {
    return [](const RelevancyRequest& r, httplib::Response& res) {
        std::vector<RelevancyVerdict> v;
        for (const auto& t : r.texts) {
            const double score = std::stod(t.substr(1)) / 1000.0;
            v.push_back({score >= r.threshold, score, "mock"});
        }
        reply(res, verdicts_to_json("mock-v1", v));
    };
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::internal;
}

} // namespace

TEST_SUITE("relevancy") {

TEST_CASE("baseline_score examples") {
    CHECK(baseline_score("harga bbm naik", "harga bbm naik") == 1.0);
    CHECK(baseline_score("harga bbm", "resep rendang") == 0.0);
    CHECK(baseline_score("harga bbm naik", "bbm naik lagi") == doctest::Approx(0.5));
    CHECK(baseline_score("", "") == 0.0);
    CHECK(baseline_score("", "teks") == 0.0);
}

TEST_CASE("baseline_score is symmetric and ignores order and repetition") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> vocab = {"harga", "bbm", "naik", "subsidi", "pasar", "rakyat", "kebijakan",
                                            "ojek", "dampak", "hidup", "sehari", "hari"};
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(0, 8);
    auto random_tokens = [&] {
        std::vector<std::string> t;
        for (std::size_t i = len(rng); i > 0; --i) t.push_back(vocab[pick(rng)]);
        return t;
    };
    auto join = [](const std::vector<std::string>& t) {
        std::string s;
        for (const auto& x : t) s += x + " ";
        return s;
    };
    for (int i = 0; i < 500; ++i) {
        auto a = random_tokens();
        auto b = random_tokens();
        const double s = baseline_score(join(a), join(b));
        REQUIRE(s == baseline_score(join(b), join(a)));
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);
        auto shuffled = b;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (!b.empty()) shuffled.push_back(b.front());
        REQUIRE(s == baseline_score(join(a), join(shuffled)));
    }
}

TEST_CASE("baseline classify thresholds") {
    BaselineClassifier c;
    const RelevancyRequest all{"harga bbm naik", {"resep rendang", "bbm naik lagi", "harga bbm naik"}, 0.0};
    for (const auto& v : classify(all, c)) CHECK(v.relevant);

    auto exact = all;
    exact.threshold = 1.0;
    const auto v1 = classify(exact, c);
    CHECK(v1 == std::vector<RelevancyVerdict>{{false, 0.0, "baseline-jaccard"},
                                              {false, 0.5, "baseline-jaccard"},
                                              {true, 1.0, "baseline-jaccard"}});

    RelevancyRequest half{"harga bbm naik", {"bbm naik lagi"}, 0.4};
    CHECK(classify(half, c)[0].relevant);
    half.threshold = 0.6;
    CHECK_FALSE(classify(half, c)[0].relevant);

    CHECK(code_of([&] { classify({"", {"x"}, 0.1}, c); }) == ErrorCode::validation);
    CHECK(code_of([&] { classify({"ctx", {}, 0.1}, c); }) == ErrorCode::validation);
    CHECK(code_of([&] { classify({"ctx", {"x"}, 1.5}, c); }) == ErrorCode::validation);
}

TEST_CASE("raising the threshold never grows the kept set") {
    std::mt19937_64 rng(99);
    const std::vector<std::string> vocab = {"harga", "bbm", "naik", "subsidi", "pasar", "rakyat", "kebijakan",
                                            "ojek", "dampak", "kehidupan", "sehari", "hari", "rendang", "bola"};
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(1, 12);
    std::vector<Record> corpus;
    for (int i = 0; i < 300; ++i) {
        std::string text;
        for (std::size_t k = len(rng); k > 0; --k) text += vocab[pick(rng)] + " ";
        corpus.push_back(make_record("r" + std::to_string(i), text));
    }
    BaselineClassifier c;
    std::vector<std::string> previous;
    bool first = true;
    for (double threshold : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
        const auto kept =
            filter_relevancy(corpus, {"Kebijakan harga BBM dan dampaknya terhadap kehidupan sehari-hari",
                                      ClassifierKind::baseline, threshold, std::nullopt},
                             c);
        std::vector<std::string> ids;
        for (const auto& r : kept) ids.push_back(r.record_id);
        std::sort(ids.begin(), ids.end());
        if (!first) {
            CHECK(std::includes(previous.begin(), previous.end(), ids.begin(), ids.end()));
        }
        previous = ids;
        first = false;
    }
}

TEST_CASE("filter_relevancy edge cases") {
    BaselineClassifier c;
    RelevancyConfig cfg{"harga bbm", ClassifierKind::baseline, 0.1, std::nullopt};
    CHECK(filter_relevancy({}, cfg, c).empty());
    std::vector<Record> recs = {make_record("a", "harga bbm"), make_record("b", "rendang")};
    cfg.threshold = 0.0;
    CHECK(filter_relevancy(recs, cfg, c).size() == 2);
    cfg.context.clear();
    CHECK(code_of([&] { filter_relevancy(recs, cfg, c); }) == ErrorCode::validation);
}

TEST_CASE("remote classifier: batching and order") {
    MockServer server(scoring_by_index());
    RelevancyRequest req{"ctx", {}, 0.05};
    for (int i = 0; i < 130; ++i) req.texts.push_back("t" + std::to_string(i));
    const auto verdicts = classify_remote(server.endpoint(), req);
    REQUIRE(verdicts.size() == 130);
    for (int i = 0; i < 130; ++i) {
        CHECK(verdicts[i].score == doctest::Approx(i / 1000.0));
        CHECK(verdicts[i].relevant == (i >= 50));
        CHECK(verdicts[i].classifier_id == "mock-v1");
    }
    auto sizes = server.batch_sizes();
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{2, 64, 64});
}

TEST_CASE("remote classifier: all relevant echo") {
    MockServer server([](const RelevancyRequest& r, httplib::Response& res) {
        std::vector<RelevancyVerdict> v(r.texts.size(), {true, 1.0, "echo"});
        reply(res, verdicts_to_json("echo", v));
    });
    RemoteClassifier c(server.endpoint() + "/classify");
    const auto v = classify({"ctx", {"a", "b", "c"}, 0.5}, c);
    CHECK(std::all_of(v.begin(), v.end(), [](const auto& x) { return x.relevant; }));
    CHECK(c.id() == "echo");
}

TEST_CASE("remote classifier: schema violations are protocol errors") {
    SUBCASE("wrong length") {
        MockServer server([](const RelevancyRequest&, httplib::Response& res) {
            reply(res, verdicts_to_json("m", {{true, 1.0, "m"}}));
        });
        const auto code = code_of([&] { classify_remote(server.endpoint(), {"ctx", {"a", "b"}, 0.5}); });
        CHECK(code == ErrorCode::protocol);
        CHECK_FALSE(Error(code, "").retryable());
    }
    SUBCASE("verdict contradicts threshold") {
        MockServer server([](const RelevancyRequest&, httplib::Response& res) {
            reply(res, Json{{"classifier_id", "m"}, {"verdicts", {{{"relevant", true}, {"score", 0.2}}}}});
        });
        CHECK(code_of([&] { classify_remote(server.endpoint(), {"ctx", {"a"}, 0.5}); }) == ErrorCode::protocol);
    }
    SUBCASE("not JSON") {
        MockServer server([](const RelevancyRequest&, httplib::Response& res) { res.set_content("<html>", "text/html"); });
        CHECK(code_of([&] { classify_remote(server.endpoint(), {"ctx", {"a"}, 0.5}); }) == ErrorCode::protocol);
    }
    SUBCASE("score out of range") {
        MockServer server([](const RelevancyRequest&, httplib::Response& res) {
            reply(res, Json{{"classifier_id", "m"}, {"verdicts", {{{"relevant", true}, {"score", 1.5}}}}});
        });
        CHECK(code_of([&] { classify_remote(server.endpoint(), {"ctx", {"a"}, 0.5}); }) == ErrorCode::protocol);
    }
}

TEST_CASE("remote classifier: transport failures are retryable") {
    SUBCASE("server error") {
        MockServer server([](const RelevancyRequest&, httplib::Response& res) { res.status = 500; });
        const auto code = code_of([&] { classify_remote(server.endpoint(), {"ctx", {"a"}, 0.5}); });
        CHECK(code == ErrorCode::unavailable);
        CHECK(Error(code, "").retryable());
    }
    SUBCASE("nobody listening") {
        int port = 0;
        {
            httplib::Server probe;
            port = probe.bind_to_any_port("127.0.0.1");
        }
        RemoteOptions opts;
        opts.timeout = std::chrono::milliseconds(500);
        CHECK(code_of([&] {
                  classify_remote("http://127.0.0.1:" + std::to_string(port), {"ctx", {"a"}, 0.5}, opts);
              }) == ErrorCode::unavailable);
    }
    SUBCASE("timeout") {
        MockServer server([](const RelevancyRequest& r, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(800));
            reply(res, verdicts_to_json("m", std::vector<RelevancyVerdict>(r.texts.size(), {true, 1.0, "m"})));
        });
        RemoteOptions opts;
        opts.timeout = std::chrono::milliseconds(200);
        CHECK(code_of([&] { classify_remote(server.endpoint(), {"ctx", {"a"}, 0.5}, opts); }) ==
              ErrorCode::unavailable);
    }
}

TEST_CASE("remote and baseline are interchangeable behind the interface") {
    // A remote server that runs the baseline yields the same filter output.
    MockServer server([](const RelevancyRequest& r, httplib::Response& res) {
        BaselineClassifier b;
        reply(res, verdicts_to_json("baseline-over-http", b.classify(r)));
    });
    std::vector<Record> recs;
    for (const char* t : {"harga bbm naik", "rendang enak", "bbm langka di pasar", "kebijakan harga", "bola"}) {
        recs.push_back(make_record(t, t));
    }
    RelevancyConfig cfg{"kebijakan harga bbm", ClassifierKind::remote, 0.2, server.endpoint()};
    auto remote = make_classifier(cfg);
    BaselineClassifier local;
    CHECK(filter_relevancy(recs, cfg, *remote) == filter_relevancy(recs, cfg, local));
}

TEST_CASE("wire format") {
    const RelevancyRequest r{"ctx", {"a", "b"}, 0.25};
    CHECK(request_to_json(r).dump() == R"({"context":"ctx","texts":["a","b"],"threshold":0.25})");
    const auto back = request_from_json(request_to_json(r));
    CHECK(back.context == r.context);
    CHECK(back.texts == r.texts);
    CHECK(back.threshold == r.threshold);
    CHECK(verdicts_to_json("m", {{true, 0.5, "m"}}).dump() ==
          R"({"classifier_id":"m","verdicts":[{"relevant":true,"score":0.5}]})");
    CHECK_THROWS_AS(RemoteClassifier("not a url"), Error);
}

} // TEST_SUITE
