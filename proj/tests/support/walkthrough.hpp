#pragma once

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "support.hpp"

// The four-step workflow (sources, collect, preprocess, analyze) driven once
// through the HTTP API and once through the CLI binary, with payloads that
// are identical between the two.
namespace kumpul::testing {

inline std::filesystem::path walkthrough_input() {
    return std::filesystem::absolute(fixture("walkthrough.jsonl")).lexically_normal();
}

inline Json walkthrough_collect_payload() {
    return Json{{"connector_kind", "file"},
                {"source_name", "twitter"},
                {"source_category", "social_media"},
                {"params", {{"path", walkthrough_input().string()}, {"format", "jsonl"}}},
                {"mapping", Json::parse(read_file(fixture("walkthrough_mapping.json")))},
                {"name", "walkthrough"}};
}

inline Json walkthrough_pipeline() {
    return Json::parse(read_file(fixture("walkthrough_pipeline.json")));
}

inline const std::vector<std::string>& walkthrough_analyzers() {
    static const std::vector<std::string> ids = {"sentiment", "network", "terms"};
    return ids;
}

struct WalkthroughOutcome {
    bool ok = true;
    std::vector<std::string> failures;
    std::string raw_dataset;
    std::string clean_dataset;
    Json preprocess_result;

    void fail(std::string what) {
        ok = false;
        failures.push_back(std::move(what));
    }
};

/// Submits a job over HTTP and polls it to a terminal state. Returns the
/// result document, or null after recording a failure.
inline Json api_run_job(httplib::Client& client, const std::string& type, const Json& payload,
                        WalkthroughOutcome& out) {
    const Json body = {{"job_type", type}, {"payload", payload}};
    auto res = client.Post("/v1/jobs", body.dump(), "application/json");
    if (!res || res->status != 201) {
        out.fail(fmt::format("POST /v1/jobs ({}) -> {}", type, res ? std::to_string(res->status) : "no response"));
        return nullptr;
    }
    const auto job_id = Json::parse(res->body).at("job_id").get<std::string>();
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
    while (true) {
        auto job = client.Get("/v1/jobs/" + job_id);
        if (!job || job->status != 200) {
            out.fail(fmt::format("GET /v1/jobs/{} failed", job_id));
            return nullptr;
        }
        const auto status = Json::parse(job->body).at("status").get<std::string>();
        if (status == "completed") break;
        if (status == "failed" || status == "cancelled") {
            out.fail(fmt::format("job {} ended {}: {}", job_id, status, job->body));
            return nullptr;
        }
        if (std::chrono::steady_clock::now() > deadline) {
            out.fail(fmt::format("job {} did not finish", job_id));
            return nullptr;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    auto result = client.Get("/v1/jobs/" + job_id + "/result");
    if (!result || result->status != 200) {
        out.fail(fmt::format("GET /v1/jobs/{}/result failed", job_id));
        return nullptr;
    }
    return Json::parse(result->body);
}

inline WalkthroughOutcome api_walkthrough(httplib::Client& client) {
    WalkthroughOutcome out;
    auto expect_ok = [&](const std::string& path) {
        auto res = client.Get(path);
        if (!res || res->status / 100 != 2) {
            out.fail(fmt::format("GET {} -> {}", path, res ? std::to_string(res->status) : "no response"));
        }
    };
    expect_ok("/v1/sources");
    const Json collected = api_run_job(client, "collect", walkthrough_collect_payload(), out);
    if (collected.is_null()) return out;
    out.raw_dataset = collected.at("dataset_id").get<std::string>();

    const Json pre_payload = {{"inputs", {out.raw_dataset}}, {"config", walkthrough_pipeline()}, {"name", "walkthrough-clean"}};
    out.preprocess_result = api_run_job(client, "preprocess", pre_payload, out);
    if (out.preprocess_result.is_null()) return out;
    out.clean_dataset = out.preprocess_result.at("dataset_id").get<std::string>();

    for (const auto& analyzer : walkthrough_analyzers()) {
        api_run_job(client, "analyze", Json{{"dataset_id", out.clean_dataset}, {"analyzer", analyzer}}, out);
    }
    expect_ok("/v1/datasets");
    expect_ok("/v1/datasets/" + out.clean_dataset);
    expect_ok("/v1/datasets/" + out.clean_dataset + "/records");
    expect_ok("/v1/datasets/" + out.clean_dataset + "/lineage");
    expect_ok("/v1/jobs");
    return out;
}

inline WalkthroughOutcome cli_walkthrough(const std::string& cli, const std::filesystem::path& store_path) {
    WalkthroughOutcome out;
    const std::string base = fmt::format("{} --store {} --json", shell_quote(cli), shell_quote(store_path.string()));
    auto run = [&](const std::string& args) -> Json {
        const auto r = run_command(base + " " + args + " 2>/dev/null");
        if (r.exit_code != 0) {
            out.fail(fmt::format("kumpul {} -> exit {}", args, r.exit_code));
            return nullptr;
        }
        auto j = Json::parse(r.output, nullptr, false);
        if (j.is_discarded()) {
            out.fail(fmt::format("kumpul {} printed non-JSON output", args));
            return nullptr;
        }
        return j;
    };
    if (run("sources").is_null()) return out;
    const Json collected = run(fmt::format("collect --path {} --map {} --source twitter --name walkthrough",
                                           shell_quote(walkthrough_input().string()),
                                           shell_quote(fixture("walkthrough_mapping.json").string())));
    if (collected.is_null()) return out;
    out.raw_dataset = collected.at("result").at("dataset_id").get<std::string>();

    const Json pre = run(fmt::format("preprocess --inputs {} --config {} --name walkthrough-clean", out.raw_dataset,
                                     shell_quote(fixture("walkthrough_pipeline.json").string())));
    if (pre.is_null()) return out;
    out.preprocess_result = pre.at("result");
    out.clean_dataset = out.preprocess_result.at("dataset_id").get<std::string>();
    for (const auto& analyzer : walkthrough_analyzers()) {
        run(fmt::format("analyze --dataset {} --analyzer {}", out.clean_dataset, analyzer));
    }
    run("datasets list");
    run(fmt::format("datasets show {}", out.clean_dataset));
    run("jobs list");
    return out;
}

} // namespace kumpul::testing
