#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kumpul/analysis/analysis.hpp"
#include "kumpul/api/server.hpp"
#include "kumpul/app/platform.hpp"
#include "kumpul/collect/connector.hpp"
#include "kumpul/collect/synthetic.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/core/serialize.hpp"
#include "kumpul/langid/langid.hpp"
#include "kumpul/prep/pipeline.hpp"
#include "kumpul/prep/stage_report.hpp"

namespace fs = std::filesystem;
using namespace kumpul;

namespace {

enum Exit : int {
    exit_ok = 0,
    exit_validation = 1,
    exit_not_found = 2,
    exit_job_failed = 3,
    exit_timeout = 4,
    exit_other = 5,
};

struct Globals {
    std::string store;
    std::string config_path;
    bool json = false;
    bool no_wait = false;
    double wait_secs = 600;
    bool no_local_worker = false;
    std::string log_level = "warn";
};

/// Values from the JSON config file; command-line flags win over them.
struct FileConfig {
    Json doc = Json::object();

    std::optional<std::string> str(const char* key) const {
        if (doc.contains(key) && doc[key].is_string()) return doc[key].get<std::string>();
        return std::nullopt;
    }
    std::optional<double> num(const char* key) const {
        if (doc.contains(key) && doc[key].is_number()) return doc[key].get<double>();
        return std::nullopt;
    }
};

Json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw_validation(what, "cannot read " + path);
    }
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw_validation(what, path + " is not valid JSON");
    }
    return j;
}

/// Accepts either inline JSON or a path to a JSON file.
Json json_arg(const std::string& value, const char* what) {
    const auto first = value.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (value[first] == '{' || value[first] == '[')) {
        Json j = Json::parse(value, nullptr, false);
        if (j.is_discarded()) throw_validation(what, "is not valid JSON");
        return j;
    }
    return read_json_file(value, what);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::string absolute(const std::string& p) {
    return fs::absolute(p).lexically_normal().string();
}

class Cli {
public:
    Globals g;
    FileConfig file;

    void load_config() {
        if (g.config_path.empty()) {
            if (const char* env = std::getenv("KUMPUL_CONFIG"); env != nullptr && *env != '\0') {
                g.config_path = env;
            }
        }
        if (!g.config_path.empty()) {
            file.doc = read_json_file(g.config_path, "config");
            if (!file.doc.is_object()) throw_validation("config", "must be a JSON object");
        }
        if (g.store.empty()) {
            if (const char* env = std::getenv("KUMPUL_STORE"); env != nullptr && *env != '\0') {
                g.store = env;
            } else {
                g.store = file.str("store").value_or("kumpul.db");
            }
        }
        auto level = spdlog::level::from_str(g.log_level);
        auto logger = spdlog::stderr_color_mt("kumpul");
        spdlog::set_default_logger(logger);
        spdlog::set_level(level);
    }

    app::Platform& platform() {
        if (!platform_) {
            app::PlatformOptions opts;
            opts.store_path = g.store;
            opts.coordinator = coord::CoordinatorConfig::from_env();
            if (auto p = file.str("profiles_dir")) opts.profiles_dir = *p;
            platform_ = std::make_unique<app::Platform>(std::move(opts));
        }
        return *platform_;
    }

    std::chrono::milliseconds poll_interval() const {
        return std::chrono::milliseconds(static_cast<long>(file.num("poll_ms").value_or(500)));
    }

    /// Submits and, unless --no-wait, runs the job to a terminal state.
    /// Returns the finished job; exits on failure or timeout.
    std::optional<coord::Job> submit_and_wait(coord::JobType type, const Json& payload) {
        auto& p = platform();
        const auto id = p.coordinator().submit_job(type, payload);
        if (g.no_wait) {
            if (g.json) {
                std::cout << Json{{"job_id", id}, {"status", "pending"}}.dump(2) << "\n";
            } else {
                std::cout << "submitted " << id << "\n";
            }
            return std::nullopt;
        }
        std::unique_ptr<app::WorkerPool> pool;
        if (!g.no_local_worker) {
            coord::WorkerOptions wo;
            wo.poll_interval = std::chrono::milliseconds(50);
            pool = std::make_unique<app::WorkerPool>(p, 1, std::set<coord::JobType>{type}, wo);
        }
        const auto timeout = std::chrono::milliseconds(static_cast<long>(g.wait_secs * 1000));
        auto job = p.wait_for_job(id, timeout, std::min(poll_interval(), pool ? std::chrono::milliseconds(100)
                                                                               : poll_interval()));
        if (!job) {
            std::cerr << fmt::format("timed out after {}s waiting for {}\n", g.wait_secs, id);
            std::cout.flush();
            std::cerr.flush();
            // The lease lapses and another worker picks the job up.
            std::_Exit(exit_timeout);
        }
        pool.reset();
        if (job->status != coord::JobStatus::completed) {
            if (g.json) {
                std::cout << coord::to_json(*job).dump(2) << "\n";
            }
            std::cerr << fmt::format("job {} {}: {}\n", id, coord::to_string(job->status),
                                     job->error.value_or("no error recorded"));
            throw JobFailed{};
        }
        return job;
    }

    struct JobFailed {};

private:
    std::unique_ptr<app::Platform> platform_;
};

void print_summary(const Json& summary, const std::string& indent = "  ") {
    for (const auto& [key, value] : summary.items()) {
        if (value.is_object() || value.is_array()) {
            std::cout << indent << key << ": " << value.dump() << "\n";
        } else if (value.is_string()) {
            std::cout << indent << key << ": " << value.get<std::string>() << "\n";
        } else {
            std::cout << indent << key << ": " << value.dump() << "\n";
        }
    }
}

void print_job_line(const coord::Job& j) {
    std::cout << fmt::format("{:<12} {:<10} {:<9} attempts={} {}\n", j.job_id, coord::to_string(j.job_type),
                             coord::to_string(j.status), j.attempts, j.result_ref.value_or(""));
}

void print_dataset_line(const Dataset& d) {
    std::string parents;
    for (const auto& p : d.parent_ids) parents += (parents.empty() ? "" : ",") + p;
    std::cout << fmt::format("{:<10} {:<13} {:>8}  {}{}\n", d.dataset_id, to_string(d.kind), d.record_count, d.name,
                             parents.empty() ? "" : " <- " + parents);
}

void print_lineage(const store::LineageNode& node, int depth) {
    std::cout << std::string(static_cast<std::size_t>(depth) * 2, ' ');
    print_dataset_line(node.dataset);
    for (const auto& p : node.parents) print_lineage(p, depth + 1);
}

Json lineage_to_json(const store::LineageNode& node) {
    Json parents = Json::array();
    for (const auto& p : node.parents) parents.push_back(lineage_to_json(p));
    return Json{{"dataset", to_json(node.dataset)}, {"parents", parents}};
}

// Blocks SIGINT/SIGTERM in every thread and returns once one arrives.
class SignalWaiter {
public:
    SignalWaiter() {
        sigemptyset(&set_);
        sigaddset(&set_, SIGINT);
        sigaddset(&set_, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    }
    int wait() {
        int sig = 0;
        sigwait(&set_, &sig);
        return sig;
    }

private:
    sigset_t set_{};
};

int run(int argc, char** argv) {
    Cli cli;
    CLI::App app{"kumpul: collect, preprocess and analyse social media text"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "kumpul 0.1.0");
    app.add_option("--store", cli.g.store, "SQLite store path (env KUMPUL_STORE, default ./kumpul.db)");
    app.add_option("--config", cli.g.config_path, "JSON config file (env KUMPUL_CONFIG)");
    app.add_flag("--json", cli.g.json, "machine-readable output");
    app.add_flag("--no-wait", cli.g.no_wait, "submit the job and return at once");
    app.add_option("--wait-secs", cli.g.wait_secs, "give up waiting after this many seconds")->check(CLI::PositiveNumber);
    app.add_flag("--no-local-worker", cli.g.no_local_worker, "wait for external workers instead of running the job here");
    app.add_option("--log-level", cli.g.log_level, "trace|debug|info|warn|error|off");

    // Actions run after parsing so the config file and store are in place.
    std::vector<std::pair<CLI::App*, std::function<void()>>> actions;
    auto on = [&](CLI::App* sub, std::function<void()> fn) { actions.emplace_back(sub, std::move(fn)); };

    // serve -------------------------------------------------------------------
    auto* serve = app.add_subcommand("serve", "run the HTTP API and a worker pool");
    int port = -1;
    std::string bind;
    std::size_t workers = 4;
    std::string static_dir;
    serve->add_option("--port", port, "listen port (env KUMPUL_PORT, default 8080)");
    serve->add_option("--bind", bind, "bind address (env KUMPUL_BIND)");
    serve->add_option("--workers", workers, "in-process workers")->check(CLI::NonNegativeNumber);
    serve->add_option("--static-dir", static_dir, "web client assets (env KUMPUL_STATIC_DIR)");
    on(serve, [&] {
        SignalWaiter signals;
        auto& p = cli.platform();
        api::ApiConfig config;
        if (auto v = cli.file.num("port")) config.port = static_cast<int>(*v);
        if (auto v = cli.file.str("bind")) config.bind_address = *v;
        if (auto v = cli.file.str("static_dir")) config.static_dir = *v;
        if (auto v = cli.file.str("api_token")) config.auth_token = *v;
        config.apply_env();
        if (port >= 0) config.port = port;
        if (!bind.empty()) config.bind_address = bind;
        if (!static_dir.empty()) config.static_dir = static_dir;
        api::ApiServer server(p, config);
        const int bound = server.start();
        app::WorkerPool pool(p, workers, app::all_job_types());
        spdlog::info("serving on {}:{} with {} workers", config.bind_address, bound, workers);
        std::cerr << fmt::format("kumpul listening on http://{}:{}/v1\n", config.bind_address, bound);
        signals.wait();
        std::cerr << "shutting down\n";
        server.stop();
        pool.stop();
    });

    // worker ------------------------------------------------------------------
    auto* worker = app.add_subcommand("worker", "run standalone workers against the shared store");
    std::string caps = "collect,preprocess,analyze";
    std::size_t worker_count = 1;
    worker->add_option("--capabilities", caps, "comma-separated job types");
    worker->add_option("--count", worker_count, "worker threads")->check(CLI::PositiveNumber);
    on(worker, [&] {
        SignalWaiter signals;
        auto& p = cli.platform();
        coord::WorkerOptions wo;
        wo.poll_interval = cli.poll_interval();
        app::WorkerPool pool(p, worker_count, app::parse_capabilities(caps), wo);
        std::cerr << fmt::format("{} worker(s) polling {}\n", worker_count, cli.g.store);
        signals.wait();
        std::cerr << "finishing in-flight jobs\n";
        pool.stop();
    });

    // collect -----------------------------------------------------------------
    auto* collect = app.add_subcommand("collect", "collect a raw dataset through a connector");
    std::string c_kind = "file", c_path, c_format, c_map, c_name, c_source, c_category = "social_media", c_spec,
                c_keywords, c_from, c_to;
    std::vector<std::string> c_params;
    collect->add_option("--kind", c_kind, "connector kind (file, http_feed, synthetic, ...)");
    collect->add_option("--path", c_path, "input file for the file connector");
    collect->add_option("--format", c_format, "jsonl or csv (default: from the file extension)");
    collect->add_option("--map", c_map, "field mapping JSON file or inline JSON");
    collect->add_option("--name", c_name, "dataset name");
    collect->add_option("--source", c_source, "source name (default: the connector kind)");
    collect->add_option("--category", c_category, "social_media|news|ecommerce_review|academic");
    collect->add_option("--param", c_params, "connector parameter key=value (repeatable)");
    collect->add_option("--spec", c_spec, "full collect payload JSON; other flags override it");
    collect->add_option("--keywords", c_keywords, "comma-separated keywords to keep");
    collect->add_option("--from", c_from, "keep items published at or after this RFC 3339 time");
    collect->add_option("--to", c_to, "keep items published at or before this RFC 3339 time");
    on(collect, [&] {
        Json payload = c_spec.empty() ? Json::object() : json_arg(c_spec, "spec");
        if (!payload.is_object()) throw_validation("spec", "must be a JSON object");
        if (!c_spec.empty() && !payload.contains("connector_kind")) payload["connector_kind"] = c_kind;
        if (c_spec.empty() || collect->count("--kind") > 0) payload["connector_kind"] = c_kind;
        const std::string kind = payload["connector_kind"].is_string() ? payload["connector_kind"].get<std::string>() : c_kind;
        if (!c_source.empty() || !payload.contains("source_name")) payload["source_name"] = c_source.empty() ? kind : c_source;
        if (collect->count("--category") > 0 || !payload.contains("source_category")) payload["source_category"] = c_category;
        Json params = payload.contains("params") ? payload["params"] : Json::object();
        if (!c_path.empty()) {
            params["path"] = absolute(c_path);
            if (c_format.empty()) {
                const auto ext = fs::path(c_path).extension().string();
                if (ext == ".csv") c_format = "csv";
                else if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") c_format = "jsonl";
            }
        }
        if (!c_format.empty()) params["format"] = c_format;
        for (const auto& kv : c_params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw_validation("param", "expected key=value, got '" + kv + "'");
            std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
            if (key == "path" || key == "manifest_path") value = absolute(value);
            params[key] = value;
        }
        payload["params"] = params;
        if (!c_map.empty()) payload["mapping"] = json_arg(c_map, "map");
        if (!c_keywords.empty()) payload["keywords"] = split_csv(c_keywords);
        if (!c_from.empty() || !c_to.empty()) {
            payload["date_range"] = {{"start", c_from}, {"end", c_to}};
        }
        if (!c_name.empty()) payload["name"] = c_name;

        auto job = cli.submit_and_wait(coord::JobType::collect, payload);
        if (!job) return;
        const Json result = cli.platform().job_result(job->job_id);
        if (cli.g.json) {
            std::cout << Json{{"job_id", job->job_id}, {"result", result}}.dump(2) << "\n";
            return;
        }
        const auto ds = cli.platform().store().get_dataset(*job->result_ref);
        std::cout << fmt::format("dataset {} ({}): {} records", ds.dataset_id, ds.name, ds.record_count);
        std::cout << fmt::format(", {} skipped, {} filtered\n", result.value("skipped", 0), result.value("filtered", 0));
        if (result.contains("skipped_items")) {
            for (const auto& s : result["skipped_items"]) {
                std::cout << fmt::format("  skipped {}: {}\n", s.value("ref", ""), s.value("reason", ""));
            }
        }
    });

    // preprocess --------------------------------------------------------------
    auto* preprocess = app.add_subcommand("preprocess", "run the filter pipeline over one or more datasets");
    std::string p_inputs, p_config, p_name;
    preprocess->add_option("--inputs", p_inputs, "comma-separated dataset ids or names")->required();
    preprocess->add_option("--config", p_config, "pipeline config JSON file or inline JSON")->required();
    preprocess->add_option("--name", p_name, "name of the preprocessed dataset");
    on(preprocess, [&] {
        Json payload = {{"inputs", split_csv(p_inputs)}, {"config", json_arg(p_config, "config")}};
        if (!p_name.empty()) payload["name"] = p_name;
        auto job = cli.submit_and_wait(coord::JobType::preprocess, payload);
        if (!job) return;
        const Json result = cli.platform().job_result(job->job_id);
        if (cli.g.json) {
            std::cout << Json{{"job_id", job->job_id}, {"result", result}}.dump(2) << "\n";
            return;
        }
        std::cout << prep::render_stage_table(prep::stage_report_from_json(result));
        std::cout << fmt::format("\ndataset {}\n", result.value("dataset_id", ""));
    });

    // analyze -----------------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "run an analyzer over a dataset");
    std::string a_dataset, a_analyzer, a_params, a_column;
    analyze->add_option("--dataset", a_dataset, "dataset id or name")->required();
    analyze->add_option("--analyzer", a_analyzer, "sentiment|trend|network|terms|...")->required();
    analyze->add_option("--params", a_params, "analyzer params JSON file or inline JSON");
    analyze->add_option("--text-column", a_column, "text|title|title+text|extras.<key>");
    on(analyze, [&] {
        Json payload = {{"dataset_id", a_dataset}, {"analyzer", a_analyzer}};
        if (!a_column.empty()) payload["text_column"] = a_column;
        if (!a_params.empty()) payload["params"] = json_arg(a_params, "params");
        auto job = cli.submit_and_wait(coord::JobType::analyze, payload);
        if (!job) return;
        const Json result = cli.platform().job_result(job->job_id);
        if (cli.g.json) {
            std::cout << Json{{"job_id", job->job_id}, {"result", result}}.dump(2) << "\n";
            return;
        }
        std::cout << fmt::format("{} on {} ({})\n", result.value("analyzer_id", a_analyzer),
                                 result.value("dataset_id", a_dataset), *job->result_ref);
        print_summary(result.value("summary", Json::object()));
    });

    // jobs --------------------------------------------------------------------
    auto* jobs = app.add_subcommand("jobs", "inspect and cancel jobs");
    jobs->require_subcommand(1);
    auto* jobs_list = jobs->add_subcommand("list", "list jobs, newest last");
    std::string j_status, j_type, j_id;
    std::size_t j_offset = 0, j_limit = 50;
    jobs_list->add_option("--status", j_status, "pending|running|completed|failed|cancelled");
    jobs_list->add_option("--type", j_type, "collect|preprocess|analyze");
    jobs_list->add_option("--offset", j_offset);
    jobs_list->add_option("--limit", j_limit);
    on(jobs_list, [&] {
        store::JobFilter f;
        if (!j_status.empty()) {
            f.status = coord::parse_job_status(j_status);
            if (!f.status) throw_validation("status", "unknown job status");
        }
        if (!j_type.empty()) {
            f.type = coord::parse_job_type(j_type);
            if (!f.type) throw_validation("type", "unknown job type");
        }
        auto& s = cli.platform().store();
        const auto list = s.list_jobs(f, j_offset, j_limit);
        if (cli.g.json) {
            Json out = Json::array();
            for (const auto& j : list) out.push_back(coord::to_json(j));
            std::cout << Json{{"total", s.count_jobs(f)}, {"jobs", out}}.dump(2) << "\n";
            return;
        }
        for (const auto& j : list) print_job_line(j);
        std::cout << fmt::format("{} of {} jobs\n", list.size(), s.count_jobs(f));
    });
    auto* jobs_show = jobs->add_subcommand("show", "show one job");
    jobs_show->add_option("id", j_id)->required();
    on(jobs_show, [&] {
        const auto job = cli.platform().coordinator().get_job(j_id);
        if (cli.g.json) {
            std::cout << coord::to_json(job).dump(2) << "\n";
            return;
        }
        print_summary(coord::to_json(job), "");
    });
    auto* jobs_cancel = jobs->add_subcommand("cancel", "cancel a pending job");
    jobs_cancel->add_option("id", j_id)->required();
    on(jobs_cancel, [&] {
        const auto job = cli.platform().coordinator().cancel_job(j_id);
        if (cli.g.json) {
            std::cout << coord::to_json(job).dump(2) << "\n";
        } else {
            std::cout << fmt::format("{} {}\n", job.job_id, coord::to_string(job.status));
        }
    });
    auto* jobs_result = jobs->add_subcommand("result", "print a completed job's result document");
    jobs_result->add_option("id", j_id)->required();
    on(jobs_result, [&] {
        const Json result = cli.platform().job_result(j_id);
        const auto job = cli.platform().coordinator().get_job(j_id);
        if (!cli.g.json && job.job_type == coord::JobType::preprocess) {
            std::cout << prep::render_stage_table(prep::stage_report_from_json(result));
            return;
        }
        std::cout << result.dump(2) << "\n";
    });

    // datasets ----------------------------------------------------------------
    auto* datasets = app.add_subcommand("datasets", "list datasets and their lineage");
    datasets->require_subcommand(1);
    std::string d_id;
    std::size_t d_offset = 0, d_limit = 100;
    auto* ds_list = datasets->add_subcommand("list", "list datasets");
    ds_list->add_option("--offset", d_offset);
    ds_list->add_option("--limit", d_limit);
    on(ds_list, [&] {
        auto& s = cli.platform().store();
        const auto list = s.list_datasets(d_offset, d_limit);
        if (cli.g.json) {
            Json out = Json::array();
            for (const auto& d : list) out.push_back(to_json(d));
            std::cout << Json{{"total", s.count_datasets()}, {"datasets", out}}.dump(2) << "\n";
            return;
        }
        for (const auto& d : list) print_dataset_line(d);
    });
    auto* ds_show = datasets->add_subcommand("show", "show a dataset and its lineage");
    ds_show->add_option("id", d_id, "dataset id or name")->required();
    on(ds_show, [&] {
        auto& s = cli.platform().store();
        const auto d = s.resolve_dataset(d_id);
        const auto lineage = s.get_lineage(d.dataset_id);
        if (cli.g.json) {
            std::cout << lineage_to_json(lineage).dump(2) << "\n";
            return;
        }
        print_lineage(lineage, 0);
    });

    // export ------------------------------------------------------------------
    auto* exp = app.add_subcommand("export", "write a dataset as JSON Lines or CSV");
    std::string e_dataset, e_format = "jsonl", e_out;
    exp->add_option("--dataset", e_dataset, "dataset id or name")->required();
    exp->add_option("--format", e_format, "jsonl|csv")->check(CLI::IsMember({"jsonl", "csv"}));
    exp->add_option("--out", e_out, "output file (default stdout)");
    on(exp, [&] {
        auto& s = cli.platform().store();
        const auto d = s.resolve_dataset(e_dataset);
        const auto records = s.read_all_records(d.dataset_id);
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!e_out.empty()) {
            file.open(e_out, std::ios::binary);
            if (!file) throw_validation("out", "cannot write " + e_out);
            out = &file;
        }
        if (e_format == "csv") {
            write_csv(*out, records);
        } else {
            write_jsonl(*out, records);
        }
        if (!e_out.empty()) {
            if (cli.g.json) {
                std::cout << Json{{"dataset_id", d.dataset_id}, {"records", records.size()}, {"out", e_out}}.dump(2)
                          << "\n";
            } else {
                std::cerr << fmt::format("wrote {} records to {}\n", records.size(), e_out);
            }
        }
    });

    // sources -----------------------------------------------------------------
    auto* sources = app.add_subcommand("sources", "list connectors and analyzers");
    on(sources, [&] {
        const Json catalog = cli.platform().sources_catalog();
        if (cli.g.json) {
            std::cout << catalog.dump(2) << "\n";
            return;
        }
        for (const char* section : {"connectors", "analyzers"}) {
            std::cout << section << ":\n";
            for (const auto& c : catalog[section]) {
                std::cout << fmt::format("  {:<12} {}\n", c.value("kind", c.value("id", "")),
                                         c.value("description", ""));
            }
        }
    });

    // report ------------------------------------------------------------------
    auto* report = app.add_subcommand("report", "render a stage report table");
    std::string r_counts, r_file, r_stages;
    report->add_option("--counts", r_counts, "raw count followed by each stage's output count");
    report->add_option("--stages", r_stages, "comma-separated stage names for --counts");
    report->add_option("--file", r_file, "stage report JSON file");
    on(report, [&] {
        prep::StageReport rep;
        if (!r_counts.empty()) {
            std::vector<std::size_t> counts;
            for (const auto& c : split_csv(r_counts)) {
                try {
                    std::size_t used = 0;
                    counts.push_back(std::stoull(c, &used));
                    if (used != c.size()) throw std::invalid_argument(c);
                } catch (const std::exception&) {
                    throw_validation("counts", "'" + c + "' is not a count");
                }
            }
            std::vector<std::string> names = split_csv(r_stages);
            if (names.empty() && counts.size() == prep::kStageOrder.size() + 1) {
                names = prep::kStageOrder;
            } else if (names.empty() && counts.size() == 5) {
                // Date filtering is the stage most often left off.
                names = {"dedup", "language", "keyword", "relevancy"};
            }
            rep = prep::compute_stage_report(counts, names);
        } else if (!r_file.empty()) {
            rep = prep::stage_report_from_json(read_json_file(r_file, "file"));
        } else {
            throw_validation("report", "give --counts or --file");
        }
        if (cli.g.json) {
            std::cout << prep::to_json(rep).dump(2) << "\n";
        } else {
            std::cout << prep::render_stage_table(rep);
        }
    });

    // synth -------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "write a labelled synthetic corpus as JSON Lines");
    std::string s_manifest, s_out;
    collect::SyntheticManifest manifest;
    synth->add_option("--manifest", s_manifest, "manifest JSON file");
    synth->add_option("--total", manifest.total);
    synth->add_option("--seed", manifest.seed);
    synth->add_option("--duplicate", manifest.duplicate_fraction);
    synth->add_option("--non-target-language", manifest.non_target_language_fraction);
    synth->add_option("--keyword-excluded", manifest.keyword_excluded_fraction);
    synth->add_option("--irrelevant", manifest.irrelevant_fraction);
    synth->add_option("--out", s_out, "output file (default stdout)");
    on(synth, [&] {
        if (!s_manifest.empty()) manifest = collect::synthetic_manifest_from_json(read_json_file(s_manifest, "manifest"));
        const auto corpus = collect::generate_synthetic(manifest);
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!s_out.empty()) {
            file.open(s_out, std::ios::binary);
            if (!file) throw_validation("out", "cannot write " + s_out);
            out = &file;
        }
        write_jsonl(*out, corpus.records);
        if (!s_out.empty() && cli.g.json) {
            Json counts = Json::object();
            for (const auto& [label, n] : corpus.counts()) counts[std::string(collect::to_string(label))] = n;
            std::cout << Json{{"records", corpus.records.size()}, {"out", s_out}, {"counts", counts}}.dump(2) << "\n";
        } else if (!s_out.empty()) {
            const auto counts = corpus.counts();
            std::cerr << fmt::format("wrote {} records to {}\n", corpus.records.size(), s_out);
            for (const auto& [label, n] : counts) {
                std::cerr << fmt::format("  {:<20} {}\n", collect::to_string(label), n);
            }
        }
    });

    // profile -----------------------------------------------------------------
    auto* profile = app.add_subcommand("profile", "language profile maintenance");
    profile->require_subcommand(1);
    auto* profile_build = profile->add_subcommand("build", "rebuild n-gram profiles from the seed corpora");
    std::string pb_seeds, pb_out;
    profile_build->add_option("--seeds", pb_seeds, "seed directory (default <data>/seeds)");
    profile_build->add_option("--out", pb_out, "output directory (default <data>/profiles)");
    on(profile_build, [&] {
        const fs::path seeds = pb_seeds.empty() ? data_dir() / "seeds" : fs::path(pb_seeds);
        const fs::path out = pb_out.empty() ? data_dir() / "profiles" : fs::path(pb_out);
        const auto built = langid::build_profiles_from_seeds(seeds, out);
        for (const auto& [lang, n] : built) {
            if (!cli.g.json) std::cout << fmt::format("{}: {} training sentences\n", lang, n);
        }
        if (cli.g.json) std::cout << Json(built).dump(2) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return exit_validation;
    }
    cli.load_config();
    for (auto& [sub, fn] : actions) {
        if (sub->parsed()) {
            fn();
        }
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Cli::JobFailed&) {
        return exit_job_failed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& f : e.field_errors()) {
            std::cerr << "  " << f.field << ": " << f.message << "\n";
        }
        switch (e.code()) {
        case ErrorCode::validation: return exit_validation;
        case ErrorCode::not_found: return exit_not_found;
        case ErrorCode::conflict: return exit_validation;
        default: return exit_other;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_other;
    }
}
