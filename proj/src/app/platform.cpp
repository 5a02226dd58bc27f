#include "kumpul/app/platform.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kumpul/analysis/analysis.hpp"
#include "kumpul/collect/connector.hpp"
#include "kumpul/core/error.hpp"
#include "kumpul/core/paths.hpp"
#include "kumpul/prep/pipeline.hpp"

namespace kumpul::app {

namespace {

/// Submit-time reference checks report unknown datasets as payload errors.
void require_dataset(const store::Datastore& store, const std::string& ref, const std::string& field) {
    try {
        store.resolve_dataset(ref);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::not_found) {
            throw_validation(field, fmt::format("unknown dataset '{}'", ref));
        }
        throw;
    }
}

} // namespace

Platform::Platform(PlatformOptions options) : options_(std::move(options)) {
    clock_ = options_.clock ? options_.clock : std::make_shared<coord::SystemClock>();
    if (options_.profiles_dir.empty()) {
        options_.profiles_dir = data_dir() / "profiles";
    }
    store_ = std::make_unique<store::Datastore>(options_.store_path);
    coordinator_ = std::make_unique<coord::Coordinator>(
        *store_, *clock_, options_.coordinator,
        [this](coord::JobType type, const Json& payload) { validate_payload(type, payload); });
}

const std::vector<langid::LanguageProfile>& Platform::profiles() const {
    std::call_once(profiles_once_, [this] {
        if (std::filesystem::is_directory(options_.profiles_dir)) {
            profiles_ = langid::load_profiles(options_.profiles_dir);
        } else {
            spdlog::warn("no language profiles at {}", options_.profiles_dir.string());
        }
    });
    return profiles_;
}

void Platform::validate_payload(coord::JobType type, const Json& payload) const {
    switch (type) {
    case coord::JobType::collect:
        collect::validate_collect_payload(payload);
        return;
    case coord::JobType::preprocess: {
        const auto request = prep::preprocess_request_from_json(payload);
        for (const auto& ref : request.inputs) {
            require_dataset(*store_, ref, "inputs");
        }
        if (request.config.language) {
            const auto& loaded = profiles();
            for (const auto& target : request.config.language->targets) {
                const bool found = std::any_of(loaded.begin(), loaded.end(),
                                               [&](const auto& p) { return p.language() == target; });
                if (!found) {
                    throw_validation("config.language.targets", fmt::format("no profile for '{}'", target));
                }
            }
        }
        if (request.config.relevancy && request.config.relevancy->classifier == relevancy::ClassifierKind::remote) {
            relevancy::make_classifier(*request.config.relevancy, options_.remote);
        }
        return;
    }
    case coord::JobType::analyze: {
        const auto request = analysis::validate_analysis_payload(payload);
        require_dataset(*store_, request.dataset_id, "dataset_id");
        return;
    }
    }
}

std::string Platform::execute(const coord::Job& job, std::stop_token) {
    switch (job.job_type) {
    case coord::JobType::collect: {
        const auto spec = collect::validate_collect_payload(job.payload);
        collect::CollectContext ctx;
        ctx.collected_at = to_seconds(clock_->now());
        const auto result = collect::run_collection(*store_, spec, ctx, job.job_id);
        store_->put_result(job.job_id, "collection", collect::to_json(result), result.dataset_id);
        return result.dataset_id;
    }
    case coord::JobType::preprocess: {
        const auto request = prep::preprocess_request_from_json(job.payload);
        prep::PipelineEnv env;
        env.profiles = profiles();
        env.detect = options_.detect;
        env.remote = options_.remote;
        const auto run = prep::run_pipeline(*store_, request, env, job.job_id);
        Json body = prep::to_json(run.report);
        body["dataset_id"] = run.dataset_id;
        if (run.merged_dataset_id) {
            body["merged_dataset_id"] = *run.merged_dataset_id;
        }
        store_->put_result(job.job_id, "stage_report", body, run.dataset_id);
        return run.dataset_id;
    }
    case coord::JobType::analyze: {
        const auto request = analysis::analysis_request_from_json(job.payload);
        const auto result = analysis::run_analysis(*store_, request, clock_->now());
        return store_->put_result(job.job_id, "analysis", analysis::to_json(result));
    }
    }
    throw Error(ErrorCode::internal, "unhandled job type");
}

Json Platform::job_result(const std::string& job_id) const {
    const auto job = coordinator_->get_job(job_id);
    if (job.status != coord::JobStatus::completed || !job.result_ref) {
        throw Error(ErrorCode::not_found,
                    fmt::format("job {} has no result yet (status {})", job_id, coord::to_string(job.status)));
    }
    auto result = store_->find_result_for_job(job_id, *job.result_ref);
    if (!result) {
        throw_not_found("result of job " + job_id);
    }
    return result->body;
}

Json Platform::sources_catalog() const {
    return Json{{"connectors", collect::ConnectorRegistry::global().catalog()},
                {"analyzers", analysis::AnalyzerRegistry::global().catalog()}};
}

std::optional<coord::Job> Platform::wait_for_job(const std::string& job_id, std::chrono::milliseconds timeout,
                                                 std::chrono::milliseconds poll) const {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        auto job = coordinator_->get_job(job_id);
        if (coord::is_terminal(job.status)) {
            return job;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            return std::nullopt;
        }
        std::this_thread::sleep_for(poll);
    }
}

coord::WorkerIdentity Platform::make_worker(const std::string& worker_id,
                                            std::set<coord::JobType> capabilities) const {
    return coord::WorkerIdentity{worker_id, std::move(capabilities), options_.coordinator.lease_duration};
}

// Workers ----------------------------------------------------------------------

WorkerPool::WorkerPool(Platform& platform, std::size_t count, std::set<coord::JobType> capabilities,
                       coord::WorkerOptions options, const std::string& prefix) {
    for (std::size_t i = 0; i < count; ++i) {
        auto identity = platform.make_worker(fmt::format("{}-w{}", prefix, i + 1), capabilities);
        threads_.emplace_back([&platform, identity, options](std::stop_token stop) {
            coord::run_worker_loop(
                platform.coordinator(), identity,
                [&platform](const coord::Job& job, std::stop_token lost) { return platform.execute(job, lost); },
                options, stop);
        });
    }
}

WorkerPool::~WorkerPool() {
    stop();
}

void WorkerPool::stop() {
    for (auto& t : threads_) {
        t.request_stop();
    }
    for (auto& t : threads_) {
        if (t.joinable()) {
            t.join();
        }
    }
}

std::string WorkerPool::default_worker_prefix() {
    char host[256] = {};
    if (gethostname(host, sizeof host - 1) != 0) {
        std::snprintf(host, sizeof host, "worker");
    }
    return fmt::format("{}-{}", host, getpid());
}

std::set<coord::JobType> all_job_types() {
    return {coord::JobType::collect, coord::JobType::preprocess, coord::JobType::analyze};
}

std::set<coord::JobType> parse_capabilities(const std::string& csv) {
    std::set<coord::JobType> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) {
            auto type = coord::parse_job_type(item);
            if (!type) {
                throw_validation("capabilities", fmt::format("unknown job type '{}'", item));
            }
            out.insert(*type);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    if (out.empty()) {
        throw_validation("capabilities", "name at least one job type");
    }
    return out;
}

} // namespace kumpul::app
