#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "kumpul/coord/clock.hpp"
#include "kumpul/coord/coordinator.hpp"
#include "kumpul/coord/worker.hpp"
#include "kumpul/core/json.hpp"
#include "kumpul/langid/langid.hpp"
#include "kumpul/relevancy/relevancy.hpp"
#include "kumpul/store/datastore.hpp"

namespace kumpul::app {

struct PlatformOptions {
    std::filesystem::path store_path;
    coord::CoordinatorConfig coordinator;
    /// Empty means <data dir>/profiles.
    std::filesystem::path profiles_dir;
    langid::DetectOptions detect;
    relevancy::RemoteOptions remote;
    /// Null means the system clock.
    std::shared_ptr<const coord::Clock> clock;
};

/// Store, coordinator and job executors wired together. Both the API server
/// and the CLI drive the platform through this type, so the same payload
/// produces the same state transitions whichever front end submitted it.
class Platform {
public:
    explicit Platform(PlatformOptions options);

    store::Datastore& store() noexcept { return *store_; }
    coord::Coordinator& coordinator() noexcept { return *coordinator_; }
    const coord::Clock& clock() const noexcept { return *clock_; }
    const PlatformOptions& options() const noexcept { return options_; }

    /// Submit-time payload check used by the coordinator.
    void validate_payload(coord::JobType type, const Json& payload) const;

    /// Runs a claimed job and returns its result_ref.
    std::string execute(const coord::Job& job, std::stop_token lease_lost);

    /// Result document of a completed job; Error(not_found) otherwise.
    Json job_result(const std::string& job_id) const;

    /// {"connectors": [...], "analyzers": [...]}.
    Json sources_catalog() const;

    /// Loaded on first use, sorted by language code.
    const std::vector<langid::LanguageProfile>& profiles() const;

    /// Polls until the job reaches a terminal state or `timeout` passes.
    std::optional<coord::Job> wait_for_job(const std::string& job_id, std::chrono::milliseconds timeout,
                                           std::chrono::milliseconds poll = std::chrono::milliseconds{500}) const;

    coord::WorkerIdentity make_worker(const std::string& worker_id, std::set<coord::JobType> capabilities) const;

private:
    PlatformOptions options_;
    std::shared_ptr<const coord::Clock> clock_;
    std::unique_ptr<store::Datastore> store_;
    std::unique_ptr<coord::Coordinator> coordinator_;
    mutable std::once_flag profiles_once_;
    mutable std::vector<langid::LanguageProfile> profiles_;
};

/// Worker threads sharing one platform. Destruction stops them after their
/// in-flight jobs finish.
class WorkerPool {
public:
    WorkerPool(Platform& platform, std::size_t count, std::set<coord::JobType> capabilities,
               coord::WorkerOptions options = {}, const std::string& prefix = default_worker_prefix());
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void stop();
    std::size_t size() const noexcept { return threads_.size(); }

    /// "<hostname>-<pid>".
    static std::string default_worker_prefix();

private:
    std::vector<std::jthread> threads_;
};

std::set<coord::JobType> all_job_types();
/// "collect,preprocess" -> {collect, preprocess}; throws validation.
std::set<coord::JobType> parse_capabilities(const std::string& csv);

} // namespace kumpul::app
