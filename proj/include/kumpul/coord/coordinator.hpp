#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kumpul/coord/clock.hpp"
#include "kumpul/coord/job.hpp"
#include "kumpul/store/datastore.hpp"

namespace kumpul::coord {

struct CoordinatorConfig {
    std::chrono::seconds lease_duration{60};
    std::chrono::milliseconds poll_interval{500};
    int max_attempts = 3;

    /// Defaults overridden by KUMPUL_LEASE_SECS, KUMPUL_POLL_MS and
    /// KUMPUL_MAX_ATTEMPTS when set.
    static CoordinatorConfig from_env();
};

/// Rejects a payload for a job type by throwing Error(validation).
using PayloadValidator = std::function<void(JobType, const Json&)>;

/// The database-driven job queue. All state lives in the datastore; every
/// transition runs inside one serialized store transaction, so any number
/// of workers (threads or processes) may poll concurrently.
class Coordinator {
public:
    Coordinator(store::Datastore& store, const Clock& clock, CoordinatorConfig config = {},
                PayloadValidator validator = {});

    const CoordinatorConfig& config() const noexcept { return config_; }
    const Clock& clock() const noexcept { return clock_; }
    store::Datastore& store() noexcept { return store_; }

    /// Validates and enqueues. With an idempotency key, a repeated submission
    /// returns the job created by the first one.
    std::string submit_job(JobType type, const Json& payload,
                           const std::optional<std::string>& idempotency_key = std::nullopt);

    /// Atomically leases the oldest pending job matching the worker's
    /// capabilities; each job is handed to at most one caller.
    std::optional<Job> claim_next(const WorkerIdentity& worker, Instant now);

    /// Extends the lease by the duration granted at claim time. Throws
    /// Error(conflict) when the caller no longer owns a running job, which
    /// tells the worker to abandon its work.
    Instant renew_lease(const std::string& job_id, const std::string& worker_id, Instant now);

    void complete_job(const std::string& job_id, const std::string& worker_id, const std::string& result_ref);

    /// Returns the resulting status: pending when retryable with attempts
    /// left, failed otherwise.
    JobStatus fail_job(const std::string& job_id, const std::string& worker_id, const std::string& error,
                       bool retryable);

    /// Requeues running jobs whose lease lapsed before `now`; those already at
    /// max_attempts fail with "lease expired". Returns the number requeued.
    std::size_t expire_leases(Instant now);

    /// pending -> cancelled; anything else is Error(conflict).
    Job cancel_job(const std::string& job_id);

    std::optional<Job> find_job(const std::string& job_id) const;
    Job get_job(const std::string& job_id) const;

private:
    Job load_owned(store::JobTx& tx, const std::string& job_id, const std::string& worker_id) const;
    void save(store::JobTx& tx, Job& job, Instant now) const;

    store::Datastore& store_;
    const Clock& clock_;
    CoordinatorConfig config_;
    PayloadValidator validator_;
};

} // namespace kumpul::coord
