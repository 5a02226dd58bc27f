#include "kumpul/coord/coordinator.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"

namespace kumpul::coord {

namespace {

std::optional<long long> env_int(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    char* end = nullptr;
    const long long n = std::strtoll(v, &end, 10);
    if (*end != '\0' || n <= 0) {
        throw Error(ErrorCode::validation, fmt::format("{} must be a positive integer", name));
    }
    return n;
}

} // namespace

CoordinatorConfig CoordinatorConfig::from_env() {
    CoordinatorConfig c;
    if (auto v = env_int("KUMPUL_LEASE_SECS")) c.lease_duration = std::chrono::seconds{*v};
    if (auto v = env_int("KUMPUL_POLL_MS")) c.poll_interval = std::chrono::milliseconds{*v};
    if (auto v = env_int("KUMPUL_MAX_ATTEMPTS")) c.max_attempts = static_cast<int>(*v);
    return c;
}

Coordinator::Coordinator(store::Datastore& store, const Clock& clock, CoordinatorConfig config,
                         PayloadValidator validator)
    : store_(store), clock_(clock), config_(config), validator_(std::move(validator)) {}

void Coordinator::save(store::JobTx& tx, Job& job, Instant now) const {
    job.updated_at = now;
    if (auto problem = check_job_invariants(job)) {
        throw Error(ErrorCode::internal, fmt::format("job {} would violate invariant: {}", job.job_id, *problem));
    }
    tx.update(job);
}

Job Coordinator::load_owned(store::JobTx& tx, const std::string& job_id, const std::string& worker_id) const {
    auto job = tx.find(job_id);
    if (!job) {
        throw_not_found("job " + job_id);
    }
    if (job->status != JobStatus::running) {
        throw Error(ErrorCode::conflict, fmt::format("job {} is {}, not running", job_id, to_string(job->status)));
    }
    if (job->worker_id != worker_id) {
        throw Error(ErrorCode::conflict, fmt::format("job {} is not owned by {}", job_id, worker_id));
    }
    return *job;
}

std::string Coordinator::submit_job(JobType type, const Json& payload,
                                    const std::optional<std::string>& idempotency_key) {
    if (!payload.is_object()) {
        throw_validation("payload", "must be a JSON object");
    }
    if (validator_) {
        validator_(type, payload);
    }
    std::string id;
    const auto now = clock_.now();
    store_.write_jobs([&](store::JobTx& tx) {
        if (idempotency_key) {
            if (auto existing = tx.find_by_idempotency_key(*idempotency_key)) {
                id = existing->job_id;
                return;
            }
        }
        Job job;
        job.job_id = tx.next_job_id();
        job.job_type = type;
        job.payload = payload;
        job.max_attempts = config_.max_attempts;
        job.created_at = now;
        job.updated_at = now;
        job.idempotency_key = idempotency_key;
        tx.insert(job);
        id = job.job_id;
    });
    return id;
}

std::optional<Job> Coordinator::claim_next(const WorkerIdentity& worker, Instant now) {
    std::optional<Job> claimed;
    store_.write_jobs([&](store::JobTx& tx) {
        auto job = tx.oldest_pending(worker.capabilities);
        if (!job) {
            return;
        }
        job->status = JobStatus::running;
        job->worker_id = worker.worker_id;
        job->lease_duration = std::chrono::duration_cast<std::chrono::milliseconds>(worker.lease_duration);
        job->lease_expires_at = now + job->lease_duration;
        job->attempts += 1;
        save(tx, *job, now);
        claimed = std::move(job);
    });
    return claimed;
}

Instant Coordinator::renew_lease(const std::string& job_id, const std::string& worker_id, Instant now) {
    Instant expires{};
    store_.write_jobs([&](store::JobTx& tx) {
        Job job = load_owned(tx, job_id, worker_id);
        job.lease_expires_at = now + job.lease_duration;
        save(tx, job, now);
        expires = *job.lease_expires_at;
    });
    return expires;
}

void Coordinator::complete_job(const std::string& job_id, const std::string& worker_id,
                               const std::string& result_ref) {
    const auto now = clock_.now();
    store_.write_jobs([&](store::JobTx& tx) {
        Job job = load_owned(tx, job_id, worker_id);
        job.status = JobStatus::completed;
        job.result_ref = result_ref;
        job.worker_id.reset();
        job.lease_expires_at.reset();
        save(tx, job, now);
    });
}

JobStatus Coordinator::fail_job(const std::string& job_id, const std::string& worker_id, const std::string& error,
                                bool retryable) {
    const auto now = clock_.now();
    JobStatus result = JobStatus::failed;
    store_.write_jobs([&](store::JobTx& tx) {
        Job job = load_owned(tx, job_id, worker_id);
        job.worker_id.reset();
        job.lease_expires_at.reset();
        job.error = error;
        job.status = (retryable && job.attempts < job.max_attempts) ? JobStatus::pending : JobStatus::failed;
        save(tx, job, now);
        result = job.status;
    });
    return result;
}

std::size_t Coordinator::expire_leases(Instant now) {
    std::size_t requeued = 0;
    store_.write_jobs([&](store::JobTx& tx) {
        for (Job job : tx.expired_leases(now)) {
            job.worker_id.reset();
            job.lease_expires_at.reset();
            if (job.attempts < job.max_attempts) {
                job.status = JobStatus::pending;
                ++requeued;
            } else {
                job.status = JobStatus::failed;
                job.error = "lease expired";
            }
            save(tx, job, now);
        }
    });
    return requeued;
}

Job Coordinator::cancel_job(const std::string& job_id) {
    const auto now = clock_.now();
    Job out;
    store_.write_jobs([&](store::JobTx& tx) {
        auto job = tx.find(job_id);
        if (!job) {
            throw_not_found("job " + job_id);
        }
        if (!transition_allowed(job->status, JobStatus::cancelled)) {
            throw Error(ErrorCode::conflict,
                        fmt::format("job {} is {}; only pending jobs can be cancelled", job_id, to_string(job->status)));
        }
        job->status = JobStatus::cancelled;
        save(tx, *job, now);
        out = *job;
    });
    return out;
}

std::optional<Job> Coordinator::find_job(const std::string& job_id) const {
    return store_.find_job(job_id);
}

Job Coordinator::get_job(const std::string& job_id) const {
    auto job = find_job(job_id);
    if (!job) {
        throw_not_found("job " + job_id);
    }
    return *job;
}

} // namespace kumpul::coord
