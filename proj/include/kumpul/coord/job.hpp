#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "kumpul/core/json.hpp"
#include "kumpul/core/time.hpp"

namespace kumpul::coord {

enum class JobType { collect, preprocess, analyze };
enum class JobStatus { pending, running, completed, failed, cancelled };

std::string_view to_string(JobType t) noexcept;
std::string_view to_string(JobStatus s) noexcept;
std::optional<JobType> parse_job_type(std::string_view s) noexcept;
std::optional<JobStatus> parse_job_status(std::string_view s) noexcept;

inline bool is_terminal(JobStatus s) noexcept {
    return s == JobStatus::completed || s == JobStatus::failed || s == JobStatus::cancelled;
}

struct Job {
    std::string job_id;
    JobType job_type = JobType::collect;
    Json payload = Json::object();
    JobStatus status = JobStatus::pending;
    int attempts = 0;
    int max_attempts = 3;
    std::optional<std::string> worker_id;
    std::optional<Instant> lease_expires_at;
    /// Lease length granted at claim time; renewals extend by the same amount.
    std::chrono::milliseconds lease_duration{0};
    std::optional<std::string> result_ref;
    std::optional<std::string> error;
    Instant created_at{};
    Instant updated_at{};
    std::optional<std::string> idempotency_key;
};

/// Empty when the job satisfies every state invariant; otherwise a
/// description of the first violation.
std::optional<std::string> check_job_invariants(const Job& job);

/// Whether moving from one status to another is a legal transition.
bool transition_allowed(JobStatus from, JobStatus to) noexcept;

Json to_json(const Job& job);
Job job_from_json(const Json& j);

struct WorkerIdentity {
    std::string worker_id;
    std::set<JobType> capabilities;
    std::chrono::seconds lease_duration{60};
};

} // namespace kumpul::coord
