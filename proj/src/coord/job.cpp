#include "kumpul/coord/job.hpp"

#include "kumpul/core/error.hpp"

namespace kumpul::coord {

std::string_view to_string(JobType t) noexcept {
    switch (t) {
    case JobType::collect: return "collect";
    case JobType::preprocess: return "preprocess";
    case JobType::analyze: return "analyze";
    }
    return "collect";
}

std::string_view to_string(JobStatus s) noexcept {
    switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::completed: return "completed";
    case JobStatus::failed: return "failed";
    case JobStatus::cancelled: return "cancelled";
    }
    return "pending";
}

std::optional<JobType> parse_job_type(std::string_view s) noexcept {
    for (auto t : {JobType::collect, JobType::preprocess, JobType::analyze}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    return std::nullopt;
}

std::optional<JobStatus> parse_job_status(std::string_view s) noexcept {
    for (auto st : {JobStatus::pending, JobStatus::running, JobStatus::completed, JobStatus::failed,
                    JobStatus::cancelled}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_job_invariants(const Job& job) {
    const bool owned = job.worker_id.has_value() && job.lease_expires_at.has_value();
    if ((job.status == JobStatus::running) != owned) {
        return "running status must coincide with worker_id and lease being set";
    }
    if (job.status != JobStatus::running && (job.worker_id || job.lease_expires_at)) {
        return "lease fields must be cleared outside running";
    }
    if (job.attempts < 0 || job.attempts > job.max_attempts) {
        return "attempts out of range";
    }
    if (job.max_attempts < 1) {
        return "max_attempts must be positive";
    }
    if (job.status == JobStatus::completed && !job.result_ref) {
        return "completed job without result_ref";
    }
    if (job.status == JobStatus::failed && !job.error) {
        return "failed job without error";
    }
    return std::nullopt;
}

bool transition_allowed(JobStatus from, JobStatus to) noexcept {
    switch (from) {
    case JobStatus::pending: return to == JobStatus::running || to == JobStatus::cancelled;
    case JobStatus::running:
        return to == JobStatus::completed || to == JobStatus::failed || to == JobStatus::pending;
    default: return false;
    }
}

Json to_json(const Job& job) {
    Json j = Json::object();
    j["job_id"] = job.job_id;
    j["job_type"] = std::string(to_string(job.job_type));
    j["payload"] = job.payload;
    j["status"] = std::string(to_string(job.status));
    j["attempts"] = job.attempts;
    j["max_attempts"] = job.max_attempts;
    if (job.worker_id) j["worker_id"] = *job.worker_id;
    if (job.lease_expires_at) j["lease_expires_at"] = format_rfc3339(*job.lease_expires_at);
    if (job.result_ref) j["result_ref"] = *job.result_ref;
    if (job.error) j["error"] = *job.error;
    j["created_at"] = format_rfc3339(job.created_at);
    j["updated_at"] = format_rfc3339(job.updated_at);
    return j;
}

Job job_from_json(const Json& j) {
    Job job;
    job.job_id = j.at("job_id").get<std::string>();
    auto type = parse_job_type(j.at("job_type").get<std::string>());
    auto status = parse_job_status(j.at("status").get<std::string>());
    if (!type || !status) {
        throw Error(ErrorCode::validation, "job: unknown type or status");
    }
    job.job_type = *type;
    job.status = *status;
    job.payload = j.value("payload", Json::object());
    job.attempts = j.value("attempts", 0);
    job.max_attempts = j.value("max_attempts", 3);
    if (j.contains("worker_id")) job.worker_id = j["worker_id"].get<std::string>();
    if (j.contains("lease_expires_at")) job.lease_expires_at = parse_rfc3339(j["lease_expires_at"].get<std::string>());
    if (j.contains("result_ref")) job.result_ref = j["result_ref"].get<std::string>();
    if (j.contains("error")) job.error = j["error"].get<std::string>();
    job.created_at = parse_rfc3339(j.at("created_at").get<std::string>()).value_or(Instant{});
    job.updated_at = parse_rfc3339(j.at("updated_at").get<std::string>()).value_or(Instant{});
    return job;
}

} // namespace kumpul::coord
