#include "kumpul/coord/worker.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "kumpul/core/error.hpp"

namespace kumpul::coord {

namespace {

void interruptible_sleep(std::chrono::milliseconds d, std::stop_token stop) {
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    cv.wait_for(lock, stop, d, [] { return false; });
}

class Heartbeat {
public:
    Heartbeat(Coordinator& coordinator, const Job& job, const std::string& worker_id,
              std::chrono::milliseconds interval)
        : thread_([&coordinator, job_id = job.job_id, worker_id, interval, this](std::stop_token stop) {
              while (!stop.stop_requested()) {
                  interruptible_sleep(interval, stop);
                  if (stop.stop_requested()) {
                      return;
                  }
                  try {
                      coordinator.renew_lease(job_id, worker_id, coordinator.clock().now());
                  } catch (const Error& e) {
                      if (e.code() == ErrorCode::conflict || e.code() == ErrorCode::not_found) {
                          spdlog::warn("worker {}: lease on {} lost ({})", worker_id, job_id, e.what());
                          lost_.request_stop();
                          return;
                      }
                      spdlog::warn("worker {}: renewing {} failed: {}", worker_id, job_id, e.what());
                  }
              }
          }) {}

    ~Heartbeat() { stop(); }

    void stop() {
        thread_.request_stop();
        if (thread_.joinable()) {
            thread_.join();
        }
    }

    std::stop_token lost_token() const { return lost_.get_token(); }
    bool lost() const { return lost_.stop_requested(); }

private:
    std::stop_source lost_;
    std::jthread thread_;
};

void finish(const Job& job, const std::string& worker_id, const std::function<void()>& transition) {
    try {
        transition();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::conflict && e.code() != ErrorCode::not_found) {
            throw;
        }
        spdlog::warn("worker {}: result of {} discarded: {}", worker_id, job.job_id, e.what());
    }
}

} // namespace

void run_worker_loop(Coordinator& coordinator, const WorkerIdentity& worker, const Executor& executor,
                     const WorkerOptions& options, std::stop_token stop) {
    const auto heartbeat_interval = options.heartbeat_interval.value_or(
        std::chrono::duration_cast<std::chrono::milliseconds>(worker.lease_duration) / 3);

    while (!stop.stop_requested()) {
        std::optional<Job> job;
        try {
            const auto now = coordinator.clock().now();
            if (options.sweep_expired_leases) {
                coordinator.expire_leases(now);
            }
            job = coordinator.claim_next(worker, now);
        } catch (const Error& e) {
            spdlog::warn("worker {}: poll failed: {}", worker.worker_id, e.what());
        }
        if (!job) {
            interruptible_sleep(options.poll_interval, stop);
            continue;
        }

        spdlog::debug("worker {}: running {} ({})", worker.worker_id, job->job_id, to_string(job->job_type));
        Heartbeat heartbeat(coordinator, *job, worker.worker_id, heartbeat_interval);
        std::string result_ref;
        std::optional<std::string> failure;
        bool retryable = true;
        try {
            result_ref = executor(*job, heartbeat.lost_token());
        } catch (const SimulatedCrash&) {
            heartbeat.stop();
            return;
        } catch (const Error& e) {
            failure = e.what();
            retryable = e.retryable();
        } catch (const std::exception& e) {
            failure = e.what();
        } catch (...) {
            failure = "unknown executor failure";
        }
        heartbeat.stop();

        try {
            if (heartbeat.lost()) {
                spdlog::warn("worker {}: dropping {} after losing its lease", worker.worker_id, job->job_id);
            } else if (failure) {
                finish(*job, worker.worker_id,
                       [&] { coordinator.fail_job(job->job_id, worker.worker_id, *failure, retryable); });
            } else {
                finish(*job, worker.worker_id,
                       [&] { coordinator.complete_job(job->job_id, worker.worker_id, result_ref); });
            }
        } catch (const Error& e) {
            spdlog::error("worker {}: could not record outcome of {}: {}", worker.worker_id, job->job_id, e.what());
        }
    }
}

} // namespace kumpul::coord
