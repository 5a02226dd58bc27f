#pragma once

#include <chrono>
#include <exception>
#include <functional>
#include <optional>
#include <stop_token>
#include <string>

#include "kumpul/coord/coordinator.hpp"

namespace kumpul::coord {

/// Maps a claimed job to its result_ref. Throwing fails the job: an
/// Error decides retryability via Error::retryable(), anything else is
/// treated as retryable. The token fires when the lease is lost, after
/// which any result will be discarded.
using Executor = std::function<std::string(const Job&, std::stop_token lease_lost)>;

struct WorkerOptions {
    std::chrono::milliseconds poll_interval{500};
    /// Defaults to a third of the worker's lease duration.
    std::optional<std::chrono::milliseconds> heartbeat_interval;
    /// Run expire_leases before each claim so crashed peers' jobs return to
    /// the queue without a separate sweeper.
    bool sweep_expired_leases = true;
};

/// Thrown by an executor to emulate the worker process dying mid-job: the
/// loop exits at once and leaves the job running with its lease in place.
class SimulatedCrash : public std::exception {
public:
    const char* what() const noexcept override { return "simulated worker crash"; }
};

/// Polls, claims, executes, heartbeats and completes jobs until `stop` is
/// requested. The in-flight job is always finished before returning.
void run_worker_loop(Coordinator& coordinator, const WorkerIdentity& worker, const Executor& executor,
                     const WorkerOptions& options, std::stop_token stop);

} // namespace kumpul::coord
