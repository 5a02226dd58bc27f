#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kumpul/coord/job.hpp"
#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"

struct sqlite3;

namespace kumpul::store {

enum class Mode { read_write, read_only };

struct LineageNode {
    Dataset dataset;
    /// One node per parent, in parent_ids order. The job that produced the
    /// edge from a parent to this node is dataset.created_by_job.
    std::vector<LineageNode> parents;

    std::size_t size() const;
};

struct JobFilter {
    std::optional<coord::JobStatus> status;
    std::optional<coord::JobType> type;
};

struct StoredResult {
    std::string result_id;
    std::string job_id;
    std::string kind;
    /// The job's result_ref this document belongs to: a dataset id for
    /// dataset-producing jobs, otherwise the result id itself.
    std::string ref;
    Json body;
};

/// Job-table view handed to callbacks running inside a serialized write
/// transaction. Every read observes the transaction's snapshot and every
/// write commits atomically with the rest of the callback.
class JobTx {
public:
    virtual ~JobTx() = default;

    virtual std::optional<coord::Job> find(const std::string& job_id) = 0;
    virtual std::optional<coord::Job> find_by_idempotency_key(const std::string& key) = 0;
    /// Oldest pending job (created_at, then job_id) whose type is in `types`.
    virtual std::optional<coord::Job> oldest_pending(const std::set<coord::JobType>& types) = 0;
    /// Running jobs whose lease expired strictly before `now`.
    virtual std::vector<coord::Job> expired_leases(Instant now) = 0;
    virtual std::string next_job_id() = 0;
    virtual void insert(const coord::Job& job) = 0;
    virtual void update(const coord::Job& job) = 0;
};

/// Embedded, file-backed transactional store for datasets, records, jobs
/// and results. One handle may be shared by any number of threads; several
/// processes may open the same file. Writes are serialized, readers never
/// observe a partial append.
class Datastore {
public:
    explicit Datastore(const std::filesystem::path& path, Mode mode = Mode::read_write);
    ~Datastore();

    Datastore(const Datastore&) = delete;
    Datastore& operator=(const Datastore&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    Mode mode() const noexcept { return mode_; }

    // Datasets ---------------------------------------------------------------

    /// Persists the metadata with record_count 0. Assigns "ds-NNNNNN" when
    /// dataset_id is empty. Parents must already exist, which keeps the
    /// lineage graph acyclic.
    std::string create_dataset(Dataset meta);

    /// Appends atomically; every record must validate and record ids must be
    /// unique within the dataset. Returns the new record_count.
    std::size_t append_records(const std::string& dataset_id, const std::vector<Record>& records);

    /// create_dataset + append_records in one transaction.
    std::string commit_dataset(Dataset meta, const std::vector<Record>& records);

    std::optional<Dataset> find_dataset(const std::string& dataset_id) const;
    Dataset get_dataset(const std::string& dataset_id) const;
    /// Looks up by id, then by name; a name shared by several datasets is a
    /// validation error.
    Dataset resolve_dataset(const std::string& id_or_name) const;
    std::vector<Dataset> list_datasets(std::size_t offset, std::size_t limit) const;
    std::size_t count_datasets() const;

    /// Insertion order; offset past the end yields an empty page.
    std::vector<Record> read_records(const std::string& dataset_id, std::size_t offset, std::size_t limit) const;
    std::vector<Record> read_all_records(const std::string& dataset_id) const;

    LineageNode get_lineage(const std::string& dataset_id) const;

    // Jobs -------------------------------------------------------------------

    void write_jobs(const std::function<void(JobTx&)>& fn);
    std::optional<coord::Job> find_job(const std::string& job_id) const;
    std::vector<coord::Job> list_jobs(const JobFilter& filter, std::size_t offset, std::size_t limit) const;
    std::size_t count_jobs(const JobFilter& filter) const;

    // Results ----------------------------------------------------------------

    /// Stores a job result document and returns its id ("res-NNNNNN").
    /// `ref` defaults to the new result id.
    std::string put_result(const std::string& job_id, const std::string& kind, const Json& body,
                           std::optional<std::string> ref = std::nullopt);
    std::optional<StoredResult> find_result(const std::string& result_id) const;
    /// The result written by the attempt that completed with `result_ref`.
    std::optional<StoredResult> find_result_for_job(const std::string& job_id, const std::string& result_ref) const;

    /// Test seam: invoked before each record insert of an append with the
    /// record's index; throwing aborts the append.
    void set_append_fault(std::function<void(std::size_t)> hook);

private:
    class Tx;
    friend class Tx;

    void exec(const char* sql) const;
    std::string next_id(const std::string& counter, const std::string& prefix);
    std::string insert_dataset_locked(Dataset& meta);
    std::size_t append_locked(const Dataset& meta, const std::vector<Record>& records);
    std::optional<Dataset> find_dataset_locked(const std::string& dataset_id) const;
    void require_writable() const;

    std::filesystem::path path_;
    Mode mode_;
    sqlite3* db_ = nullptr;
    mutable std::recursive_mutex mutex_;
    std::function<void(std::size_t)> append_fault_;
};

} // namespace kumpul::store
