#include "kumpul/store/datastore.hpp"

#include <sqlite3.h>

#include <fmt/format.h>

#include "kumpul/core/error.hpp"
#include "kumpul/core/serialize.hpp"

namespace kumpul::store {

namespace {

using coord::Job;
using coord::JobStatus;
using coord::JobType;

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS counters (
    name  TEXT PRIMARY KEY,
    value INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS datasets (
    dataset_id     TEXT PRIMARY KEY,
    seq            INTEGER NOT NULL,
    name           TEXT NOT NULL,
    kind           TEXT NOT NULL,
    parent_ids     TEXT NOT NULL,
    created_by_job TEXT,
    record_count   INTEGER NOT NULL,
    created_at     TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS datasets_name ON datasets(name);
CREATE TABLE IF NOT EXISTS records (
    dataset_id TEXT NOT NULL,
    seq        INTEGER NOT NULL,
    record_id  TEXT NOT NULL,
    body       TEXT NOT NULL,
    PRIMARY KEY (dataset_id, seq),
    UNIQUE (dataset_id, record_id)
);
CREATE TABLE IF NOT EXISTS jobs (
    job_id           TEXT PRIMARY KEY,
    job_type         TEXT NOT NULL,
    payload          TEXT NOT NULL,
    status           TEXT NOT NULL,
    attempts         INTEGER NOT NULL,
    max_attempts     INTEGER NOT NULL,
    worker_id        TEXT,
    lease_expires_ms INTEGER,
    lease_ms         INTEGER NOT NULL,
    result_ref       TEXT,
    error            TEXT,
    created_ms       INTEGER NOT NULL,
    updated_ms       INTEGER NOT NULL,
    idempotency_key  TEXT UNIQUE
);
CREATE INDEX IF NOT EXISTS jobs_queue ON jobs(status, created_ms, job_id);
CREATE TABLE IF NOT EXISTS results (
    result_id  TEXT PRIMARY KEY,
    job_id     TEXT NOT NULL,
    kind       TEXT NOT NULL,
    ref        TEXT NOT NULL,
    body       TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS results_job ON results(job_id);
)sql";

[[noreturn]] void throw_sqlite(sqlite3* db, const std::string& what) {
    throw Error(ErrorCode::storage, fmt::format("{}: {}", what, db ? sqlite3_errmsg(db) : "no database"));
}

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
            throw_sqlite(db, "prepare");
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, const std::string& v) {
        check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind(int i, const std::optional<std::string>& v) {
        if (v) {
            return bind(i, *v);
        }
        check(sqlite3_bind_null(stmt_, i));
        return *this;
    }
    Statement& bind(int i, long long v) {
        check(sqlite3_bind_int64(stmt_, i, v));
        return *this;
    }
    Statement& bind_null(int i) {
        check(sqlite3_bind_null(stmt_, i));
        return *this;
    }

    /// True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) {
            return true;
        }
        if (rc == SQLITE_DONE) {
            return false;
        }
        if (rc == SQLITE_CONSTRAINT) {
            throw Error(ErrorCode::conflict, fmt::format("constraint violated: {}", sqlite3_errmsg(db_)));
        }
        throw_sqlite(db_, "step");
    }

    void run() {
        while (step()) {
        }
    }

    void reset() {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }

    std::string text(int col) const {
        const auto* p = sqlite3_column_text(stmt_, col);
        const int n = sqlite3_column_bytes(stmt_, col);
        return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(n)) : std::string{};
    }
    std::optional<std::string> optional_text(int col) const {
        if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) {
            return std::nullopt;
        }
        return text(col);
    }
    long long integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

private:
    void check(int rc) {
        if (rc != SQLITE_OK) {
            throw_sqlite(db_, "bind");
        }
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

constexpr const char* kDatasetColumns =
    "dataset_id, name, kind, parent_ids, created_by_job, record_count, created_at";

Dataset read_dataset_row(const Statement& st) {
    Dataset d;
    d.dataset_id = st.text(0);
    d.name = st.text(1);
    d.kind = parse_dataset_kind(st.text(2)).value_or(DatasetKind::raw);
    d.parent_ids = Json::parse(st.text(3)).get<std::vector<std::string>>();
    d.created_by_job = st.optional_text(4);
    d.record_count = static_cast<std::size_t>(st.integer(5));
    d.created_at = parse_rfc3339(st.text(6)).value_or(Instant{});
    return d;
}

constexpr const char* kJobColumns =
    "job_id, job_type, payload, status, attempts, max_attempts, worker_id, lease_expires_ms, lease_ms, "
    "result_ref, error, created_ms, updated_ms, idempotency_key";

Instant from_ms(long long ms) {
    return Instant{std::chrono::milliseconds{ms}};
}

long long to_ms(Instant t) {
    return t.time_since_epoch().count();
}

Job read_job_row(const Statement& st) {
    Job j;
    j.job_id = st.text(0);
    j.job_type = coord::parse_job_type(st.text(1)).value_or(JobType::collect);
    j.payload = Json::parse(st.text(2));
    j.status = coord::parse_job_status(st.text(3)).value_or(JobStatus::pending);
    j.attempts = static_cast<int>(st.integer(4));
    j.max_attempts = static_cast<int>(st.integer(5));
    j.worker_id = st.optional_text(6);
    if (!st.is_null(7)) {
        j.lease_expires_at = from_ms(st.integer(7));
    }
    j.lease_duration = std::chrono::milliseconds{st.integer(8)};
    j.result_ref = st.optional_text(9);
    j.error = st.optional_text(10);
    j.created_at = from_ms(st.integer(11));
    j.updated_at = from_ms(st.integer(12));
    j.idempotency_key = st.optional_text(13);
    return j;
}

void bind_job(Statement& st, const Job& j) {
    st.bind(1, j.job_id)
        .bind(2, std::string(coord::to_string(j.job_type)))
        .bind(3, j.payload.dump())
        .bind(4, std::string(coord::to_string(j.status)))
        .bind(5, static_cast<long long>(j.attempts))
        .bind(6, static_cast<long long>(j.max_attempts))
        .bind(7, j.worker_id);
    if (j.lease_expires_at) {
        st.bind(8, to_ms(*j.lease_expires_at));
    } else {
        st.bind_null(8);
    }
    st.bind(9, static_cast<long long>(j.lease_duration.count()))
        .bind(10, j.result_ref)
        .bind(11, j.error)
        .bind(12, to_ms(j.created_at))
        .bind(13, to_ms(j.updated_at))
        .bind(14, j.idempotency_key);
}

std::string filter_clause(const JobFilter& f) {
    std::string where;
    if (f.status) {
        where += " AND status = ?1";
    }
    if (f.type) {
        where += " AND job_type = ?2";
    }
    return where;
}

void bind_filter(Statement& st, const JobFilter& f) {
    if (f.status) st.bind(1, std::string(coord::to_string(*f.status)));
    if (f.type) st.bind(2, std::string(coord::to_string(*f.type)));
}

} // namespace

std::size_t LineageNode::size() const {
    std::size_t n = 1;
    for (const auto& p : parents) {
        n += p.size();
    }
    return n;
}

/// BEGIN IMMEDIATE ... COMMIT, rolled back unless committed. Holds the
/// handle mutex for its lifetime, which serializes writers within a process;
/// SQLite's write lock serializes them across processes.
class Datastore::Tx {
public:
    explicit Tx(const Datastore& store) : store_(store), lock_(store.mutex_) {
        store_.exec("BEGIN IMMEDIATE");
    }
    ~Tx() {
        if (!done_) {
            sqlite3_exec(store_.db_, "ROLLBACK", nullptr, nullptr, nullptr);
        }
    }
    void commit() {
        store_.exec("COMMIT");
        done_ = true;
    }

private:
    const Datastore& store_;
    std::unique_lock<std::recursive_mutex> lock_;
    bool done_ = false;
};

Datastore::Datastore(const std::filesystem::path& path, Mode mode) : path_(path), mode_(mode) {
    const int flags = (mode == Mode::read_only ? SQLITE_OPEN_READONLY : SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE) |
                      SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.string().c_str(), &db_, flags, nullptr) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "open failed";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::storage, fmt::format("cannot open store {}: {}", path.string(), msg));
    }
    sqlite3_busy_timeout(db_, 10000);
    if (mode == Mode::read_write) {
        exec("PRAGMA journal_mode=WAL");
        exec("PRAGMA synchronous=FULL");
        exec(kSchema);
    }
}

Datastore::~Datastore() {
    sqlite3_close(db_);
}

void Datastore::exec(const char* sql) const {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw Error(ErrorCode::storage, fmt::format("sqlite: {} ({})", msg, sql));
    }
}

void Datastore::require_writable() const {
    if (mode_ == Mode::read_only) {
        throw Error(ErrorCode::storage, "store opened read-only");
    }
}

std::string Datastore::next_id(const std::string& counter, const std::string& prefix) {
    Statement up(db_, "INSERT INTO counters(name, value) VALUES (?1, 1) "
                      "ON CONFLICT(name) DO UPDATE SET value = value + 1 RETURNING value");
    up.bind(1, counter);
    if (!up.step()) {
        throw Error(ErrorCode::storage, "counter update returned no row");
    }
    const long long value = up.integer(0);
    up.run();
    return fmt::format("{}-{:06d}", prefix, value);
}

std::optional<Dataset> Datastore::find_dataset_locked(const std::string& dataset_id) const {
    Statement st(db_, fmt::format("SELECT {} FROM datasets WHERE dataset_id = ?1", kDatasetColumns).c_str());
    st.bind(1, dataset_id);
    if (!st.step()) {
        return std::nullopt;
    }
    return read_dataset_row(st);
}

std::string Datastore::insert_dataset_locked(Dataset& meta) {
    if (meta.dataset_id.empty()) {
        meta.dataset_id = next_id("dataset", "ds");
    } else if (find_dataset_locked(meta.dataset_id)) {
        throw Error(ErrorCode::conflict, fmt::format("dataset {} already exists", meta.dataset_id));
    }
    if (auto problem = check_dataset_shape(meta)) {
        throw_validation("kind", *problem);
    }
    for (const auto& parent : meta.parent_ids) {
        if (!find_dataset_locked(parent)) {
            throw_validation("parent_ids", fmt::format("unknown parent dataset {}", parent));
        }
    }
    if (meta.name.empty()) {
        meta.name = meta.dataset_id;
    }
    if (meta.created_at == Instant{}) {
        meta.created_at = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
    }
    meta.record_count = 0;
    Statement seq(db_, "SELECT COALESCE(MAX(seq), 0) + 1 FROM datasets");
    seq.step();
    const long long next_seq = seq.integer(0);

    Statement st(db_, "INSERT INTO datasets(dataset_id, seq, name, kind, parent_ids, created_by_job, record_count, "
                      "created_at) VALUES (?1, ?2, ?3, ?4, ?5, ?6, 0, ?7)");
    st.bind(1, meta.dataset_id)
        .bind(2, next_seq)
        .bind(3, meta.name)
        .bind(4, std::string(to_string(meta.kind)))
        .bind(5, Json(meta.parent_ids).dump())
        .bind(6, meta.created_by_job)
        .bind(7, format_rfc3339(meta.created_at));
    st.run();
    return meta.dataset_id;
}

std::size_t Datastore::append_locked(const Dataset& meta, const std::vector<Record>& records) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto violations = validate_record(records[i]);
        if (!violations.empty()) {
            throw_validation(fmt::format("records[{}]", i),
                             fmt::format("{} ({})", to_string(violations.front().code), violations.front().message));
        }
    }
    Statement ins(db_, "INSERT INTO records(dataset_id, seq, record_id, body) VALUES (?1, ?2, ?3, ?4)");
    long long seq = static_cast<long long>(meta.record_count);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (append_fault_) {
            append_fault_(i);
        }
        ins.reset();
        ins.bind(1, meta.dataset_id).bind(2, seq++).bind(3, records[i].record_id).bind(4, to_json(records[i]).dump());
        try {
            ins.run();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::conflict) {
                throw_validation(fmt::format("records[{}]", i),
                                 fmt::format("duplicate record_id {}", records[i].record_id));
            }
            throw;
        }
    }
    const auto count = meta.record_count + records.size();
    Statement up(db_, "UPDATE datasets SET record_count = ?2 WHERE dataset_id = ?1");
    up.bind(1, meta.dataset_id).bind(2, static_cast<long long>(count));
    up.run();
    return count;
}

std::string Datastore::create_dataset(Dataset meta) {
    require_writable();
    Tx tx(*this);
    auto id = insert_dataset_locked(meta);
    tx.commit();
    return id;
}

std::size_t Datastore::append_records(const std::string& dataset_id, const std::vector<Record>& records) {
    require_writable();
    Tx tx(*this);
    auto meta = find_dataset_locked(dataset_id);
    if (!meta) {
        throw_not_found("dataset " + dataset_id);
    }
    if (records.empty()) {
        return meta->record_count;
    }
    const auto count = append_locked(*meta, records);
    tx.commit();
    return count;
}

std::string Datastore::commit_dataset(Dataset meta, const std::vector<Record>& records) {
    require_writable();
    Tx tx(*this);
    auto id = insert_dataset_locked(meta);
    append_locked(meta, records);
    tx.commit();
    return id;
}

std::optional<Dataset> Datastore::find_dataset(const std::string& dataset_id) const {
    std::lock_guard lock(mutex_);
    return find_dataset_locked(dataset_id);
}

Dataset Datastore::get_dataset(const std::string& dataset_id) const {
    auto d = find_dataset(dataset_id);
    if (!d) {
        throw_not_found("dataset " + dataset_id);
    }
    return *d;
}

Dataset Datastore::resolve_dataset(const std::string& id_or_name) const {
    std::lock_guard lock(mutex_);
    if (auto d = find_dataset_locked(id_or_name)) {
        return *d;
    }
    Statement st(db_, fmt::format("SELECT {} FROM datasets WHERE name = ?1 ORDER BY seq", kDatasetColumns).c_str());
    st.bind(1, id_or_name);
    std::vector<Dataset> matches;
    while (st.step()) {
        matches.push_back(read_dataset_row(st));
    }
    if (matches.empty()) {
        throw_not_found("dataset " + id_or_name);
    }
    if (matches.size() > 1) {
        throw_validation("dataset", fmt::format("name '{}' is ambiguous ({} datasets); use an id", id_or_name,
                                                matches.size()));
    }
    return matches.front();
}

std::vector<Dataset> Datastore::list_datasets(std::size_t offset, std::size_t limit) const {
    std::lock_guard lock(mutex_);
    Statement st(db_,
                 fmt::format("SELECT {} FROM datasets ORDER BY seq LIMIT ?1 OFFSET ?2", kDatasetColumns).c_str());
    st.bind(1, static_cast<long long>(limit)).bind(2, static_cast<long long>(offset));
    std::vector<Dataset> out;
    while (st.step()) {
        out.push_back(read_dataset_row(st));
    }
    return out;
}

std::size_t Datastore::count_datasets() const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT COUNT(*) FROM datasets");
    st.step();
    return static_cast<std::size_t>(st.integer(0));
}

std::vector<Record> Datastore::read_records(const std::string& dataset_id, std::size_t offset,
                                            std::size_t limit) const {
    std::lock_guard lock(mutex_);
    if (!find_dataset_locked(dataset_id)) {
        throw_not_found("dataset " + dataset_id);
    }
    std::vector<Record> out;
    if (limit == 0) {
        return out;
    }
    Statement st(db_, "SELECT body FROM records WHERE dataset_id = ?1 ORDER BY seq LIMIT ?2 OFFSET ?3");
    st.bind(1, dataset_id)
        .bind(2, static_cast<long long>(std::min<std::size_t>(limit, std::size_t{1} << 62)))
        .bind(3, static_cast<long long>(offset));
    while (st.step()) {
        out.push_back(record_from_json(Json::parse(st.text(0))));
    }
    return out;
}

std::vector<Record> Datastore::read_all_records(const std::string& dataset_id) const {
    return read_records(dataset_id, 0, std::size_t{1} << 62);
}

LineageNode Datastore::get_lineage(const std::string& dataset_id) const {
    LineageNode node{get_dataset(dataset_id), {}};
    for (const auto& parent : node.dataset.parent_ids) {
        node.parents.push_back(get_lineage(parent));
    }
    return node;
}

// Jobs -------------------------------------------------------------------

namespace {

class SqliteJobTx final : public JobTx {
public:
    SqliteJobTx(sqlite3* db, std::function<std::string()> next_id) : db_(db), next_id_(std::move(next_id)) {}

    std::optional<Job> find(const std::string& job_id) override {
        Statement st(db_, fmt::format("SELECT {} FROM jobs WHERE job_id = ?1", kJobColumns).c_str());
        st.bind(1, job_id);
        if (!st.step()) {
            return std::nullopt;
        }
        return read_job_row(st);
    }

    std::optional<Job> find_by_idempotency_key(const std::string& key) override {
        Statement st(db_, fmt::format("SELECT {} FROM jobs WHERE idempotency_key = ?1", kJobColumns).c_str());
        st.bind(1, key);
        if (!st.step()) {
            return std::nullopt;
        }
        return read_job_row(st);
    }

    std::optional<Job> oldest_pending(const std::set<JobType>& types) override {
        if (types.empty()) {
            return std::nullopt;
        }
        std::string in;
        for (auto t : types) {
            in += in.empty() ? "'" : ",'";
            in += coord::to_string(t);
            in += "'";
        }
        Statement st(db_, fmt::format("SELECT {} FROM jobs WHERE status = 'pending' AND job_type IN ({}) "
                                      "ORDER BY created_ms, job_id LIMIT 1",
                                      kJobColumns, in)
                              .c_str());
        if (!st.step()) {
            return std::nullopt;
        }
        return read_job_row(st);
    }

    std::vector<Job> expired_leases(Instant now) override {
        Statement st(db_, fmt::format("SELECT {} FROM jobs WHERE status = 'running' AND lease_expires_ms < ?1 "
                                      "ORDER BY created_ms, job_id",
                                      kJobColumns)
                              .c_str());
        st.bind(1, to_ms(now));
        std::vector<Job> out;
        while (st.step()) {
            out.push_back(read_job_row(st));
        }
        return out;
    }

    std::string next_job_id() override { return next_id_(); }

    void insert(const Job& job) override {
        Statement st(db_, fmt::format("INSERT INTO jobs({}) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, "
                                      "?12, ?13, ?14)",
                                      kJobColumns)
                              .c_str());
        bind_job(st, job);
        st.run();
    }

    void update(const Job& job) override {
        Statement st(db_, "UPDATE jobs SET job_type = ?2, payload = ?3, status = ?4, attempts = ?5, "
                          "max_attempts = ?6, worker_id = ?7, lease_expires_ms = ?8, lease_ms = ?9, "
                          "result_ref = ?10, error = ?11, created_ms = ?12, updated_ms = ?13, "
                          "idempotency_key = ?14 WHERE job_id = ?1");
        bind_job(st, job);
        st.run();
        if (sqlite3_changes(db_) != 1) {
            throw_not_found("job " + job.job_id);
        }
    }

private:
    sqlite3* db_;
    std::function<std::string()> next_id_;
};

} // namespace

void Datastore::write_jobs(const std::function<void(JobTx&)>& fn) {
    require_writable();
    Tx tx(*this);
    SqliteJobTx jobs(db_, [this] { return next_id("job", "job"); });
    fn(jobs);
    tx.commit();
}

std::optional<Job> Datastore::find_job(const std::string& job_id) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, fmt::format("SELECT {} FROM jobs WHERE job_id = ?1", kJobColumns).c_str());
    st.bind(1, job_id);
    if (!st.step()) {
        return std::nullopt;
    }
    return read_job_row(st);
}

std::vector<Job> Datastore::list_jobs(const JobFilter& filter, std::size_t offset, std::size_t limit) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, fmt::format("SELECT {} FROM jobs WHERE 1 = 1{} ORDER BY created_ms, job_id LIMIT ?3 OFFSET ?4",
                                  kJobColumns, filter_clause(filter))
                          .c_str());
    bind_filter(st, filter);
    st.bind(3, static_cast<long long>(limit)).bind(4, static_cast<long long>(offset));
    std::vector<Job> out;
    while (st.step()) {
        out.push_back(read_job_row(st));
    }
    return out;
}

std::size_t Datastore::count_jobs(const JobFilter& filter) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, fmt::format("SELECT COUNT(*) FROM jobs WHERE 1 = 1{}", filter_clause(filter)).c_str());
    bind_filter(st, filter);
    st.step();
    return static_cast<std::size_t>(st.integer(0));
}

// Results ----------------------------------------------------------------

std::string Datastore::put_result(const std::string& job_id, const std::string& kind, const Json& body,
                                  std::optional<std::string> ref) {
    require_writable();
    Tx tx(*this);
    const auto id = next_id("result", "res");
    Statement st(db_, "INSERT INTO results(result_id, job_id, kind, ref, body) VALUES (?1, ?2, ?3, ?4, ?5)");
    st.bind(1, id).bind(2, job_id).bind(3, kind).bind(4, ref.value_or(id)).bind(5, body.dump());
    st.run();
    tx.commit();
    return id;
}

std::optional<StoredResult> Datastore::find_result(const std::string& result_id) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT result_id, job_id, kind, ref, body FROM results WHERE result_id = ?1");
    st.bind(1, result_id);
    if (!st.step()) {
        return std::nullopt;
    }
    return StoredResult{st.text(0), st.text(1), st.text(2), st.text(3), Json::parse(st.text(4))};
}

std::optional<StoredResult> Datastore::find_result_for_job(const std::string& job_id,
                                                           const std::string& result_ref) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT result_id, job_id, kind, ref, body FROM results WHERE job_id = ?1 AND ref = ?2 "
                      "ORDER BY result_id DESC LIMIT 1");
    st.bind(1, job_id).bind(2, result_ref);
    if (!st.step()) {
        return std::nullopt;
    }
    return StoredResult{st.text(0), st.text(1), st.text(2), st.text(3), Json::parse(st.text(4))};
}

void Datastore::set_append_fault(std::function<void(std::size_t)> hook) {
    std::lock_guard lock(mutex_);
    append_fault_ = std::move(hook);
}

} // namespace kumpul::store
