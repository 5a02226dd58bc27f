#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kumpul/collect/spec.hpp"
#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"

namespace kumpul::store {
class Datastore;
}

namespace kumpul::collect {

struct SkippedItem {
    std::string ref;    // "line 4", "item 2", ...
    std::string reason;
};

struct CollectContext {
    Timestamp collected_at{};
    /// Base for relative file paths; empty means the working directory.
    std::filesystem::path base_dir;
};

/// Everything a connector produced: valid records in source order plus the
/// items it had to skip.
struct CollectOutput {
    std::vector<Record> records;
    std::vector<SkippedItem> skipped;
};

class Connector {
public:
    virtual ~Connector() = default;
    /// Catalog entry for GET /sources: {kind, description, params: [...]}.
    virtual Json describe() const = 0;
    /// Throws Error(validation) when required params are missing or bad.
    virtual void validate(const ConnectorSpec& spec) const = 0;
    virtual CollectOutput collect(const ConnectorSpec& spec, const CollectContext& ctx) const = 0;
};

using ConnectorFactory = std::function<std::unique_ptr<Connector>()>;

class ConnectorRegistry {
public:
    /// Throws Error(conflict) when the kind is taken.
    void register_connector(const std::string& kind, ConnectorFactory factory);
    /// Throws Error(validation) for an unknown kind.
    std::unique_ptr<Connector> create(const std::string& kind) const;
    bool contains(const std::string& kind) const;
    std::vector<std::string> kinds() const;
    Json catalog() const;

    /// Registers file, http_feed and synthetic.
    void add_builtins();

    /// Process-wide registry, preloaded with the built-ins.
    static ConnectorRegistry& global();

private:
    mutable std::mutex mutex_;
    std::map<std::string, ConnectorFactory> factories_;
};

void register_connector(const std::string& kind, ConnectorFactory factory);

/// Parses and validates a collect payload against the registry.
ConnectorSpec validate_collect_payload(const Json& payload, const ConnectorRegistry& registry = ConnectorRegistry::global());

struct CollectionResult {
    std::string dataset_id;
    std::size_t count = 0;
    std::size_t skipped = 0;
    /// Valid items outside the spec's keywords or date range.
    std::size_t filtered = 0;
    std::vector<SkippedItem> skipped_items; // first few, for the report
};

Json to_json(const CollectionResult& r);

/// Default share of invalid items above which a collection aborts.
inline constexpr double kMaxSkipFraction = 0.5;

/// Runs the connector, applies the spec's keyword/date narrowing and stores
/// a raw dataset. Aborts with Error(validation) when more than
/// params["max_skip_fraction"] (default 0.5) of the items were invalid.
CollectionResult run_collection(store::Datastore& store, const ConnectorSpec& spec, const CollectContext& ctx,
                                const std::optional<std::string>& job_id = std::nullopt,
                                const ConnectorRegistry& registry = ConnectorRegistry::global());

// Built-in connectors ---------------------------------------------------------

/// params: path, format (jsonl | csv), optional max_skip_fraction.
class FileConnector final : public Connector {
public:
    Json describe() const override;
    void validate(const ConnectorSpec& spec) const override;
    CollectOutput collect(const ConnectorSpec& spec, const CollectContext& ctx) const override;
};

/// params: url (http), optional timeout_secs (default 30). The endpoint must
/// answer GET with a JSON array of objects.
class HttpFeedConnector final : public Connector {
public:
    Json describe() const override;
    void validate(const ConnectorSpec& spec) const override;
    CollectOutput collect(const ConnectorSpec& spec, const CollectContext& ctx) const override;
};

/// params: total, seed and either *_fraction or *_count per noise label, or
/// manifest_path pointing at a manifest JSON file.
class SyntheticConnector final : public Connector {
public:
    Json describe() const override;
    void validate(const ConnectorSpec& spec) const override;
    CollectOutput collect(const ConnectorSpec& spec, const CollectContext& ctx) const override;
};

} // namespace kumpul::collect
