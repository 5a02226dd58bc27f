#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>
#include <string>
#include <vector>

#include "kumpul/coord/job.hpp"
#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"
#include "kumpul/core/serialize.hpp"
#include "kumpul/store/datastore.hpp"

namespace kumpul::testing {

/// Directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "kumpul-test-XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Timestamp ts(const std::string& rfc3339) {
    return to_seconds(*parse_rfc3339(rfc3339));
}

inline Record make_record(const std::string& id, const std::string& text) {
    Record r;
    r.record_id = id;
    r.source = "test";
    r.text = text;
    r.collected_at = ts("2022-10-01T00:00:00Z");
    return r;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

/// Runs a shell command and captures stdout.
inline CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) {
        return result;
    }
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
        result.output.append(buf, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

/// Key-order-insensitive copy of a document.
inline nlohmann::json canonical(const Json& j) {
    return nlohmann::json::parse(j.dump());
}

/// Store contents with wall-clock and worker-identity fields blanked, in a
/// form that compares equal for two stores driven through the same steps.
inline nlohmann::json snapshot(const store::Datastore& s) {
    nlohmann::json out;
    out["datasets"] = nlohmann::json::array();
    for (const auto& d : s.list_datasets(0, 100000)) {
        auto dj = canonical(to_json(d));
        dj.erase("created_at");
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : s.read_all_records(d.dataset_id)) {
            auto rj = canonical(to_json(r));
            rj.erase("collected_at");
            records.push_back(rj);
        }
        dj["records"] = records;
        out["datasets"].push_back(dj);
    }
    out["jobs"] = nlohmann::json::array();
    for (const auto& job : s.list_jobs({}, 0, 100000)) {
        nlohmann::json jj = {{"job_id", job.job_id},
                             {"job_type", coord::to_string(job.job_type)},
                             {"status", coord::to_string(job.status)},
                             {"attempts", job.attempts},
                             {"payload", canonical(job.payload)},
                             {"result_ref", job.result_ref.value_or("")},
                             {"error", job.error.value_or("")}};
        if (job.result_ref) {
            if (auto res = s.find_result_for_job(job.job_id, *job.result_ref)) {
                auto body = canonical(res->body);
                body.erase("produced_at");
                jj["result"] = {{"result_id", res->result_id}, {"kind", res->kind}, {"ref", res->ref}, {"body", body}};
            }
        }
        out["jobs"].push_back(jj);
    }
    return out;
}

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(KUMPUL_DEFAULT_DATA_DIR) / "fixtures" / name;
}

} // namespace kumpul::testing
