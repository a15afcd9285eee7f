#pragma once

// Task orchestration: each task reads a RunConfig, writes its CSV tables
// atomically into the output directory and finishes with a JSON manifest.
// CSV tables open with '#' lines that carry the manifest hash; the rest is
// a header row plus purely numeric rows.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccmol/config.hpp"

namespace ccmol {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Task { channels, bound_states, excited, tdm, polarizability, validate_curves };
Task parse_task(const std::string& name);  ///< CLI spelling, e.g. "bound-states"
std::string task_name(Task t);

/// Failure inside a compute module, tagged with the task.
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input files that load but fail validation (validate-curves).
class InvalidInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::filesystem::path out_dir = "ccmol_out";
    unsigned threads = 1;
    bool strict = false;  ///< solver warnings become compute errors
    bool echo = true;     ///< print tables and file names to stdout
};

/// --out-dir when given, else $CCMOL_OUT_DIR, else ./ccmol_out.
std::filesystem::path resolve_out_dir(const std::string& flag_value);

struct OutputRecord {
    std::filesystem::path path;
    std::string sha256;
    std::size_t rows = 0;
};

struct RunManifest {
    std::string tool = "ccmol";
    std::string version = kToolVersion;
    std::string task;
    std::string config_source;
    std::string config_hash;
    std::string manifest_hash;  ///< config hash + task + version + input checksums; excludes timestamps
    std::string started, finished;
    std::vector<std::pair<std::filesystem::path, std::string>> inputs;
    std::vector<OutputRecord> outputs;
    std::vector<std::string> warnings;
    std::string status = "ok";  ///< ok | no_states
    nlohmann::json config;

    nlohmann::json to_json() const;
};

/// Runs one task. Throws ComputeError (with task context) or
/// InvalidInputError; the manifest is written only on success.
RunManifest run(const RunConfig& config, Task task, const RunOptions& options);

}  // namespace ccmol
