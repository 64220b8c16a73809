#pragma once

// Batch front end: a validated JSON run configuration, the experiment
// dispatcher, and the report writer behind the korn-kit executable.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace kornkit::cli {

inline constexpr int kSchemaVersion = 1;

/// A configuration problem; `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Read-only view of one JSON object that remembers which keys were read,
/// so that leftovers can be reported as unknown.
class Section {
 public:
  Section(const nlohmann::json& object, std::string path);

  bool has(std::string_view key) const;
  double number(std::string_view key, double fallback);
  double positive(std::string_view key, double fallback);
  int integer(std::string_view key, int fallback, int lo, int hi);
  std::uint64_t seed(std::string_view key, std::uint64_t fallback);
  bool flag(std::string_view key, bool fallback);
  std::string text(std::string_view key, const std::string& fallback);
  std::string choice(std::string_view key, const std::string& fallback,
                     const std::vector<std::string>& allowed);
  std::vector<double> numbers(std::string_view key, const std::vector<double>& fallback);
  std::optional<std::string> path(std::string_view key);
  Section child(std::string_view key);

  std::string key_path(std::string_view key) const;
  /// Throws ConfigError naming the first key that was never read.
  void finish() const;

 private:
  const nlohmann::json* entry(std::string_view key);

  const nlohmann::json& object_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
};

struct RunConfig {
  std::string group;
  std::string command;
  nlohmann::json document = nlohmann::json::object();
  std::filesystem::path out_dir = ".";
  /// Relative field paths in the document resolve against this directory.
  std::filesystem::path base_dir = ".";
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
};

/// Known "group command" pairs.
const std::vector<std::pair<std::string, std::string>>& commands();

/// Validates the envelope (schema_version, seed, tolerance) and applies the
/// command-line overrides. Command-specific keys are checked by execute().
RunConfig make_run_config(const std::string& group, const std::string& command,
                          const nlohmann::json& document, const Overrides& overrides,
                          const std::filesystem::path& out_dir,
                          const std::filesystem::path& base_dir);

/// Parses a config file (missing path: empty document with the current
/// schema version).
nlohmann::json load_config_document(const std::optional<std::filesystem::path>& path);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunResult {
  bool pass = false;
  nlohmann::json report;
  std::vector<Table> tables;
};

/// Runs the experiment without touching the file system (except for
/// reading input fields and, when requested, writing output fields).
RunResult execute(const RunConfig& config);

/// execute() plus report files; returns the process exit code (0 pass,
/// 1 verdict failure, 2 configuration or input error).
int run(const RunConfig& config);

/// Writes error.json in out_dir (best effort) and prints it to stderr.
int report_error(const std::filesystem::path& out_dir, const std::string& kind,
                 const std::string& key, const std::string& message);

std::uint64_t fnv1a(std::string_view bytes);
std::string format_double(double v);
std::string csv_text(const Table& table);

}  // namespace kornkit::cli
