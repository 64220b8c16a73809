#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "kornkit_cli/cli.hpp"

namespace kornkit::cli {

using nlohmann::json;

Section::Section(const json& object, std::string path) : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) {
    throw ConfigError(path_.empty() ? "<root>" : path_, "expected a JSON object");
  }
}

std::string Section::key_path(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

bool Section::has(std::string_view key) const { return object_.contains(std::string(key)); }

const json* Section::entry(std::string_view key) {
  used_.emplace(key);
  const auto it = object_.find(std::string(key));
  if (it == object_.end() || it->is_null()) return nullptr;
  return &*it;
}

double Section::number(std::string_view key, double fallback) {
  const json* e = entry(key);
  if (e == nullptr) return fallback;
  if (!e->is_number()) throw ConfigError(key_path(key), "expected a number");
  const double v = e->get<double>();
  if (!std::isfinite(v)) throw ConfigError(key_path(key), "expected a finite number");
  return v;
}

double Section::positive(std::string_view key, double fallback) {
  const double v = number(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key_path(key), "expected a positive number");
  return v;
}

int Section::integer(std::string_view key, int fallback, int lo, int hi) {
  const json* e = entry(key);
  if (e == nullptr) return fallback;
  if (!e->is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
  const auto v = e->get<std::int64_t>();
  if (v < lo || v > hi) {
    throw ConfigError(key_path(key), "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

std::uint64_t Section::seed(std::string_view key, std::uint64_t fallback) {
  const json* e = entry(key);
  if (e == nullptr) return fallback;
  if (e->is_number_unsigned()) return e->get<std::uint64_t>();
  if (e->is_number_integer() && e->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(e->get<std::int64_t>());
  throw ConfigError(key_path(key), "expected a non-negative integer seed");
}

bool Section::flag(std::string_view key, bool fallback) {
  const json* e = entry(key);
  if (e == nullptr) return fallback;
  if (!e->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
  return e->get<bool>();
}

std::string Section::text(std::string_view key, const std::string& fallback) {
  const json* e = entry(key);
  if (e == nullptr) return fallback;
  if (!e->is_string()) throw ConfigError(key_path(key), "expected a string");
  return e->get<std::string>();
}

std::string Section::choice(std::string_view key, const std::string& fallback,
                            const std::vector<std::string>& allowed) {
  std::string v = text(key, fallback);
  for (const auto& a : allowed) {
    if (a == v) return v;
  }
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  throw ConfigError(key_path(key), "unknown value '" + v + "' (expected one of: " + list + ")");
}

std::vector<double> Section::numbers(std::string_view key, const std::vector<double>& fallback) {
  const json* e = entry(key);
  if (e == nullptr) return fallback;
  if (!e->is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : *e) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ConfigError(key_path(key), "expected an array of finite numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::optional<std::string> Section::path(std::string_view key) {
  const json* e = entry(key);
  if (e == nullptr) return std::nullopt;
  if (!e->is_string() || e->get<std::string>().empty()) throw ConfigError(key_path(key), "expected a file path");
  return e->get<std::string>();
}

Section Section::child(std::string_view key) {
  static const json empty = json::object();
  const json* e = entry(key);
  if (e == nullptr) return Section(empty, key_path(key));
  return Section(*e, key_path(key));
}

void Section::finish() const {
  for (const auto& item : object_.items()) {
    if (!used_.contains(item.key())) throw ConfigError(key_path(item.key()), "unknown key");
  }
}

const std::vector<std::pair<std::string, std::string>>& commands() {
  static const std::vector<std::pair<std::string, std::string>> list = {
      {"algebra", "selftest"},     {"fields", "verify-curl"},  {"transport", "propagate"},
      {"transport", "flood"},      {"transport", "counterexample"}, {"korn", "eig"},
      {"korn", "probe"},           {"korn", "rigid"},          {"korn", "gp"},
  };
  return list;
}

RunConfig make_run_config(const std::string& group, const std::string& command, const json& document,
                          const Overrides& overrides, const std::filesystem::path& out_dir,
                          const std::filesystem::path& base_dir) {
  bool known = false;
  for (const auto& [g, c] : commands()) known = known || (g == group && c == command);
  if (!known) throw ConfigError("command", "unknown command '" + group + " " + command + "'");
  if (!document.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");

  RunConfig cfg;
  cfg.group = group;
  cfg.command = command;
  cfg.document = document;
  cfg.out_dir = out_dir;
  cfg.base_dir = base_dir;

  const auto version = document.find("schema_version");
  if (version == document.end()) throw ConfigError("schema_version", "missing schema_version");
  if (!version->is_number_integer() || version->get<std::int64_t>() != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (const auto c = document.find("command"); c != document.end()) {
    if (!c->is_string() || c->get<std::string>() != group + " " + command) {
      throw ConfigError("command", "config is for a different command");
    }
  }

  // Seed and tolerance are validated here and overridden by the flags; the
  // effective values are written back so that the config hash covers them.
  Section root(document, "");
  cfg.seed = overrides.seed ? *overrides.seed : root.seed("seed", 1);
  if (overrides.tolerance) {
    if (!(*overrides.tolerance > 0.0) || !std::isfinite(*overrides.tolerance)) {
      throw ConfigError("tolerance", "--tol must be a positive number");
    }
    cfg.tolerance = overrides.tolerance;
  } else if (root.has("tolerance")) {
    cfg.tolerance = root.positive("tolerance", 1.0);
  }
  cfg.document["seed"] = cfg.seed;
  if (cfg.tolerance) cfg.document["tolerance"] = *cfg.tolerance;
  cfg.document["schema_version"] = kSchemaVersion;
  cfg.document["command"] = group + " " + command;
  return cfg;
}

json load_config_document(const std::optional<std::filesystem::path>& path) {
  if (!path) return json{{"schema_version", kSchemaVersion}};
  std::ifstream in(*path);
  if (!in) throw ConfigError("--config", "cannot open " + path->string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

int report_error(const std::filesystem::path& out_dir, const std::string& kind, const std::string& key,
                 const std::string& message) {
  json err = {{"error", {{"kind", kind}, {"key", key}, {"message", message}}}};
  const std::string text = err.dump(2) + "\n";
  std::cerr << text;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!ec) {
    std::ofstream(out_dir / "error.json") << text;
  }
  return 2;
}

int run(const RunConfig& config) {
  RunResult result = execute(config);
  std::filesystem::create_directories(config.out_dir);
  const std::string stem = config.group + "_" + config.command;
  std::ofstream(config.out_dir / (stem + ".json")) << result.report.dump(2) << "\n";
  for (const auto& t : result.tables) {
    std::ofstream(config.out_dir / (stem + "_" + t.name + ".csv")) << csv_text(t);
  }
  std::cout << stem << ": " << (result.pass ? "pass" : "fail") << "\n";
  return result.pass ? 0 : 1;
}

}  // namespace kornkit::cli
