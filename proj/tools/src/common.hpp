#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kornkit/fields.hpp"
#include "kornkit/korn.hpp"
#include "kornkit_cli/cli.hpp"

namespace kornkit::cli::detail {

struct Context {
  const RunConfig& config;
  Section root;
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<Table> tables;
  bool pass = true;

  explicit Context(const RunConfig& c) : config(c), root(c.document, "") {}

  /// The run tolerance: --tol / "tolerance" when given, else `fallback`.
  double tolerance(const std::string& name, double fallback);
  std::filesystem::path resolve(const std::string& relative) const;
};

GridSpec grid_from(Section& parent, int default_n, int default_dim, int min_dim);
MatrixField p_from(Context& ctx, Section& parent, const GridSpec& grid, const std::string& default_family);
BoundaryMask gamma_from(Section& parent, const GridSpec& grid, const std::string& default_type);

std::string fmt(double v);
nlohmann::json finite_or_string(double v);

void run_algebra_selftest(Context& ctx);
void run_fields_verify_curl(Context& ctx);
void run_transport_propagate(Context& ctx);
void run_transport_flood(Context& ctx);
void run_transport_counterexample(Context& ctx);
void run_korn_eig(Context& ctx);
void run_korn_probe(Context& ctx);
void run_korn_rigid(Context& ctx);
void run_korn_gp(Context& ctx);

}  // namespace kornkit::cli::detail
