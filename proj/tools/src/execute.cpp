#include <cmath>
#include <cstdio>

#include "common.hpp"
#include "kornkit/error.hpp"
#include "kornkit/field_io.hpp"

namespace kornkit::cli {

namespace detail {

double Context::tolerance(const std::string& name, double fallback) {
  const double t = config.tolerance ? *config.tolerance : fallback;
  tolerances[name] = t;
  return t;
}

std::filesystem::path Context::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  return p.is_absolute() ? p : config.base_dir / p;
}

std::string fmt(double v) { return format_double(v); }

nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

GridSpec grid_from(Section& parent, int default_n, int default_dim, int min_dim) {
  Section s = parent.child("grid");
  const int dim = s.integer("dim", default_dim, min_dim, 3);
  const int n = s.integer("n", default_n, 3, 1 << 20);
  const double length = s.positive("length", 1.0);
  const double origin = s.number("origin", 0.0);
  s.finish();
  try {
    return GridSpec::cube(dim, n, length, origin);
  } catch (const Error& e) {
    throw ConfigError(s.key_path("n"), e.what());
  }
}

MatrixField p_from(Context& ctx, Section& parent, const GridSpec& grid, const std::string& default_family) {
  Section s = parent.child("p");
  if (auto file = s.path("file")) {
    s.finish();
    MatrixField p = load_matrix_field(ctx.resolve(*file));
    if (!(p.grid() == grid)) throw ConfigError(s.key_path("file"), "P field grid does not match the configured grid");
    return p;
  }
  const std::string family = s.choice("family", default_family, {"identity", "rotation-valued", "graded-roughness"});
  PFamilyParams params;
  params.amplitude = s.number("amplitude", params.amplitude);
  params.exponent = s.number("exponent", params.exponent);
  params.scale = s.positive("scale", params.scale);
  params.seed = s.seed("seed", ctx.config.seed);
  s.finish();
  return make_p_family(parse_p_family(family), grid, params);
}

BoundaryMask gamma_from(Section& parent, const GridSpec& grid, const std::string& default_type) {
  Section s = parent.child("gamma");
  const std::string type = s.choice("type", default_type, {"none", "face"});
  const int axis = s.integer("axis", 0, 0, 2);
  const std::string side = s.choice("side", "low", {"low", "high"});
  s.finish();
  if (type == "none") return BoundaryMask(grid.point_count(), 0);
  return face_mask(grid, axis, side == "low");
}

}  // namespace detail

RunResult execute(const RunConfig& config) {
  detail::Context ctx(config);
  ctx.root.seed("seed", 1);
  ctx.root.number("tolerance", 0.0);
  ctx.root.integer("schema_version", kSchemaVersion, kSchemaVersion, kSchemaVersion);
  ctx.root.text("command", "");

  const std::string name = config.group + " " + config.command;
  if (name == "algebra selftest") detail::run_algebra_selftest(ctx);
  else if (name == "fields verify-curl") detail::run_fields_verify_curl(ctx);
  else if (name == "transport propagate") detail::run_transport_propagate(ctx);
  else if (name == "transport flood") detail::run_transport_flood(ctx);
  else if (name == "transport counterexample") detail::run_transport_counterexample(ctx);
  else if (name == "korn eig") detail::run_korn_eig(ctx);
  else if (name == "korn probe") detail::run_korn_probe(ctx);
  else if (name == "korn rigid") detail::run_korn_rigid(ctx);
  else if (name == "korn gp") detail::run_korn_gp(ctx);
  else throw ConfigError("command", "unknown command '" + name + "'");
  ctx.root.finish();

  const std::string canonical = config.document.dump();
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));

  RunResult out;
  out.pass = ctx.pass;
  out.report = {
      {"schema_version", kSchemaVersion},
      {"command", name},
      {"config_hash", std::string(hash)},
      {"config", config.document},
      {"seed", config.seed},
      {"tolerances", ctx.tolerances},
      {"results", ctx.results},
      {"verdict", ctx.pass ? "pass" : "fail"},
  };
  out.tables = std::move(ctx.tables);
  return out;
}

}  // namespace kornkit::cli
