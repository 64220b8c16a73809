#include <filesystem>
#include <fstream>
#include <functional>

#include <gtest/gtest.h>

#include "kornkit/error.hpp"
#include "kornkit_cli/cli.hpp"

using namespace kornkit::cli;
using nlohmann::json;

namespace {

std::string config_error_key(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  ADD_FAILURE() << "no ConfigError thrown";
  return {};
}

RunConfig config_for(const std::string& group, const std::string& command, json doc,
                     Overrides o = {}) {
  if (!doc.contains("schema_version")) doc["schema_version"] = kSchemaVersion;
  return make_run_config(group, command, doc, o, ".", ".");
}

}  // namespace

TEST(Fnv1a, KnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(CsvText, HeaderAndRows) {
  const Table t{"x", {"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  EXPECT_EQ(csv_text(t), "a,b\n1,2\n3,4\n");
}

TEST(Section, ReadsAndTracksKeys) {
  const json doc = {{"n", 5}, {"name", "box"}, {"sub", {{"x", 1.5}}}, {"extra", true}};
  Section s(doc, "");
  EXPECT_EQ(s.integer("n", 1, 3, 10), 5);
  EXPECT_EQ(s.text("name", "none"), "box");
  EXPECT_EQ(s.number("missing", 2.0), 2.0);
  Section sub = s.child("sub");
  EXPECT_EQ(sub.number("x", 0.0), 1.5);
  sub.finish();
  EXPECT_EQ(config_error_key([&] { s.finish(); }), "extra");
}

TEST(Section, TypeAndRangeErrorsNameTheKey) {
  const json doc = {{"n", "five"}, {"m", 99}, {"g", {{"side", "up"}}}, {"t", -1.0}};
  Section s(doc, "");
  EXPECT_EQ(config_error_key([&] { s.integer("n", 1, 1, 10); }), "n");
  EXPECT_EQ(config_error_key([&] { s.integer("m", 1, 1, 10); }), "m");
  EXPECT_EQ(config_error_key([&] { s.positive("t", 1.0); }), "t");
  Section g = s.child("g");
  EXPECT_EQ(config_error_key([&] { g.choice("side", "low", {"low", "high"}); }), "g.side");
}

TEST(RunConfig, EnvelopeValidation) {
  EXPECT_EQ(config_error_key([] { config_for("algebra", "selftest", {{"schema_version", 2}}); }),
            "schema_version");
  EXPECT_EQ(config_error_key([] { config_for("algebra", "selftest", {{"command", "korn eig"}}); }),
            "command");
  EXPECT_ANY_THROW(config_for("algebra", "nonsense", json::object()));
  const RunConfig c = config_for("algebra", "selftest", {{"seed", 4}}, Overrides{9, 1e-6});
  EXPECT_EQ(c.seed, 9u);
  ASSERT_TRUE(c.tolerance.has_value());
  EXPECT_EQ(*c.tolerance, 1e-6);
}

TEST(Execute, DeterministicReports) {
  for (const auto& [group, command] :
       std::vector<std::pair<std::string, std::string>>{{"algebra", "selftest"}, {"transport", "counterexample"}}) {
    const RunConfig c = config_for(group, command, json::object());
    const RunResult a = execute(c);
    const RunResult b = execute(c);
    EXPECT_TRUE(a.pass) << group << " " << command;
    EXPECT_EQ(a.report.dump(), b.report.dump());
    EXPECT_EQ(a.report["schema_version"], kSchemaVersion);
    EXPECT_EQ(a.report["config_hash"].get<std::string>().size(), 16u);
    EXPECT_TRUE(a.report.contains("verdict"));
  }
}

TEST(Execute, ConfigHashTracksDocument) {
  const RunResult a = execute(config_for("algebra", "selftest", {{"seed", 1}}));
  const RunResult b = execute(config_for("algebra", "selftest", {{"seed", 2}}));
  EXPECT_NE(a.report["config_hash"], b.report["config_hash"]);
}

TEST(Execute, UnknownCommandKeyRejected) {
  const RunConfig c = config_for("korn", "eig", {{"grid", {{"n", 4}, {"spacing", 0.1}}}});
  EXPECT_EQ(config_error_key([&] { execute(c); }), "grid.spacing");
}

TEST(Execute, ImpossibleToleranceFailsTheVerdict) {
  const RunConfig c = config_for("korn", "rigid", json::object(), Overrides{std::nullopt, 1e-300});
  const RunResult r = execute(c);
  EXPECT_FALSE(r.pass);
}

TEST(Run, WritesReportAndTables) {
  const auto dir = std::filesystem::temp_directory_path() / "kornkit_test_cli_run";
  std::filesystem::remove_all(dir);
  RunConfig c = config_for("transport", "counterexample", json::object());
  c.out_dir = dir;
  EXPECT_EQ(run(c), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "transport_counterexample.json"));
  std::ifstream in(dir / "transport_counterexample.json");
  const json report = json::parse(in);
  EXPECT_EQ(report["verdict"], "pass");
  std::filesystem::remove_all(dir);
}
