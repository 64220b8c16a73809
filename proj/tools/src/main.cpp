#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kornkit/error.hpp"
#include "kornkit_cli/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace kornkit::cli;

  CLI::App app{"korn-kit: batch verification experiments for matrix-field calculus, transport and Korn problems"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> groups;
  std::string chosen;
  for (const auto& [group, command] : commands()) {
    CLI::App*& g = groups[group];
    if (g == nullptr) {
      g = app.add_subcommand(group, group + " experiments");
      g->require_subcommand(1);
    }
    CLI::App* leaf = g->add_subcommand(command, group + " " + command);
    leaf->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    leaf->add_option("--out", flags.out, "output directory for reports");
    leaf->add_option("--seed", flags.seed, "seed override");
    leaf->add_option("--tol", flags.tol, "tolerance override");
    leaf->callback([&chosen, group = group, command = command] { chosen = group + " " + command; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return report_error(flags.out, "UsageError", "argv", e.what());
  }

  const auto space = chosen.find(' ');
  const std::string group = chosen.substr(0, space);
  const std::string command = chosen.substr(space + 1);
  try {
    std::optional<std::filesystem::path> config_path;
    if (!flags.config.empty()) config_path = flags.config;
    const nlohmann::json doc = load_config_document(config_path);
    const std::filesystem::path base = config_path ? config_path->parent_path() : std::filesystem::current_path();
    const RunConfig cfg = make_run_config(group, command, doc, Overrides{flags.seed, flags.tol}, flags.out, base);
    return run(cfg);
  } catch (const ConfigError& e) {
    return report_error(flags.out, "ConfigError", e.key(), e.what());
  } catch (const kornkit::Error& e) {
    return report_error(flags.out, std::string(kornkit::to_string(e.kind())), "", e.what());
  } catch (const std::exception& e) {
    return report_error(flags.out, "InternalError", "", e.what());
  }
}
