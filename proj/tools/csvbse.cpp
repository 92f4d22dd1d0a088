// csvbse: blind extraction of a moving source under the constant separating
// vector model. Subcommands: simulate | extract | evaluate | attmap.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "csvbse/cli.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::string preset;
};

csvbse::config::Ini load_config(const SubArgs& sub) {
  using csvbse::config::Ini;
  if (!sub.preset.empty()) {
    if (!sub.config_path.empty())
      csvbse::fail(csvbse::ErrorCode::InvalidConfig, "give either a config file or --preset");
    return Ini::parse_text(csvbse::config::preset_text(sub.preset), "preset:" + sub.preset);
  }
  if (sub.config_path.empty())
    csvbse::fail(csvbse::ErrorCode::InvalidConfig, "missing config file (or --preset)");
  return Ini::parse_file(sub.config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind moving-source extraction under the constant separating vector model"};
  app.require_subcommand(1);

  csvbse::cli::GlobalArgs global;
  unsigned seed_flag = 0;
  bool seed_given = false;

  std::map<std::string, SubArgs> subargs;
  for (const std::string name : {"simulate", "extract", "evaluate", "attmap"}) {
    CLI::App* sub = app.add_subcommand(name);
    auto& sa = subargs[name];
    sub->add_option("config", sa.config_path, "configuration file (INI-style sections)");
    sub->add_option("--preset", sa.preset, "bundled preset: room-4x4, grid-move, oracle-csv");
    sub->add_option("--seed", seed_flag, "random seed (overrides [run] seed)")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--threads", global.threads, "worker threads (default 1)");
    sub->add_option("--out-dir", global.out_dir, "artifact directory (default .)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad usage is a config error
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (seed_given) global.seed = seed_flag;

  try {
    const auto ini = load_config(subargs[command]);
    return csvbse::cli::run_command(command, ini, global);
  } catch (const csvbse::Error& e) {
    std::cerr << "csvbse " << command << ": " << e.what() << "\n";
    return csvbse::cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "csvbse " << command << ": unexpected failure: " << e.what() << "\n";
    return 3;
  }
}
