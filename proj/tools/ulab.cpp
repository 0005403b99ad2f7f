// Command-line front end for the experiment harness.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ulab/errors.hpp"
#include "ulab/harness.hpp"

namespace h = ulab::harness;

int main(int argc, char** argv) {
  CLI::App app{"Function-field Diophantine approximation experiments"};
  app.footer(h::config_help() + "\nExit codes: 0 ok, 1 usage, 2 claim failed, 3 precision error.\n"
             "ULAB_PRECISION overrides the default Laurent precision floor.");
  app.require_subcommand(1);

  std::string config_path, out;
  std::uint64_t seed = 0;
  int workers = 1;
  for (const char* kind : {"cfrac-stats", "kg", "loglaw", "tail", "sprindzhuk", "ed", "siegel", "selftest"}) {
    auto* sub = app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
    sub->add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : h::Usage;
  }
  const std::string kind = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommands().front();

  try {
    h::ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream text;
      text << f.rdbuf();
      config = h::parse_config(text.str());
      if (config.kind != kind) throw ulab::ParseError("config kind '" + config.kind + "' does not match '" + kind + "'");
    } else {
      config.kind = kind;
    }
    if (sub->count("--seed")) config.seed = seed;
    if (!out.empty()) config.out = out;
    const auto result = h::run(config, config.out, workers);
    std::cout << result.summary << '\n';
    for (const auto& p : result.files) std::cout << "  " << p.string() << '\n';
    return result.exit_code;
  } catch (const ulab::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return h::Usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::Usage;
  }
}
