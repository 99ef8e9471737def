// spillover: graph clustering, assignment, simulation and bucket-level
// analysis for cluster-randomized experiments.
//
// Exit codes: 0 success, 2 usage error, 1 data error.

#include <iostream>
#include <memory>
#include <vector>

#include "options.hpp"
#include "spillover/error.hpp"

int main(int argc, char** argv) {
  using namespace spillover::cli;

  CLI::App app{"Cluster-randomized experiment toolkit", "spillover"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of option values; command-line flags take precedence");

  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(make_gen_graph(app));
  commands.push_back(make_cluster(app));
  commands.push_back(make_metrics(app));
  commands.push_back(make_assign(app));
  commands.push_back(make_simulate(app));
  commands.push_back(make_analyze(app));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    for (auto& command : commands) {
      if (command->app()->parsed()) command->run();
    }
  } catch (const spillover::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
