#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"frontlab: periodic two-species reaction-diffusion fronts"};
  app.require_subcommand(1);
  frontlab::cli::RunOptions options;
  for (const auto& name : frontlab::cli::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config, "JSON experiment config")->required();
    sub->add_option("--out", options.out_prefix, "output path prefix");
    sub->add_option("--jobs", options.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", options.verbose, "progress on stderr");
    sub->callback([&options, name] { options.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : frontlab::cli::exit_config;
  }
  return frontlab::cli::run(options, std::cout, std::cerr);
}
