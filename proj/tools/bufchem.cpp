// bufchem <command> --config <path> [--out <dir>] [--format csv|json]

#include <iostream>

#include <CLI11.hpp>

#include "bufchem/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Buffered chemostat equilibrium, stability and design analysis"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out_dir;
  std::string format;
  for (const auto& name : bufchem::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "run configuration (INI)")->required();
    sub->add_option("--out", out_dir, "output directory (stdout when omitted)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  CLI11_PARSE(app, argc, argv);

  bufchem::OutputOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (!format.empty()) opts.format = format;
  const std::string command = app.get_subcommands().front()->get_name();
  return bufchem::run_command(command, config, opts, std::cout, std::cerr);
}
