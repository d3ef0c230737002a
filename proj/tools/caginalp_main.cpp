// Command-line front end: one subcommand per mode, configuration from a file.

#include <iostream>

#include "CLI11.hpp"
#include "caginalp/cli.hpp"
#include "caginalp/errors.hpp"

namespace cl = caginalp::cli;

int main(int argc, char** argv) {
  CLI::App app{"Phase-field solidification solver (Caginalp-type model with entropy interpolant)"};
  app.footer(cl::config_reference());
  app.require_subcommand(1);

  std::string config;
  cl::CommandOptions opt;
  std::string out_dir = "out";
  bool print_config = false;

  const std::pair<const char*, cl::Mode> modes[] = {
      {"run", cl::Mode::run},           {"profile", cl::Mode::profile},
      {"sweep", cl::Mode::sweep},       {"galerkin", cl::Mode::galerkin},
      {"stefan-compare", cl::Mode::stefan_compare}, {"diagnose", cl::Mode::diagnose}};
  std::vector<std::pair<CLI::App*, cl::Mode>> subs;
  for (const auto& [name, mode] : modes) {
    CLI::App* s = app.add_subcommand(name, std::string("mode ") + name);
    s->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
    s->add_option("--out", out_dir, "output directory")->capture_default_str();
    s->add_option("--jobs", opt.jobs, "worker threads for sweeps")->capture_default_str()
        ->check(CLI::PositiveNumber);
    s->add_flag("--seedless", opt.seedless, "execute twice and require identical manifests");
    s->add_flag("--print-config", print_config, "print the resolved configuration and exit");
    subs.emplace_back(s, mode);
  }
  CLI11_PARSE(app, argc, argv);

  cl::RunConfig cfg;
  try {
    cfg = cl::parse_config(config);
  } catch (const caginalp::ConfigError& e) {
    std::cerr << "error class=config code=" << cl::exit_config << " message=\"" << config << ": "
              << e.what() << "\"\n";
    return cl::exit_config;
  }
  for (const auto& [s, mode] : subs)
    if (s->parsed()) cfg.mode = mode;
  if (print_config) {
    std::cout << cl::emit_config(cfg);
    return cl::exit_ok;
  }
  opt.out_dir = out_dir;
  return cl::run_command(cfg, opt, std::cout, std::cerr);
}
