#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "conetrap/commands.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  int jobs = 0;
};

void attach_common(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--config", opt.config_path, "run configuration file")->required();
  sub->add_option("--out", opt.out_path, "output path (default: stdout or [output] path)");
  sub->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", opt.jobs, "worker threads for independent sweep points")
      ->check(CLI::PositiveNumber);
}

int write_result(const conetrap::SweepTable& table, const std::string& path,
                 conetrap::TableFormat format) {
  if (path.empty()) {
    conetrap::write_table(table, std::cout, format);
  } else {
    std::ofstream out(path);
    if (!out) {
      conetrap::fail(conetrap::Errc::IoError, "cannot open output file '" + path + "'");
    }
    conetrap::write_table(table, out, format);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  conetrap::init_determinism();

  CLI::App app{"conical-tip singular exponent toolkit"};
  app.set_version_flag("--version", conetrap::kVersion);
  app.require_subcommand(1);
  CliOptions opt;
  attach_common(app.add_subcommand("exponents", "detect black-hole pairs at delta = 0"), opt);
  attach_common(app.add_subcommand("sweep-delta", "track lambda^delta over a dissipation list"),
                opt);
  attach_common(app.add_subcommand("scan-contrast", "scan a contrast grid for pairs"), opt);
  attach_common(app.add_subcommand("flux-check", "energy-flux and coefficient identities"), opt);
  attach_common(app.add_subcommand("validate", "discretization and spectrum self-checks"), opt);
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::string out_path = opt.out_path;
  std::string format_name = opt.format.empty() ? "csv" : opt.format;
  try {
    conetrap::RunConfig cfg = conetrap::load_config(opt.config_path);
    cfg.command = command;
    if (!opt.out_path.empty()) cfg.out_path = opt.out_path;
    if (!opt.format.empty()) cfg.format = opt.format;
    if (const char* env = std::getenv("CONETRAP_JOBS")) {
      const int n = std::atoi(env);
      if (n > 0) cfg.jobs = n;
    } else if (opt.jobs > 0) {
      cfg.jobs = opt.jobs;
    }
    out_path = cfg.out_path;
    format_name = cfg.format;

    const conetrap::CommandResult result = conetrap::run_command(cfg);
    write_result(result.table, cfg.out_path, conetrap::parse_format(cfg.format));
    return result.exit_code;
  } catch (const conetrap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Best-effort artifact carrying the machine-readable error code.
    try {
      conetrap::SweepTable table;
      table.header = {conetrap::kVersion, "command " + command, std::string("error ") + e.what()};
      write_result(table, out_path, conetrap::parse_format(format_name));
    } catch (...) {
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
