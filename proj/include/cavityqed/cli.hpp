#pragma once

// `cavityqed` command-line front end. run_cli is the whole program; main only forwards to it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavityqed/io_formats.hpp"
#include "cavityqed/scenario.hpp"

namespace cavityqed {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_strict = 4 };

struct CommandInvocation {
  std::string subcommand;
  std::string config_path;
  std::string preset;
  std::string out_dir;
  int jobs = 0;
  bool strict = false;
  int verbosity = 0;
};

struct WrittenFiles {
  std::vector<std::string> paths;
};

/// Writes the table in every requested format, the config echo and, for CSV output, a gnuplot script.
inline WrittenFiles write_outputs(const ScenarioConfig& c, const ScenarioOutput& r, const std::string& dir,
                                  std::ostream& err) {
  namespace fs = std::filesystem;
  WrittenFiles w;
  std::string stem = c.outputs.stem;
  if (stem.empty()) stem = c.name.empty() ? to_string(c.scan.kind) : c.name;
  auto path = [&](const std::string& ext) { return (fs::path(dir) / (stem + ext)).string(); };
  bool csv = false;
  for (const auto& f : c.outputs.formats) {
    if (f == "csv") {
      write_table_file(r.table, path(".csv"), TableFormat::csv);
      w.paths.push_back(path(".csv"));
      csv = true;
    } else if (f == "json") {
      write_table_file(r.table, path(".json"), TableFormat::json);
      w.paths.push_back(path(".json"));
    }
  }
  write_text_file(path(".config.json"), serialize_config(c));
  w.paths.push_back(path(".config.json"));
  if (c.outputs.plot) {
    if (!csv) {
      err << "warning: plot script skipped, it reads the csv table which is not among the output formats\n";
    } else {
      try {
        write_text_file(path(".gp"), emit_plot_script(r.table, to_string(c.scan.kind), stem + ".csv"));
        w.paths.push_back(path(".gp"));
      } catch (const std::invalid_argument& e) {
        err << "warning: plot script skipped: " << e.what() << "\n";
      }
    }
  }
  return w;
}

namespace detail {

inline void prepare_out_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError({"output directory '" + dir + "' cannot be created"});
  const auto probe = fs::path(dir) / ".cavityqed-write-test";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError({"output directory '" + dir + "' is not writable"});
  }
  fs::remove(probe, ec);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline int execute(const ScenarioConfig& c, const CommandInvocation& inv, std::ostream& out, std::ostream& err) {
  prepare_out_dir(inv.out_dir);
  const int jobs = inv.jobs > 0 ? inv.jobs : default_jobs();
  const auto result = run_scenario(c, jobs);
  const auto files = write_outputs(c, result, inv.out_dir, err);

  out << "scenario " << (c.name.empty() ? to_string(c.scan.kind) : c.name) << " (" << to_string(c.scan.kind)
      << ", config " << result.table.provenance().config_hash << ")\n";
  for (const auto& s : result.summary) out << "  " << s << "\n";
  if (inv.verbosity > 0) {
    out << "  methods:";
    for (const auto& m : result.table.provenance().methods) out << " " << m;
    out << "\n  accuracy: " << result.table.provenance().accuracy.dump() << "\n";
    for (const auto& f : files.paths) out << "  wrote " << f << "\n";
  }
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  if (inv.strict && !result.warnings.empty()) {
    err << "error: " << result.warnings.size() << " validity warning(s) in strict mode\n";
    return exit_strict;
  }
  return exit_ok;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Cavity-modified vacuum fluctuations, damping rates and level shifts in a concentric resonator", "cavityqed"};
  app.set_version_flag("--version", std::string(version_string));
  app.fallthrough();
  CommandInvocation inv;
  app.add_flag("-v,--verbose", inv.verbosity, "Print methods, accuracy metadata and written files");

  auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("-j,--jobs", inv.jobs, "Worker threads (default: $CAVITYQED_JOBS or hardware concurrency)")
        ->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "Run a scenario from a JSON config file");
  run->add_option("-c,--config", inv.config_path, "Scenario config (JSON)")->required();
  run->add_option("-o,--out", inv.out_dir, "Output directory")->required();
  add_jobs(run);
  run->add_flag("--strict", inv.strict, "Treat validity warnings as errors");

  auto* reproduce = app.add_subcommand("reproduce", "Run a bundled preset");
  reproduce->add_option("preset", inv.preset, "Preset name (see `cavityqed presets`)")->required();
  reproduce->add_option("-o,--out", inv.out_dir, "Output directory")->required();
  add_jobs(reproduce);
  reproduce->add_flag("--strict", inv.strict, "Treat validity warnings as errors");

  std::string filter;
  auto* validate = app.add_subcommand("validate", "Run the invariant checks");
  validate->add_option("-f,--filter", filter, "Only checks whose name contains this text");

  double rho = 0.98;
  int phi_steps = 32;
  auto* airy = app.add_subcommand("airy-check", "Compare closed-form shift kernels with principal-value quadrature");
  airy->add_option("--rho", rho, "Mirror reflectivity")->check(CLI::Range(0.0, 1.0));
  airy->add_option("--phi-steps", phi_steps, "Phases in (-pi/2, pi/2)")->check(CLI::Range(2, 100000));
  airy->add_option("-o,--out", inv.out_dir, "Also write the table here");

  auto* list = app.add_subcommand("presets", "List bundled presets");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (run->parsed()) {
      inv.subcommand = "run";
      const auto config = parse_config(detail::read_file(inv.config_path));
      return detail::execute(config, inv, out, err);
    }
    if (reproduce->parsed()) {
      inv.subcommand = "reproduce";
      const auto p = find_preset(inv.preset);
      if (!p) {
        err << "error: unknown preset '" << inv.preset << "'; available:\n" << list_presets();
        return exit_config;
      }
      return detail::execute(p->config, inv, out, err);
    }
    if (validate->parsed()) {
      int ran = 0, failed = 0;
      for (const auto& check : validation_checks()) {
        if (!filter.empty() && check.name.find(filter) == std::string::npos) continue;
        ++ran;
        const auto r = check.run();
        if (!r.pass) ++failed;
        out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
      }
      if (ran == 0) {
        err << "error: no check matches '" << filter << "'\n";
        return exit_config;
      }
      out << ran - failed << "/" << ran << " checks passed\n";
      return failed ? exit_numerical : exit_ok;
    }
    if (airy->parsed()) {
      ScenarioConfig c;
      c.name = "airy-check";
      c.scan.kind = ScanKind::airy_check;
      const double h = pi / phi_steps;
      c.scan.range = {-pi / 2 + h / 2, pi / 2 - h / 2, phi_steps};
      c.scan.rhos = {rho};
      if (!inv.out_dir.empty()) return detail::execute(c, inv, out, err);
      const auto r = run_scenario(c, inv.jobs > 0 ? inv.jobs : default_jobs());
      for (const auto& s : r.summary) out << s << "\n";
      return exit_ok;
    }
    if (list->parsed() || app.get_subcommands().empty()) {
      out << "presets:\n" << list_presets();
      return exit_ok;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const ApertureCollapseError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
  return exit_ok;
}

}  // namespace cavityqed
