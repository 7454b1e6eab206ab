// pricedyn: run, analyze and sweep price-dynamics scenarios.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pricedyn/scenario.hpp"

namespace fs = std::filesystem;
using namespace pricedyn;

namespace {

int fail(const char* kind, const std::string& message, int code) {
  nlohmann::json err{{"error", kind}, {"message", message}};
  std::cerr << err.dump() << '\n';
  return code;
}

fs::path resolve(const std::string& path, const fs::path& out_dir) {
  fs::path p(path);
  return p.is_absolute() ? p : out_dir / p;
}

void check_writable(const fs::path& target) {
  const auto dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw ValidationError("output directory '" + dir.string() + "' does not exist");
  }
  if (fs::is_directory(target, ec)) {
    throw ValidationError("output path '" + target.string() + "' is a directory");
  }
}

void write_file(const fs::path& target, const std::string& text) {
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed to write '" + target.string() + "'");
}

int cmd_run(const std::string& file, const fs::path& out_dir, bool quiet) {
  const Scenario scenario = load_scenario(file);
  fs::path csv_path, summary_path;
  if (!scenario.trajectory_csv.empty()) {
    csv_path = resolve(scenario.trajectory_csv, out_dir);
    check_writable(csv_path);
  }
  if (!scenario.summary_json.empty()) {
    summary_path = resolve(scenario.summary_json, out_dir);
    check_writable(summary_path);
  }
  if (!quiet) std::cerr << "running " << scenario.name << '\n';

  const RunOutput out = execute(scenario);
  if (!quiet) {
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  }
  if (!csv_path.empty()) write_file(csv_path, out.trajectory_csv);
  if (!summary_path.empty()) {
    write_file(summary_path, out.summary_json);
  } else {
    std::cout << out.summary_json;
  }
  if (out.numeric_failure) {
    return fail("numeric", "integration blew up; partial outputs written", kExitNumeric);
  }
  if (!quiet) std::cerr << "done\n";
  return kExitOk;
}

int cmd_analyze(const std::string& file) {
  std::cout << analyze(load_scenario(file));
  return kExitOk;
}

int cmd_sweep(const std::string& file, const std::string& param, const std::string& grid_text,
              const std::string& out_file, unsigned threads, bool quiet) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file '" + file + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const auto grid = parse_grid(grid_text);
  if (!out_file.empty()) check_writable(out_file);
  if (!quiet) std::cerr << "sweeping " << param << " over " << grid.size() << " points\n";
  const std::string table = sweep(text.str(), param, grid, threads);
  if (out_file.empty()) {
    std::cout << table;
  } else {
    write_file(out_file, table);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order price dynamics: simulation, diagnostics and mode analysis"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages on stderr");

  std::string file;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Run a scenario and write its declared outputs");
  run->add_option("file", file, "Scenario JSON")->required();
  run->add_option("--out-dir", out_dir, "Base directory for relative output paths");
  run->add_flag("-q,--quiet", quiet, "Suppress progress messages on stderr");

  auto* an = app.add_subcommand("analyze", "Print the closed-form mode report");
  an->add_option("file", file, "Scenario JSON")->required();

  std::string param, grid, sweep_out;
  unsigned threads = 0;
  auto* sw = app.add_subcommand("sweep", "Rerun a scenario over a parameter grid");
  sw->add_option("file", file, "Scenario JSON")->required();
  sw->add_option("--param", param, "Dotted path of a numeric field, e.g. dynamics.gamma")
      ->required();
  sw->add_option("--grid", grid, "Comma separated values")->required();
  sw->add_option("--out", sweep_out, "Write the table here instead of stdout");
  sw->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
  sw->add_flag("-q,--quiet", quiet, "Suppress progress messages on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(file, out_dir, quiet);
    if (*an) return cmd_analyze(file);
    if (*sw) return cmd_sweep(file, param, grid, sweep_out, threads, quiet);
  } catch (const ParseError& e) {
    return fail("parse", e.what(), kExitParse);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), kExitValidation);
  } catch (const NumericError& e) {
    return fail("numeric", e.what(), kExitNumeric);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitFailure);
  }
  return kExitFailure;
}
