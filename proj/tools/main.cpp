// Command-line front end: single scenarios, parameter sweeps, and canned
// figure reproductions with CSV output.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "manetcert/errors.hpp"
#include "manetcert/experiment.hpp"

namespace {

using namespace manetcert;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

void write_trace(const std::vector<std::string>& lines,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path));
  for (const auto& line : lines) out << line << '\n';
  out.flush();
  if (!out) throw IoError(fmt::format("write failed for {}", path));
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::string token;
  std::stringstream in(csv);
  while (std::getline(in, token, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("invalid sweep value '{}'", token));
    }
  }
  if (values.empty()) throw ConfigError("no sweep values given");
  return values;
}

int run_simulate(const std::string& config_path,
                 std::optional<uint64_t> seed, const std::string& out_path,
                 const std::string& trace_path) {
  ScenarioConfig config = load_scenario_file(config_path);
  if (seed) config.sim.rng_seed = *seed;

  std::vector<std::string> trace;
  MetricsRecord record =
      run_scenario(config, trace_path.empty() ? nullptr : &trace);
  SweepResults results{{0.0, record}};
  if (out_path.empty()) {
    emit_csv(results, config.runs, config.sim.rng_seed, std::cout);
  } else {
    emit_csv(results, config.runs, config.sim.rng_seed,
             std::filesystem::path(out_path));
  }
  if (!trace_path.empty()) write_trace(trace, trace_path);
  return kExitOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& axis_name_,
                  const std::string& values_csv, std::optional<uint64_t> seed,
                  const std::string& out_path, const std::string& trace_path) {
  auto axis = axis_from_string(axis_name_);
  if (!axis)
    throw ConfigError(fmt::format(
        "unknown axis '{}' (expected attacker_fraction|mpktv|known_nodes)",
        axis_name_));
  SweepSpec spec{*axis, parse_values(values_csv),
                 load_scenario_file(config_path)};
  if (seed) spec.fixed.sim.rng_seed = *seed;

  std::vector<std::string> trace;
  SweepResults results =
      run_sweep(spec, trace_path.empty() ? nullptr : &trace);
  if (out_path.empty()) {
    emit_csv(results, spec.fixed.runs, spec.fixed.sim.rng_seed, std::cout);
  } else {
    emit_csv(results, spec.fixed.runs, spec.fixed.sim.rng_seed,
             std::filesystem::path(out_path));
  }
  if (!trace_path.empty()) write_trace(trace, trace_path);
  return kExitOk;
}

int run_repro(const std::string& figure_name, const std::string& out_dir,
              const std::string& trace_path) {
  auto figure = figure_from_string(figure_name);
  if (!figure)
    throw ConfigError(fmt::format(
        "unknown figure '{}' (expected 3|4|5|6a|6b)", figure_name));
  std::vector<std::string> trace;
  auto files = run_figure(*figure, out_dir,
                          trace_path.empty() ? nullptr : &trace);
  for (const auto& file : files) std::cout << file.string() << '\n';
  if (!trace_path.empty()) write_trace(trace, trace_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-path certification protocol simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, trace_path, axis, values, figure;
  std::optional<uint64_t> seed;

  CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario");
  simulate->add_option("--config", config_path, "scenario file")->required();
  simulate->add_option("--seed", seed, "override the base seed");
  simulate->add_option("--out", out_path, "CSV destination (default stdout)");
  simulate->add_option("--trace", trace_path, "dump the event trace here");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter axis");
  sweep->add_option("--axis", axis, "attacker_fraction|mpktv|known_nodes")
      ->required();
  sweep->add_option("--values", values, "comma-separated axis values")
      ->required();
  sweep->add_option("--config", config_path, "scenario file")->required();
  sweep->add_option("--out", out_path, "CSV destination (default stdout)");
  sweep->add_option("--seed", seed, "override the base seed");
  sweep->add_option("--trace", trace_path, "dump the event trace here");

  CLI::App* repro =
      app.add_subcommand("repro", "Reproduce a canned experiment figure");
  repro->add_option("--figure", figure, "3|4|5|6a|6b")->required();
  repro->add_option("--out", out_path, "output directory")->required();
  repro->add_option("--trace", trace_path, "dump the event trace here");

  try {
    app.parse(argc, argv);
    if (simulate->parsed())
      return run_simulate(config_path, seed, out_path, trace_path);
    if (sweep->parsed())
      return run_sweep_cmd(config_path, axis, values, seed, out_path,
                           trace_path);
    return run_repro(figure, out_path, trace_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
