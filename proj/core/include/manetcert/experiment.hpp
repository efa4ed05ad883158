#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manetcert/adversary.hpp"
#include "manetcert/netsim.hpp"
#include "manetcert/protocol.hpp"
#include "manetcert/trust.hpp"

namespace manetcert {

struct ScenarioConfig {
  SimConfig sim;
  int comm_pairs = 5;
  int runs = 10;
  AttackerConfig attacker;
  int known_nodes = 0;  // pre-certified peers per endpoint
  TrustLevel mpktv{0.5};
  TrustParams trust_params;
  ProtocolParams protocol;

  void validate() const;  // throws ConfigError
};

struct RunCounts {
  int valid = 0;
  int corrupted = 0;
  int failed = 0;
  SimTime delay_sum;  // over accepted exchanges only

  int accepted() const { return valid + corrupted; }
  int total() const { return valid + corrupted + failed; }
};

struct MetricsRecord {
  double valid_acceptance_rate = 0.0;
  double corrupted_acceptance_rate = 0.0;
  double failed_rate = 0.0;
  double mean_delay_s = 0.0;  // NaN when no exchange was accepted
  std::vector<RunCounts> per_run;
};

struct SweepSpec {
  enum class Axis { AttackerFraction, Mpktv, KnownNodes };
  Axis axis;
  std::vector<double> values;
  ScenarioConfig fixed;
};

std::optional<SweepSpec::Axis> axis_from_string(std::string_view name);
std::string_view axis_name(SweepSpec::Axis axis);

using SweepResults = std::vector<std::pair<double, MetricsRecord>>;

struct CommPair {
  NodeId source;
  NodeId dest;
};

/// One independent world (seed = f(base seed, run index)): builds nodes and
/// attackers, pre-seeds certifier sets, staggers the exchanges over the
/// first half of the scenario, and classifies each outcome.
struct RunOutcome {
  RunCounts counts;
  std::vector<std::string> trace_lines;
};
RunOutcome run_single(const ScenarioConfig& config, int run_index,
                      bool capture_trace);

/// Pre-certifies `count` honest peers for every communication endpoint
/// (mutual certificates, initial_known trust both ways). Draws nest: the
/// count=5 choice is a prefix of the count=10 choice for the same rng
/// stream. Returns the chosen certifiers per endpoint.
std::map<NodeId, std::vector<NodeId>> seed_known_nodes(
    std::vector<std::unique_ptr<Node>>& nodes,
    const std::vector<CommPair>& pairs, int count, const TrustParams& params,
    SimTime now, Rng& rng);

MetricsRecord run_scenario(const ScenarioConfig& config,
                           std::vector<std::string>* trace_lines = nullptr);

SweepResults run_sweep(const SweepSpec& spec,
                       std::vector<std::string>* trace_lines = nullptr);

/// CSV with the fixed header
///   axis,valid_rate,corrupted_rate,failed_rate,mean_delay_s,runs,seed
/// and fixed decimal formatting, so identical inputs yield identical bytes.
void emit_csv(const SweepResults& results, int runs, uint64_t seed,
              std::ostream& out);
void emit_csv(const SweepResults& results, int runs, uint64_t seed,
              const std::filesystem::path& dest);

/// The experiment baseline: 100 nodes on 1500 m x 1500 m for 120 s, five
/// communications, ten runs.
ScenarioConfig default_scenario();

enum class Figure { Fig3, Fig4, Fig5, Fig6a, Fig6b };
std::optional<Figure> figure_from_string(std::string_view name);

/// Canned sweeps for each figure of the evaluation; writes one or more CSV
/// files into out_dir and returns their paths.
std::vector<std::filesystem::path> run_figure(
    Figure figure, const std::filesystem::path& out_dir,
    std::vector<std::string>* trace_lines = nullptr);

/// Flat `key = value` scenario file ('#' comments). Unknown keys are
/// configuration errors; unreadable files are I/O errors.
ScenarioConfig load_scenario_file(const std::filesystem::path& path);
void apply_scenario_setting(ScenarioConfig& config, std::string_view key,
                            std::string_view value);

}  // namespace manetcert
