#include "manetcert/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "manetcert/errors.hpp"

namespace manetcert {

namespace {

constexpr uint64_t kRunSalt = 0x72756e5f73616c74ULL;
constexpr uint64_t kSetupSalt = 0x73657475705f3031ULL;
constexpr uint64_t kKeySalt = 0x6b65795f73616c74ULL;

uint64_t run_seed_for(const ScenarioConfig& config, int run_index) {
  return mix_seed(config.sim.rng_seed, kRunSalt + run_index);
}

}  // namespace

void ScenarioConfig::validate() const {
  sim.validate();
  attacker.validate();
  trust_params.validate();
  protocol.validate();
  if (comm_pairs < 1) throw ConfigError("comm_pairs must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (2 * comm_pairs > sim.node_count)
    throw ConfigError("node_count too small for distinct communication pairs");
  if (known_nodes < 0) throw ConfigError("known_nodes must be >= 0");
  if (known_nodes >= sim.node_count)
    throw ConfigError("known_nodes must be below node_count");
  int attackers =
      static_cast<int>(std::llround(attacker.fraction * sim.node_count));
  if (known_nodes > sim.node_count - attackers - 2)
    throw ConfigError("known_nodes exceeds available honest nodes");
}

std::map<NodeId, std::vector<NodeId>> seed_known_nodes(
    std::vector<std::unique_ptr<Node>>& nodes,
    const std::vector<CommPair>& pairs, int count, const TrustParams& params,
    SimTime now, Rng& rng) {
  std::map<NodeId, std::vector<NodeId>> chosen;
  for (const CommPair& pair : pairs) {
    for (NodeId endpoint : {pair.source, pair.dest}) {
      std::vector<NodeId> eligible;
      for (size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i]) continue;  // attacker slot: never a safe certifier
        NodeId id(static_cast<uint32_t>(i));
        if (id == pair.source || id == pair.dest) continue;
        eligible.push_back(id);
      }
      // Full shuffle regardless of count, so smaller counts are prefixes of
      // larger ones under the same rng stream.
      rng.shuffle(eligible);
      int take = std::min<int>(count, static_cast<int>(eligible.size()));
      std::vector<NodeId>& picks = chosen[endpoint];
      picks.assign(eligible.begin(), eligible.begin() + take);
      for (NodeId certifier : picks)
        install_mutual_certification(*nodes[endpoint.value()],
                                     *nodes[certifier.value()], now, params);
    }
  }
  return chosen;
}

RunOutcome run_single(const ScenarioConfig& config, int run_index,
                      bool capture_trace) {
  uint64_t run_seed = run_seed_for(config, run_index);
  SimConfig sim = config.sim;
  sim.rng_seed = run_seed;

  SimWorld world(sim);
  world.trace().set_enabled(capture_trace);

  Rng setup(mix_seed(run_seed, kSetupSalt));

  // Communication pairs: 2 * comm_pairs distinct endpoints.
  std::vector<NodeId> all_ids;
  for (int i = 0; i < sim.node_count; ++i)
    all_ids.push_back(NodeId(static_cast<uint32_t>(i)));
  setup.shuffle(all_ids);
  std::vector<CommPair> pairs;
  std::set<NodeId> endpoints;
  for (int i = 0; i < config.comm_pairs; ++i) {
    CommPair pair{all_ids[2 * i], all_ids[2 * i + 1]};
    pairs.push_back(pair);
    endpoints.insert(pair.source);
    endpoints.insert(pair.dest);
  }

  std::vector<NodeId> attacker_ids = select_attackers(
      run_seed, config.attacker.fraction, sim.node_count, endpoints);
  std::set<NodeId> attacker_set(attacker_ids.begin(), attacker_ids.end());

  TrustParams trust = config.trust_params;
  trust.mpktv = config.mpktv;

  std::vector<std::unique_ptr<Node>> nodes(sim.node_count);
  std::vector<std::unique_ptr<Attacker>> attackers;
  auto shared_spurious = std::make_shared<SharedSpuriousMap>();
  for (int i = 0; i < sim.node_count; ++i) {
    NodeId id(static_cast<uint32_t>(i));
    KeyPair keys = generate_keypair(mix_seed(run_seed, kKeySalt + i));
    if (attacker_set.contains(id)) {
      attackers.push_back(std::make_unique<Attacker>(
          id, keys, config.attacker, run_seed, shared_spurious,
          config.protocol.reply_paths));
      attackers.back()->attach(world);
    } else {
      nodes[i] = std::make_unique<Node>(id, keys, config.protocol, trust);
      nodes[i]->attach(world);
    }
  }

  seed_known_nodes(nodes, pairs, config.known_nodes, trust, world.now(),
                   setup);

  // Exchanges staggered evenly across the first half of the scenario.
  SimTime half = SimTime::from_micros(world.duration().micros() / 2);
  for (size_t i = 0; i < pairs.size(); ++i) {
    SimTime at = SimTime::from_micros(half.micros() * (int64_t)(i + 1) /
                                      (int64_t)(pairs.size() + 1));
    const CommPair& pair = pairs[i];
    world.schedule(at, [pair, &nodes, &config](SimWorld& w) {
      nodes[pair.source.value()]->start_exchange(
          w, pair.dest, nodes[pair.source.value()]->trust_params().mpktv,
          config.protocol.initial_ttl);
    });
  }

  world.run_all();

  RunOutcome outcome;
  for (const CommPair& pair : pairs) {
    const ExchangeState* ex =
        nodes[pair.source.value()]->exchange_for(pair.dest);
    if (!ex || ex->status != ExchangeStatus::Accepted) {
      ++outcome.counts.failed;
      continue;
    }
    if (ex->accepted_key == nodes[pair.dest.value()]->public_key()) {
      ++outcome.counts.valid;
    } else {
      ++outcome.counts.corrupted;
    }
    outcome.counts.delay_sum += ex->delay;
  }

  // Raw per-run counts land in the trace so run-to-run variance stays
  // recoverable from the averaged CSV output.
  world.trace().emit(
      world.now(), "run_counts",
      fmt::format("valid={} corrupted={} failed={} delay_us={}",
                  outcome.counts.valid, outcome.counts.corrupted,
                  outcome.counts.failed, outcome.counts.delay_sum.micros()));

  if (capture_trace) outcome.trace_lines = world.trace().lines();
  return outcome;
}

MetricsRecord run_scenario(const ScenarioConfig& config,
                           std::vector<std::string>* trace_lines) {
  config.validate();
  const int runs = config.runs;
  std::vector<RunOutcome> outcomes(runs);
  bool capture = trace_lines != nullptr;

  int workers = std::min<int>(
      runs, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<int> next{0};
  std::vector<std::future<void>> tasks;
  tasks.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&]() {
      for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1))
        outcomes[i] = run_single(config, i, capture);
    }));
  }
  for (auto& task : tasks) task.get();

  MetricsRecord record;
  int64_t delay_total_us = 0;
  int accepted_total = 0;
  for (int i = 0; i < runs; ++i) {
    const RunCounts& counts = outcomes[i].counts;
    record.per_run.push_back(counts);
    record.valid_acceptance_rate +=
        static_cast<double>(counts.valid) / config.comm_pairs;
    record.corrupted_acceptance_rate +=
        static_cast<double>(counts.corrupted) / config.comm_pairs;
    record.failed_rate +=
        static_cast<double>(counts.failed) / config.comm_pairs;
    delay_total_us += counts.delay_sum.micros();
    accepted_total += counts.accepted();
    if (capture) {
      trace_lines->push_back(
          fmt::format("0.000000 run_start run={} seed={}", i,
                      run_seed_for(config, i)));
      trace_lines->insert(trace_lines->end(), outcomes[i].trace_lines.begin(),
                          outcomes[i].trace_lines.end());
    }
  }
  record.valid_acceptance_rate /= runs;
  record.corrupted_acceptance_rate /= runs;
  record.failed_rate /= runs;
  record.mean_delay_s =
      accepted_total > 0
          ? (static_cast<double>(delay_total_us) / 1e6) / accepted_total
          : std::numeric_limits<double>::quiet_NaN();
  return record;
}

std::optional<SweepSpec::Axis> axis_from_string(std::string_view name) {
  if (name == "attacker_fraction") return SweepSpec::Axis::AttackerFraction;
  if (name == "mpktv") return SweepSpec::Axis::Mpktv;
  if (name == "known_nodes") return SweepSpec::Axis::KnownNodes;
  return std::nullopt;
}

std::string_view axis_name(SweepSpec::Axis axis) {
  switch (axis) {
    case SweepSpec::Axis::AttackerFraction:
      return "attacker_fraction";
    case SweepSpec::Axis::Mpktv:
      return "mpktv";
    case SweepSpec::Axis::KnownNodes:
      return "known_nodes";
  }
  return "?";
}

SweepResults run_sweep(const SweepSpec& spec,
                       std::vector<std::string>* trace_lines) {
  if (spec.values.empty()) throw ConfigError("sweep values must be nonempty");
  SweepResults results;
  for (double value : spec.values) {
    ScenarioConfig config = spec.fixed;
    switch (spec.axis) {
      case SweepSpec::Axis::AttackerFraction:
        config.attacker.fraction = value;
        break;
      case SweepSpec::Axis::Mpktv:
        config.mpktv = TrustLevel(value);
        break;
      case SweepSpec::Axis::KnownNodes:
        config.known_nodes = static_cast<int>(std::llround(value));
        break;
    }
    if (trace_lines)
      trace_lines->push_back(fmt::format("0.000000 sweep_point axis={} value={:g}",
                                         axis_name(spec.axis), value));
    results.emplace_back(value, run_scenario(config, trace_lines));
  }
  return results;
}

void emit_csv(const SweepResults& results, int runs, uint64_t seed,
              std::ostream& out) {
  if (results.empty())
    throw std::invalid_argument("emit_csv: no results");
  out << "axis,valid_rate,corrupted_rate,failed_rate,mean_delay_s,runs,seed\n";
  for (const auto& [axis, record] : results) {
    out << fmt::format("{:g},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", axis,
                       record.valid_acceptance_rate,
                       record.corrupted_acceptance_rate, record.failed_rate,
                       record.mean_delay_s, runs, seed);
  }
}

void emit_csv(const SweepResults& results, int runs, uint64_t seed,
              const std::filesystem::path& dest) {
  if (results.empty())
    throw std::invalid_argument("emit_csv: no results");
  std::ofstream out(dest, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", dest.string()));
  emit_csv(results, runs, seed, out);
  out.flush();
  if (!out) throw IoError(fmt::format("write failed for {}", dest.string()));
}

ScenarioConfig default_scenario() {
  ScenarioConfig config;
  config.sim.node_count = 100;
  config.sim.area_width = 1500.0;
  config.sim.area_height = 1500.0;
  config.sim.duration_s = 120.0;
  config.sim.max_speed = 10.0;
  config.sim.pause_time_s = 30.0;
  config.sim.radio_range = 250.0;
  config.sim.per_hop_latency_s = 0.01;
  config.sim.mobility_tick_s = 1.0;
  config.sim.rng_seed = 20260811;
  config.comm_pairs = 5;
  config.runs = 10;
  return config;
}

std::optional<Figure> figure_from_string(std::string_view name) {
  if (name == "3") return Figure::Fig3;
  if (name == "4") return Figure::Fig4;
  if (name == "5") return Figure::Fig5;
  if (name == "6a") return Figure::Fig6a;
  if (name == "6b") return Figure::Fig6b;
  return std::nullopt;
}

namespace {

const std::vector<double> kFractions{0.0, 0.1, 0.2, 0.3, 0.4};
const std::vector<double> kMpktvs{0.5, 0.6, 0.7, 0.8, 0.9};
const std::vector<int> kKnownLevels{5, 10, 20};

std::filesystem::path write_sweep(const SweepSpec& spec,
                                  const std::filesystem::path& path,
                                  std::vector<std::string>* trace_lines) {
  SweepResults results = run_sweep(spec, trace_lines);
  emit_csv(results, spec.fixed.runs, spec.fixed.sim.rng_seed, path);
  return path;
}

}  // namespace

std::vector<std::filesystem::path> run_figure(
    Figure figure, const std::filesystem::path& out_dir,
    std::vector<std::string>* trace_lines) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError(fmt::format("cannot create {}: {}", out_dir.string(),
                              ec.message()));

  std::vector<std::filesystem::path> written;
  switch (figure) {
    case Figure::Fig3: {
      SweepSpec spec{SweepSpec::Axis::AttackerFraction, kFractions,
                     default_scenario()};
      spec.fixed.known_nodes = 0;
      spec.fixed.mpktv = TrustLevel(0.5);
      spec.fixed.attacker.mode = AttackerMode::Isolated;
      written.push_back(
          write_sweep(spec, out_dir / "fig3.csv", trace_lines));
      break;
    }
    case Figure::Fig4: {
      SweepSpec spec{SweepSpec::Axis::Mpktv, kMpktvs, default_scenario()};
      spec.fixed.known_nodes = 20;
      spec.fixed.attacker.mode = AttackerMode::Isolated;
      spec.fixed.attacker.fraction = 0.2;
      written.push_back(
          write_sweep(spec, out_dir / "fig4.csv", trace_lines));
      break;
    }
    case Figure::Fig5: {
      for (int known : kKnownLevels) {
        SweepSpec spec{SweepSpec::Axis::Mpktv, kMpktvs, default_scenario()};
        spec.fixed.known_nodes = known;
        spec.fixed.attacker.fraction = 0.0;
        written.push_back(write_sweep(
            spec, out_dir / fmt::format("fig5_known{}.csv", known),
            trace_lines));
      }
      break;
    }
    case Figure::Fig6a:
    case Figure::Fig6b: {
      double mpktv = figure == Figure::Fig6a ? 0.7 : 0.9;
      const char* stem = figure == Figure::Fig6a ? "fig6a" : "fig6b";
      for (int known : kKnownLevels) {
        SweepSpec spec{SweepSpec::Axis::AttackerFraction, kFractions,
                       default_scenario()};
        spec.fixed.known_nodes = known;
        spec.fixed.mpktv = TrustLevel(mpktv);
        spec.fixed.attacker.mode = AttackerMode::Colluding;
        written.push_back(write_sweep(
            spec, out_dir / fmt::format("{}_known{}.csv", stem, known),
            trace_lines));
      }
      break;
    }
  }
  return written;
}

namespace {

double parse_double(std::string_view key, std::string_view value) {
  try {
    size_t pos = 0;
    double v = std::stod(std::string(value), &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(
        fmt::format("invalid numeric value '{}' for key '{}'", value, key));
  }
}

int64_t parse_int(std::string_view key, std::string_view value) {
  try {
    size_t pos = 0;
    long long v = std::stoll(std::string(value), &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(
        fmt::format("invalid integer value '{}' for key '{}'", value, key));
  }
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(
      fmt::format("invalid boolean value '{}' for key '{}'", value, key));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

TrustLevel parse_trust(std::string_view key, std::string_view value) {
  double v = parse_double(key, value);
  if (v < 0.0 || v > 1.0)
    throw ConfigError(fmt::format("'{}' must be in [0,1]", key));
  return TrustLevel(v);
}

}  // namespace

void apply_scenario_setting(ScenarioConfig& config, std::string_view key,
                            std::string_view value) {
  if (key == "node_count")
    config.sim.node_count = static_cast<int>(parse_int(key, value));
  else if (key == "area_width")
    config.sim.area_width = parse_double(key, value);
  else if (key == "area_height")
    config.sim.area_height = parse_double(key, value);
  else if (key == "duration_s")
    config.sim.duration_s = parse_double(key, value);
  else if (key == "max_speed")
    config.sim.max_speed = parse_double(key, value);
  else if (key == "pause_time_s")
    config.sim.pause_time_s = parse_double(key, value);
  else if (key == "radio_range")
    config.sim.radio_range = parse_double(key, value);
  else if (key == "per_hop_latency_s")
    config.sim.per_hop_latency_s = parse_double(key, value);
  else if (key == "mobility_tick_s")
    config.sim.mobility_tick_s = parse_double(key, value);
  else if (key == "seed")
    config.sim.rng_seed = static_cast<uint64_t>(parse_int(key, value));
  else if (key == "comm_pairs")
    config.comm_pairs = static_cast<int>(parse_int(key, value));
  else if (key == "runs")
    config.runs = static_cast<int>(parse_int(key, value));
  else if (key == "attacker_mode") {
    if (value == "isolated")
      config.attacker.mode = AttackerMode::Isolated;
    else if (value == "colluding")
      config.attacker.mode = AttackerMode::Colluding;
    else
      throw ConfigError(
          fmt::format("attacker_mode must be isolated|colluding, got '{}'",
                      value));
  } else if (key == "attacker_fraction")
    config.attacker.fraction = parse_double(key, value);
  else if (key == "drop_replies")
    config.attacker.drop_replies = parse_bool(key, value);
  else if (key == "tamper_replies")
    config.attacker.tamper_replies = parse_bool(key, value);
  else if (key == "known_nodes")
    config.known_nodes = static_cast<int>(parse_int(key, value));
  else if (key == "mpktv")
    config.mpktv = parse_trust(key, value);
  else if (key == "initial_known_trust")
    config.trust_params.initial_known = parse_trust(key, value);
  else if (key == "initial_unknown_trust")
    config.trust_params.initial_unknown = parse_trust(key, value);
  else if (key == "reward_delta")
    config.trust_params.reward_delta = parse_double(key, value);
  else if (key == "penalty_delta")
    config.trust_params.penalty_delta = parse_double(key, value);
  else if (key == "initial_ttl")
    config.protocol.initial_ttl = static_cast<int>(parse_int(key, value));
  else if (key == "ttl_step")
    config.protocol.ttl_step = static_cast<int>(parse_int(key, value));
  else if (key == "ttl_max")
    config.protocol.ttl_max = static_cast<int>(parse_int(key, value));
  else if (key == "escalation_factor")
    config.protocol.escalation_factor = parse_double(key, value);
  else if (key == "reply_paths")
    config.protocol.reply_paths = static_cast<int>(parse_int(key, value));
  else if (key == "min_known_for_delegation")
    config.protocol.min_known_for_delegation =
        static_cast<int>(parse_int(key, value));
  else if (key == "rekey_period_s")
    config.protocol.rekey_period_s = parse_double(key, value);
  else
    throw ConfigError(fmt::format("unknown config key '{}'", key));
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  ScenarioConfig config = default_scenario();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'",
                                    path.string(), line_no));
    apply_scenario_setting(config, trim(s.substr(0, eq)),
                           trim(s.substr(eq + 1)));
  }
  return config;
}

}  // namespace manetcert
