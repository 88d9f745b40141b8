#pragma once

// Experiment presets, seeded multi-run execution and the long-format metrics file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rshare/analytic.hpp"
#include "rshare/training.hpp"

namespace rshare::harness {

enum class Family { kIpd, kCleanup, kAnalytic };

struct Preset {
  std::string id;
  Family family;
  std::string variant;  // implementation label, e.g. "(iv)"
  std::string description;
  int default_seeds;
  long default_episodes;
};

// Stable order: IPD variants, two-agent Cleanup, three-agent Cleanup, analytic.
const std::vector<Preset>& presets();
// Throws std::invalid_argument for ids outside the preset list.
const Preset& find_preset(const std::string& id);
std::string list_experiments();

struct ExperimentConfig {
  std::string experiment = "ipd-i";
  int seeds = 5;
  long episodes = 10000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  int log_every = 1;  // keep every k-th episode in metrics.csv (the last is always kept)
  std::filesystem::path out = "results";

  ActorCriticParams ipd;
  ExplorationConfig exploration;
  CleanupTrainConfig cleanup;
  analytic::SimulationConfig theory;

  // Defaults for a preset; throws std::invalid_argument on unknown ids.
  static ExperimentConfig from_preset(const std::string& id);

  // key=value override; throws std::invalid_argument on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void set(const std::string& assignment);
  // Plain text file of key=value lines; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  // All keys, one "key=value" per line, readable by load_file.
  std::string snapshot() const;
  static std::vector<std::string> keys();

  void validate() const;
};

struct MetricRow {
  std::string experiment;
  int seed = 0;
  long episode = 0;
  std::string agent;  // agent index or "joint"
  std::string metric;
  double value = 0.0;

  bool operator==(const MetricRow&) const = default;
};

inline constexpr const char* kMetricsHeader = "experiment,seed,episode,agent,metric,value";

void write_row(std::ostream& out, const MetricRow& row);
// Throws std::runtime_error naming the line on malformed input.
MetricRow parse_row(const std::string& line);
std::vector<MetricRow> read_metrics(const std::filesystem::path& csv);

// Trains or simulates one seed. Parameter snapshots go to param_dir when it is
// non-empty.
std::vector<MetricRow> run_seed(const ExperimentConfig& cfg, int seed,
                                const std::filesystem::path& param_dir = {});

// Runs all seeds on up to cfg.workers threads, each into its own file, then
// merges them in seed order into cfg.out/metrics.csv next to config.txt and
// params/. Throws std::invalid_argument for a bad config and
// std::runtime_error for I/O or run failures.
std::filesystem::path run(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace rshare::harness
