#pragma once

// Cleanup gridworld: apples grow in an orchard only while the river stays
// clean, and waste can only be removed by an agent standing in the river.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rshare/participation.hpp"
#include "rshare/rng.hpp"

namespace rshare::cleanup {

enum class Cell : std::uint8_t { kWall, kEmpty, kRiver, kWaste, kOrchard, kApple };
inline constexpr int kCellKinds = 6;

enum class Action { kLeft = 0, kRight, kUp, kDown, kNoop, kClean };
inline constexpr int kActions = 6;

enum class MapId { kSmall7x7, kBig10x10 };

// Layout version embedded in dumps; bump when a map constant changes.
inline constexpr int kMapVersion = 1;

struct Config {
  MapId map = MapId::kSmall7x7;
  int horizon = 50;
  double apple_spawn = 0.3;          // per empty orchard cell, clean river
  double waste_spawn = 0.5;          // chance per step that one river cell fouls
  double depletion_threshold = 0.4;  // waste fraction where apples stop

  static Config preset(MapId map);
  int agents() const;
  // Throws std::invalid_argument.
  void validate() const;
};

struct Pos {
  int row = 0;
  int col = 0;
  bool operator==(const Pos&) const = default;
};

struct State {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major
  std::vector<Pos> agents;
  int step = 0;
  std::vector<int> apples_collected;
  std::vector<int> waste_cleared;

  Cell at(Pos p) const { return cells[static_cast<std::size_t>(p.row * width + p.col)]; }
  Cell& at(Pos p) { return cells[static_cast<std::size_t>(p.row * width + p.col)]; }
  int count(Cell kind) const;
  int river_cells() const;  // river + waste
  double waste_fraction() const;
  bool occupied(Pos p) const;

  bool operator==(const State&) const = default;
};

State reset(const Config& cfg);

bool is_river_region(Cell c);
bool is_orchard_region(Cell c);

// Apple spawn probability per free orchard cell for a given waste fraction.
double apple_probability(const Config& cfg, double waste_fraction);

struct StepResult {
  RewardVector rewards;  // environmental: apples collected this step
  std::vector<int> cleared;  // waste cells removed per agent this step
  bool done = false;
};

// Advances one step in place: moves in agent order, apple pickup, cleaning beams,
// waste growth, apple growth.
StepResult step(State& s, const Config& cfg, std::span<const int> actions, Rng& rng);

// Channels: six cell kinds, self, other agents, trade-phase plane.
inline constexpr int kObservationChannels = kCellKinds + 3;
std::size_t observation_size(const Config& cfg);
std::vector<double> observe(const State& s, int agent, bool trade_phase = false);

// One character per cell: '#' wall, '.' empty, '~' river, 'W' waste, 'o' orchard,
// 'a' apple; agents overlaid as digits 1..n when requested.
std::string dump(const State& s, bool with_agents = true);
char cell_char(Cell c);

enum class Mechanism { kNone, kEqualSplit, kPreTrade, kCommonPool };
std::string to_string(Mechanism m);

RewardVector wrap_equal_split(const StepResult& r);

struct DecisionContext {
  int agent = 0;
  int step = 0;
  bool trade_step = false;
};
using Selector =
    std::function<int(const DecisionContext&, std::span<const double> observation, Rng&)>;

// Everything one agent needs to learn from an episode.
struct Trajectory {
  std::vector<std::vector<double>> observations;
  std::vector<int> actions;
  std::vector<double> rewards;  // effective rewards
};

struct Episode {
  Mechanism mechanism = Mechanism::kNone;
  std::vector<int> trade_choices;   // pre-trade / pool step, empty otherwise
  ShareAllocation allocation = ShareAllocation::identity(2);
  std::vector<bool> participants;   // pool membership
  std::vector<std::vector<int>> actions;  // [step][agent], env steps only
  std::vector<RewardVector> env_rewards;
  std::vector<RewardVector> effective_rewards;
  std::vector<Trajectory> trajectories;
  std::vector<int> apples_collected;
  std::vector<int> waste_cleared;

  double joint_env_reward() const;
};

// Pre-trade and common-pool mechanisms add a zero-reward decision step before the
// first env step. env_rng drives the world, policy_rng the selector.
Episode play_episode(const Config& cfg, Mechanism mechanism, const Selector& select,
                     Rng& env_rng, Rng& policy_rng);

inline Episode pre_trade_episode(const Config& cfg, const Selector& select, Rng& env_rng,
                                 Rng& policy_rng) {
  return play_episode(cfg, Mechanism::kPreTrade, select, env_rng, policy_rng);
}
inline Episode common_pool_episode(const Config& cfg, const Selector& select, Rng& env_rng,
                                   Rng& policy_rng) {
  return play_episode(cfg, Mechanism::kCommonPool, select, env_rng, policy_rng);
}

}  // namespace rshare::cleanup
