#include "rshare/cleanup.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rshare::cleanup {

namespace {

struct Layout {
  std::vector<std::string> rows;
  std::vector<Pos> spawns;  // grid coordinates, border included
};

// River on the left, orchard on the right; two waste cells top-left of the river.
const Layout& small_layout() {
  static const Layout layout{
      {
          "#######",
          "#W~..o#",
          "#W~..o#",
          "#~~..o#",
          "#~~..o#",
          "#~~..o#",
          "#######",
      },
      {{5, 2}, {1, 4}},
  };
  return layout;
}

// Alternating waste rows across the two river columns; orchard in the two
// rightmost interior columns.
const Layout& big_layout() {
  static const Layout layout{
      {
          "##########",
          "#WW.....o#",
          "#~~....oo#",
          "#WW.....o#",
          "#~~....oo#",
          "#WW.....o#",
          "#~~....oo#",
          "#WW.....o#",
          "#~~....oo#",
          "##########",
      },
      {{8, 3}, {5, 4}, {1, 6}},
  };
  return layout;
}

const Layout& layout_for(MapId map) {
  return map == MapId::kSmall7x7 ? small_layout() : big_layout();
}

Cell parse_cell(char c) {
  switch (c) {
    case '#': return Cell::kWall;
    case '.': return Cell::kEmpty;
    case '~': return Cell::kRiver;
    case 'W': return Cell::kWaste;
    case 'o': return Cell::kOrchard;
    case 'a': return Cell::kApple;
  }
  throw std::invalid_argument(std::string("unknown map character: ") + c);
}

Pos moved(Pos p, Action a) {
  switch (a) {
    case Action::kLeft: return {p.row, p.col - 1};
    case Action::kRight: return {p.row, p.col + 1};
    case Action::kUp: return {p.row - 1, p.col};
    case Action::kDown: return {p.row + 1, p.col};
    default: return p;
  }
}

}  // namespace

Config Config::preset(MapId map) {
  Config cfg;
  cfg.map = map;
  return cfg;
}

int Config::agents() const { return static_cast<int>(layout_for(map).spawns.size()); }

void Config::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (apple_spawn < 0.0 || apple_spawn > 1.0)
    throw std::invalid_argument("apple_spawn must lie in [0, 1]");
  if (waste_spawn < 0.0 || waste_spawn > 1.0)
    throw std::invalid_argument("waste_spawn must lie in [0, 1]");
  if (!(depletion_threshold > 0.0 && depletion_threshold <= 1.0))
    throw std::invalid_argument("depletion_threshold must lie in (0, 1]");
}

bool is_river_region(Cell c) { return c == Cell::kRiver || c == Cell::kWaste; }
bool is_orchard_region(Cell c) { return c == Cell::kOrchard || c == Cell::kApple; }

int State::count(Cell kind) const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), kind));
}

int State::river_cells() const { return count(Cell::kRiver) + count(Cell::kWaste); }

double State::waste_fraction() const {
  const int river = river_cells();
  return river == 0 ? 0.0 : static_cast<double>(count(Cell::kWaste)) / river;
}

bool State::occupied(Pos p) const {
  return std::find(agents.begin(), agents.end(), p) != agents.end();
}

State reset(const Config& cfg) {
  cfg.validate();
  const Layout& layout = layout_for(cfg.map);
  State s;
  s.height = static_cast<int>(layout.rows.size());
  s.width = static_cast<int>(layout.rows.front().size());
  s.cells.reserve(static_cast<std::size_t>(s.width * s.height));
  for (const auto& row : layout.rows)
    for (char c : row) s.cells.push_back(parse_cell(c));
  s.agents = layout.spawns;
  s.apples_collected.assign(s.agents.size(), 0);
  s.waste_cleared.assign(s.agents.size(), 0);
  return s;
}

double apple_probability(const Config& cfg, double waste_fraction) {
  return cfg.apple_spawn * std::max(0.0, 1.0 - waste_fraction / cfg.depletion_threshold);
}

StepResult step(State& s, const Config& cfg, std::span<const int> actions, Rng& rng) {
  const std::size_t n = s.agents.size();
  if (actions.size() != n) throw std::invalid_argument("one action per agent required");
  for (int a : actions)
    if (a < 0 || a >= kActions) throw std::invalid_argument("cleanup action out of range");
  if (s.step >= cfg.horizon) throw std::logic_error("step called on a finished episode");

  StepResult result;
  result.rewards.assign(n, 0.0);
  result.cleared.assign(n, 0);

  // Moves resolve in agent order; a blocked move is a no-op.
  for (std::size_t i = 0; i < n; ++i) {
    const Pos target = moved(s.agents[i], static_cast<Action>(actions[i]));
    if (target == s.agents[i]) continue;
    if (s.at(target) == Cell::kWall || s.occupied(target)) continue;
    s.agents[i] = target;
  }

  for (std::size_t i = 0; i < n; ++i) {
    Cell& c = s.at(s.agents[i]);
    if (c == Cell::kApple) {
      c = Cell::kOrchard;
      result.rewards[i] += 1.0;
      ++s.apples_collected[i];
    }
  }

  // The beam clears the cleaner's column from its own row upwards.
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<Action>(actions[i]) != Action::kClean) continue;
    const Pos p = s.agents[i];
    if (!is_river_region(s.at(p))) continue;
    for (int row = p.row; row >= 0; --row) {
      Cell& c = s.at({row, p.col});
      if (c == Cell::kWaste) {
        c = Cell::kRiver;
        ++result.cleared[i];
      }
    }
    s.waste_cleared[i] += result.cleared[i];
  }

  if (uniform01(rng) < cfg.waste_spawn) {
    std::vector<std::size_t> clean;
    for (std::size_t k = 0; k < s.cells.size(); ++k)
      if (s.cells[k] == Cell::kRiver) clean.push_back(k);
    if (!clean.empty())
      s.cells[clean[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(clean.size()) - 1))]] = Cell::kWaste;
  }

  const double p_apple = apple_probability(cfg, s.waste_fraction());
  for (int row = 0; row < s.height; ++row) {
    for (int col = 0; col < s.width; ++col) {
      const Pos p{row, col};
      if (s.at(p) != Cell::kOrchard || s.occupied(p)) continue;
      if (uniform01(rng) < p_apple) s.at(p) = Cell::kApple;
    }
  }

  ++s.step;
  result.done = s.step >= cfg.horizon;
  return result;
}

std::size_t observation_size(const Config& cfg) {
  const Layout& layout = layout_for(cfg.map);
  return static_cast<std::size_t>(kObservationChannels) * layout.rows.size() *
         layout.rows.front().size();
}

std::vector<double> observe(const State& s, int agent, bool trade_phase) {
  const std::size_t plane = static_cast<std::size_t>(s.width * s.height);
  std::vector<double> obs(plane * kObservationChannels, 0.0);
  for (std::size_t k = 0; k < plane; ++k)
    obs[static_cast<std::size_t>(s.cells[k]) * plane + k] = 1.0;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const auto k = static_cast<std::size_t>(s.agents[i].row * s.width + s.agents[i].col);
    const int channel = static_cast<int>(i) == agent ? kCellKinds : kCellKinds + 1;
    obs[static_cast<std::size_t>(channel) * plane + k] = 1.0;
  }
  if (trade_phase)
    std::fill(obs.begin() + static_cast<std::ptrdiff_t>((kCellKinds + 2) * plane), obs.end(), 1.0);
  return obs;
}

char cell_char(Cell c) {
  switch (c) {
    case Cell::kWall: return '#';
    case Cell::kEmpty: return '.';
    case Cell::kRiver: return '~';
    case Cell::kWaste: return 'W';
    case Cell::kOrchard: return 'o';
    case Cell::kApple: return 'a';
  }
  return '?';
}

std::string dump(const State& s, bool with_agents) {
  std::string out;
  for (int row = 0; row < s.height; ++row) {
    for (int col = 0; col < s.width; ++col) {
      char c = cell_char(s.at({row, col}));
      if (with_agents) {
        for (std::size_t i = 0; i < s.agents.size(); ++i)
          if (s.agents[i] == Pos{row, col}) c = static_cast<char>('1' + i);
      }
      out.push_back(c);
    }
    out.push_back('\n');
  }
  return out;
}

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kNone: return "none";
    case Mechanism::kEqualSplit: return "equal";
    case Mechanism::kPreTrade: return "pretrade";
    case Mechanism::kCommonPool: return "pool";
  }
  return "?";
}

RewardVector wrap_equal_split(const StepResult& r) { return equal_split(r.rewards); }

double Episode::joint_env_reward() const {
  double total = 0.0;
  for (const auto& r : env_rewards) total += std::accumulate(r.begin(), r.end(), 0.0);
  return total;
}

Episode play_episode(const Config& cfg, Mechanism mechanism, const Selector& select,
                     Rng& env_rng, Rng& policy_rng) {
  State s = reset(cfg);
  const int n = static_cast<int>(s.agents.size());
  Episode ep;
  ep.mechanism = mechanism;
  ep.allocation = mechanism == Mechanism::kEqualSplit
                      ? ShareAllocation::uniform(static_cast<std::size_t>(n))
                      : ShareAllocation::identity(static_cast<std::size_t>(n));
  ep.participants.assign(static_cast<std::size_t>(n), false);
  ep.trajectories.resize(static_cast<std::size_t>(n));

  if (mechanism == Mechanism::kPreTrade || mechanism == Mechanism::kCommonPool) {
    // Decision step: the world does not advance and no reward is paid.
    for (int i = 0; i < n; ++i) {
      auto obs = observe(s, i, /*trade_phase=*/true);
      const int choice = select({i, 0, true}, obs, policy_rng);
      if (choice < 0 || choice >= kPreTradeChoices)
        throw std::invalid_argument("trade-step choice must be in 0..5");
      ep.trade_choices.push_back(choice);
      auto& traj = ep.trajectories[static_cast<std::size_t>(i)];
      traj.observations.push_back(std::move(obs));
      traj.actions.push_back(choice);
      traj.rewards.push_back(0.0);
    }
    if (mechanism == Mechanism::kPreTrade) {
      ep.allocation = pre_trade_resolve(ep.trade_choices);
    } else {
      for (int i = 0; i < n; ++i)
        ep.participants[static_cast<std::size_t>(i)] =
            joins_pool(ep.trade_choices[static_cast<std::size_t>(i)]);
      ep.allocation = common_pool_allocation(ep.participants);
    }
  }

  std::vector<int> actions(static_cast<std::size_t>(n));
  bool done = false;
  while (!done) {
    for (int i = 0; i < n; ++i) {
      auto obs = observe(s, i);
      actions[static_cast<std::size_t>(i)] = select({i, s.step, false}, obs, policy_rng);
      auto& traj = ep.trajectories[static_cast<std::size_t>(i)];
      traj.observations.push_back(std::move(obs));
      traj.actions.push_back(actions[static_cast<std::size_t>(i)]);
    }
    StepResult r = step(s, cfg, actions, env_rng);
    RewardVector effective;
    switch (mechanism) {
      case Mechanism::kNone: effective = r.rewards; break;
      case Mechanism::kEqualSplit: effective = wrap_equal_split(r); break;
      case Mechanism::kPreTrade: effective = apply_participation(ep.allocation, r.rewards); break;
      case Mechanism::kCommonPool:
        effective = common_pool_resolve(ep.participants, r.rewards);
        break;
    }
    for (int i = 0; i < n; ++i)
      ep.trajectories[static_cast<std::size_t>(i)].rewards.push_back(
          effective[static_cast<std::size_t>(i)]);
    ep.actions.push_back(actions);
    ep.env_rewards.push_back(std::move(r.rewards));
    ep.effective_rewards.push_back(std::move(effective));
    done = r.done;
  }
  ep.apples_collected = s.apples_collected;
  ep.waste_cleared = s.waste_cleared;
  return ep;
}

}  // namespace rshare::cleanup
