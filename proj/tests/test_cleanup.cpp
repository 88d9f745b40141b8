#include <stdexcept>
#include <algorithm>
#include <set>

#include "doctest.h"
#include "rshare/cleanup.hpp"

using namespace rshare;
using namespace rshare::cleanup;

namespace {

constexpr int kNoop = static_cast<int>(Action::kNoop);
constexpr int kClean = static_cast<int>(Action::kClean);

Config quiet(MapId map) {
  Config cfg = Config::preset(map);
  cfg.waste_spawn = 0.0;
  cfg.apple_spawn = 0.0;
  return cfg;
}

Selector random_selector() {
  return [](const DecisionContext& ctx, std::span<const double>, Rng& r) {
    return uniform_int(r, 0, ctx.trade_step ? kPreTradeChoices - 1 : kActions - 1);
  };
}

Selector scripted(std::vector<int> trade_choices) {
  return [trade_choices](const DecisionContext& ctx, std::span<const double>, Rng& r) {
    if (ctx.trade_step) return trade_choices[static_cast<std::size_t>(ctx.agent)];
    return uniform_int(r, 0, kActions - 1);
  };
}

}  // namespace

TEST_SUITE("cleanup") {

TEST_CASE("small map layout") {
  const Config cfg = Config::preset(MapId::kSmall7x7);
  const State s = reset(cfg);
  CHECK(cfg.agents() == 2);
  CHECK(s.width == 7);
  CHECK(s.height == 7);
  CHECK(s.count(Cell::kWaste) == 2);
  CHECK(s.river_cells() == 10);
  CHECK(s.count(Cell::kOrchard) == 5);
  CHECK(s.agents == std::vector<Pos>{{5, 2}, {1, 4}});
  CHECK(is_river_region(s.at(s.agents[0])));
  CHECK(s.at({1, 5}) == Cell::kOrchard);
  CHECK(dump(s) ==
        "#######\n"
        "#W~.2o#\n"
        "#W~..o#\n"
        "#~~..o#\n"
        "#~~..o#\n"
        "#~1..o#\n"
        "#######\n");
}

TEST_CASE("big map layout") {
  const Config cfg = Config::preset(MapId::kBig10x10);
  const State s = reset(cfg);
  CHECK(cfg.agents() == 3);
  CHECK(s.width == 10);
  CHECK(s.height == 10);
  CHECK(s.river_cells() == 16);
  CHECK(s.count(Cell::kWaste) == 8);
  CHECK(s.count(Cell::kOrchard) == 12);
  // Agent 2 sits in the middle of the interior, agent 3 by the orchard.
  CHECK(s.agents[1] == Pos{5, 4});
  CHECK(s.agents[2].col >= 6);
  CHECK(is_orchard_region(s.at({s.agents[2].row + 1, s.agents[2].col + 1})));
  CHECK(s.agents[0].col <= 3);
}

TEST_CASE("reset is deterministic") {
  for (MapId map : {MapId::kSmall7x7, MapId::kBig10x10})
    CHECK(reset(Config::preset(map)) == reset(Config::preset(map)));
}

TEST_CASE("config validation") {
  Config cfg;
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = Config{};
  cfg.apple_spawn = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = Config{};
  cfg.depletion_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("walking onto an apple collects it") {
  const Config cfg = quiet(MapId::kSmall7x7);
  State s = reset(cfg);
  s.at({1, 5}) = Cell::kApple;
  Rng rng = make_rng(1, 0, Stream::kEnvironment);
  const std::vector<int> actions{kNoop, static_cast<int>(Action::kRight)};
  const StepResult r = step(s, cfg, actions, rng);
  CHECK(r.rewards == RewardVector{0.0, 1.0});
  CHECK(s.at({1, 5}) == Cell::kOrchard);
  CHECK(s.agents[1] == Pos{1, 5});
  CHECK(s.apples_collected == std::vector<int>{0, 1});
}

TEST_CASE("moves are blocked by walls and other agents") {
  const Config cfg = quiet(MapId::kSmall7x7);
  State s = reset(cfg);
  Rng rng = make_rng(1, 0, Stream::kEnvironment);
  step(s, cfg, std::vector<int>{static_cast<int>(Action::kDown), static_cast<int>(Action::kUp)},
       rng);
  CHECK(s.agents == std::vector<Pos>{{5, 2}, {1, 4}});
  s.agents[1] = {4, 2};
  step(s, cfg, std::vector<int>{static_cast<int>(Action::kUp), kNoop}, rng);
  CHECK(s.agents[0] == Pos{5, 2});
}

TEST_CASE("cleaning outside the river does nothing") {
  const Config cfg = quiet(MapId::kSmall7x7);
  State s = reset(cfg);
  s.agents[0] = {1, 3};
  s.at({5, 1}) = Cell::kWaste;
  const State before = s;
  Rng rng = make_rng(1, 0, Stream::kEnvironment);
  const StepResult r = step(s, cfg, std::vector<int>{kClean, kClean}, rng);
  CHECK(r.cleared == std::vector<int>{0, 0});
  CHECK(s.cells == before.cells);
}

TEST_CASE("the beam clears exactly the waste at or above the cleaner") {
  // Enumerate every river position and every waste pattern of the two river columns.
  const Config cfg = quiet(MapId::kSmall7x7);
  Rng rng = make_rng(1, 0, Stream::kEnvironment);
  const State base = reset(cfg);
  std::vector<Pos> river;
  for (int row = 0; row < base.height; ++row)
    for (int col = 0; col < base.width; ++col)
      if (is_river_region(base.at({row, col}))) river.push_back({row, col});
  REQUIRE(river.size() == 10u);
  for (const Pos cleaner : river) {
    for (unsigned mask = 0; mask < (1u << river.size()); ++mask) {
      State s = base;
      s.agents[0] = cleaner;
      for (std::size_t k = 0; k < river.size(); ++k)
        s.at(river[k]) = (mask >> k) & 1u ? Cell::kWaste : Cell::kRiver;
      int expected = 0;
      std::vector<Cell> after = s.cells;
      for (std::size_t k = 0; k < river.size(); ++k) {
        if (((mask >> k) & 1u) && river[k].col == cleaner.col && river[k].row <= cleaner.row) {
          ++expected;
          after[static_cast<std::size_t>(river[k].row * s.width + river[k].col)] = Cell::kRiver;
        }
      }
      const StepResult r = step(s, cfg, std::vector<int>{kClean, kNoop}, rng);
      CHECK(r.cleared[0] == expected);
      CHECK(s.cells == after);
    }
  }
}

TEST_CASE("apple spawn falls linearly to zero at the threshold") {
  const Config cfg;
  CHECK(apple_probability(cfg, 0.0) == doctest::Approx(0.3));
  CHECK(apple_probability(cfg, 0.2) == doctest::Approx(0.15));
  CHECK(apple_probability(cfg, 0.4) == 0.0);
  CHECK(apple_probability(cfg, 0.9) == 0.0);

  Config polluted = Config::preset(MapId::kSmall7x7);
  polluted.waste_spawn = 0.0;
  State s = reset(polluted);
  for (int row = 1; row <= 4; ++row) s.at({row, 1}) = Cell::kWaste;  // 4 of 10 cells
  Rng rng = make_rng(3, 0, Stream::kEnvironment);
  for (int k = 0; k < 40; ++k) {
    step(s, polluted, std::vector<int>{kNoop, kNoop}, rng);
    CHECK(s.count(Cell::kApple) == 0);
  }
}

TEST_CASE("invariants hold under random play") {
  for (MapId map : {MapId::kSmall7x7, MapId::kBig10x10}) {
    const Config cfg = Config::preset(map);
    Rng env = make_rng(21, 0, Stream::kEnvironment);
    Rng pol = make_rng(21, 0, Stream::kPolicy);
    const State start = reset(cfg);
    for (int e = 0; e < 300; ++e) {
      State s = reset(cfg);
      bool done = false;
      while (!done) {
        std::vector<int> actions(s.agents.size());
        for (int& a : actions) a = uniform_int(pol, 0, kActions - 1);
        const auto apples_before = s.apples_collected;
        const StepResult r = step(s, cfg, actions, env);
        done = r.done;
        for (std::size_t k = 0; k < s.cells.size(); ++k) {
          const Cell c = s.cells[k];
          const Cell orig = start.cells[k];
          if (c == Cell::kWaste || c == Cell::kRiver) CHECK(is_river_region(orig));
          if (c == Cell::kApple || c == Cell::kOrchard) CHECK(is_orchard_region(orig));
          if (orig == Cell::kWall) CHECK(c == Cell::kWall);
        }
        std::set<std::pair<int, int>> cells;
        for (std::size_t i = 0; i < s.agents.size(); ++i) {
          CHECK(s.at(s.agents[i]) != Cell::kWall);
          cells.insert({s.agents[i].row, s.agents[i].col});
          const double picked = s.apples_collected[i] - apples_before[i];
          CHECK(r.rewards[i] == picked);
          CHECK((r.rewards[i] == 0.0 || r.rewards[i] == 1.0));
        }
        CHECK(cells.size() == s.agents.size());
      }
      CHECK(s.step == cfg.horizon);
    }
  }
}

TEST_CASE("observation encoding") {
  const Config cfg = Config::preset(MapId::kBig10x10);
  const State s = reset(cfg);
  const std::size_t plane = 100;
  for (int agent = 0; agent < 3; ++agent) {
    for (bool trade : {false, true}) {
      const auto obs = observe(s, agent, trade);
      REQUIRE(obs.size() == observation_size(cfg));
      CHECK(obs.size() == kObservationChannels * plane);
      for (std::size_t k = 0; k < plane; ++k) {
        double kinds = 0.0;
        for (int c = 0; c < kCellKinds; ++c) kinds += obs[c * plane + k];
        CHECK(kinds == 1.0);
        CHECK(obs[(kCellKinds + 2) * plane + k] == (trade ? 1.0 : 0.0));
      }
      double self = 0.0, others = 0.0;
      for (std::size_t k = 0; k < plane; ++k) {
        self += obs[kCellKinds * plane + k];
        others += obs[(kCellKinds + 1) * plane + k];
      }
      CHECK(self == 1.0);
      CHECK(others == 2.0);
      const Pos p = s.agents[static_cast<std::size_t>(agent)];
      CHECK(obs[kCellKinds * plane + static_cast<std::size_t>(p.row * 10 + p.col)] == 1.0);
    }
  }
}

TEST_CASE("same seed and actions give identical episodes") {
  for (Mechanism m : {Mechanism::kNone, Mechanism::kEqualSplit, Mechanism::kPreTrade}) {
    const Config cfg = Config::preset(MapId::kSmall7x7);
    Rng e1 = make_rng(5, 2, Stream::kEnvironment), p1 = make_rng(5, 2, Stream::kPolicy);
    Rng e2 = make_rng(5, 2, Stream::kEnvironment), p2 = make_rng(5, 2, Stream::kPolicy);
    const Episode a = play_episode(cfg, m, random_selector(), e1, p1);
    const Episode b = play_episode(cfg, m, random_selector(), e2, p2);
    CHECK(a.actions == b.actions);
    CHECK(a.env_rewards == b.env_rewards);
    CHECK(a.effective_rewards == b.effective_rewards);
    CHECK(a.trade_choices == b.trade_choices);
    CHECK(a.waste_cleared == b.waste_cleared);
  }
}

TEST_CASE("equal split wrapper") {
  StepResult r;
  r.rewards = {1.0, 0.0};
  CHECK(wrap_equal_split(r) == RewardVector{0.5, 0.5});
  r.rewards = {0.0, 0.0, 0.0};
  CHECK(wrap_equal_split(r) == RewardVector{0.0, 0.0, 0.0});
  r.rewards = {1.0, 1.0, 0.0};
  for (double v : wrap_equal_split(r)) CHECK(v == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("pre-trade episodes") {
  const Config cfg = Config::preset(MapId::kSmall7x7);
  Rng env = make_rng(8, 0, Stream::kEnvironment), pol = make_rng(8, 0, Stream::kPolicy);
  const Episode ep = pre_trade_episode(cfg, scripted({2, 4}), env, pol);
  CHECK(ep.trade_choices == std::vector<int>{2, 4});
  CHECK(ep.allocation(0, 0) == doctest::Approx(0.8));
  CHECK(ep.allocation(1, 0) == doctest::Approx(0.2));
  CHECK(ep.env_rewards.size() == static_cast<std::size_t>(cfg.horizon));
  for (const auto& traj : ep.trajectories) {
    CHECK(traj.actions.size() == static_cast<std::size_t>(cfg.horizon + 1));
    CHECK(traj.rewards.front() == 0.0);
    CHECK(traj.observations.front()[(kCellKinds + 2) * 49] == 1.0);
    CHECK(traj.observations[1][(kCellKinds + 2) * 49] == 0.0);
  }
  for (std::size_t t = 0; t < ep.env_rewards.size(); ++t) {
    const auto expect = apply_participation(ep.allocation, ep.env_rewards[t]);
    CHECK(ep.effective_rewards[t] == expect);
  }

  // Choosing 100% reproduces the baseline world given the same env actions.
  Rng e1 = make_rng(9, 0, Stream::kEnvironment), p1 = make_rng(9, 0, Stream::kPolicy);
  Rng e2 = make_rng(9, 0, Stream::kEnvironment), p2 = make_rng(9, 0, Stream::kPolicy);
  const Episode traded = pre_trade_episode(cfg, scripted({5, 5}), e1, p1);
  const Episode plain = play_episode(cfg, Mechanism::kNone, random_selector(), e2, p2);
  CHECK(traded.allocation == ShareAllocation::identity(2));
  CHECK(traded.actions == plain.actions);
  CHECK(traded.env_rewards == plain.env_rewards);
  CHECK(traded.effective_rewards == plain.env_rewards);

  const Config big = Config::preset(MapId::kBig10x10);
  const Episode three = pre_trade_episode(big, scripted({0, 3, 5}), e1, p1);
  CHECK(three.allocation == ShareAllocation::identity(3));
}

TEST_CASE("common pool episodes") {
  const Config cfg = Config::preset(MapId::kBig10x10);
  Rng env = make_rng(10, 0, Stream::kEnvironment), pol = make_rng(10, 0, Stream::kPolicy);
  const Episode ep = common_pool_episode(cfg, scripted({4, 5, 1}), env, pol);
  CHECK(ep.participants == std::vector<bool>{true, true, false});
  for (std::size_t t = 0; t < ep.env_rewards.size(); ++t)
    CHECK(ep.effective_rewards[t] == common_pool_resolve(ep.participants, ep.env_rewards[t]));

  const Episode none = common_pool_episode(cfg, scripted({0, 1, 2}), env, pol);
  CHECK(none.participants == std::vector<bool>{false, false, false});
  CHECK(none.effective_rewards == none.env_rewards);

  const auto split = common_pool_resolve({true, true, true}, std::vector<double>{1.0, 0.0, 0.0});
  for (double v : split) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("every mechanism conserves reward on every step") {
  for (MapId map : {MapId::kSmall7x7, MapId::kBig10x10}) {
    const Config cfg = Config::preset(map);
    for (Mechanism m : {Mechanism::kNone, Mechanism::kEqualSplit, Mechanism::kPreTrade,
                        Mechanism::kCommonPool}) {
      Rng env = make_rng(12, 0, Stream::kEnvironment), pol = make_rng(12, 0, Stream::kPolicy);
      for (int e = 0; e < 50; ++e) {
        const Episode ep = play_episode(cfg, m, random_selector(), env, pol);
        for (std::size_t t = 0; t < ep.env_rewards.size(); ++t) {
          double a = 0.0, b = 0.0;
          for (double v : ep.env_rewards[t]) a += v;
          for (double v : ep.effective_rewards[t]) b += v;
          CHECK(std::abs(a - b) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("bad selector output is rejected") {
  const Config cfg = Config::preset(MapId::kSmall7x7);
  Rng env = make_rng(1, 0, Stream::kEnvironment), pol = make_rng(1, 0, Stream::kPolicy);
  const Selector bad = [](const DecisionContext&, std::span<const double>, Rng&) { return 6; };
  CHECK_THROWS_AS(play_episode(cfg, Mechanism::kPreTrade, bad, env, pol), std::invalid_argument);
  CHECK_THROWS_AS(play_episode(cfg, Mechanism::kNone, bad, env, pol), std::invalid_argument);
}

}  // TEST_SUITE
