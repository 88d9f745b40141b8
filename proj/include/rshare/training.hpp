#pragma once

// Independent actor-critic training loops: every agent learns only from its
// own observations, actions and effective rewards.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "rshare/cleanup.hpp"
#include "rshare/learners.hpp"
#include "rshare/matrix_games.hpp"

namespace rshare {

struct ExplorationConfig {
  double start = 1.0;
  double end = 0.01;
  double decay_fraction = 0.5;  // of the episode budget

  ExplorationSchedule schedule(long episodes) const;
};

struct IpdTrainConfig {
  ipd::Variant variant = ipd::Variant::kNoParticipation;
  long episodes = 10000;
  ActorCriticParams learner;
  ExplorationConfig exploration;
};

struct IpdEpisodeStats {
  long episode = 0;
  double joint_reward = 0.0;  // per-step mean of the summed env rewards
  std::array<double, 2> cooperation{};  // fraction of cooperative moves
  double own_share = 1.0;     // mean own share at episode end
  int trades = 0;
};

struct IpdRunResult {
  std::vector<IpdEpisodeStats> episodes;
  std::vector<TabularActorCritic> learners;
};

IpdRunResult train_ipd(const IpdTrainConfig& cfg, std::uint64_t seed, int run);

struct CleanupTrainConfig {
  cleanup::Config env;
  cleanup::Mechanism mechanism = cleanup::Mechanism::kNone;
  long episodes = 50000;
  std::size_t hidden = 64;
  double learning_rate = 1e-3;
  double value_weight = 0.5;
  double entropy_weight = 0.0;
  double discount = 0.99;
  double gae_lambda = 0.95;
  double init_scale = 0.05;
  ExplorationConfig exploration;
};

struct CleanupEpisodeStats {
  long episode = 0;
  double joint_reward = 0.0;  // accumulated env reward of all agents
  std::vector<double> rewards;  // accumulated effective reward per agent
  std::vector<int> apples;
  std::vector<int> waste_cleared;
  double own_share = 1.0;  // mean own share fixed for the episode
  int participants = 0;
};

struct CleanupRunResult {
  std::vector<CleanupEpisodeStats> episodes;
  std::vector<MlpPolicy> policies;
};

// Called after every episode; used for progress reporting.
using CleanupProgress = std::function<void(const CleanupEpisodeStats&)>;

CleanupRunResult train_cleanup(const CleanupTrainConfig& cfg, std::uint64_t seed, int run,
                               const CleanupProgress& progress = {});

// Advantages and discounted targets for one trajectory that ends in a terminal
// state: delta_t = r_t + gamma v_{t+1} - v_t, A_t = sum_k (gamma lambda)^k delta_{t+k},
// target_t = A_t + v_t.
void lambda_returns(std::span<const double> rewards, std::span<const double> values,
                    double gamma, double lambda, std::vector<double>& advantages,
                    std::vector<double>& targets);

}  // namespace rshare
