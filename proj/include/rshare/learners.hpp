#pragma once

// Decentralized actor-critic learners: a tabular softmax learner for the matrix
// games and a one-hidden-layer network for Cleanup.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "rshare/rng.hpp"

namespace rshare {

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

// With probability epsilon a uniformly random action, otherwise a sample from probs.
int select_action(std::span<const double> probs, double epsilon, Rng& rng);

// Linear decay from start to end over decay_episodes, then held at end.
class ExplorationSchedule {
 public:
  ExplorationSchedule(double start, double end, long decay_episodes);
  double epsilon(long episode) const;

 private:
  double start_;
  double end_;
  long decay_episodes_;
};

struct ActorCriticParams {
  double actor_step = 1e-3;   // alpha_theta
  double critic_step = 0.1;   // beta
  double discount = 0.99;     // gamma
  bool operator==(const ActorCriticParams&) const = default;
};

class TabularActorCritic {
 public:
  TabularActorCritic(int states, int actions, ActorCriticParams params);

  int states() const { return states_; }
  int actions() const { return actions_; }
  const ActorCriticParams& params() const { return params_; }

  std::vector<double> policy(int state) const;
  double value(int state) const { return values_[state]; }
  double preference(int state, int action) const {
    return prefs_[static_cast<std::size_t>(state * actions_ + action)];
  }

  // One-step TD actor-critic update; returns the TD error.
  double td_update(int state, int action, double reward, int next_state, bool done);

  bool operator==(const TabularActorCritic&) const = default;

 private:
  int states_;
  int actions_;
  ActorCriticParams params_;
  std::vector<double> prefs_;
  std::vector<double> values_;
};

// Shared tanh trunk with a softmax policy head and a scalar value head.
// Flat parameter layout: W1 [inputs x hidden], b1 [hidden], Wp [actions x hidden],
// bp [actions], Wv [hidden], bv [1].
class MlpPolicy {
 public:
  MlpPolicy(std::size_t inputs, std::size_t hidden, std::size_t actions);

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t actions() const { return actions_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Uniform in [-scale, scale].
  void initialize(Rng& rng, double scale = 0.05);

  struct Forward {
    std::vector<double> hidden;  // post-activation
    std::vector<double> probs;
    std::vector<double> log_probs;
    double value = 0.0;
  };
  Forward forward(std::span<const double> observation) const;

  // Loss minimized for one transition:
  //   policy_weight * (-advantage * log pi(action | obs)
  //                    - entropy_weight * H(pi(. | obs)))
  //   + value_weight * 0.5 * (value_target - v(obs))^2
  // with advantage and value_target held constant.
  struct Transition {
    std::span<const double> observation;
    int action = 0;
    double advantage = 0.0;
    double value_target = 0.0;
    double policy_weight = 1.0;
    double value_weight = 1.0;
    double entropy_weight = 0.0;
  };
  double loss(const Transition& t) const;
  // Accumulates the loss gradient into grad (length parameter_count()).
  void backward(const Transition& t, const Forward& fwd, std::span<double> grad) const;
  std::vector<double> gradient(const Transition& t) const;

  // Text snapshot: "mlp <inputs> <hidden> <actions> <count>" then one value per line.
  void save(std::ostream& out) const;
  static MlpPolicy load(std::istream& in);

 private:
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden_ * inputs_; }
  std::size_t wp() const { return b1() + hidden_; }
  std::size_t bp() const { return wp() + actions_ * hidden_; }
  std::size_t wv() const { return bp() + actions_; }
  std::size_t bv() const { return wv() + hidden_; }

  std::size_t inputs_;
  std::size_t hidden_;
  std::size_t actions_;
  std::vector<double> params_;
};

// Adam over a flat parameter vector.
class Adam {
 public:
  explicit Adam(std::size_t size, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace rshare
