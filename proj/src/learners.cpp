#include "rshare/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rshare {

namespace {

std::vector<double> log_softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - top);
  const double log_norm = top + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - log_norm;
  return out;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax of an empty vector");
  std::vector<double> out = log_softmax(logits);
  for (double& x : out) x = std::exp(x);
  return out;
}

int select_action(std::span<const double> probs, double epsilon, Rng& rng) {
  const int n = static_cast<int>(probs.size());
  if (n == 0) throw std::invalid_argument("select_action needs at least one action");
  if (epsilon > 0.0 && uniform01(rng) < epsilon) return uniform_int(rng, 0, n - 1);
  double u = uniform01(rng);
  for (int a = 0; a < n; ++a) {
    u -= probs[a];
    if (u < 0.0) return a;
  }
  // Rounding left a sliver of mass: return the last action with nonzero probability.
  for (int a = n - 1; a >= 0; --a)
    if (probs[a] > 0.0) return a;
  return n - 1;
}

ExplorationSchedule::ExplorationSchedule(double start, double end, long decay_episodes)
    : start_(start), end_(end), decay_episodes_(decay_episodes) {
  if (start < end) throw std::invalid_argument("epsilon must not increase");
  if (start > 1.0 || end < 0.0) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

double ExplorationSchedule::epsilon(long episode) const {
  if (decay_episodes_ <= 0 || episode >= decay_episodes_) return end_;
  if (episode <= 0) return start_;
  const double frac = static_cast<double>(episode) / static_cast<double>(decay_episodes_);
  return std::max(end_, start_ + (end_ - start_) * frac);
}

TabularActorCritic::TabularActorCritic(int states, int actions, ActorCriticParams params)
    : states_(states),
      actions_(actions),
      params_(params),
      prefs_(static_cast<std::size_t>(states * actions), 0.0),
      values_(static_cast<std::size_t>(states), 0.0) {
  if (states <= 0 || actions <= 0)
    throw std::invalid_argument("tabular learner needs states and actions");
}

std::vector<double> TabularActorCritic::policy(int state) const {
  const auto row = std::span<const double>(prefs_).subspan(
      static_cast<std::size_t>(state * actions_), static_cast<std::size_t>(actions_));
  return softmax(row);
}

double TabularActorCritic::td_update(int state, int action, double reward,
                                     int next_state, bool done) {
  const double bootstrap = done ? 0.0 : params_.discount * values_[next_state];
  const double td_error = reward + bootstrap - values_[state];
  const std::vector<double> pi = policy(state);
  values_[state] += params_.critic_step * td_error;
  double* row = &prefs_[static_cast<std::size_t>(state * actions_)];
  for (int b = 0; b < actions_; ++b) {
    const double grad_log = (b == action ? 1.0 : 0.0) - pi[b];
    row[b] += params_.actor_step * td_error * grad_log;
  }
  return td_error;
}

MlpPolicy::MlpPolicy(std::size_t inputs, std::size_t hidden, std::size_t actions)
    : inputs_(inputs), hidden_(hidden), actions_(actions) {
  if (inputs == 0 || hidden == 0 || actions == 0)
    throw std::invalid_argument("network dimensions must be positive");
  params_.assign(hidden * inputs + hidden + actions * hidden + actions + hidden + 1, 0.0);
}

void MlpPolicy::initialize(Rng& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& p : params_) p = dist(rng);
}

MlpPolicy::Forward MlpPolicy::forward(std::span<const double> observation) const {
  if (observation.size() != inputs_)
    throw std::invalid_argument("observation length does not match network input");
  Forward f;
  f.hidden.assign(params_.begin() + static_cast<std::ptrdiff_t>(b1()),
                  params_.begin() + static_cast<std::ptrdiff_t>(b1() + hidden_));
  // Observations are sparse one-hot grids: accumulate only active input columns.
  for (std::size_t i = 0; i < inputs_; ++i) {
    const double x = observation[i];
    if (x == 0.0) continue;
    for (std::size_t j = 0; j < hidden_; ++j) f.hidden[j] += params_[w1() + i * hidden_ + j] * x;
  }
  for (double& h : f.hidden) h = std::tanh(h);

  std::vector<double> logits(actions_);
  for (std::size_t k = 0; k < actions_; ++k) {
    double z = params_[bp() + k];
    const double* w = &params_[wp() + k * hidden_];
    for (std::size_t j = 0; j < hidden_; ++j) z += w[j] * f.hidden[j];
    logits[k] = z;
  }
  f.log_probs = log_softmax(logits);
  f.probs.resize(actions_);
  for (std::size_t k = 0; k < actions_; ++k) f.probs[k] = std::exp(f.log_probs[k]);

  double v = params_[bv()];
  for (std::size_t j = 0; j < hidden_; ++j) v += params_[wv() + j] * f.hidden[j];
  f.value = v;
  return f;
}

double MlpPolicy::loss(const Transition& t) const {
  const Forward f = forward(t.observation);
  double entropy = 0.0;
  for (std::size_t k = 0; k < actions_; ++k) entropy -= f.probs[k] * f.log_probs[k];
  const double err = t.value_target - f.value;
  return t.policy_weight *
             (-t.advantage * f.log_probs[static_cast<std::size_t>(t.action)] -
              t.entropy_weight * entropy) +
         t.value_weight * 0.5 * err * err;
}

void MlpPolicy::backward(const Transition& t, const Forward& f,
                         std::span<double> grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("gradient buffer has the wrong size");
  if (t.action < 0 || static_cast<std::size_t>(t.action) >= actions_)
    throw std::invalid_argument("action out of range");

  double entropy = 0.0;
  for (std::size_t k = 0; k < actions_; ++k) entropy -= f.probs[k] * f.log_probs[k];

  std::vector<double> g_logits(actions_);
  for (std::size_t k = 0; k < actions_; ++k) {
    const double onehot = static_cast<std::size_t>(t.action) == k ? 1.0 : 0.0;
    g_logits[k] = t.policy_weight * (-t.advantage * (onehot - f.probs[k]) +
                                     t.entropy_weight * f.probs[k] * (f.log_probs[k] + entropy));
  }
  const double g_value = -t.value_weight * (t.value_target - f.value);

  std::vector<double> g_hidden(hidden_, 0.0);
  for (std::size_t k = 0; k < actions_; ++k) {
    const double g = g_logits[k];
    grad[bp() + k] += g;
    if (g == 0.0) continue;
    const double* w = &params_[wp() + k * hidden_];
    double* gw = &grad[wp() + k * hidden_];
    for (std::size_t j = 0; j < hidden_; ++j) {
      gw[j] += g * f.hidden[j];
      g_hidden[j] += g * w[j];
    }
  }
  grad[bv()] += g_value;
  for (std::size_t j = 0; j < hidden_; ++j) {
    grad[wv() + j] += g_value * f.hidden[j];
    g_hidden[j] += g_value * params_[wv() + j];
  }

  for (std::size_t j = 0; j < hidden_; ++j) {
    const double g_pre = g_hidden[j] * (1.0 - f.hidden[j] * f.hidden[j]);
    g_hidden[j] = g_pre;
    grad[b1() + j] += g_pre;
  }
  for (std::size_t i = 0; i < inputs_; ++i) {
    const double x = t.observation[i];
    if (x == 0.0) continue;
    for (std::size_t j = 0; j < hidden_; ++j) grad[w1() + i * hidden_ + j] += g_hidden[j] * x;
  }
}

std::vector<double> MlpPolicy::gradient(const Transition& t) const {
  std::vector<double> grad(params_.size(), 0.0);
  backward(t, forward(t.observation), grad);
  return grad;
}

void MlpPolicy::save(std::ostream& out) const {
  out << "mlp " << inputs_ << ' ' << hidden_ << ' ' << actions_ << ' ' << params_.size()
      << '\n';
  out.precision(std::numeric_limits<double>::max_digits10);
  for (double p : params_) out << p << '\n';
}

MlpPolicy MlpPolicy::load(std::istream& in) {
  std::string tag;
  std::size_t inputs = 0, hidden = 0, actions = 0, count = 0;
  if (!(in >> tag >> inputs >> hidden >> actions >> count) || tag != "mlp")
    throw std::runtime_error("malformed network snapshot header");
  MlpPolicy net(inputs, hidden, actions);
  if (count != net.parameter_count())
    throw std::runtime_error("network snapshot parameter count does not match shape");
  for (double& p : net.params_)
    if (!(in >> p)) throw std::runtime_error("truncated network snapshot");
  return net;
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace rshare
