#pragma once

// Closed-form dynamics of the two-agent Prisoner's Dilemma with cross-held
// reward shares: cooperation probabilities follow the exact value gradient and
// shares move one tick per episode when both sides are willing to trade.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace rshare::analytic {

// Joint-action order everywhere: CC, CD, DC, DD (agent 1 first).
using Vec4 = std::array<double, 4>;

Vec4 joint_probs(double coop1, double coop2);

// m: share of agent 1's reward held by agent 2; n: share of agent 2's reward
// held by agent 1.
std::pair<Vec4, Vec4> reward_vectors(double m, double n);

// Discounted value 1/(1-gamma) * p^T r^agent, agent in {1, 2}.
double value(double coop1, double coop2, double m, double n, double gamma, int agent);

// Broker price at which the seller of agent 1's share is indifferent; always <= 0.
double broker_price(double coop1, double coop2, double gamma);

enum class PriceMode {
  kNone,            // shares change hands for free
  kPerUnitTransfer, // seller marginal dV/dm + p, buyer -dV/dm - p
  kLiteralBracket,  // the Delta m * p term inside the discounted bracket
};

struct TheoryState {
  double coop1 = 0.5;
  double coop2 = 0.5;
  int m_ticks = 0;
  int n_ticks = 0;
  double tick = 0.05;   // share step Delta m
  double cap = 0.5;
  double gamma = 0.9;
  double alpha = 0.1;   // policy step

  double m() const { return m_ticks * tick; }
  double n() const { return n_ticks * tick; }
};

// Gradient step on both cooperation probabilities, clipped to [0, 1].
std::pair<double, double> policy_update(const TheoryState& s);

struct TradeMarginals {
  double seller = 0.0;
  double buyer = 0.0;
};
// Marginal value of one share tick for seller and buyer. share_of_agent = 1
// prices agent 1's share (m), 2 prices agent 2's share (n).
TradeMarginals trade_marginals(const TheoryState& s, int share_of_agent, PriceMode mode);

// Moves m and n one tick each where both sides' marginals are >= 0 (indifferent
// agents trade) and the cap allows it.
TheoryState share_update(const TheoryState& s, PriceMode mode);

struct SimulationConfig {
  int runs = 20;
  int episodes = 100;
  double gamma = 0.9;
  double alpha = 0.1;
  double tick = 0.05;
  double cap = 0.5;
  double init_low = 0.2;
  double init_high = 0.8;
  PriceMode price = PriceMode::kPerUnitTransfer;
  std::uint64_t seed = 0;
};

struct SeriesPoint {
  int run = 0;
  int episode = 0;  // 1-based; recorded after the episode's updates
  double m = 0.0;
  double n = 0.0;
  double coop1 = 0.0;
  double coop2 = 0.0;
  double price = 0.0;
  double joint_reward = 0.0;  // expected per-step joint reward
};

// Per episode: share update, then policy update.
std::vector<SeriesPoint> simulate_run(const SimulationConfig& cfg, int run);
std::vector<SeriesPoint> simulate(const SimulationConfig& cfg);

}  // namespace rshare::analytic
