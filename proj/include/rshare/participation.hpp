#pragma once

// Reward-share ownership and the redistribution mechanisms built on it.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rshare {

using RewardVector = std::vector<double>;

// n x n column-stochastic ownership matrix. Entry (i, j) is the fraction of
// agent j's environmental reward that agent i receives.
class ShareAllocation {
 public:
  static ShareAllocation identity(std::size_t agents);
  // Every agent receives 1/n of every reward stream.
  static ShareAllocation uniform(std::size_t agents);
  // Validates entries in [0, 1] and unit column sums; throws std::invalid_argument.
  static ShareAllocation from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t agents() const { return n_; }
  double operator()(std::size_t holder, std::size_t owner) const {
    return w_[holder * n_ + owner];
  }
  double own_share(std::size_t agent) const { return (*this)(agent, agent); }
  double column_sum(std::size_t owner) const;

  bool operator==(const ShareAllocation&) const = default;

 private:
  ShareAllocation(std::size_t n, std::vector<double> w) : n_(n), w_(std::move(w)) {}

  std::size_t n_ = 0;
  std::vector<double> w_;
};

// Effective reward of agent i: sum_j w(i, j) * r[j].
RewardVector apply_participation(const ShareAllocation& alloc,
                                 std::span<const double> rewards);

// Every agent receives the mean of all rewards.
RewardVector equal_split(std::span<const double> rewards);

enum class TradeIntent { kHold = 0, kBuyOwn = 1, kBuyOther = 2 };
enum class TradeOutcome { kNone = 0, kOwnUp = 1, kOwnDown = 2 };

std::string to_string(TradeIntent intent);
std::string to_string(TradeOutcome outcome);

// Two-agent holdings on the grid {0, delta, ..., 1}. Each agent's own share is
// an integer tick count; the remainder of its reward stream belongs to the other
// agent, so columns always sum to exactly one.
class TickShares {
 public:
  // ticks_per_unit = 1 / delta (2 for 50% trades, 10 for 10% trades).
  explicit TickShares(int ticks_per_unit);
  TickShares(int ticks_per_unit, std::array<int, 2> own_ticks);

  int ticks_per_unit() const { return ticks_per_unit_; }
  int own_ticks(int agent) const { return own_ticks_[agent]; }
  double own_share(int agent) const {
    return static_cast<double>(own_ticks_[agent]) / ticks_per_unit_;
  }
  double delta() const { return 1.0 / ticks_per_unit_; }
  ShareAllocation allocation() const;

  bool operator==(const TickShares&) const = default;

 private:
  int ticks_per_unit_;
  std::array<int, 2> own_ticks_;
};

struct TradeResult {
  TickShares shares;
  TradeOutcome outcome;
};

// A trade happens only when both agents ask for the same direction and both
// sides can move one tick; otherwise holdings are unchanged.
TradeResult execute_trade(const TickShares& shares,
                          std::array<TradeIntent, 2> intents);

inline constexpr int kPreTradeChoices = 6;

// Choice k in 0..5 requests an own share of k * 20%. The largest request wins
// for every agent; the remainder is split equally over the other agents.
ShareAllocation pre_trade_resolve(std::span<const int> choices);

// Choices 0-2 stay out of the pool, 3-5 join it.
bool joins_pool(int choice);

// Participants receive the mean of the participants' rewards; everyone else
// keeps their own reward.
RewardVector common_pool_resolve(const std::vector<bool>& participants,
                                 std::span<const double> rewards);

// Column-stochastic matrix equivalent to common_pool_resolve.
ShareAllocation common_pool_allocation(const std::vector<bool>& participants);

}  // namespace rshare
