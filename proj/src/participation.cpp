#include "rshare/participation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rshare {

namespace {
constexpr double kColumnTolerance = 1e-12;
}  // namespace

ShareAllocation ShareAllocation::identity(std::size_t agents) {
  if (agents == 0) throw std::invalid_argument("allocation needs at least one agent");
  std::vector<double> w(agents * agents, 0.0);
  for (std::size_t i = 0; i < agents; ++i) w[i * agents + i] = 1.0;
  return ShareAllocation(agents, std::move(w));
}

ShareAllocation ShareAllocation::uniform(std::size_t agents) {
  if (agents == 0) throw std::invalid_argument("allocation needs at least one agent");
  return ShareAllocation(agents, std::vector<double>(agents * agents,
                                                     1.0 / static_cast<double>(agents)));
}

ShareAllocation ShareAllocation::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw std::invalid_argument("allocation needs at least one agent");
  std::vector<double> w;
  w.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("allocation must be square");
    for (double x : row) {
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("allocation entries must lie in [0, 1]");
      w.push_back(x);
    }
  }
  ShareAllocation alloc(n, std::move(w));
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(alloc.column_sum(j) - 1.0) > kColumnTolerance)
      throw std::invalid_argument("allocation columns must sum to 1");
  }
  return alloc;
}

double ShareAllocation::column_sum(std::size_t owner) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, owner);
  return s;
}

RewardVector apply_participation(const ShareAllocation& alloc,
                                 std::span<const double> rewards) {
  const std::size_t n = alloc.agents();
  if (rewards.size() != n)
    throw std::invalid_argument("reward vector length does not match allocation");
  RewardVector out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += alloc(i, j) * rewards[j];
  return out;
}

RewardVector equal_split(std::span<const double> rewards) {
  if (rewards.empty()) throw std::invalid_argument("equal_split of an empty reward vector");
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
                      static_cast<double>(rewards.size());
  return RewardVector(rewards.size(), mean);
}

std::string to_string(TradeIntent intent) {
  switch (intent) {
    case TradeIntent::kHold: return "hold";
    case TradeIntent::kBuyOwn: return "buy_own";
    case TradeIntent::kBuyOther: return "buy_other";
  }
  return "?";
}

std::string to_string(TradeOutcome outcome) {
  switch (outcome) {
    case TradeOutcome::kNone: return "none";
    case TradeOutcome::kOwnUp: return "own_up";
    case TradeOutcome::kOwnDown: return "own_down";
  }
  return "?";
}

TickShares::TickShares(int ticks_per_unit)
    : TickShares(ticks_per_unit, {ticks_per_unit, ticks_per_unit}) {}

TickShares::TickShares(int ticks_per_unit, std::array<int, 2> own_ticks)
    : ticks_per_unit_(ticks_per_unit), own_ticks_(own_ticks) {
  if (ticks_per_unit < 1) throw std::invalid_argument("ticks_per_unit must be >= 1");
  for (int t : own_ticks)
    if (t < 0 || t > ticks_per_unit)
      throw std::invalid_argument("own share ticks out of range");
}

ShareAllocation TickShares::allocation() const {
  const double own0 = own_share(0);
  const double own1 = own_share(1);
  return ShareAllocation::from_rows({{own0, 1.0 - own1}, {1.0 - own0, own1}});
}

TradeResult execute_trade(const TickShares& shares,
                          std::array<TradeIntent, 2> intents) {
  if (intents[0] != intents[1] || intents[0] == TradeIntent::kHold)
    return {shares, TradeOutcome::kNone};

  const int top = shares.ticks_per_unit();
  const int own0 = shares.own_ticks(0);
  const int own1 = shares.own_ticks(1);
  if (intents[0] == TradeIntent::kBuyOwn) {
    if (own0 < top && own1 < top)
      return {TickShares(top, {own0 + 1, own1 + 1}), TradeOutcome::kOwnUp};
  } else if (own0 > 0 && own1 > 0) {
    return {TickShares(top, {own0 - 1, own1 - 1}), TradeOutcome::kOwnDown};
  }
  return {shares, TradeOutcome::kNone};
}

ShareAllocation pre_trade_resolve(std::span<const int> choices) {
  const std::size_t n = choices.size();
  if (n < 2) throw std::invalid_argument("pre-trade needs at least two agents");
  for (int c : choices)
    if (c < 0 || c >= kPreTradeChoices)
      throw std::invalid_argument("pre-trade choice must be in 0..5");
  const int top = *std::max_element(choices.begin(), choices.end());
  const double own = static_cast<double>(top) / (kPreTradeChoices - 1);
  const double other = (1.0 - own) / static_cast<double>(n - 1);
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, other));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = own;
  return ShareAllocation::from_rows(rows);
}

bool joins_pool(int choice) {
  if (choice < 0 || choice >= kPreTradeChoices)
    throw std::invalid_argument("pool choice must be in 0..5");
  return choice >= 3;
}

RewardVector common_pool_resolve(const std::vector<bool>& participants,
                                 std::span<const double> rewards) {
  if (participants.size() != rewards.size())
    throw std::invalid_argument("participant flags do not match reward vector");
  double pool = 0.0;
  std::size_t members = 0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (participants[i]) {
      pool += rewards[i];
      ++members;
    }
  }
  RewardVector out(rewards.begin(), rewards.end());
  if (members == 0) return out;
  const double share = pool / static_cast<double>(members);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (participants[i]) out[i] = share;
  return out;
}

ShareAllocation common_pool_allocation(const std::vector<bool>& participants) {
  const std::size_t n = participants.size();
  const auto members = static_cast<std::size_t>(
      std::count(participants.begin(), participants.end(), true));
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (participants[i] && participants[j])
        rows[i][j] = 1.0 / static_cast<double>(members);
      else if (i == j)
        rows[i][j] = 1.0;
    }
  }
  return ShareAllocation::from_rows(rows);
}

}  // namespace rshare
