#pragma once

// Iterated Prisoner's Dilemma with the five participation variants.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "rshare/participation.hpp"
#include "rshare/rng.hpp"

namespace rshare::ipd {

enum class Move { kCooperate = 0, kDefect = 1 };

// Joint env action index: 0 = CC, 1 = CD, 2 = DC, 3 = DD (agent 1 first).
inline constexpr int kJointActions = 4;
inline int joint_index(Move a1, Move a2) {
  return static_cast<int>(a1) * 2 + static_cast<int>(a2);
}

// CC (-1,-1), CD (-3,0), DC (0,-3), DD (-2,-2).
std::array<double, 2> pd_step(Move a1, Move a2);

enum class Variant {
  kNoParticipation,  // (i)
  kEqualSplit,       // (ii)
  kChooseShare,      // (iii)
  kTrade50,          // (iv)
  kTrade10,          // (v)
};

struct VariantSpec {
  Variant tag;
  int episode_length;
  int ticks_per_unit;  // trade grid; 0 when the variant has no trading

  static VariantSpec preset(Variant tag);
  int state_count() const;
  int action_count() const;
  bool trades() const { return ticks_per_unit > 0; }
};

std::string to_string(Variant v);

struct State {
  int last_joint = 0;  // previous joint env action; (C, C) before the first step
  int own_ticks = 0;   // this agent's own-share ticks (trading variants)
  TradeOutcome last_trade = TradeOutcome::kNone;
  bool shared = false;  // both agents shared last step (variant iii)

  bool operator==(const State&) const = default;
};

State initial_state(const VariantSpec& spec);
// Mixed-radix index in [0, state_count). Throws std::invalid_argument when the
// state does not fit the variant.
int encode_state(const VariantSpec& spec, const State& s);
State decode_state(const VariantSpec& spec, int index);

// Agent action decomposed into its env move and its participation component.
struct Action {
  Move move = Move::kCooperate;
  bool share = false;                       // variant iii
  TradeIntent intent = TradeIntent::kHold;  // variants iv, v
};
Action decode_action(const VariantSpec& spec, int action);
int encode_action(const VariantSpec& spec, const Action& a);

struct StepRecord {
  std::array<int, 2> states{};
  std::array<int, 2> actions{};
  std::array<int, 2> next_states{};
  std::array<double, 2> env_rewards{};
  std::array<double, 2> effective_rewards{};
  double own_share = 1.0;  // own share after this step's trade settles
  TradeOutcome trade = TradeOutcome::kNone;
  bool done = false;
};

struct Episode {
  std::vector<StepRecord> steps;
  ShareAllocation final_allocation = ShareAllocation::identity(2);
};

// Picks an action for (agent, encoded state).
using ActionSelector = std::function<int(int agent, int state, Rng& rng)>;

// Two-agent environment. Holdings reset to the identity allocation each episode.
class Game {
 public:
  explicit Game(VariantSpec spec);

  const VariantSpec& spec() const { return spec_; }
  void reset();
  int state_index(int agent) const;
  StepRecord step(std::array<int, 2> actions);
  bool done() const { return t_ >= spec_.episode_length; }
  ShareAllocation allocation() const;

 private:
  VariantSpec spec_;
  int t_ = 0;
  int last_joint_ = 0;
  TradeOutcome last_trade_ = TradeOutcome::kNone;
  bool shared_ = false;
  TickShares shares_{1};
};

Episode play_episode(const VariantSpec& spec, const ActionSelector& select, Rng& rng);

}  // namespace rshare::ipd
