#include "rshare/matrix_games.hpp"

#include <stdexcept>

namespace rshare::ipd {

std::array<double, 2> pd_step(Move a1, Move a2) {
  static constexpr std::array<std::array<double, 2>, kJointActions> kTable{{
      {-1.0, -1.0},
      {-3.0, 0.0},
      {0.0, -3.0},
      {-2.0, -2.0},
  }};
  return kTable[joint_index(a1, a2)];
}

VariantSpec VariantSpec::preset(Variant tag) {
  switch (tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
    case Variant::kChooseShare:
      return {tag, 5, 0};
    case Variant::kTrade50:
      return {tag, 40, 2};
    case Variant::kTrade10:
      return {tag, 40, 10};
  }
  throw std::invalid_argument("unknown IPD variant");
}

int VariantSpec::state_count() const {
  switch (tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
      return kJointActions;
    case Variant::kChooseShare:
      return 2 * kJointActions;
    case Variant::kTrade50:
    case Variant::kTrade10:
      return kJointActions * (ticks_per_unit + 1) * 3;
  }
  return 0;
}

int VariantSpec::action_count() const {
  switch (tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
      return 2;
    case Variant::kChooseShare:
      return 4;
    case Variant::kTrade50:
    case Variant::kTrade10:
      return 6;
  }
  return 0;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kNoParticipation: return "no_participation";
    case Variant::kEqualSplit: return "equal_split";
    case Variant::kChooseShare: return "choose_share";
    case Variant::kTrade50: return "trade50";
    case Variant::kTrade10: return "trade10";
  }
  return "?";
}

State initial_state(const VariantSpec& spec) {
  State s;
  s.own_ticks = spec.ticks_per_unit;
  return s;
}

int encode_state(const VariantSpec& spec, const State& s) {
  if (s.last_joint < 0 || s.last_joint >= kJointActions)
    throw std::invalid_argument("joint action out of range");
  const bool trading = spec.trades();
  if (!trading && (s.own_ticks != 0 || s.last_trade != TradeOutcome::kNone))
    throw std::invalid_argument("share state given to a non-trading variant");
  if (spec.tag != Variant::kChooseShare && s.shared)
    throw std::invalid_argument("sharing flag given to a variant without sharing");

  switch (spec.tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
      return s.last_joint;
    case Variant::kChooseShare:
      return (s.shared ? 1 : 0) * kJointActions + s.last_joint;
    case Variant::kTrade50:
    case Variant::kTrade10:
      if (s.own_ticks < 0 || s.own_ticks > spec.ticks_per_unit)
        throw std::invalid_argument("own-share ticks out of range");
      return (s.last_joint * (spec.ticks_per_unit + 1) + s.own_ticks) * 3 +
             static_cast<int>(s.last_trade);
  }
  throw std::invalid_argument("unknown IPD variant");
}

State decode_state(const VariantSpec& spec, int index) {
  if (index < 0 || index >= spec.state_count())
    throw std::invalid_argument("state index out of range");
  State s;
  switch (spec.tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
      s.last_joint = index;
      break;
    case Variant::kChooseShare:
      s.shared = index >= kJointActions;
      s.last_joint = index % kJointActions;
      break;
    case Variant::kTrade50:
    case Variant::kTrade10:
      s.last_trade = static_cast<TradeOutcome>(index % 3);
      index /= 3;
      s.own_ticks = index % (spec.ticks_per_unit + 1);
      s.last_joint = index / (spec.ticks_per_unit + 1);
      break;
  }
  return s;
}

Action decode_action(const VariantSpec& spec, int action) {
  if (action < 0 || action >= spec.action_count())
    throw std::invalid_argument("action out of range");
  Action a;
  switch (spec.tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
      a.move = static_cast<Move>(action);
      break;
    case Variant::kChooseShare:
      a.move = static_cast<Move>(action / 2);
      a.share = (action % 2) == 1;
      break;
    case Variant::kTrade50:
    case Variant::kTrade10:
      a.move = static_cast<Move>(action / 3);
      a.intent = static_cast<TradeIntent>(action % 3);
      break;
  }
  return a;
}

int encode_action(const VariantSpec& spec, const Action& a) {
  const int move = static_cast<int>(a.move);
  switch (spec.tag) {
    case Variant::kNoParticipation:
    case Variant::kEqualSplit:
      return move;
    case Variant::kChooseShare:
      return move * 2 + (a.share ? 1 : 0);
    case Variant::kTrade50:
    case Variant::kTrade10:
      return move * 3 + static_cast<int>(a.intent);
  }
  throw std::invalid_argument("unknown IPD variant");
}

Game::Game(VariantSpec spec) : spec_(spec) { reset(); }

void Game::reset() {
  t_ = 0;
  last_joint_ = joint_index(Move::kCooperate, Move::kCooperate);
  last_trade_ = TradeOutcome::kNone;
  shared_ = false;
  shares_ = TickShares(spec_.trades() ? spec_.ticks_per_unit : 1);
}

int Game::state_index(int agent) const {
  State s;
  s.last_joint = last_joint_;
  if (spec_.trades()) {
    s.own_ticks = shares_.own_ticks(agent);
    s.last_trade = last_trade_;
  }
  s.shared = spec_.tag == Variant::kChooseShare && shared_;
  return encode_state(spec_, s);
}

ShareAllocation Game::allocation() const {
  if (spec_.trades()) return shares_.allocation();
  return ShareAllocation::identity(2);
}

StepRecord Game::step(std::array<int, 2> actions) {
  if (done()) throw std::logic_error("step called on a finished IPD episode");
  StepRecord rec;
  rec.states = {state_index(0), state_index(1)};
  rec.actions = actions;

  const Action a0 = decode_action(spec_, actions[0]);
  const Action a1 = decode_action(spec_, actions[1]);
  const auto env = pd_step(a0.move, a1.move);
  rec.env_rewards = env;

  RewardVector effective;
  switch (spec_.tag) {
    case Variant::kNoParticipation:
      effective = {env[0], env[1]};
      shared_ = false;
      break;
    case Variant::kEqualSplit:
      effective = equal_split(env);
      break;
    case Variant::kChooseShare:
      // Settles within the step: only a joint decision to share splits rewards.
      shared_ = a0.share && a1.share;
      effective = shared_ ? equal_split(env) : RewardVector{env[0], env[1]};
      break;
    case Variant::kTrade50:
    case Variant::kTrade10: {
      // Trades settle before the step's payoff is distributed.
      const TradeResult traded = execute_trade(shares_, {a0.intent, a1.intent});
      shares_ = traded.shares;
      last_trade_ = traded.outcome;
      rec.trade = traded.outcome;
      effective = apply_participation(shares_.allocation(), env);
      break;
    }
  }
  rec.effective_rewards = {effective[0], effective[1]};
  if (spec_.trades())
    rec.own_share = 0.5 * (shares_.own_share(0) + shares_.own_share(1));
  else if (spec_.tag == Variant::kEqualSplit || shared_)
    rec.own_share = 0.5;

  last_joint_ = joint_index(a0.move, a1.move);
  ++t_;
  rec.done = done();
  rec.next_states = {state_index(0), state_index(1)};
  return rec;
}

Episode play_episode(const VariantSpec& spec, const ActionSelector& select, Rng& rng) {
  Game game(spec);
  Episode ep;
  ep.steps.reserve(static_cast<std::size_t>(spec.episode_length));
  while (!game.done()) {
    std::array<int, 2> actions{};
    for (int i = 0; i < 2; ++i) actions[i] = select(i, game.state_index(i), rng);
    ep.steps.push_back(game.step(actions));
  }
  ep.final_allocation = game.allocation();
  return ep;
}

}  // namespace rshare::ipd
