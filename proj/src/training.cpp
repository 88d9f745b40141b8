#include "rshare/training.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rshare {

ExplorationSchedule ExplorationConfig::schedule(long episodes) const {
  return ExplorationSchedule(start, end,
                             static_cast<long>(decay_fraction * static_cast<double>(episodes)));
}

IpdRunResult train_ipd(const IpdTrainConfig& cfg, std::uint64_t seed, int run) {
  const auto spec = ipd::VariantSpec::preset(cfg.variant);
  IpdRunResult result;
  result.learners.assign(2, TabularActorCritic(spec.state_count(), spec.action_count(),
                                               cfg.learner));
  result.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(run), Stream::kPolicy);
  const ExplorationSchedule schedule = cfg.exploration.schedule(cfg.episodes);

  for (long e = 0; e < cfg.episodes; ++e) {
    const double eps = schedule.epsilon(e);
    const ipd::ActionSelector select = [&](int agent, int state, Rng& r) {
      const auto probs = result.learners[static_cast<std::size_t>(agent)].policy(state);
      return select_action(probs, eps, r);
    };
    const ipd::Episode ep = ipd::play_episode(spec, select, rng);

    IpdEpisodeStats stats;
    stats.episode = e;
    for (const auto& st : ep.steps) {
      for (int i = 0; i < 2; ++i) {
        result.learners[static_cast<std::size_t>(i)].td_update(
            st.states[i], st.actions[i], st.effective_rewards[i], st.next_states[i], st.done);
        if (ipd::decode_action(spec, st.actions[i]).move == ipd::Move::kCooperate)
          stats.cooperation[i] += 1.0;
      }
      stats.joint_reward += st.env_rewards[0] + st.env_rewards[1];
      if (st.trade != TradeOutcome::kNone) ++stats.trades;
    }
    const double steps = static_cast<double>(ep.steps.size());
    stats.joint_reward /= steps;
    for (double& c : stats.cooperation) c /= steps;
    stats.own_share = ep.steps.back().own_share;
    result.episodes.push_back(stats);
  }
  return result;
}

void lambda_returns(std::span<const double> rewards, std::span<const double> values,
                    double gamma, double lambda, std::vector<double>& advantages,
                    std::vector<double>& targets) {
  const std::size_t n = rewards.size();
  if (values.size() != n) throw std::invalid_argument("one value per reward required");
  advantages.assign(n, 0.0);
  targets.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double next_value = k + 1 < n ? values[k + 1] : 0.0;
    const double delta = rewards[k] + gamma * next_value - values[k];
    running = delta + gamma * lambda * running;
    advantages[k] = running;
    targets[k] = running + values[k];
  }
}

CleanupRunResult train_cleanup(const CleanupTrainConfig& cfg, std::uint64_t seed, int run,
                               const CleanupProgress& progress) {
  cfg.env.validate();
  const int n = cfg.env.agents();
  const std::size_t obs_size = cleanup::observation_size(cfg.env);
  const auto run_id = static_cast<std::uint64_t>(run);

  Rng init_rng = make_rng(seed, run_id, Stream::kInit);
  Rng env_rng = make_rng(seed, run_id, Stream::kEnvironment);
  Rng policy_rng = make_rng(seed, run_id, Stream::kPolicy);

  CleanupRunResult result;
  std::vector<Adam> optimizers;
  for (int i = 0; i < n; ++i) {
    MlpPolicy net(obs_size, cfg.hidden, cleanup::kActions);
    net.initialize(init_rng, cfg.init_scale);
    optimizers.emplace_back(net.parameter_count(), cfg.learning_rate);
    result.policies.push_back(std::move(net));
  }
  result.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
  const ExplorationSchedule schedule = cfg.exploration.schedule(cfg.episodes);

  std::vector<double> grad, values, advantages, targets;
  for (long e = 0; e < cfg.episodes; ++e) {
    const double eps = schedule.epsilon(e);
    const cleanup::Selector select = [&](const cleanup::DecisionContext& ctx,
                                         std::span<const double> obs, Rng& r) {
      const auto fwd = result.policies[static_cast<std::size_t>(ctx.agent)].forward(obs);
      return select_action(fwd.probs, eps, r);
    };
    const cleanup::Episode ep =
        cleanup::play_episode(cfg.env, cfg.mechanism, select, env_rng, policy_rng);

    for (int i = 0; i < n; ++i) {
      MlpPolicy& net = result.policies[static_cast<std::size_t>(i)];
      const cleanup::Trajectory& traj = ep.trajectories[static_cast<std::size_t>(i)];
      const std::size_t len = traj.actions.size();
      std::vector<MlpPolicy::Forward> fwds;
      fwds.reserve(len);
      values.resize(len);
      for (std::size_t t = 0; t < len; ++t) {
        fwds.push_back(net.forward(traj.observations[t]));
        values[t] = fwds.back().value;
      }
      lambda_returns(traj.rewards, values, cfg.discount, cfg.gae_lambda, advantages, targets);

      grad.assign(net.parameter_count(), 0.0);
      const double scale = 1.0 / static_cast<double>(len);
      for (std::size_t t = 0; t < len; ++t) {
        MlpPolicy::Transition tr;
        tr.observation = traj.observations[t];
        tr.action = traj.actions[t];
        tr.advantage = advantages[t];
        tr.value_target = targets[t];
        tr.policy_weight = scale;
        tr.value_weight = cfg.value_weight * scale;
        tr.entropy_weight = cfg.entropy_weight;
        net.backward(tr, fwds[t], grad);
      }
      optimizers[static_cast<std::size_t>(i)].step(net.parameters(), grad);
    }

    CleanupEpisodeStats stats;
    stats.episode = e;
    stats.joint_reward = ep.joint_env_reward();
    stats.rewards.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& r : ep.effective_rewards)
      for (int i = 0; i < n; ++i)
        stats.rewards[static_cast<std::size_t>(i)] += r[static_cast<std::size_t>(i)];
    stats.apples = ep.apples_collected;
    stats.waste_cleared = ep.waste_cleared;
    double own = 0.0;
    for (int i = 0; i < n; ++i) own += ep.allocation.own_share(static_cast<std::size_t>(i));
    stats.own_share = own / n;
    stats.participants =
        static_cast<int>(std::count(ep.participants.begin(), ep.participants.end(), true));
    if (progress) progress(stats);
    result.episodes.push_back(std::move(stats));
  }
  return result;
}

}  // namespace rshare
