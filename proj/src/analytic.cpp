#include "rshare/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rshare/rng.hpp"

namespace rshare::analytic {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
}

double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// d r^1 / dm = (1, 3, 0, 2) and d r^2 / dn = (1, 0, 3, 2); the bracket is the
// expectation of that derivative under the joint policy.
double seller_bracket(double own_coop, double other_coop) {
  return own_coop * other_coop + 3.0 * own_coop * (1.0 - other_coop) +
         2.0 * (1.0 - own_coop) * (1.0 - other_coop);
}

}  // namespace

Vec4 joint_probs(double coop1, double coop2) {
  return {coop1 * coop2, coop1 * (1.0 - coop2), (1.0 - coop1) * coop2,
          (1.0 - coop1) * (1.0 - coop2)};
}

std::pair<Vec4, Vec4> reward_vectors(double m, double n) {
  const Vec4 r1{-1.0 + m - n, -3.0 + 3.0 * m, -3.0 * n, -2.0 + 2.0 * m - 2.0 * n};
  const Vec4 r2{-1.0 - m + n, -3.0 * m, -3.0 + 3.0 * n, -2.0 - 2.0 * m + 2.0 * n};
  return {r1, r2};
}

double value(double coop1, double coop2, double m, double n, double gamma, int agent) {
  check_gamma(gamma);
  if (agent != 1 && agent != 2) throw std::invalid_argument("agent must be 1 or 2");
  const auto [r1, r2] = reward_vectors(m, n);
  return dot(joint_probs(coop1, coop2), agent == 1 ? r1 : r2) / (1.0 - gamma);
}

double broker_price(double coop1, double coop2, double gamma) {
  check_gamma(gamma);
  return -seller_bracket(coop1, coop2) / (1.0 - gamma);
}

std::pair<double, double> policy_update(const TheoryState& s) {
  check_gamma(s.gamma);
  const double step = s.alpha / (1.0 - s.gamma);
  const double m = s.m();
  const double n = s.n();
  const double next1 = s.coop1 + step * (2.0 * n + m - 1.0);
  const double next2 = s.coop2 + step * (2.0 * m + n - 1.0);
  return {std::clamp(next1, 0.0, 1.0), std::clamp(next2, 0.0, 1.0)};
}

TradeMarginals trade_marginals(const TheoryState& s, int share_of_agent, PriceMode mode) {
  check_gamma(s.gamma);
  double seller_gain = 0.0;  // d V_seller / d share
  double price = 0.0;
  if (share_of_agent == 1) {
    seller_gain = seller_bracket(s.coop1, s.coop2) / (1.0 - s.gamma);
    if (mode != PriceMode::kNone) price = broker_price(s.coop1, s.coop2, s.gamma);
  } else if (share_of_agent == 2) {
    seller_gain = seller_bracket(s.coop2, s.coop1) / (1.0 - s.gamma);
    if (mode != PriceMode::kNone) price = broker_price(s.coop2, s.coop1, s.gamma);
  } else {
    throw std::invalid_argument("share_of_agent must be 1 or 2");
  }
  // Cross-holdings are zero-sum: the buyer's marginal is the seller's negated.
  TradeMarginals out;
  out.seller = seller_gain + price;
  out.buyer = -seller_gain - price;
  if (mode == PriceMode::kLiteralBracket) out.seller += s.tick * price / (1.0 - s.gamma);
  return out;
}

TheoryState share_update(const TheoryState& s, PriceMode mode) {
  TheoryState next = s;
  const int cap_ticks = static_cast<int>(std::floor(s.cap / s.tick + 1e-9));
  const auto willing = [&](int agent) {
    const TradeMarginals mg = trade_marginals(s, agent, mode);
    return std::min(mg.seller, mg.buyer) >= 0.0;
  };
  if (s.m_ticks < cap_ticks && willing(1)) ++next.m_ticks;
  if (s.n_ticks < cap_ticks && willing(2)) ++next.n_ticks;
  return next;
}

std::vector<SeriesPoint> simulate_run(const SimulationConfig& cfg, int run) {
  Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(run), Stream::kInit);
  std::uniform_real_distribution<double> init(cfg.init_low, cfg.init_high);
  TheoryState s;
  s.coop1 = init(rng);
  s.coop2 = init(rng);
  s.tick = cfg.tick;
  s.cap = cfg.cap;
  s.gamma = cfg.gamma;
  s.alpha = cfg.alpha;

  std::vector<SeriesPoint> series;
  series.reserve(static_cast<std::size_t>(cfg.episodes));
  for (int ep = 1; ep <= cfg.episodes; ++ep) {
    s = share_update(s, cfg.price);
    std::tie(s.coop1, s.coop2) = policy_update(s);

    SeriesPoint pt;
    pt.run = run;
    pt.episode = ep;
    pt.m = s.m();
    pt.n = s.n();
    pt.coop1 = s.coop1;
    pt.coop2 = s.coop2;
    pt.price = broker_price(s.coop1, s.coop2, s.gamma);
    const auto [r1, r2] = reward_vectors(pt.m, pt.n);
    const Vec4 p = joint_probs(s.coop1, s.coop2);
    pt.joint_reward = dot(p, r1) + dot(p, r2);
    series.push_back(pt);
  }
  return series;
}

std::vector<SeriesPoint> simulate(const SimulationConfig& cfg) {
  if (cfg.runs < 1 || cfg.episodes < 1)
    throw std::invalid_argument("simulate needs at least one run and one episode");
  std::vector<SeriesPoint> all;
  for (int run = 0; run < cfg.runs; ++run) {
    auto series = simulate_run(cfg, run);
    all.insert(all.end(), series.begin(), series.end());
  }
  return all;
}

}  // namespace rshare::analytic
