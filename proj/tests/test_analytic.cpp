#include <stdexcept>
#include <random>

#include "doctest.h"
#include "rshare/analytic.hpp"

using namespace rshare::analytic;

namespace {

// Direct transcription of the payoff table with cross-held shares: agent 1 keeps
// 1-m of its own payoff and receives n of agent 2's.
std::pair<Vec4, Vec4> reward_oracle(double m, double n) {
  const double base1[4] = {-1, -3, 0, -2};
  const double base2[4] = {-1, 0, -3, -2};
  Vec4 r1{}, r2{};
  for (int k = 0; k < 4; ++k) {
    r1[k] = (1 - m) * base1[k] + n * base2[k];
    r2[k] = (1 - n) * base2[k] + m * base1[k];
  }
  return {r1, r2};
}

double value_oracle(double c1, double c2, double m, double n, double gamma, int agent) {
  const auto [r1, r2] = reward_oracle(m, n);
  const Vec4& r = agent == 1 ? r1 : r2;
  const double p[4] = {c1 * c2, c1 * (1 - c2), (1 - c1) * c2, (1 - c1) * (1 - c2)};
  double v = 0.0;
  for (int k = 0; k < 4; ++k) v += p[k] * r[k];
  return v / (1 - gamma);
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("joint probabilities") {
  CHECK(joint_probs(1, 1) == Vec4{1, 0, 0, 0});
  CHECK(joint_probs(0.5, 0.5) == Vec4{0.25, 0.25, 0.25, 0.25});
  const Vec4 p = joint_probs(0.3, 0.8);
  const Vec4 want{0.24, 0.06, 0.56, 0.14};
  for (int k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(want[k]));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const Vec4 q = joint_probs(u(rng), u(rng));
    CHECK(std::abs(q[0] + q[1] + q[2] + q[3] - 1.0) <= 1e-12);
  }
}

TEST_CASE("reward vectors") {
  CHECK(reward_vectors(0, 0).first == Vec4{-1, -3, 0, -2});
  const auto half = reward_vectors(0.5, 0.5).first;
  const Vec4 want_half{-1, -1.5, -1.5, -2};
  for (int k = 0; k < 4; ++k) CHECK(half[k] == doctest::Approx(want_half[k]));
  const auto r = reward_vectors(0.1, 0.2).first;
  const Vec4 want{-1.1, -2.7, -0.6, -2.2};
  for (int k = 0; k < 4; ++k) CHECK(r[k] == doctest::Approx(want[k]));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 0.5);
  for (int t = 0; t < 500; ++t) {
    const double m = u(rng), n = u(rng);
    const auto [a1, a2] = reward_vectors(m, n);
    const auto [b1, b2] = reward_oracle(m, n);
    for (int k = 0; k < 4; ++k) {
      CHECK(a1[k] == doctest::Approx(b1[k]).epsilon(1e-12));
      CHECK(a2[k] == doctest::Approx(b2[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("values") {
  CHECK(value(1, 1, 0, 0, 0.9, 1) == doctest::Approx(-10));
  CHECK(value(0, 0, 0, 0, 0.9, 1) == doctest::Approx(-20));
  CHECK_THROWS_AS(value(0.5, 0.5, 0, 0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(value(0.5, 0.5, 0, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(value(0.5, 0.5, 0, 0, 0.9, 3), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1), s(0, 0.5), g(0.05, 0.95);
  for (int t = 0; t < 1000; ++t) {
    const double c1 = u(rng), c2 = u(rng), gamma = g(rng);
    const double m = s(rng), n = s(rng);
    for (int agent : {1, 2})
      CHECK(value(c1, c2, m, n, gamma, agent) ==
            doctest::Approx(value_oracle(c1, c2, m, n, gamma, agent)).epsilon(1e-12));
    // The total is independent of who holds which share.
    const double total = value(c1, c2, m, n, gamma, 1) + value(c1, c2, m, n, gamma, 2);
    const double plain = value(c1, c2, 0, 0, gamma, 1) + value(c1, c2, 0, 0, gamma, 2);
    CHECK(total == doctest::Approx(plain).epsilon(1e-12));
  }
}

TEST_CASE("policy update") {
  TheoryState s;
  s.coop1 = 0.5;
  s.coop2 = 0.5;
  s.m_ticks = 10;
  s.n_ticks = 10;
  CHECK(policy_update(s).second == doctest::Approx(1.0));
  s.m_ticks = s.n_ticks = 0;
  CHECK(policy_update(s).second == 0.0);

  // 2m + n = 1 leaves agent 2 where it was.
  s.m_ticks = 5;  // m = 0.25
  s.n_ticks = 10;  // n = 0.5
  s.coop2 = 0.37;
  CHECK(policy_update(s).second == doctest::Approx(0.37));

  // Sign of the step follows 2m + n - 1 across the whole share grid.
  for (int mt = 0; mt <= 10; ++mt) {
    for (int nt = 0; nt <= 10; ++nt) {
      TheoryState g;
      g.coop1 = g.coop2 = 0.5;
      g.m_ticks = mt;
      g.n_ticks = nt;
      const auto [c1, c2] = policy_update(g);
      const double drive2 = 2 * g.m() + g.n() - 1;
      const double drive1 = 2 * g.n() + g.m() - 1;
      if (drive2 > 1e-12) CHECK(c2 > 0.5);
      if (drive2 < -1e-12) CHECK(c2 < 0.5);
      if (drive1 > 1e-12) CHECK(c1 > 0.5);
      if (drive1 < -1e-12) CHECK(c1 < 0.5);
      CHECK(c1 >= 0.0);
      CHECK(c1 <= 1.0);
    }
  }
}

TEST_CASE("policy step is the value gradient") {
  // Finite difference of V^2 with respect to agent 2's cooperation probability.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::uniform_int_distribution<int> t(0, 10);
  for (int k = 0; k < 200; ++k) {
    TheoryState s;
    s.coop1 = u(rng);
    s.coop2 = u(rng);
    s.m_ticks = t(rng);
    s.n_ticks = t(rng);
    s.alpha = 1e-3;
    const double h = 1e-6;
    const double d2 = (value(s.coop1, s.coop2 + h, s.m(), s.n(), s.gamma, 2) -
                       value(s.coop1, s.coop2 - h, s.m(), s.n(), s.gamma, 2)) /
                      (2 * h);
    const double d1 = (value(s.coop1 + h, s.coop2, s.m(), s.n(), s.gamma, 1) -
                       value(s.coop1 - h, s.coop2, s.m(), s.n(), s.gamma, 1)) /
                      (2 * h);
    const auto [c1, c2] = policy_update(s);
    CHECK(c2 - s.coop2 == doctest::Approx(s.alpha * d2).epsilon(1e-6));
    CHECK(c1 - s.coop1 == doctest::Approx(s.alpha * d1).epsilon(1e-6));
  }
}

TEST_CASE("broker price") {
  CHECK(broker_price(0, 0, 0.9) == doctest::Approx(-20));
  CHECK(broker_price(1, 1, 0.9) == doctest::Approx(-10));
  CHECK(broker_price(0, 1, 0.9) == doctest::Approx(0.0));
  CHECK(broker_price(0, 1, 0.3) == doctest::Approx(0.0));
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) CHECK(broker_price(i / 20.0, j / 20.0, 0.9) <= 0.0);
}

TEST_CASE("share updates") {
  TheoryState s;
  s.coop1 = s.coop2 = 0.5;
  // Without a price the buyer refuses even a free first share.
  CHECK(trade_marginals(s, 1, PriceMode::kNone).buyer < 0.0);
  const TheoryState unpriced = share_update(s, PriceMode::kNone);
  CHECK(unpriced.m_ticks == 0);
  CHECK(unpriced.n_ticks == 0);

  // At the broker price the seller is exactly indifferent and the trade happens.
  const TradeMarginals at_price = trade_marginals(s, 1, PriceMode::kPerUnitTransfer);
  CHECK(at_price.seller >= 0.0);
  CHECK(at_price.buyer >= 0.0);
  const TheoryState traded = share_update(s, PriceMode::kPerUnitTransfer);
  CHECK(traded.m_ticks == 1);
  CHECK(traded.n_ticks == 1);

  TheoryState capped = s;
  capped.m_ticks = capped.n_ticks = 10;
  const TheoryState still = share_update(capped, PriceMode::kPerUnitTransfer);
  CHECK(still.m_ticks == 10);
  CHECK(still.n_ticks == 10);
}

TEST_CASE("simulation reaches the capped cooperative state") {
  SimulationConfig cfg;
  cfg.seed = 3;
  const auto series = simulate(cfg);
  CHECK(series.size() == static_cast<std::size_t>(cfg.runs * cfg.episodes));
  for (int run = 0; run < cfg.runs; ++run) {
    double prev_m = 0.0, prev_n = 0.0;
    for (int e = 0; e < cfg.episodes; ++e) {
      const SeriesPoint& p = series[static_cast<std::size_t>(run * cfg.episodes + e)];
      CHECK(p.m >= prev_m);
      CHECK(p.n >= prev_n);
      CHECK(p.m <= 0.5 + 1e-12);
      CHECK(p.n <= 0.5 + 1e-12);
      prev_m = p.m;
      prev_n = p.n;
    }
    const SeriesPoint& last = series[static_cast<std::size_t>(run * cfg.episodes + cfg.episodes - 1)];
    CHECK(last.m == doctest::Approx(0.5));
    CHECK(last.coop1 >= 0.99);
    CHECK(last.joint_reward == doctest::Approx(-2.0).epsilon(0.025));
  }
  // The same seed gives the same series.
  const auto again = simulate(cfg);
  for (std::size_t k = 0; k < series.size(); ++k) {
    CHECK(series[k].m == again[k].m);
    CHECK(series[k].coop2 == again[k].coop2);
  }
}

TEST_CASE("the literal bracket reading never starts trading") {
  SimulationConfig cfg;
  cfg.runs = 5;
  cfg.price = PriceMode::kLiteralBracket;
  for (const auto& p : simulate(cfg)) {
    CHECK(p.m == 0.0);
    CHECK(p.n == 0.0);
  }
}

}  // TEST_SUITE
