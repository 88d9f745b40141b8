#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library code they check.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "rshare/learners.hpp"
#include "rshare/participation.hpp"

namespace oracle {

// Random column-stochastic n x n matrix as rows.
inline std::vector<std::vector<double>> random_allocation(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += (w[i][j] = u(rng));
    for (int i = 0; i < n; ++i) w[i][j] /= sum;
    // Push the rounding residue into the diagonal so the column is exact enough.
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += w[i][j];
    w[j][j] += 1.0 - col;
  }
  return w;
}

inline double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& w,
                                   std::span<const double> r) {
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) out[i] += w[i][j] * r[j];
  return out;
}

// Straightforward dense forward pass of the one-hidden-layer actor-critic with
// the documented flat layout, written without the sparse shortcuts.
struct Net {
  std::size_t in, hid, act;
  std::vector<double> theta;

  double w1(std::size_t i, std::size_t j) const { return theta[i * hid + j]; }
  double b1(std::size_t j) const { return theta[in * hid + j]; }
  double wp(std::size_t a, std::size_t j) const { return theta[in * hid + hid + a * hid + j]; }
  double bp(std::size_t a) const { return theta[in * hid + hid + act * hid + a]; }
  double wv(std::size_t j) const { return theta[in * hid + hid + act * hid + act + j]; }
  double bv() const { return theta[in * hid + hid + act * hid + act + hid]; }

  struct Out {
    std::vector<double> probs;
    double value;
  };

  Out forward(std::span<const double> x) const {
    std::vector<double> h(hid);
    for (std::size_t j = 0; j < hid; ++j) {
      double z = b1(j);
      for (std::size_t i = 0; i < in; ++i) z += w1(i, j) * x[i];
      h[j] = std::tanh(z);
    }
    std::vector<double> logits(act);
    for (std::size_t a = 0; a < act; ++a) {
      double z = bp(a);
      for (std::size_t j = 0; j < hid; ++j) z += wp(a, j) * h[j];
      logits[a] = z;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double norm = 0.0;
    for (double& l : logits) norm += (l = std::exp(l - mx));
    for (double& l : logits) l /= norm;
    double v = bv();
    for (std::size_t j = 0; j < hid; ++j) v += wv(j) * h[j];
    return {logits, v};
  }

  // The same loss as MlpPolicy::loss, from the dense forward pass.
  double loss(const rshare::MlpPolicy::Transition& t) const {
    const Out o = forward(t.observation);
    double entropy = 0.0;
    for (double p : o.probs)
      if (p > 0.0) entropy -= p * std::log(p);
    const double lp = std::log(o.probs[static_cast<std::size_t>(t.action)]);
    return t.policy_weight * (-t.advantage * lp - t.entropy_weight * entropy) +
           t.value_weight * 0.5 * (t.value_target - o.value) * (t.value_target - o.value);
  }
};

// Central finite differences of Net::loss.
inline std::vector<double> numeric_gradient(Net net, const rshare::MlpPolicy::Transition& t,
                                            double h = 1e-6) {
  std::vector<double> g(net.theta.size());
  for (std::size_t k = 0; k < net.theta.size(); ++k) {
    const double keep = net.theta[k];
    net.theta[k] = keep + h;
    const double up = net.loss(t);
    net.theta[k] = keep - h;
    const double down = net.loss(t);
    net.theta[k] = keep;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||), with a floor so two zero vectors compare equal.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  return std::sqrt(diff) / std::max(1e-12, std::sqrt(std::max(na, nb)));
}

}  // namespace oracle
