#ifndef ZETAGAP_RANDOM_CHAINS_HPP
#define ZETAGAP_RANDOM_CHAINS_HPP

// Generators of random lazy reversible chains and starting densities used by the
// property suites.

#include <algorithm>
#include <cmath>
#include <random>

#include "zetagap/finite_chain.hpp"
#include "zetagap/rng.hpp"

namespace zetagap {

struct RandomChainOptions {
  /// Probability that a pair of states is joined by an edge (a path keeps the chain connected).
  double edge_probability = 0.5;
  /// Probability that a state receives a tiny stationary mass.
  double tiny_mass_probability = 0.25;
  /// Probability that the states are split into two weakly coupled clusters.
  double bottleneck_probability = 0.3;
};

/// Random stationary law with a spread of magnitudes.
inline VectorXd random_law(Rng& rng, Index d, const RandomChainOptions& opt = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VectorXd w(d);
  for (Index x = 0; x < d; ++x) {
    w[x] = -std::log(uniform01(rng));
    if (u(rng) < opt.tiny_mass_probability) w[x] *= 1e-3 * (0.1 + u(rng));
  }
  return w / w.sum();
}

/// Random kernel reversible w.r.t. `pi` with P[x,x] >= 1/2: symmetric edge
/// weights W, then P[x,y] = W[x,y] / (c pi[x]) for a scale c that caps the
/// off-diagonal row mass at a random level in (0.05, 0.5].
inline MatrixXd random_reversible_kernel(Rng& rng, const VectorXd& pi, const RandomChainOptions& opt = {}) {
  const Index d = pi.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd W = MatrixXd::Zero(d, d);
  const bool split = d >= 4 && u(rng) < opt.bottleneck_probability;
  const Index half = d / 2;
  for (Index x = 0; x < d; ++x)
    for (Index y = x + 1; y < d; ++y) {
      const bool path = (y == x + 1);
      if (!path && u(rng) >= opt.edge_probability) continue;
      double w = 0.05 + u(rng);
      if (split && ((x < half) != (y < half))) w *= 1e-3;
      W(x, y) = W(y, x) = w;
    }
  double c = 0.0;
  for (Index x = 0; x < d; ++x) c = std::max(c, W.row(x).sum() / pi[x]);
  const double off_mass = 0.05 + 0.45 * u(rng);
  c /= off_mass;
  MatrixXd P(d, d);
  for (Index x = 0; x < d; ++x) {
    for (Index y = 0; y < d; ++y) P(x, y) = (x == y) ? 0.0 : W(x, y) / (c * pi[x]);
    P(x, x) = 1.0 - P.row(x).sum();
  }
  return P;
}

inline FiniteChain random_chain(Rng& rng, Index d, const RandomChainOptions& opt = {}) {
  VectorXd pi = random_law(rng, d, opt);
  MatrixXd P = random_reversible_kernel(rng, pi, opt);
  return FiniteChain(std::move(P), std::move(pi));
}

/// A density f0 >= 0 with sum f0 pi = 1: smooth random, point mass, or uniform on a subset.
inline VectorXd random_density(Rng& rng, const FiniteChain& chain) {
  const Index d = chain.size();
  const auto& pi = chain.stationary();
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<Index> state(0, d - 1);
  VectorXd f = VectorXd::Zero(d);
  switch (kind(rng)) {
    case 0:
      for (Index x = 0; x < d; ++x) f[x] = -std::log(uniform01(rng));
      break;
    case 1:
      f[state(rng)] = 1.0;
      break;
    default:
      for (Index x = 0; x < d; ++x) f[x] = fair_coin(rng) ? 1.0 : 0.0;
      f[state(rng)] = 1.0;
      break;
  }
  return f / pi.dot(f);
}

}  // namespace zetagap

#endif
