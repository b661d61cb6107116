#ifndef ZETAGAP_ORACLES_HPP
#define ZETAGAP_ORACLES_HPP

// Slow, independent reference computations. Each one avoids the code path of the
// quantity it checks: no Gray-code cuts, no symmetrization, no Householder basis,
// no n-space identities, no incremental enumeration.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "zetagap/finite_chain.hpp"
#include "zetagap/indicator.hpp"
#include "zetagap/spike_slab.hpp"

namespace zetagap::oracle {

/// min over nonempty proper A of sum_{x in A, y notin A} pi[x]P[x,y] / (pi(A) pi(A^c)), each cut summed from scratch.
inline double conductance(const FiniteChain& chain) {
  const Index d = chain.size();
  const auto& P = chain.transition();
  const auto& pi = chain.stationary();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << d); ++mask) {
    double m = 0.0, flow = 0.0;
    for (Index x = 0; x < d; ++x)
      if ((mask >> x) & 1U) {
        m += pi[x];
        for (Index y = 0; y < d; ++y)
          if (!((mask >> y) & 1U)) flow += pi[x] * P(x, y);
      }
    best = std::min(best, flow / (m * (1.0 - m)));
  }
  return best;
}

/// 1 - second largest real part among the eigenvalues of the (non-symmetric) P.
inline double spectral_gap(const FiniteChain& chain) {
  Eigen::EigenSolver<MatrixXd> es(chain.transition(), false);
  std::vector<double> re;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) re.push_back(es.eigenvalues()[k].real());
  std::sort(re.begin(), re.end(), std::greater<>());
  return 1.0 - re[1];
}

/// Restricted gap with f pinned to 0 at the first state of the subset: both quadratic
/// forms are assembled from their double sums by polarization, then the smallest
/// generalized eigenvalue is taken.
inline double restricted_gap(const FiniteChain& chain, const std::vector<bool>& subset) {
  std::vector<Index> S;
  for (Index x = 0; x < chain.size(); ++x)
    if (subset[static_cast<std::size_t>(x)]) S.push_back(x);
  const auto k = static_cast<Index>(S.size());
  const auto& P = chain.transition();
  const auto& pi = chain.stationary();
  auto forms = [&](const VectorXd& g) {
    double e = 0.0, v = 0.0;
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b) {
        const double diff = g[b] - g[a];
        e += 0.5 * pi[S[static_cast<std::size_t>(a)]] * P(S[static_cast<std::size_t>(a)], S[static_cast<std::size_t>(b)]) * diff * diff;
        v += 0.5 * pi[S[static_cast<std::size_t>(a)]] * pi[S[static_cast<std::size_t>(b)]] * diff * diff;
      }
    return std::pair{e, v};
  };
  const Index m = k - 1;
  MatrixXd A(m, m), B(m, m);
  auto unit = [&](Index i) {
    VectorXd g = VectorXd::Zero(k);
    g[i + 1] = 1.0;
    return g;
  };
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      const auto [eij, vij] = forms(unit(i) + unit(j));
      const auto [ei, vi] = forms(unit(i));
      const auto [ej, vj] = forms(unit(j));
      A(i, j) = 0.5 * (eij - ei - ej);
      B(i, j) = 0.5 * (vij - vi - vj);
      if (i == j) A(i, j) = ei, B(i, j) = vi;
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(A, B);
  return std::max(ges.eigenvalues()[0], 0.0);
}

/// Longest shortest path by Floyd-Warshall; nullopt when disconnected.
inline std::optional<int> diameter(const std::vector<std::vector<bool>>& adj) {
  const std::size_t n = adj.size();
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = i == j ? 0 : (adj[i][j] ? 1 : inf);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
  int diam = 0;
  for (const auto& row : dist)
    for (int v : row) {
      if (v >= inf) return std::nullopt;
      diam = std::max(diam, v);
    }
  return diam;
}

/// log Pi(delta|z) up to a delta-free constant, from the p-dimensional Gaussian integral
/// of N(z; X theta, sigma^2 I) against N(theta; 0, D_delta) with prior weight
/// q^|delta| (1-q)^(p-|delta|).
inline double log_marginal_theta_space(const SpikeSlabModel& m, const Indicator& delta) {
  const Index p = m.p();
  VectorXd Dinv(p);
  double log_det_D = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double dj = delta[static_cast<std::size_t>(j)] ? 1.0 / m.rho() : m.gamma();
    Dinv[j] = 1.0 / dj;
    log_det_D += std::log(dj);
  }
  MatrixXd A = m.X().transpose() * m.X() / m.sigma2();
  A.diagonal() += Dinv;
  const VectorXd b = m.X().transpose() * m.z() / m.sigma2();
  const Eigen::LDLT<MatrixXd> ldlt(A);
  const double log_det_A = ldlt.vectorD().array().log().sum();
  const double k = static_cast<double>(delta.count());
  return k * std::log(m.q()) + (static_cast<double>(p) - k) * std::log(1.0 - m.q()) - 0.5 * log_det_D -
         0.5 * log_det_A - 0.5 * m.z().squaredNorm() / m.sigma2() + 0.5 * b.dot(ldlt.solve(b));
}

/// Explicit L_delta built from X D X' and inverted outright.
inline MatrixXd L_inverse(const SpikeSlabModel& m, const Indicator& delta) {
  VectorXd D(m.p());
  for (Index j = 0; j < m.p(); ++j) D[j] = delta[static_cast<std::size_t>(j)] ? 1.0 / m.rho() : m.gamma();
  const MatrixXd L = MatrixXd::Identity(m.n(), m.n()) + m.X() * D.asDiagonal() * m.X().transpose() / m.sigma2();
  return L.inverse();
}

/// Coherence by bitmask enumeration and a double loop over column pairs.
inline double coherence(const SpikeSlabModel& m, int s) {
  const auto p = static_cast<std::size_t>(m.p());
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    if (std::popcount(mask) > s) continue;
    const MatrixXd Li = L_inverse(m, Indicator::from_mask(mask, p));
    for (Index j = 0; j < m.p(); ++j)
      for (Index l = 0; l < m.p(); ++l)
        if (j != l) best = std::max(best, std::abs(m.X().col(j).dot(Li * m.X().col(l))));
  }
  return best;
}

/// Restricted eigenvalue over every delta with |delta| <= s0 and every support T within
/// delta^c with 1 <= |T| <= s0 (all sizes, not only the largest).
inline double restricted_eigenvalue(const SpikeSlabModel& m, int s0) {
  const auto p = static_cast<std::size_t>(m.p());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    if (std::popcount(mask) > s0) continue;
    const MatrixXd M = m.X().transpose() * L_inverse(m, Indicator::from_mask(mask, p)) * m.X() /
                       static_cast<double>(m.n());
    std::vector<Index> T;
    auto grow = [&](auto&& self, std::size_t from) -> void {
      if (!T.empty()) {
        const auto k = static_cast<Index>(T.size());
        MatrixXd sub(k, k);
        for (Index a = 0; a < k; ++a)
          for (Index b = 0; b < k; ++b) sub(a, b) = M(T[static_cast<std::size_t>(a)], T[static_cast<std::size_t>(b)]);
        best = std::min(best, Eigen::SelfAdjointEigenSolver<MatrixXd>(sub).eigenvalues()[0]);
      }
      if (static_cast<int>(T.size()) == s0) return;
      for (std::size_t j = from; j < p; ++j) {
        if ((mask >> j) & 1U) continue;
        T.push_back(static_cast<Index>(j));
        self(self, j + 1);
        T.pop_back();
      }
    };
    grow(grow, 0);
  }
  return best;
}

}  // namespace zetagap::oracle

#endif
