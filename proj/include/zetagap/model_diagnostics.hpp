#ifndef ZETAGAP_MODEL_DIAGNOSTICS_HPP
#define ZETAGAP_MODEL_DIAGNOSTICS_HPP

// Design and posterior diagnostics for the spike-and-slab model: coherence C(s),
// the restricted eigenvalue, the E_k event, and the warm-start/iteration-count
// expressions of the polynomial mixing result. Universal constants that the
// theory leaves unspecified are reported, never asserted.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "zetagap/errors.hpp"
#include "zetagap/indicator.hpp"
#include "zetagap/spike_slab.hpp"

namespace zetagap {

struct EnumerationCapacity {
  Index max_p = 30;
  Index max_s = 2;
  std::size_t max_evaluations = 5'000'000;
};

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Calls visit(indices) for every subset of {0..n-1} (restricted to `pool` when
/// given) with size in [lo, hi], in lexicographic order within each size.
inline void for_each_subset(const std::vector<std::size_t>& pool, std::size_t lo, std::size_t hi,
                            const std::function<void(const std::vector<std::size_t>&)>& visit) {
  const std::size_t n = pool.size();
  for (std::size_t k = lo; k <= std::min(hi, n); ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<std::size_t> chosen(k);
    while (true) {
      for (std::size_t i = 0; i < k; ++i) chosen[i] = pool[idx[i]];
      visit(chosen);
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

inline std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline Indicator indicator_of(std::size_t p, const std::vector<std::size_t>& on) {
  Indicator d(p);
  for (auto j : on) d.set(j);
  return d;
}

namespace detail {
inline void check_capacity(const SpikeSlabModel& m, Index s, const EnumerationCapacity& cap, const char* what) {
  if (m.p() > cap.max_p || s > cap.max_s)
    throw CapacityError(std::string(what) + ": enumeration capped at p <= " + std::to_string(cap.max_p) +
                        ", s <= " + std::to_string(cap.max_s));
}
}  // namespace detail

struct CoherenceResult {
  double value = 0.0;
  Indicator delta;
  std::size_t j = 0, l = 0;
};

/// C(s) = max over ||delta||_0 <= s and j != l of |X_j' L_delta^{-1} X_l|.
inline CoherenceResult coherence(const SpikeSlabModel& m, Index s, const EnumerationCapacity& cap = {}) {
  if (s < 0) throw DomainError("s must be nonnegative");
  detail::check_capacity(m, s, cap, "coherence");
  const auto p = static_cast<std::size_t>(m.p());
  CoherenceResult best{-1.0, Indicator(p), 0, 0};
  for_each_subset(iota_indices(p), 0, static_cast<std::size_t>(s), [&](const std::vector<std::size_t>& on) {
    const Indicator delta = indicator_of(p, on);
    const auto llt = L_factor(m, delta);
    const MatrixXd G = m.X().transpose() * llt.solve(m.X());
    for (Index j = 0; j < G.rows(); ++j)
      for (Index l = 0; l < G.cols(); ++l)
        if (j != l && std::abs(G(j, l)) > best.value)
          best = {std::abs(G(j, l)), delta, static_cast<std::size_t>(j), static_cast<std::size_t>(l)};
  });
  return best;
}

struct RestrictedEigenvalueResult {
  double value = std::numeric_limits<double>::infinity();
  Indicator delta;
  std::vector<std::size_t> support;
};

/// min over ||delta||_0 <= s0 and u supported on at most s0 coordinates of delta^c of
/// u'(X_{delta^c}' L_delta^{-1} X_{delta^c})u / (n ||u||^2). By eigenvalue interlacing the
/// inner minimum is attained on supports of size exactly min(s0, |delta^c|).
inline RestrictedEigenvalueResult restricted_eigenvalue(const SpikeSlabModel& m, Index s0,
                                                        const EnumerationCapacity& cap = {}) {
  if (s0 < 1) throw DomainError("s0 must be at least 1");
  detail::check_capacity(m, s0, cap, "restricted eigenvalue");
  const auto p = static_cast<std::size_t>(m.p());
  const auto s = static_cast<std::size_t>(s0);
  double work = 0.0;
  for (std::size_t k = 0; k <= std::min(s, p); ++k) work += binomial(p, k) * binomial(p - k, std::min(s, p - k));
  if (work > static_cast<double>(cap.max_evaluations))
    throw CapacityError("restricted eigenvalue: " + std::to_string(static_cast<long long>(work)) +
                        " eigenproblems exceed the capacity");

  RestrictedEigenvalueResult best;
  best.delta = Indicator(p);
  const double n = static_cast<double>(m.n());
  for_each_subset(iota_indices(p), 0, s, [&](const std::vector<std::size_t>& on) {
    const Indicator delta = indicator_of(p, on);
    const auto off = delta.zeros();
    if (off.empty()) return;
    const auto llt = L_factor(m, delta);
    const MatrixXd M = m.X().transpose() * llt.solve(m.X()) / n;
    const std::size_t size = std::min(s, off.size());
    for_each_subset(off, size, size, [&](const std::vector<std::size_t>& T) {
      const auto t = static_cast<Index>(T.size());
      MatrixXd sub(t, t);
      for (Index a = 0; a < t; ++a)
        for (Index b = 0; b < t; ++b)
          sub(a, b) = M(static_cast<Index>(T[static_cast<std::size_t>(a)]), static_cast<Index>(T[static_cast<std::size_t>(b)]));
      const double lam = t == 1 ? sub(0, 0)
                                : Eigen::SelfAdjointEigenSolver<MatrixXd>(sub, Eigen::EigenvaluesOnly).eigenvalues()[0];
      if (lam < best.value) best = {lam, delta, T};
    });
  });
  return best;
}

// ---------------------------------------------------------------------------

struct EkEventReport {
  double post_truth = 0.0;          // Pi(delta_tilde_star | z)
  double post_Dk = 0.0;             // Pi(D_k | z)
  double Dk_threshold = 0.0;        // 1 - 4 p^{-u(k+1)/2}
  double max_deviation = 0.0;       // max |<L_delta^{-1} X_j, z - X theta_star>| / sigma over D_k
  double deviation_threshold = 0.0; // 2 sqrt((k+1) n log p)
  bool truth_ok = false;
  bool Dk_ok = false;
  bool deviation_ok = false;
  bool all() const { return truth_ok && Dk_ok && deviation_ok; }
};

/// D_k = {delta ⊇ delta_tilde_star, ||delta||_0 <= ||delta_tilde_star||_0 + k}, by enumeration.
inline bool in_Dk(const Indicator& delta, const Indicator& truth, std::size_t k) {
  return delta.contains(truth) && delta.count() <= truth.count() + k;
}

inline EkEventReport ek_event_check(const SpikeSlabModel& m, const GroundTruth& truth, std::size_t k, double u = 1.0,
                                    const ModelPosterior* posterior = nullptr) {
  if (m.p() > kMaxEnumerationP)
    throw CapacityError("E_k check enumerates the model space; limited to p <= " + std::to_string(kMaxEnumerationP));
  const ModelPosterior local = posterior ? ModelPosterior{} : exact_model_posterior(m);
  const ModelPosterior& post = posterior ? *posterior : local;
  const auto p = static_cast<std::size_t>(m.p());
  const double logp = std::log(static_cast<double>(p));
  const auto& dt = truth.delta_tilde_star;

  EkEventReport r;
  r.post_truth = post(dt);
  r.post_Dk = post.mass([&](const Indicator& d) { return in_Dk(d, dt, k); });
  r.Dk_threshold = 1.0 - 4.0 * std::pow(static_cast<double>(p), -u * static_cast<double>(k + 1) / 2.0);
  r.deviation_threshold = 2.0 * std::sqrt(static_cast<double>(k + 1) * static_cast<double>(m.n()) * logp);

  const VectorXd resid = m.z() - m.X() * truth.theta_star;
  for_each_subset(dt.zeros(), 0, k, [&](const std::vector<std::size_t>& extra) {
    Indicator delta = dt;
    for (auto j : extra) delta.set(j);
    const VectorXd g = m.X().transpose() * L_factor(m, delta).solve(resid);
    r.max_deviation = std::max(r.max_deviation, g.cwiseAbs().maxCoeff() / m.sigma());
  });
  r.truth_ok = r.post_truth >= 0.5;
  r.Dk_ok = r.post_Dk >= r.Dk_threshold;
  r.deviation_ok = r.max_deviation <= r.deviation_threshold;
  return r;
}

// ---------------------------------------------------------------------------

struct WarmStartBoundInputs {
  double n = 0, p = 0, sigma2 = 1, rho = 1, gamma = 0.01, u = 1;
  double s_star = 0, s_tilde_star = 0;
  /// ||theta_tilde_star||_1: l1 norm of theta_star on the detectable support.
  double theta_tilde_l1 = 0;
  double k = 0, fp = 0, zeta0 = 0.1;
  /// Restricted-eigenvalue constant and C(s_tilde_star + k).
  double varrho = 1, coherence = 0;
};

inline WarmStartBoundInputs warm_start_bound_inputs(const SpikeSlabModel& m, const GroundTruth& truth, std::size_t k, std::size_t fp,
                                      double zeta0, double u, double varrho, double coherence_value) {
  WarmStartBoundInputs in;
  in.n = static_cast<double>(m.n());
  in.p = static_cast<double>(m.p());
  in.sigma2 = m.sigma2();
  in.rho = m.rho();
  in.gamma = m.gamma();
  in.u = u;
  in.s_star = static_cast<double>(truth.s_star());
  in.s_tilde_star = static_cast<double>(truth.s_tilde_star());
  for (auto j : truth.delta_tilde_star.ones()) in.theta_tilde_l1 += std::abs(truth.theta_star[static_cast<Index>(j)]);
  in.k = static_cast<double>(k);
  in.fp = static_cast<double>(fp);
  in.zeta0 = zeta0;
  in.varrho = varrho;
  in.coherence = coherence_value;
  return in;
}

struct WarmStartBoundDiagnostics {
  /// Right side of the warm-start condition k + 1 >= ...
  double warm_start_rhs = 0;
  bool warm_start_ok = false;
  /// log10 of the three p-dependent factors of the iteration bound and of the
  /// prefactor log(1/zeta0)/(gamma rho); the unspecified constant A is taken as 1.
  double log10_restricted_factor = 0;
  double log10_prior_factor = 0;
  double log10_volume_factor = 0;
  double log10_prefactor = 0;
  double log10_iterations = 0;
};

inline WarmStartBoundDiagnostics theorem2_diagnostics(const WarmStartBoundInputs& in) {
  if (!(in.p > 1 && in.n > 0 && in.u > 0 && in.zeta0 > 0 && in.zeta0 < 1 && in.varrho > 0))
    throw DomainError("warm-start bound diagnostics need p > 1, n > 0, u > 0, zeta0 in (0,1), varrho > 0");
  WarmStartBoundDiagnostics d;
  const double logp = std::log(in.p);
  const double log10p = std::log10(in.p);
  d.warm_start_rhs = 4.0 * (1.0 + 1.0 / in.u) * in.fp +
                     (2.0 * in.fp / in.u) * std::log1p(in.n * in.fp / (in.sigma2 * in.rho)) / logp +
                     (2.0 / in.u) * std::log(320.0 / (in.zeta0 * in.zeta0)) / logp;
  d.warm_start_ok = in.k + 1.0 >= d.warm_start_rhs;
  const double inner = in.s_star + 2.0 * std::sqrt(1.0 + in.k) +
                       in.theta_tilde_l1 * in.coherence / (std::sqrt(in.sigma2) * std::sqrt(in.n * logp));
  d.log10_restricted_factor = inner * inner / (2.0 * in.varrho) * log10p;
  d.log10_prior_factor = in.k * (in.u + 1.0) * log10p;
  d.log10_volume_factor = 0.5 * in.k * std::log10(1.0 + in.n * in.k / (in.sigma2 * in.rho));
  d.log10_prefactor = std::log10(std::log(1.0 / in.zeta0) / (in.gamma * in.rho));
  d.log10_iterations = d.log10_prefactor + d.log10_restricted_factor + d.log10_prior_factor + d.log10_volume_factor;
  return d;
}

}  // namespace zetagap

#endif
