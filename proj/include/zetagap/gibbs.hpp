#ifndef ZETAGAP_GIBBS_HPP
#define ZETAGAP_GIBBS_HPP

// Lazy two-block Gibbs sampler for the spike-and-slab posterior.
//
// Each iteration flips a fair coin. Heads: nothing moves. Tails: draw
// delta | theta from independent Bernoullis, then theta | delta from its
// Gaussian conditional. The delta reported at a lazy iteration is the one
// drawn at the most recent non-lazy iteration (the initial indicator before
// any has happened).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "zetagap/errors.hpp"
#include "zetagap/indicator.hpp"
#include "zetagap/rng.hpp"
#include "zetagap/spike_slab.hpp"
#include "zetagap/text_io.hpp"

namespace zetagap {

/// kDirect factors the p x p precision; kWoodbury only ever factors L_delta (n x n).
enum class ThetaStrategy { kAuto, kDirect, kWoodbury };

inline ThetaStrategy resolve(ThetaStrategy s, const SpikeSlabModel& m) {
  if (s != ThetaStrategy::kAuto) return s;
  return m.n() < m.p() ? ThetaStrategy::kWoodbury : ThetaStrategy::kDirect;
}

inline std::string to_string(ThetaStrategy s) {
  switch (s) {
    case ThetaStrategy::kDirect: return "direct";
    case ThetaStrategy::kWoodbury: return "woodbury";
    default: return "auto";
  }
}

inline ThetaStrategy parse_strategy(std::string_view s) {
  if (s == "auto") return ThetaStrategy::kAuto;
  if (s == "direct") return ThetaStrategy::kDirect;
  if (s == "woodbury") return ThetaStrategy::kWoodbury;
  throw ConfigError("unknown theta strategy '" + std::string(s) + "' (auto|direct|woodbury)");
}

/// One exact draw from N(m_delta, sigma^2 Sigma_delta).
inline VectorXd sample_theta(const SpikeSlabModel& m, const Indicator& delta, Rng& rng,
                             ThetaStrategy strategy = ThetaStrategy::kAuto) {
  if (resolve(strategy, m) == ThetaStrategy::kDirect)
    return conditional_gaussian(m, delta).sample_from(standard_normal(rng, m.p()));

  const VectorXd D = m.prior_variances(delta);
  const double sigma = m.sigma();
  const VectorXd u = D.cwiseSqrt().cwiseProduct(standard_normal(rng, m.p()));
  const VectorXd e = standard_normal(rng, m.n());
  const VectorXd v = m.X() * u / sigma + e;
  const Eigen::LLT<MatrixXd> llt(L_matrix(m, delta));
  if (llt.info() != Eigen::Success) throw NumericError("L_delta is not positive definite");
  const VectorXd w = llt.solve(m.z() / sigma - v);
  return u + D.cwiseProduct(m.X().transpose() * w) / sigma;
}

/// delta_j = 1 iff logit(U_j) < log-odds_j, so P(delta_j = 1) = logistic(log-odds_j)
/// without evaluating large exponentials.
inline Indicator sample_delta(const SpikeSlabModel& m, const VectorXd& theta, Rng& rng) {
  const VectorXd lo = bernoulli_log_odds(m, theta);
  Indicator delta(static_cast<std::size_t>(m.p()));
  for (Index j = 0; j < lo.size(); ++j) {
    const double u = uniform01(rng);
    if (std::log(u) - std::log1p(-u) < lo[j]) delta.set(static_cast<std::size_t>(j));
  }
  return delta;
}

struct GibbsState {
  VectorXd theta;
  Indicator last_delta;
  Rng rng;
  std::size_t iteration = 0;
};

/// theta_0 ~ Pi(theta | delta_init, z); last_delta = delta_init.
inline GibbsState init_from_model(const SpikeSlabModel& m, const Indicator& delta_init, std::uint64_t seed,
                                  ThetaStrategy strategy = ThetaStrategy::kAuto) {
  m.check(delta_init);
  GibbsState s;
  s.rng = make_rng(seed);
  s.theta = sample_theta(m, delta_init, s.rng, strategy);
  s.last_delta = delta_init;
  return s;
}

/// Advances one iteration; returns true if the iteration was lazy.
inline bool step(const SpikeSlabModel& m, GibbsState& s, ThetaStrategy strategy = ThetaStrategy::kAuto) {
  ++s.iteration;
  if (fair_coin(s.rng)) return true;
  try {
    Indicator delta = sample_delta(m, s.theta, s.rng);
    s.theta = sample_theta(m, delta, s.rng, strategy);
    s.last_delta = std::move(delta);
  } catch (const NumericError& e) {
    throw NumericError("iteration " + std::to_string(s.iteration) + ": " + e.what());
  }
  return false;
}

struct RecordOptions {
  bool theta = false;
  ThetaStrategy strategy = ThetaStrategy::kAuto;
};

struct TrajectoryRecord {
  std::size_t iteration;
  bool lazy;
  Indicator delta;
  std::optional<VectorXd> theta;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::string fingerprint;
  ThetaStrategy strategy = ThetaStrategy::kAuto;
  Indicator initial_delta;
  VectorXd initial_theta;
  std::vector<TrajectoryRecord> records;

  std::size_t size() const noexcept { return records.size(); }
};

/// Calls observe(iteration, lazy, state) after every iteration; stops early when it returns false.
/// Returns the number of iterations performed.
inline std::size_t run_observed(const SpikeSlabModel& m, GibbsState& s, std::size_t n_iters,
                                const std::function<bool(std::size_t, bool, const GibbsState&)>& observe,
                                ThetaStrategy strategy = ThetaStrategy::kAuto) {
  const ThetaStrategy st = resolve(strategy, m);
  for (std::size_t k = 0; k < n_iters; ++k) {
    const bool lazy = step(m, s, st);
    if (!observe(s.iteration, lazy, s)) return k + 1;
  }
  return n_iters;
}

inline Trajectory run(const SpikeSlabModel& m, const Indicator& delta_init, std::size_t n_iters, std::uint64_t seed,
                      const RecordOptions& options = {}) {
  Trajectory t;
  t.seed = seed;
  t.fingerprint = m.fingerprint();
  t.strategy = resolve(options.strategy, m);
  t.initial_delta = delta_init;
  GibbsState s = init_from_model(m, delta_init, seed, t.strategy);
  t.initial_theta = s.theta;
  t.records.reserve(n_iters);
  run_observed(
      m, s, n_iters,
      [&](std::size_t it, bool lazy, const GibbsState& st) {
        t.records.push_back({it, lazy, st.last_delta,
                             options.theta ? std::optional<VectorXd>(st.theta) : std::nullopt});
        return true;
      },
      t.strategy);
  return t;
}

/// iteration,lazy,delta_hex[,theta_0,...]; row 0 is the initial state.
inline std::string trajectory_csv(const Trajectory& t) {
  const bool with_theta = !t.records.empty() && t.records.front().theta.has_value();
  std::ostringstream os;
  os << "iteration,lazy,delta_hex";
  if (with_theta)
    for (Index j = 0; j < t.initial_theta.size(); ++j) os << ",theta_" << j;
  os << '\n';
  auto row = [&](std::size_t it, bool lazy, const Indicator& d, const VectorXd* theta) {
    os << it << ',' << (lazy ? 1 : 0) << ',' << d.to_hex();
    if (with_theta)
      for (Index j = 0; j < theta->size(); ++j) os << ',' << io::fmt_exact((*theta)[j]);
    os << '\n';
  };
  row(0, false, t.initial_delta, &t.initial_theta);
  for (const auto& r : t.records) row(r.iteration, r.lazy, r.delta, r.theta ? &*r.theta : nullptr);
  return os.str();
}

inline std::string trajectory_manifest(const Trajectory& t) {
  std::ostringstream os;
  os << "seed=" << t.seed << '\n'
     << "strategy=" << to_string(t.strategy) << '\n'
     << "iterations=" << t.records.size() << '\n'
     << "fingerprint=" << t.fingerprint << '\n'
     << "generator=" << kGeneratorName << '\n'
     << "initial_delta=" << t.initial_delta.to_hex() << '\n';
  return os.str();
}

}  // namespace zetagap

#endif
