#ifndef ZETAGAP_VERIFY_HPP
#define ZETAGAP_VERIFY_HPP

// Property suites over seeded random instances. Every check reports its worst
// margin (nonnegative means it held) and, on failure, the offending instance in
// its file format so it can be replayed through the CLI. Report text depends
// only on the seed.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zetagap/chain_analysis.hpp"
#include "zetagap/errors.hpp"
#include "zetagap/experiment.hpp"
#include "zetagap/finite_chain.hpp"
#include "zetagap/gibbs.hpp"
#include "zetagap/mixture.hpp"
#include "zetagap/model_diagnostics.hpp"
#include "zetagap/oracles.hpp"
#include "zetagap/random_chains.hpp"
#include "zetagap/rng.hpp"
#include "zetagap/spike_slab.hpp"

namespace zetagap {

// ---------------------------------------------------------------------------
// Random instance generators shared by the suites and the unit tests

/// Kernel reversible w.r.t. `law` on its support (from random_reversible_kernel) and
/// the identity on zero-mass states.
inline MatrixXd random_kernel_on_support(Rng& rng, const VectorXd& law, const RandomChainOptions& opt = {}) {
  const Index d = law.size();
  std::vector<Index> sup;
  for (Index x = 0; x < d; ++x)
    if (law[x] > 0.0) sup.push_back(x);
  MatrixXd K = MatrixXd::Identity(d, d);
  const auto k = static_cast<Index>(sup.size());
  if (k < 2) return K;
  VectorXd sub(k);
  for (Index a = 0; a < k; ++a) sub[a] = law[sup[static_cast<std::size_t>(a)]];
  const MatrixXd Ks = random_reversible_kernel(rng, sub / sub.sum(), opt);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) K(sup[static_cast<std::size_t>(a)], sup[static_cast<std::size_t>(b)]) = Ks(a, b);
  return K;
}

struct RandomMixtureOptions {
  std::size_t max_components = 4;
  Index min_states = 3;
  Index max_states = 8;
  /// Probability of shrinking each B_i below the support of pi_i.
  double shrink_probability = 0.5;
  /// Probability that I0 is a strict subset of the components.
  double partial_i0_probability = 0.3;
};

/// Components with random supports (component 0 covers every state, so the mixture
/// law is positive), random reversible lazy kernels, and optionally shrunken regions
/// and a partial I0.
inline MixtureSpec random_mixture(Rng& rng, const RandomMixtureOptions& opt = {}) {
  std::uniform_int_distribution<Index> dd(opt.min_states, opt.max_states);
  std::uniform_int_distribution<std::size_t> cc(1, opt.max_components);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Index d = dd(rng);
  const std::size_t ncomp = cc(rng);
  std::vector<MixtureComponent> comps;
  std::vector<StateSet> regions;
  VectorXd weights(static_cast<Index>(ncomp));
  for (auto& w : weights) w = 0.1 + u(rng);
  weights /= weights.sum();
  weights[static_cast<Index>(ncomp) - 1] = 1.0 - (weights.sum() - weights[static_cast<Index>(ncomp) - 1]);
  for (std::size_t i = 0; i < ncomp; ++i) {
    VectorXd law = random_law(rng, d);
    if (i > 0) {
      for (Index x = 0; x < d; ++x)
        if (u(rng) < 0.35) law[x] = 0.0;
      if ((law.array() > 0.0).count() < 2) {
        law[0] = std::max(law[0], 0.1);
        law[d - 1] = std::max(law[d - 1], 0.1);
      }
      law /= law.sum();
    }
    MatrixXd K = random_kernel_on_support(rng, law);
    StateSet region = full_set(d);
    if (u(rng) < opt.shrink_probability) {
      // Drop the lightest supported state (keeping at least two supported states).
      Index lightest = -1;
      Index supported = 0;
      for (Index x = 0; x < d; ++x)
        if (law[x] > 0.0) {
          ++supported;
          if (lightest < 0 || law[x] < law[lightest]) lightest = x;
        }
      if (supported > 2) region[static_cast<std::size_t>(lightest)] = false;
    }
    comps.push_back({weights[static_cast<Index>(i)], std::move(law), std::move(K)});
    regions.push_back(std::move(region));
  }
  std::vector<std::size_t> i0;
  if (ncomp > 1 && u(rng) < opt.partial_i0_probability) {
    for (std::size_t i = 0; i < ncomp; ++i)
      if (i == 0 || u(rng) < 0.5) i0.push_back(i);
  }
  return MixtureSpec(std::move(comps), std::move(i0), std::move(regions));
}

/// Two components on 3 states: pi_1 = (1/2,1/2,0), pi_2 = (0,1/2,1/2), equal weights,
/// K_i = (1/2) identity + (1/2) pi_i on the support of pi_i.
inline MixtureSpec three_state_example() {
  auto comp = [](VectorXd law) {
    MatrixXd K = MatrixXd::Identity(3, 3);
    for (Index x = 0; x < 3; ++x)
      if (law[x] > 0.0) K.row(x) = 0.5 * Eigen::RowVector3d::Unit(x) + 0.5 * law.transpose();
    return MixtureComponent{0.5, law, K};
  };
  return MixtureSpec({comp(Eigen::Vector3d(0.5, 0.5, 0.0)), comp(Eigen::Vector3d(0.0, 0.5, 0.5))});
}

inline std::string format_model(const SpikeSlabModel& m) {
  std::ostringstream os;
  os << "# sigma2=" << io::fmt_exact(m.sigma2()) << " q=" << io::fmt_exact(m.q()) << " rho=" << io::fmt_exact(m.rho())
     << " gamma=" << io::fmt_exact(m.gamma()) << '\n'
     << format_design(m);
  return os.str();
}

namespace verify {

struct Check {
  std::string suite;
  std::string name;
  bool passed = true;
  /// Worst slack over the instances; >= 0 when every instance passed.
  double margin = std::numeric_limits<double>::infinity();
  std::size_t instances = 0;
  std::string detail;
  /// Serialized first failing instance.
  std::string replay;
  double seconds = 0.0;

  /// Folds one instance in; keeps the first failing instance for replay.
  void record(double slack, bool ok, const std::function<std::string()>& serialize) {
    ++instances;
    margin = std::min(margin, slack);
    if (!ok && passed) {
      passed = false;
      replay = serialize();
    }
  }
};

inline std::string format_check(const Check& c, bool with_time = false) {
  std::ostringstream os;
  os << (c.passed ? "[PASS] " : "[FAIL] ") << c.suite << '/' << c.name << "  margin=" << std::showpos
     << std::scientific << std::setprecision(3) << c.margin << std::noshowpos << "  instances=" << c.instances;
  if (!c.detail.empty()) os << "  " << c.detail;
  if (with_time) os << std::fixed << std::setprecision(2) << "  (" << c.seconds << " s)";
  return os.str();
}

template <class F>
Check timed(std::string suite, std::string name, F&& body) {
  Check c;
  c.suite = std::move(suite);
  c.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail += std::string(c.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.instances == 0 && c.margin == std::numeric_limits<double>::infinity()) c.margin = 0.0;
  return c;
}

inline Rng suite_rng(std::uint64_t seed, std::uint64_t tag) {
  return make_rng(derive_seed(seed, {tag, static_cast<std::uint64_t>(Stream::kVerify)}));
}

inline Index random_states(Rng& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

inline NormSpec random_norm(Rng& rng) {
  if (fair_coin(rng)) return NormSpec::infinity();
  return NormSpec(2.5 + 10.0 * uniform01(rng));
}

inline std::string chain_replay(const FiniteChain& chain, const std::string& extra = {}) {
  return (extra.empty() ? "" : "# " + extra + "\n") + format_chain(chain);
}

// ---------------------------------------------------------------------------
// lemmas

/// Phi^2/8 <= SpecGap <= Phi on random lazy reversible chains.
inline Check cheeger(std::uint64_t seed, std::size_t count = 200) {
  return timed("lemmas", "cheeger", [&](Check& c) {
    Rng rng = suite_rng(seed, 1);
    for (std::size_t k = 0; k < count; ++k) {
      const auto chain = random_chain(rng, random_states(rng, 2, 10));
      const auto r = cheeger_verify(chain);
      c.record(std::min(r.lower_margin, r.upper_margin) + tol::kInequality, r.holds, [&] { return chain_replay(chain); });
    }
  });
}

/// The zeta-gap mixing bound with SpecGap as the lower bound on SpecGap_zeta, n = 0..200.
inline Check mixing_bound(std::uint64_t seed, std::size_t count = 50) {
  return timed("lemmas", "zeta-mixing-bound", [&](Check& c) {
    Rng rng = suite_rng(seed, 2);
    for (std::size_t k = 0; k < count; ++k) {
      const auto chain = random_chain(rng, random_states(rng, 2, 10));
      const VectorXd f0 = random_density(rng, chain);
      const double zeta = 0.005 + 0.49 * uniform01(rng);
      const NormSpec norm = random_norm(rng);
      const auto r = lemma1_verify(chain, f0, zeta, norm, 200, spectral_gap(chain));
      c.record(r.worst_margin + tol::kInequality, r.holds, [&] {
        std::ostringstream os;
        os << "zeta=" << io::fmt_exact(zeta) << " m=" << norm.to_string() << " n=" << r.worst_n << " f0=";
        for (Index x = 0; x < f0.size(); ++x) os << (x ? "," : "") << io::fmt_exact(f0[x]);
        return chain_replay(chain, os.str());
      });
    }
  });
}

/// SpecGap <= zeta_gap_lower <= zeta_gap_upper.
inline Check gap_sandwich(std::uint64_t seed, std::size_t count = 60, std::size_t budget = 400) {
  return timed("lemmas", "zeta-gap-sandwich", [&](Check& c) {
    Rng rng = suite_rng(seed, 3);
    std::size_t improved = 0, infeasible = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const auto chain = random_chain(rng, random_states(rng, 3, 9));
      const double zeta = 0.005 + 0.49 * uniform01(rng);
      const NormSpec norm = random_norm(rng);
      const double gap = spectral_gap(chain);
      const auto lo = zeta_gap_lower(chain, zeta, norm);
      const auto up = zeta_gap_upper(chain, zeta, norm, budget, derive_seed(seed, {k}));
      const double upper = up.value.value_or(std::numeric_limits<double>::infinity());
      improved += lo.value > gap ? 1 : 0;
      infeasible += up.infeasible() ? 1 : 0;
      const double slack = std::min(lo.value - gap, upper - lo.value) + 1e-10;
      c.record(std::isinf(slack) ? lo.value - gap + 1e-10 : slack, slack >= 0.0, [&] {
        return chain_replay(chain, "zeta=" + io::fmt_exact(zeta) + " m=" + norm.to_string());
      });
    }
    c.detail = "lower>gap on " + std::to_string(improved) + ", infeasible pools " + std::to_string(infeasible);
  });
}

inline Check conductance_oracle(std::uint64_t seed, std::size_t count = 60) {
  return timed("lemmas", "conductance-vs-bruteforce", [&](Check& c) {
    Rng rng = suite_rng(seed, 4);
    for (std::size_t k = 0; k < count; ++k) {
      const auto chain = random_chain(rng, random_states(rng, 2, 11));
      const double a = conductance(chain), b = oracle::conductance(chain);
      const double err = std::abs(a - b) / std::max(1.0, std::abs(b));
      c.record(1e-12 - err, err <= 1e-12, [&] { return chain_replay(chain); });
    }
  });
}

inline Check spectral_gap_oracle(std::uint64_t seed, std::size_t count = 60) {
  return timed("lemmas", "spectral-gap-vs-eigensolver", [&](Check& c) {
    Rng rng = suite_rng(seed, 5);
    for (std::size_t k = 0; k < count; ++k) {
      const auto chain = random_chain(rng, random_states(rng, 2, 12));
      const double err = std::abs(spectral_gap(chain) - oracle::spectral_gap(chain));
      c.record(1e-9 - err, err <= 1e-9, [&] { return chain_replay(chain); });
    }
  });
}

inline Check restricted_gap_oracle(std::uint64_t seed, std::size_t count = 60) {
  return timed("lemmas", "restricted-gap-vs-pinned", [&](Check& c) {
    Rng rng = suite_rng(seed, 6);
    for (std::size_t k = 0; k < count; ++k) {
      const Index d = random_states(rng, 3, 10);
      const auto chain = random_chain(rng, d);
      StateSet s(static_cast<std::size_t>(d));
      while (std::count(s.begin(), s.end(), true) < 2)
        for (auto&& b : s) b = fair_coin(rng) || fair_coin(rng);
      const double a = restricted_spectral_gap(chain, s).value, b = oracle::restricted_gap(chain, s);
      const double err = std::abs(a - b) / std::max(1.0, std::abs(b));
      c.record(1e-8 - err, err <= 1e-8, [&] {
        std::string mask;
        for (bool v : s) mask += v ? '1' : '0';
        return chain_replay(chain, "subset=" + mask);
      });
    }
  });
}

// ---------------------------------------------------------------------------
// mixtures

/// The 3-state two-component example: exact SpecGap 0.25, Madras-Randall bound 0.0625.
inline Check mixture_example() {
  return timed("mixtures", "three-state-example", [&](Check& c) {
    const auto spec = three_state_example();
    const auto K = build_mixture_kernel(spec);
    const double gap = spectral_gap(K);
    const auto mr = madras_randall_bound(spec);
    const auto t1 = theorem1_bound(spec, 0.1, NormSpec::infinity());
    const double err = std::max({std::abs(gap - 0.25), std::abs(mr.value - 0.0625), std::abs(t1.value - 0.0625)});
    c.record(1e-12 - err, err <= 1e-12 && gap >= mr.value, [&] { return format_mixture(spec); });
    std::ostringstream os;
    os << "gap=" << gap << " madras_randall=" << mr.value << " restricted_region=" << t1.value << " kappa=" << mr.kappa
       << " D=" << mr.diameter.value_or(-1);
    c.detail = os.str();
  });
}

/// theorem1_bound <= zeta_gap_upper and madras_randall_bound <= spectral_gap on random mixtures.
inline Check mixture_bounds(std::uint64_t seed, std::size_t count = 60, std::size_t budget = 400) {
  return timed("mixtures", "mixture-lower-bounds", [&](Check& c) {
    Rng rng = suite_rng(seed, 7);
    std::size_t positive = 0, mass_fail = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const auto spec = random_mixture(rng);
      const auto K = build_mixture_kernel(spec);
      const double zeta = 0.01 + 0.48 * uniform01(rng);
      const NormSpec norm = random_norm(rng);
      const auto t1 = theorem1_bound(spec, zeta, norm);
      const auto mr = madras_randall_bound(spec);
      const auto up = zeta_gap_upper(K, zeta, norm, budget, derive_seed(seed, {7, k}));
      const double upper = up.value.value_or(std::numeric_limits<double>::infinity());
      positive += t1.value > 0.0 ? 1 : 0;
      mass_fail += t1.mass_ok ? 0 : 1;
      const double s1 = upper - t1.value, s2 = spectral_gap(K) - mr.value;
      const double slack = std::min(std::isinf(s1) ? 1.0 : s1, s2) + 1e-10;
      c.record(slack, slack >= 0.0, [&] {
        return "# zeta=" + io::fmt_exact(zeta) + " m=" + norm.to_string() + "\n" + format_mixture(spec);
      });
    }
    c.detail = "positive restricted-region bounds " + std::to_string(positive) + ", mass condition failed " +
               std::to_string(mass_fail);
  });
}

inline Check diameter_oracle(std::uint64_t seed, std::size_t count = 200) {
  return timed("mixtures", "diameter-vs-floyd-warshall", [&](Check& c) {
    Rng rng = suite_rng(seed, 8);
    for (std::size_t k = 0; k < count; ++k) {
      const auto n = static_cast<std::size_t>(random_states(rng, 1, 9));
      const double density = uniform01(rng);
      std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) adj[a][b] = adj[b][a] = uniform01(rng) < density;
      const bool ok = graph_diameter(adj) == oracle::diameter(adj);
      c.record(ok ? 0.0 : -1.0, ok, [&] {
        std::ostringstream os;
        for (const auto& row : adj) {
          for (bool v : row) os << (v ? 1 : 0);
          os << '\n';
        }
        return os.str();
      });
    }
  });
}

// ---------------------------------------------------------------------------
// model

struct RandomModelOptions {
  Index min_p = 1, max_p = 6;
  Index min_n = 1, max_n = 12;
};

inline SpikeSlabModel random_model(Rng& rng, const RandomModelOptions& opt = {}) {
  const Index p = random_states(rng, opt.min_p, opt.max_p);
  const Index n = random_states(rng, opt.min_n, opt.max_n);
  MatrixXd X = standard_normal(rng, n, p);
  VectorXd z = standard_normal(rng, n) * (0.5 + 2.0 * uniform01(rng));
  PriorParams prior;
  prior.sigma2 = 0.3 + 2.7 * uniform01(rng);
  prior.q = 0.05 + 0.9 * uniform01(rng);
  prior.rho = 0.1 + 4.9 * uniform01(rng);
  prior.gamma = (0.01 + 0.98 * uniform01(rng)) / (2.0 * prior.rho);
  return SpikeSlabModel(std::move(X), std::move(z), prior);
}

inline Indicator random_indicator(Rng& rng, std::size_t p) {
  Indicator d(p);
  for (std::size_t j = 0; j < p; ++j)
    if (fair_coin(rng)) d.set(j);
  return d;
}

/// log_posterior_ratio against differences of the theta-space Gaussian integral.
inline Check posterior_identity(std::uint64_t seed, std::size_t count = 100) {
  return timed("model", "posterior-ratio-vs-gaussian-integral", [&](Check& c) {
    Rng rng = suite_rng(seed, 9);
    for (std::size_t k = 0; k < count; ++k) {
      const auto m = random_model(rng);
      const auto p = static_cast<std::size_t>(m.p());
      const Indicator a = random_indicator(rng, p), b = random_indicator(rng, p);
      const double got = log_posterior_ratio(m, a, b);
      const double want = oracle::log_marginal_theta_space(m, a) - oracle::log_marginal_theta_space(m, b);
      const double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
      c.record(1e-8 - rel, rel <= 1e-8, [&] {
        return format_model(m) + "# delta=" + a.to_bits() + " delta0=" + b.to_bits() + "\n";
      });
    }
  });
}

/// Determinant lemma and Woodbury updates for nested delta ⊆ vartheta.
inline Check nested_identities(std::uint64_t seed, std::size_t count = 100) {
  return timed("model", "determinant-and-woodbury", [&](Check& c) {
    Rng rng = suite_rng(seed, 10);
    for (std::size_t k = 0; k < count; ++k) {
      const auto m = random_model(rng, {1, 8, 1, 12});
      const auto p = static_cast<std::size_t>(m.p());
      const Indicator delta = random_indicator(rng, p);
      Indicator big = delta;
      for (std::size_t j = 0; j < p; ++j)
        if (fair_coin(rng)) big.set(j);
      const double det_lemma = log_det_ratio_nested(m, delta, big);
      const double direct = log_L_delta_quadratics(m, big).log_det - log_L_delta_quadratics(m, delta).log_det;
      const double e1 = std::abs(det_lemma - direct) / std::max(1.0, std::abs(direct));
      const MatrixXd V = standard_normal(rng, m.n(), 3);
      const MatrixXd wb = apply_L_inverse_nested(m, delta, big, V);
      const MatrixXd ref = L_factor(m, big).solve(V);
      const double e2 = (wb - ref).norm() / std::max(1.0, ref.norm());
      const double err = std::max(e1, e2);
      c.record(1e-9 - err, err <= 1e-9, [&] {
        return format_model(m) + "# delta=" + delta.to_bits() + " vartheta=" + big.to_bits() + "\n";
      });
    }
  });
}

/// Enumerated posterior sums to 1 and does not depend on the reference model.
inline Check posterior_normalization(std::uint64_t seed, std::size_t count = 20) {
  return timed("model", "enumeration-normalized-and-reference-free", [&](Check& c) {
    Rng rng = suite_rng(seed, 11);
    for (std::size_t k = 0; k < count; ++k) {
      const auto m = random_model(rng, {1, 8, 1, 12});
      const Indicator ref = random_indicator(rng, static_cast<std::size_t>(m.p()));
      const auto a = exact_model_posterior(m);
      const auto b = exact_model_posterior(m, &ref);
      double err = std::abs(std::accumulate(a.prob.begin(), a.prob.end(), 0.0) - 1.0);
      for (std::size_t i = 0; i < a.prob.size(); ++i) err = std::max(err, std::abs(a.prob[i] - b.prob[i]));
      c.record(1e-10 - err, err <= 1e-10, [&] { return format_model(m) + "# reference=" + ref.to_bits() + "\n"; });
    }
  });
}

/// X = sqrt(n) Q with orthonormal Q: C(s) = 0 and restricted eigenvalue 1/(1 + gamma n / sigma^2).
inline Check diagnostics_orthogonal(std::uint64_t seed) {
  return timed("model", "diagnostics-orthogonal-design", [&](Check& c) {
    Rng rng = suite_rng(seed, 12);
    for (int k = 0; k < 5; ++k) {
      const Index p = random_states(rng, 3, 8), n = p + random_states(rng, 0, 10);
      Eigen::HouseholderQR<MatrixXd> qr(standard_normal(rng, n, p));
      const MatrixXd Q = MatrixXd(qr.householderQ()).leftCols(p);
      PriorParams prior{0.5 + uniform01(rng), 0.3, 0.5 + uniform01(rng), 0.0};
      prior.gamma = 0.4 / prior.rho * uniform01(rng) + 1e-3;
      const SpikeSlabModel m(std::sqrt(static_cast<double>(n)) * Q, standard_normal(rng, n), prior);
      const double coh = coherence(m, 2).value;
      const double want = 1.0 / (1.0 + prior.gamma * static_cast<double>(n) / prior.sigma2);
      const double re = restricted_eigenvalue(m, 2).value;
      const double err = std::max(coh, std::abs(re - want));
      c.record(1e-10 - err, err <= 1e-10, [&] { return format_model(m); });
    }
  });
}

/// Enumeration diagnostics against the bitmask / explicit-inverse oracles at p = 20, s = 2.
inline Check diagnostics_oracle(std::uint64_t seed, std::size_t count = 2) {
  return timed("model", "diagnostics-vs-bruteforce", [&](Check& c) {
    Rng rng = suite_rng(seed, 13);
    for (std::size_t k = 0; k < count; ++k) {
      const Index p = 20, n = 60;
      PriorParams prior{1.0, 0.1, 1.0 / std::sqrt(static_cast<double>(n)), 0.0};
      MatrixXd X = standard_normal(rng, n, p);
      prior.gamma = 0.1 / lambda_max_XtX(X);
      const SpikeSlabModel m(std::move(X), standard_normal(rng, n), prior);
      for (int s = 1; s <= 2; ++s) {
        const double a = coherence(m, s).value, b = oracle::coherence(m, s);
        const double ra = restricted_eigenvalue(m, s).value, rb = oracle::restricted_eigenvalue(m, s);
        const double err = std::max(std::abs(a - b) / std::max(1.0, b), std::abs(ra - rb) / std::max(1e-300, rb));
        c.record(1e-10 - err, err <= 1e-10, [&] { return format_model(m) + "# s=" + std::to_string(s) + "\n"; });
      }
    }
  });
}

// ---------------------------------------------------------------------------
// sampler

/// p = 8, n = 20 instance with a mix of strong, weak and null coefficients.
inline SpikeSlabModel sampler_instance(std::uint64_t seed) {
  Rng rng = suite_rng(seed, 14);
  const Index n = 20, p = 8;
  MatrixXd X = standard_normal(rng, n, p);
  VectorXd theta = VectorXd::Zero(p);
  theta.head(4) << 1.5, -1.0, 0.5, 0.3;
  VectorXd z = X * theta + standard_normal(rng, n);
  return SpikeSlabModel(std::move(X), std::move(z), PriorParams{1.0, 0.3, 0.5, 0.02});
}

/// L1 distance between the delta-frequencies of a long run and the enumerated posterior.
inline Check sampler_stationary(std::uint64_t seed, std::size_t iterations = 200000, double tolerance = 0.05) {
  return timed("sampler", "delta-marginal-vs-enumeration", [&](Check& c) {
    const auto m = sampler_instance(seed);
    const auto post = exact_model_posterior(m);
    const std::size_t burn = 1000;
    GibbsState s = init_from_model(m, Indicator(8), derive_seed(seed, {14, 1}));
    std::vector<double> freq(post.prob.size(), 0.0);
    run_observed(m, s, burn + iterations, [&](std::size_t it, bool, const GibbsState& st) {
      if (it > burn) freq[static_cast<std::size_t>(st.last_delta.mask())] += 1.0;
      return true;
    });
    double l1 = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) l1 += std::abs(freq[i] / static_cast<double>(iterations) - post.prob[i]);
    c.record(tolerance - l1, l1 <= tolerance, [&] { return format_model(m); });
    std::ostringstream os;
    os << "tv(L1)=" << std::setprecision(4) << l1 << " iterations=" << iterations;
    c.detail = os.str();
  });
}

/// Empirical mean and covariance of `draws` samples within 4 Monte Carlo standard errors
/// of the analytic (m_delta, sigma^2 Sigma_delta), computed here from the explicit inverse.
inline Check theta_moments(std::uint64_t seed, ThetaStrategy strategy, std::size_t draws = 100000) {
  return timed("sampler", "theta-moments-" + to_string(strategy), [&](Check& c) {
    Rng rng = suite_rng(seed, 15);
    const Index p = 15, n = 10;
    MatrixXd X = standard_normal(rng, n, p);
    VectorXd z = X.leftCols(3) * Eigen::Vector3d(1.0, -2.0, 0.5) + standard_normal(rng, n);
    const SpikeSlabModel m(std::move(X), std::move(z), PriorParams{1.3, 0.2, 0.7, 0.05});
    const Indicator delta = random_indicator(rng, static_cast<std::size_t>(p));
    const VectorXd D = m.prior_variances(delta);
    MatrixXd prec = m.X().transpose() * m.X() / m.sigma2();
    prec.diagonal() += D.cwiseInverse();
    const MatrixXd cov = prec.inverse();
    const VectorXd mean = cov * m.X().transpose() * m.z() / m.sigma2();

    Rng draw_rng = make_rng(derive_seed(seed, {15, static_cast<std::uint64_t>(strategy)}));
    VectorXd sum = VectorXd::Zero(p);
    MatrixXd sq = MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < draws; ++i) {
      const VectorXd t = sample_theta(m, delta, draw_rng, strategy) - mean;
      sum += t;
      sq.selfadjointView<Eigen::Lower>().rankUpdate(t);
    }
    const double N = static_cast<double>(draws);
    sq = sq.selfadjointView<Eigen::Lower>();
    const VectorXd mhat = sum / N;
    const MatrixXd chat = (sq - N * mhat * mhat.transpose()) / (N - 1.0);
    double worst = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < p; ++j) {
      const double se = std::sqrt(cov(j, j) / N);
      worst = std::min(worst, 4.0 - std::abs(mhat[j]) / se);
      for (Index l = 0; l <= j; ++l) {
        const double se_c = std::sqrt((cov(j, j) * cov(l, l) + cov(j, l) * cov(j, l)) / N);
        worst = std::min(worst, 4.0 - std::abs(chat(j, l) - cov(j, l)) / se_c);
      }
    }
    c.record(worst, worst >= 0.0, [&] { return format_model(m) + "# delta=" + delta.to_bits() + "\n"; });
    c.detail = "margin in standard errors; draws=" + std::to_string(draws) + " delta=" + delta.to_bits();
  });
}

/// Lazy fraction of N iterations inside N/2 +- 4 sqrt(N/4).
inline Check laziness(std::uint64_t seed, std::size_t N = 10000) {
  return timed("sampler", "lazy-fraction", [&](Check& c) {
    const auto m = sampler_instance(seed);
    const auto t = run(m, Indicator(8), N, derive_seed(seed, {16}));
    std::size_t lazy = 0;
    for (const auto& r : t.records) lazy += r.lazy ? 1 : 0;
    const double band = 4.0 * std::sqrt(static_cast<double>(N) / 4.0);
    const double dev = std::abs(static_cast<double>(lazy) - static_cast<double>(N) / 2.0);
    c.record(band - dev, dev <= band, [&] { return format_model(m); });
    c.detail = "lazy=" + std::to_string(lazy) + "/" + std::to_string(N);
  });
}

inline Check sampler_determinism(std::uint64_t seed) {
  return timed("sampler", "seeded-determinism", [&](Check& c) {
    const auto m = sampler_instance(seed);
    const auto a = run(m, Indicator(8), 2000, derive_seed(seed, {17}), {true});
    const auto b = run(m, Indicator(8), 2000, derive_seed(seed, {17}), {true});
    const bool same = trajectory_csv(a) == trajectory_csv(b);
    c.record(same ? 0.0 : -1.0, same, [&] { return format_model(m); });
  });
}

// ---------------------------------------------------------------------------
// study

/// Desk-scale study configuration: p = 500, n = 50, R = 20, T = 20000.
inline ExperimentConfig desk_study_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.p = {500};
  c.replications = 20;
  c.truncation = 20000;
  c.fp_percent = {1.0, 5.0, 10.0};
  c.fn_counts = {2};
  c.seed = seed;
  return c;
}

struct StudyOutcome {
  Check check;
  std::vector<CellSummary> cells;
};

/// Qualitative ordering of mean mixing times: FP=1% < 500, FP=5% < 2000, FP=10% > FP=5%,
/// FN=2 truncated in every replicate.
inline StudyOutcome study_ordering(const ExperimentConfig& cfg) {
  StudyOutcome out;
  out.check = timed("study", "mixing-time-ordering", [&](Check& c) {
    const auto res = run_study(cfg);
    out.cells = aggregate(res.records);
    const Index p = cfg.p.front();
    auto find = [&](std::size_t fp, std::size_t fn) -> const CellSummary* {
      for (const auto& s : out.cells)
        if (s.p == p && s.fp == fp && s.fn == fn) return &s;
      return nullptr;
    };
    const auto* fp1 = find(ExperimentConfig::fp_count(p, 1.0), 0);
    const auto* fp5 = find(ExperimentConfig::fp_count(p, 5.0), 0);
    const auto* fp10 = find(ExperimentConfig::fp_count(p, 10.0), 0);
    const auto* fn2 = find(0, 2);
    if (!fp1 || !fp5 || !fp10 || !fn2 || !res.failures.empty()) {
      c.record(-1.0, false, [&] { return cfg.to_text(); });
      c.detail = "missing cells or failed replicates (" + std::to_string(res.failures.size()) + ")";
      return;
    }
    const double m1 = 500.0 - fp1->mean, m2 = 2000.0 - fp5->mean, m3 = fp10->mean - fp5->mean;
    const double m4 = static_cast<double>(fn2->truncated) - static_cast<double>(fn2->count);
    c.record(m1, m1 > 0, [&] { return cfg.to_text(); });
    c.record(m2, m2 > 0, [&] { return cfg.to_text(); });
    c.record(m3, m3 > 0, [&] { return cfg.to_text(); });
    c.record(m4, m4 >= 0, [&] { return cfg.to_text(); });
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << "FP1%=" << fp1->mean << " FP5%=" << fp5->mean << " FP10%=" << fp10->mean
       << " (truncated " << fp10->truncated << "/" << fp10->count << ") FN2 truncated " << fn2->truncated << "/"
       << fn2->count;
    c.detail = os.str();
  });
  return out;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemmas", "mixtures", "model", "sampler", "study", "all"};
  return names;
}

/// "all" runs every suite except the long-running "study".
inline std::vector<Check> run_suite(const std::string& suite, std::uint64_t seed) {
  std::vector<Check> out;
  const bool all = suite == "all";
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw ConfigError("unknown suite '" + suite + "' (lemmas|mixtures|model|sampler|study|all)");
  if (all || suite == "lemmas") {
    out.push_back(cheeger(seed));
    out.push_back(mixing_bound(seed));
    out.push_back(gap_sandwich(seed));
    out.push_back(conductance_oracle(seed));
    out.push_back(spectral_gap_oracle(seed));
    out.push_back(restricted_gap_oracle(seed));
  }
  if (all || suite == "mixtures") {
    out.push_back(mixture_example());
    out.push_back(mixture_bounds(seed));
    out.push_back(diameter_oracle(seed));
  }
  if (all || suite == "model") {
    out.push_back(posterior_identity(seed));
    out.push_back(nested_identities(seed));
    out.push_back(posterior_normalization(seed));
    out.push_back(diagnostics_orthogonal(seed));
    out.push_back(diagnostics_oracle(seed));
  }
  if (all || suite == "sampler") {
    out.push_back(sampler_stationary(seed));
    out.push_back(theta_moments(seed, ThetaStrategy::kDirect));
    out.push_back(theta_moments(seed, ThetaStrategy::kWoodbury));
    out.push_back(laziness(seed));
    out.push_back(sampler_determinism(seed));
  }
  if (suite == "study") out.push_back(study_ordering(desk_study_config(seed)).check);
  return out;
}

}  // namespace verify
}  // namespace zetagap

#endif
