#ifndef ZETAGAP_CHAIN_ANALYSIS_HPP
#define ZETAGAP_CHAIN_ANALYSIS_HPP

// Exact spectral quantities of finite reversible lazy chains: spectral gap,
// conductance, their zeta-variants, restricted gaps, and the checks that tie
// them to total-variation convergence.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "zetagap/errors.hpp"
#include "zetagap/finite_chain.hpp"
#include "zetagap/rng.hpp"

namespace zetagap {

/// Membership mask over the d states of a chain.
using StateSet = std::vector<bool>;

inline constexpr int kMaxConductanceStates = 25;
inline constexpr int kMaxSubsetSearchStates = 20;

inline StateSet full_set(Index d) { return StateSet(static_cast<std::size_t>(d), true); }

inline StateSet set_from_mask(std::uint32_t mask, Index d) {
  StateSet s(static_cast<std::size_t>(d));
  for (Index x = 0; x < d; ++x) s[static_cast<std::size_t>(x)] = (mask >> x) & 1U;
  return s;
}

inline double mass(const FiniteChain& chain, const StateSet& set) {
  double m = 0.0;
  for (Index x = 0; x < chain.size(); ++x)
    if (set[static_cast<std::size_t>(x)]) m += chain.stationary()[x];
  return m;
}

// ---------------------------------------------------------------------------
// Functionals of f

inline double expectation(const FiniteChain& chain, const VectorXd& f) { return chain.stationary().dot(f); }

inline double variance(const FiniteChain& chain, const VectorXd& f) {
  const VectorXd centered = f.array() - expectation(chain, f);
  return chain.stationary().dot(centered.cwiseAbs2());
}

/// E(f,f) = 1/2 sum_{x,y} pi[x] P[x,y] (f[y]-f[x])^2
inline double dirichlet_form(const FiniteChain& chain, const VectorXd& f) {
  const auto& P = chain.transition();
  const auto& pi = chain.stationary();
  double e = 0.0;
  for (Index x = 0; x < chain.size(); ++x) {
    double row = 0.0;
    for (Index y = 0; y < chain.size(); ++y) {
      const double diff = f[y] - f[x];
      row += P(x, y) * diff * diff;
    }
    e += pi[x] * row;
  }
  return 0.5 * e;
}

/// ||f||_{m,pi} for any m >= 1 (m = inf gives max |f|).
inline double lp_norm(const FiniteChain& chain, const VectorXd& f, double m) {
  const double top = f.cwiseAbs().maxCoeff();
  if (std::isinf(m) || top == 0.0) return top;
  double acc = 0.0;
  for (Index x = 0; x < chain.size(); ++x) acc += chain.stationary()[x] * std::pow(std::abs(f[x]) / top, m);
  return top * std::pow(acc, 1.0 / m);
}

inline double star_norm(const FiniteChain& chain, const VectorXd& f, const NormSpec& norm) {
  return lp_norm(chain, f, norm.m());
}

/// min_c ||f + c||_{m,pi} and the minimizing shift. The objective is convex in c.
struct ShiftedNorm {
  double norm;
  double shift;
};

inline ShiftedNorm min_shifted_norm(const FiniteChain& chain, const VectorXd& f, const NormSpec& norm) {
  const double lo = f.minCoeff();
  const double hi = f.maxCoeff();
  if (norm.is_infinite()) return {0.5 * (hi - lo), -0.5 * (hi + lo)};
  double a = -hi, b = -lo;
  auto eval = [&](double c) { return lp_norm(chain, (f.array() + c).matrix(), norm.m()); };
  constexpr double kInvPhi = 0.6180339887498949;
  double c1 = b - kInvPhi * (b - a), c2 = a + kInvPhi * (b - a);
  double v1 = eval(c1), v2 = eval(c2);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (v1 < v2) {
      b = c2;
      c2 = c1;
      v2 = v1;
      c1 = b - kInvPhi * (b - a);
      v1 = eval(c1);
    } else {
      a = c1;
      c1 = c2;
      v1 = v2;
      c2 = a + kInvPhi * (b - a);
      v2 = eval(c2);
    }
  }
  const double c = 0.5 * (a + b);
  return {eval(c), c};
}

// ---------------------------------------------------------------------------
// Spectral gap and conductance

/// Eigen-decomposition of the symmetrized kernel, eigenvalues ascending.
inline Eigen::SelfAdjointEigenSolver<MatrixXd> symmetrized_spectrum(const FiniteChain& chain) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(chain.symmetrized());
  if (es.info() != Eigen::Success) throw NumericError("eigen-decomposition of the symmetrized kernel failed");
  return es;
}

/// 1 - lambda_2 of the symmetrized kernel.
inline double spectral_gap(const FiniteChain& chain) {
  const auto es = symmetrized_spectrum(chain);
  const double lambda2 = es.eigenvalues()[chain.size() - 2];
  return std::clamp(1.0 - lambda2, 0.0, 1.0);
}

namespace detail {

/// Visits every nonempty proper subset A (Gray-code order) with pi(A) and the flow
/// sum_{x in A, y notin A} pi[x]P[x,y], each maintained incrementally in O(d) and
/// recomputed exactly every 256 steps.
template <class Visitor>
void for_each_cut(const FiniteChain& chain, Visitor&& visit) {
  const int d = static_cast<int>(chain.size());
  if (d > kMaxConductanceStates)
    throw CapacityError("subset enumeration limited to " + std::to_string(kMaxConductanceStates) + " states");
  const MatrixXd Q = chain.flow();
  const VectorXd& pi = chain.stationary();
  std::vector<double> total(static_cast<std::size_t>(d));
  for (int v = 0; v < d; ++v) total[static_cast<std::size_t>(v)] = Q.row(v).sum() - Q(v, v);
  std::vector<double> in_a(static_cast<std::size_t>(d), 0.0);

  const std::uint32_t full = (d == 32) ? ~0U : ((1U << d) - 1U);
  std::uint32_t prev = 0;
  double mass_a = 0.0, flow_a = 0.0;
  for (std::uint32_t i = 1; i <= full; ++i) {
    const std::uint32_t g = i ^ (i >> 1);
    const int v = std::countr_zero(g ^ prev);
    const auto uv = static_cast<std::size_t>(v);
    if (g & (1U << v)) {
      flow_a += total[uv] - 2.0 * in_a[uv];
      for (int y = 0; y < d; ++y) in_a[static_cast<std::size_t>(y)] += Q(v, y);
      mass_a += pi[v];
    } else {
      for (int y = 0; y < d; ++y) in_a[static_cast<std::size_t>(y)] -= Q(v, y);
      flow_a -= total[uv] - 2.0 * in_a[uv];
      mass_a -= pi[v];
    }
    prev = g;
    if ((i & 255U) == 0) {
      // rebuild from scratch so rounding cannot accumulate across 2^d updates
      mass_a = flow_a = 0.0;
      std::fill(in_a.begin(), in_a.end(), 0.0);
      for (int x = 0; x < d; ++x) {
        if (!(g & (1U << x))) continue;
        mass_a += pi[x];
        for (int y = 0; y < d; ++y) {
          in_a[static_cast<std::size_t>(y)] += Q(x, y);
          if (!(g & (1U << y))) flow_a += Q(x, y);
        }
      }
    }
    if (g == full) continue;
    visit(g, mass_a, std::max(flow_a, 0.0));
  }
}

inline double exact_mass(const FiniteChain& chain, std::uint32_t mask) {
  double m = 0.0;
  for (Index x = 0; x < chain.size(); ++x)
    if ((mask >> x) & 1U) m += chain.stationary()[x];
  return m;
}

struct Cut {
  double mass, complement_mass, flow;
};

/// pi(A), pi(A^c) and flow(A) summed directly, in O(d^2).
inline Cut exact_cut(const FiniteChain& chain, std::uint32_t mask) {
  Cut c{0.0, 0.0, 0.0};
  const auto& pi = chain.stationary();
  const MatrixXd& P = chain.transition();
  for (Index x = 0; x < chain.size(); ++x) {
    if (!((mask >> x) & 1U)) {
      c.complement_mass += pi[x];
      continue;
    }
    c.mass += pi[x];
    double out = 0.0;
    for (Index y = 0; y < chain.size(); ++y)
      if (!((mask >> y) & 1U)) out += P(x, y);
    c.flow += pi[x] * out;
  }
  return c;
}

/// Incremental ratios near the running minimum are re-evaluated exactly: a cut of tiny
/// mass turns absolute rounding in the running sums into large relative error.
inline constexpr double kRecheck = 1e-6;

}  // namespace detail

/// Phi(K) = min over nonempty proper A of flow(A) / (pi(A) pi(A^c)). Exhaustive, d <= 25.
inline double conductance(const FiniteChain& chain) {
  double best = std::numeric_limits<double>::infinity();
  detail::for_each_cut(chain, [&](std::uint32_t mask, double m, double flow) {
    const double denom = m * (1.0 - m);
    if (!(denom > 0.0) || flow / denom > best * (1.0 + detail::kRecheck)) return;
    const auto c = detail::exact_cut(chain, mask);
    best = std::min(best, c.flow / (c.mass * c.complement_mass));
  });
  return best;
}

/// Phi_zeta(K): min over zeta < pi(A) < 1/2 of flow(A) / ((pi(A)-zeta)(pi(A^c)-zeta)).
/// Empty constraint set gives std::nullopt ("vacuous"). zeta = 0 returns Phi(K): the ratio is
/// symmetric under A <-> A^c, so only a cut with pi(A) = 1/2 exactly could differ, and the
/// strict window would wrongly drop it.
inline std::optional<double> zeta_conductance(const FiniteChain& chain, double zeta) {
  if (!(zeta >= 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in [0, 1/2)");
  if (zeta == 0.0) return conductance(chain);
  std::optional<double> best;
  constexpr double kNear = 1e-9;
  detail::for_each_cut(chain, [&](std::uint32_t mask, double m, double flow) {
    if (std::abs(m - 0.5) < kNear || std::abs(m - zeta) < kNear) m = detail::exact_mass(chain, mask);
    if (!(m > zeta && m < 0.5)) return;
    const double r = flow / ((m - zeta) * (1.0 - m - zeta));
    if (best && r > *best * (1.0 + detail::kRecheck)) return;
    const auto c = detail::exact_cut(chain, mask);
    const double exact = c.flow / ((c.mass - zeta) * (c.complement_mass - zeta));
    if (!best || exact < *best) best = exact;
  });
  return best;
}

// ---------------------------------------------------------------------------
// Restricted spectral gap

struct RestrictedGap {
  double value;
  /// Minimizing function on the subset (zero outside), centered under pi restricted to the subset.
  VectorXd witness;
};

/// min over f of sum_{x,y in S} pi[x]P[x,y](f[y]-f[x])^2 / sum_{x,y in S} pi[x]pi[y](f[y]-f[x])^2,
/// solved as the smallest generalized eigenvalue of the two weighted graph Laplacians
/// on the complement of the constants.
inline RestrictedGap restricted_spectral_gap(const FiniteChain& chain, const StateSet& subset) {
  const Index d = chain.size();
  if (static_cast<Index>(subset.size()) != d) throw DomainError("subset mask has wrong length");
  std::vector<Index> states;
  for (Index x = 0; x < d; ++x)
    if (subset[static_cast<std::size_t>(x)]) states.push_back(x);
  const auto k = static_cast<Index>(states.size());
  if (k < 2) throw DomainError("restricted spectral gap needs at least two states in the subset");

  const auto& P = chain.transition();
  const auto& pi = chain.stationary();
  VectorXd w(k);
  for (Index i = 0; i < k; ++i) w[i] = pi[states[static_cast<std::size_t>(i)]];
  MatrixXd lap_flow = MatrixXd::Zero(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      if (i != j) {
        const double q = 0.5 * (w[i] * P(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]) +
                                w[j] * P(states[static_cast<std::size_t>(j)], states[static_cast<std::size_t>(i)]));
        lap_flow(i, j) = -q;
        lap_flow(i, i) += q;
      }
  MatrixXd lap_mass = w.sum() * MatrixXd(w.asDiagonal()) - w * w.transpose();

  // Orthonormal basis of 1^perp from a Householder reflection of the ones vector.
  Eigen::HouseholderQR<MatrixXd> qr(MatrixXd::Ones(k, 1));
  const MatrixXd Q = qr.householderQ();
  const MatrixXd B = Q.rightCols(k - 1);
  MatrixXd A = B.transpose() * lap_flow * B;
  MatrixXd C = B.transpose() * lap_mass * B;
  A = 0.5 * (A + A.transpose()).eval();
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(A, C);
  if (ges.info() != Eigen::Success) throw NumericError("generalized eigen-solve for the restricted gap failed");

  const VectorXd g = B * ges.eigenvectors().col(0);
  VectorXd witness = VectorXd::Zero(d);
  const double mean = w.dot(g) / w.sum();
  for (Index i = 0; i < k; ++i) witness[states[static_cast<std::size_t>(i)]] = g[i] - mean;
  return {std::max(ges.eigenvalues()[0], 0.0), witness};
}

// ---------------------------------------------------------------------------
// zeta-spectral gap: certified lower bound and searched upper bound

/// 1 - (zeta/10)^{1 + 2/(m-2)}: the stationary mass a certifying subset must carry.
inline double restriction_mass_threshold(double zeta, const NormSpec& norm) {
  return 1.0 - std::pow(zeta / 10.0, norm.mass_exponent());
}

struct ZetaGapLower {
  double value;
  /// Subset whose restricted gap attains `value`; full space when the plain gap wins.
  StateSet witness;
  std::size_t subsets_examined = 0;
};

/// max(SpecGap, max over X_zeta with pi(X_zeta) >= threshold of SpecGap_{X_zeta}).
inline ZetaGapLower zeta_gap_lower(const FiniteChain& chain, double zeta, const NormSpec& norm) {
  if (!(zeta > 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in (0, 1/2)");
  const Index d = chain.size();
  if (d > kMaxSubsetSearchStates)
    throw CapacityError("subset search limited to " + std::to_string(kMaxSubsetSearchStates) + " states");
  const double removable = 1.0 - restriction_mass_threshold(zeta, norm);

  ZetaGapLower best{spectral_gap(chain), full_set(d), 0};
  const auto& pi = chain.stationary();
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return pi[a] < pi[b]; });

  // Depth-first over removed sets R (pi(R) <= removable), states in ascending mass
  // so a branch is cut as soon as the next state no longer fits.
  StateSet keep = full_set(d);
  auto visit = [&](auto&& self, std::size_t start, double removed, Index kept) -> void {
    for (std::size_t i = start; i < order.size(); ++i) {
      const Index x = order[i];
      if (removed + pi[x] > removable) break;
      if (kept - 1 < 2) break;
      keep[static_cast<std::size_t>(x)] = false;
      const auto rg = restricted_spectral_gap(chain, keep);
      ++best.subsets_examined;
      if (rg.value > best.value) {
        best.value = rg.value;
        best.witness = keep;
      }
      self(self, i + 1, removed + pi[x], kept - 1);
      keep[static_cast<std::size_t>(x)] = true;
    }
  };
  visit(visit, 0, 0.0, d);
  return best;
}

/// Evaluates E(f,f)/(Var(f) - zeta/2) after shifting and rescaling f to the unit
/// star-norm sphere (the shift minimizing the norm). Returns nullopt when the
/// rescaled f has Var <= zeta.
struct ZetaRatio {
  double ratio;
  double shift;
  double scale;
};

inline std::optional<ZetaRatio> zeta_ratio(const FiniteChain& chain, const VectorXd& f, double zeta,
                                           const NormSpec& norm) {
  const auto sn = min_shifted_norm(chain, f, norm);
  if (!(sn.norm > 0.0) || !std::isfinite(sn.norm)) return std::nullopt;
  const double n2 = sn.norm * sn.norm;
  const double var = variance(chain, f) / n2;
  if (!(var > zeta)) return std::nullopt;
  const double e = dirichlet_form(chain, f) / n2;
  return ZetaRatio{e / (var - 0.5 * zeta), sn.shift, 1.0 / sn.norm};
}

/// Deterministic pool of trial functions: eigenfunctions of the kernel, their
/// pairwise blends, subset indicators, and random functions.
inline std::vector<VectorXd> zeta_candidate_pool(const FiniteChain& chain, std::size_t budget, std::uint64_t seed) {
  const Index d = chain.size();
  std::vector<VectorXd> pool;
  const auto es = symmetrized_spectrum(chain);
  const VectorXd inv_sqrt = chain.sqrt_stationary().cwiseInverse();
  std::vector<VectorXd> eig;
  for (Index k = d - 2; k >= 0; --k) eig.push_back(inv_sqrt.cwiseProduct(es.eigenvectors().col(k)));
  pool.insert(pool.end(), eig.begin(), eig.end());
  const std::size_t lead = std::min<std::size_t>(eig.size(), 4);
  for (std::size_t a = 0; a < lead; ++a)
    for (std::size_t b = a + 1; b < lead; ++b)
      for (int t = 1; t < 8; ++t) {
        const double angle = 3.141592653589793 * t / 8.0;
        pool.push_back(std::cos(angle) * eig[a] + std::sin(angle) * eig[b]);
      }

  Rng rng = make_rng(seed);
  if (d <= 14) {
    const std::uint32_t full = (1U << d) - 1U;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      VectorXd f(d);
      for (Index x = 0; x < d; ++x) f[x] = ((mask >> x) & 1U) ? 1.0 : 0.0;
      pool.push_back(std::move(f));
    }
  } else {
    for (std::size_t i = 0; i < budget; ++i) {
      VectorXd f(d);
      for (Index x = 0; x < d; ++x) f[x] = fair_coin(rng) ? 1.0 : 0.0;
      pool.push_back(std::move(f));
    }
  }
  for (std::size_t i = 0; i < budget; ++i) pool.push_back(standard_normal(rng, d));
  return pool;
}

struct ZetaGapUpper {
  /// nullopt when no candidate satisfies Var > zeta ("infeasible"); read as 1 downstream.
  std::optional<double> value;
  /// Best candidate, shifted and scaled to unit star-norm.
  VectorXd witness;

  double value_or_one() const { return value.value_or(1.0); }
  bool infeasible() const { return !value.has_value(); }
};

/// Minimum of the zeta-ratio over an explicit pool (no refinement). With a fixed
/// pool this is non-decreasing in zeta.
inline ZetaGapUpper zeta_gap_over_pool(const FiniteChain& chain, const std::vector<VectorXd>& pool, double zeta,
                                       const NormSpec& norm) {
  ZetaGapUpper best;
  for (const auto& f : pool) {
    const auto r = zeta_ratio(chain, f, zeta, norm);
    if (r && (!best.value || r->ratio < *best.value)) {
      best.value = r->ratio;
      best.witness = (f.array() + r->shift).matrix() * r->scale;
    }
  }
  return best;
}

/// Upper bound on SpecGap_zeta from the candidate pool followed by coordinate-wise
/// random local refinement of the best candidates. `budget` sizes both stages.
inline ZetaGapUpper zeta_gap_upper(const FiniteChain& chain, double zeta, const NormSpec& norm,
                                   std::size_t budget = 2000, std::uint64_t seed = 0x5eed) {
  if (!(zeta > 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in (0, 1/2)");
  const auto pool = zeta_candidate_pool(chain, budget, derive_seed(seed, {1}));
  const Index d = chain.size();

  struct Scored {
    double ratio;
    VectorXd f;
  };
  std::vector<Scored> scored;
  for (const auto& f : pool)
    if (auto r = zeta_ratio(chain, f, zeta, norm)) scored.push_back({r->ratio, (f.array() + r->shift).matrix() * r->scale});
  if (scored.empty()) return {};
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.ratio < b.ratio; });

  Rng rng = make_rng(derive_seed(seed, {2}));
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<Index> coord(0, d - 1);
  const std::size_t starts = std::min<std::size_t>(scored.size(), 4);
  const std::size_t steps = std::max<std::size_t>(budget / 4, 50);
  for (std::size_t s = 0; s < starts; ++s) {
    VectorXd f = scored[s].f;
    double current = scored[s].ratio;
    double step = 0.25;
    int misses = 0;
    for (std::size_t it = 0; it < steps; ++it) {
      VectorXd trial = f;
      trial[coord(rng)] += step * normal(rng);
      if (auto r = zeta_ratio(chain, trial, zeta, norm); r && r->ratio < current) {
        current = r->ratio;
        f = (trial.array() + r->shift).matrix() * r->scale;
        misses = 0;
      } else if (++misses > 2 * d) {
        step *= 0.5;
        misses = 0;
      }
    }
    scored.push_back({current, f});
  }
  const auto best = std::min_element(scored.begin(), scored.end(),
                                     [](const Scored& a, const Scored& b) { return a.ratio < b.ratio; });
  return {best->ratio, best->f};
}

// ---------------------------------------------------------------------------
// Convergence checks

/// ||pi0 K^n - pi||_tv for n = 0..n_max, in the factor-2 convention (the L1 distance).
inline std::vector<double> tv_evolution(const FiniteChain& chain, const VectorXd& pi0, int n_max) {
  const Index d = chain.size();
  if (pi0.size() != d) throw DomainError("initial distribution has wrong length");
  if ((pi0.array() < 0.0).any() || std::abs(pi0.sum() - 1.0) > tol::kConstruction)
    throw DomainError("initial distribution must be nonnegative and sum to 1");
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  std::vector<double> tv;
  tv.reserve(static_cast<std::size_t>(n_max) + 1);
  Eigen::RowVectorXd mu = pi0.transpose();
  const Eigen::RowVectorXd pi = chain.stationary().transpose();
  for (int n = 0; n <= n_max; ++n) {
    tv.push_back((mu - pi).cwiseAbs().sum());
    mu = mu * chain.transition();
  }
  return tv;
}

struct MixingBoundReport {
  bool holds;
  /// min over n of (bound - ||pi0 K^n - pi||_tv^2)
  double worst_margin;
  int worst_n;
};

/// Checks ||pi0 K^n - pi||^2_tv <= max(Var f0, zeta||f0||^2)(1-s)^n + zeta||f0||^2 for n = 0..n_max,
/// where pi0 = f0 pi and s is any lower bound on SpecGap_zeta (values above 1 are read as 1).
inline MixingBoundReport lemma1_verify(const FiniteChain& chain, const VectorXd& f0, double zeta, const NormSpec& norm,
                                  int n_max, double gap_lower_bound) {
  if (!(zeta > 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in (0, 1/2)");
  if (f0.size() != chain.size() || (f0.array() < 0.0).any() ||
      std::abs(expectation(chain, f0) - 1.0) > tol::kConstruction)
    throw DomainError("f0 must be a probability density with respect to pi");
  const double s = std::clamp(gap_lower_bound, 0.0, 1.0);
  const double star2 = std::pow(star_norm(chain, f0, norm), 2);
  const double lead = std::max(variance(chain, f0), zeta * star2);
  const VectorXd pi0 = f0.cwiseProduct(chain.stationary());
  const auto tv = tv_evolution(chain, pi0, n_max);
  MixingBoundReport rep{true, std::numeric_limits<double>::infinity(), 0};
  for (int n = 0; n <= n_max; ++n) {
    const double bound = lead * std::pow(1.0 - s, n) + zeta * star2;
    const double margin = bound - tv[static_cast<std::size_t>(n)] * tv[static_cast<std::size_t>(n)];
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_n = n;
    }
  }
  rep.holds = rep.worst_margin >= -tol::kInequality;
  return rep;
}

struct CheegerReport {
  bool holds;
  double conductance;
  double spectral_gap;
  /// SpecGap - Phi^2/8 and Phi - SpecGap; both must be >= -slack.
  double lower_margin;
  double upper_margin;
};

inline CheegerReport cheeger_verify(const FiniteChain& chain) {
  const double phi = conductance(chain);
  const double gap = spectral_gap(chain);
  const double lo = gap - phi * phi / 8.0;
  const double hi = phi - gap;
  return {lo >= -tol::kInequality && hi >= -tol::kInequality, phi, gap, lo, hi};
}

// ---------------------------------------------------------------------------

struct GapReport {
  double spec_gap;
  double conductance;
  std::optional<double> zeta_conductance;
  double zeta;
  NormSpec norm;
  double zeta_gap_lower;
  ZetaGapUpper zeta_gap_upper;
  StateSet witness_subset;
};

inline GapReport analyze_chain(const FiniteChain& chain, double zeta, const NormSpec& norm, std::size_t budget = 2000,
                               std::uint64_t seed = 0x5eed) {
  if (!(zeta > 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in (0, 1/2)");
  const auto lower = zeta_gap_lower(chain, zeta, norm);
  return {spectral_gap(chain),
          conductance(chain),
          zeta_conductance(chain, zeta),
          zeta,
          norm,
          lower.value,
          zeta_gap_upper(chain, zeta, norm, budget, seed),
          lower.witness};
}

}  // namespace zetagap

#endif
