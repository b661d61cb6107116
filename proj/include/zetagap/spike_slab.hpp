#ifndef ZETAGAP_SPIKE_SLAB_HPP
#define ZETAGAP_SPIKE_SLAB_HPP

// Linear regression with a spike-and-slab prior:
//   delta_j ~ Ber(q),  theta_j | delta ~ N(0, 1/rho) if delta_j = 1 else N(0, gamma),
//   z | theta ~ N(X theta, sigma^2 I_n).
// Posterior conditionals, the marginal model posterior through
// L_delta = I_n + X D_delta X' / sigma^2, and exact enumeration for small p.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zetagap/errors.hpp"
#include "zetagap/indicator.hpp"
#include "zetagap/text_io.hpp"

namespace zetagap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct PriorParams {
  double sigma2 = 1.0;
  double q = 0.5;
  double rho = 1.0;
  double gamma = 0.01;
};

class SpikeSlabModel {
 public:
  SpikeSlabModel(MatrixXd X, VectorXd z, PriorParams prior) : X_(std::move(X)), z_(std::move(z)), prior_(prior) {
    if (X_.rows() < 1 || X_.cols() < 1) throw ValidationError("design matrix must be non-empty");
    if (z_.size() != X_.rows()) throw ValidationError("response length does not match design rows");
    if (!X_.allFinite() || !z_.allFinite()) throw ValidationError("design and response must be finite");
    if (!(prior_.sigma2 > 0.0)) throw ValidationError("sigma2 must be positive");
    if (!(prior_.q > 0.0 && prior_.q < 1.0)) throw ValidationError("q must lie in (0,1)");
    if (!(prior_.rho > 0.0)) throw ValidationError("rho must be positive");
    if (!(prior_.gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (!(prior_.gamma < 1.0 / (2.0 * prior_.rho)))
      warnings_.push_back("prior ordering 0 < gamma < 1/(2 rho) does not hold (gamma = " + io::fmt_exact(prior_.gamma) +
                          ", 1/(2 rho) = " + io::fmt_exact(1.0 / (2.0 * prior_.rho)) + ")");

    Xtz_ = X_.transpose() * z_;
    const Index n = X_.rows();
    base_L_ = MatrixXd::Identity(n, n);
    base_L_.selfadjointView<Eigen::Lower>().rankUpdate(X_, prior_.gamma / prior_.sigma2);
    base_L_ = base_L_.selfadjointView<Eigen::Lower>();
    if (X_.cols() <= kCachedGramLimit) {
      XtX_ = MatrixXd::Zero(X_.cols(), X_.cols());
      XtX_.selfadjointView<Eigen::Lower>().rankUpdate(X_.transpose());
      XtX_ = XtX_.selfadjointView<Eigen::Lower>();
    }
  }

  static constexpr Index kCachedGramLimit = 2000;

  Index n() const noexcept { return X_.rows(); }
  Index p() const noexcept { return X_.cols(); }
  const MatrixXd& X() const noexcept { return X_; }
  const VectorXd& z() const noexcept { return z_; }
  const PriorParams& prior() const noexcept { return prior_; }
  double sigma2() const noexcept { return prior_.sigma2; }
  double sigma() const noexcept { return std::sqrt(prior_.sigma2); }
  double q() const noexcept { return prior_.q; }
  double rho() const noexcept { return prior_.rho; }
  double gamma() const noexcept { return prior_.gamma; }
  const VectorXd& Xtz() const noexcept { return Xtz_; }

  /// X'X, computed on demand when p is too large to cache.
  MatrixXd XtX() const {
    if (XtX_.size() > 0) return XtX_;
    MatrixXd g = MatrixXd::Zero(p(), p());
    g.selfadjointView<Eigen::Lower>().rankUpdate(X_.transpose());
    return g.selfadjointView<Eigen::Lower>();
  }

  /// tau = (1/sigma^2)(1/rho - gamma), the rank-one increment of L per added coordinate.
  double tau() const noexcept { return (1.0 / prior_.rho - prior_.gamma) / prior_.sigma2; }
  double log_prior_odds() const noexcept { return std::log(prior_.q) - std::log1p(-prior_.q); }

  /// I_n + gamma X X' / sigma^2, i.e. L at delta = 0.
  const MatrixXd& base_L() const noexcept { return base_L_; }

  /// Diagonal of D_delta: 1/rho on selected coordinates, gamma elsewhere.
  VectorXd prior_variances(const Indicator& delta) const {
    check(delta);
    VectorXd d(p());
    for (Index j = 0; j < p(); ++j) d[j] = delta[static_cast<std::size_t>(j)] ? 1.0 / prior_.rho : prior_.gamma;
    return d;
  }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// FNV-1a over dimensions, hyperparameters, X and z.
  std::string fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const void* data, std::size_t bytes) {
      const auto* b = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < bytes; ++i) h = (h ^ b[i]) * 0x100000001b3ULL;
    };
    const std::int64_t dims[2] = {n(), p()};
    mix(dims, sizeof dims);
    mix(&prior_, sizeof prior_);
    mix(X_.data(), sizeof(double) * static_cast<std::size_t>(X_.size()));
    mix(z_.data(), sizeof(double) * static_cast<std::size_t>(z_.size()));
    std::ostringstream ss;
    ss << std::hex;
    ss.width(16);
    ss.fill('0');
    ss << h;
    return ss.str();
  }

  void check(const Indicator& delta) const {
    if (static_cast<Index>(delta.size()) != p()) throw DomainError("indicator length does not match p");
  }

 private:
  MatrixXd X_;
  VectorXd z_;
  PriorParams prior_;
  VectorXd Xtz_;
  MatrixXd base_L_;
  MatrixXd XtX_;
  std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// delta | theta

/// log(q/(1-q)) + 1/2 log(gamma rho) - 1/2 (rho - 1/gamma) theta_j^2
inline VectorXd bernoulli_log_odds(const SpikeSlabModel& m, const VectorXd& theta) {
  const double base = m.log_prior_odds() + 0.5 * std::log(m.gamma() * m.rho());
  const double curv = 0.5 * (m.rho() - 1.0 / m.gamma());
  return (base - curv * theta.array().square()).matrix();
}

inline double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline VectorXd bernoulli_probs(const SpikeSlabModel& m, const VectorXd& theta) {
  if (theta.size() != m.p()) throw DomainError("theta length does not match p");
  return bernoulli_log_odds(m, theta).unaryExpr([](double t) { return logistic(t); });
}

// ---------------------------------------------------------------------------
// theta | delta ~ N(m_delta, sigma^2 Sigma_delta)

struct ConditionalGaussian {
  /// m_delta = Sigma_delta X'z
  VectorXd mean;
  /// Cholesky factor of the precision (X'X/sigma^2 + D^{-1}) = (sigma^2 Sigma_delta)^{-1}.
  Eigen::LLT<MatrixXd> precision;

  MatrixXd covariance() const {
    const Index p = mean.size();
    return precision.solve(MatrixXd::Identity(p, p));
  }

  /// mean + L^{-T} eps with L L' the precision; eps ~ N(0, I_p) gives a draw.
  VectorXd sample_from(const VectorXd& eps) const {
    return mean + precision.matrixU().solve(eps);
  }

  double log_density(const VectorXd& theta) const {
    const VectorXd r = theta - mean;
    const VectorXd Ur = precision.matrixU() * r;
    const double logdet_prec = 2.0 * precision.matrixLLT().diagonal().array().log().sum();
    return 0.5 * logdet_prec - 0.5 * Ur.squaredNorm() - 0.5 * static_cast<double>(mean.size()) * std::log(2.0 * std::numbers::pi);
  }
};

inline ConditionalGaussian conditional_gaussian(const SpikeSlabModel& m, const Indicator& delta) {
  const VectorXd d = m.prior_variances(delta);
  MatrixXd prec = m.XtX() / m.sigma2();
  prec.diagonal() += d.cwiseInverse();
  ConditionalGaussian cg{VectorXd(), Eigen::LLT<MatrixXd>(prec)};
  if (cg.precision.info() != Eigen::Success) {
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(prec, Eigen::EigenvaluesOnly);
    throw NumericError("conditional precision is not positive definite (eigenvalue range [" +
                       io::fmt_exact(es.eigenvalues().minCoeff()) + ", " + io::fmt_exact(es.eigenvalues().maxCoeff()) +
                       "])");
  }
  cg.mean = cg.precision.solve(m.Xtz() / m.sigma2());
  return cg;
}

// ---------------------------------------------------------------------------
// L_delta = I_n + X D_delta X' / sigma^2 = L_0 + tau X_delta X_delta'

inline MatrixXd gather_columns(const MatrixXd& X, const std::vector<std::size_t>& cols) {
  MatrixXd out(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = X.col(static_cast<Index>(cols[k]));
  return out;
}

inline MatrixXd L_matrix(const SpikeSlabModel& m, const Indicator& delta) {
  m.check(delta);
  MatrixXd L = m.base_L();
  const auto on = delta.ones();
  if (!on.empty()) {
    const MatrixXd Xd = gather_columns(m.X(), on);
    L.selfadjointView<Eigen::Lower>().rankUpdate(Xd, m.tau());
    L = L.selfadjointView<Eigen::Lower>();
  }
  return L;
}

inline Eigen::LLT<MatrixXd> L_factor(const SpikeSlabModel& m, const Indicator& delta) {
  Eigen::LLT<MatrixXd> llt(L_matrix(m, delta));
  if (llt.info() != Eigen::Success) throw NumericError("L_delta factorization failed");
  return llt;
}

struct LQuadratics {
  double log_det;
  /// z' L_delta^{-1} z
  double quad;
};

inline LQuadratics log_L_delta_quadratics(const SpikeSlabModel& m, const Indicator& delta) {
  const auto llt = L_factor(m, delta);
  const VectorXd half = llt.matrixL().solve(m.z());
  return {2.0 * llt.matrixLLT().diagonal().array().log().sum(), half.squaredNorm()};
}

/// log det(L_vartheta)/det(L_delta) for vartheta ⊇ delta, via the determinant lemma:
/// det(I_k + tau X_S' L_delta^{-1} X_S) with S = vartheta - delta.
inline double log_det_ratio_nested(const SpikeSlabModel& m, const Indicator& delta, const Indicator& vartheta) {
  if (!vartheta.contains(delta)) throw DomainError("vartheta must contain delta");
  const auto added = vartheta.minus(delta).ones();
  if (added.empty()) return 0.0;
  const auto llt = L_factor(m, delta);
  const MatrixXd XS = gather_columns(m.X(), added);
  MatrixXd core = MatrixXd::Identity(XS.cols(), XS.cols()) + m.tau() * XS.transpose() * llt.solve(XS);
  Eigen::LDLT<MatrixXd> ldlt(core);
  return ldlt.vectorD().array().log().sum();
}

/// L_vartheta^{-1} V from L_delta via the Woodbury identity:
/// L_delta^{-1} - tau L_delta^{-1} X_S (I + tau X_S' L_delta^{-1} X_S)^{-1} X_S' L_delta^{-1}.
inline MatrixXd apply_L_inverse_nested(const SpikeSlabModel& m, const Indicator& delta, const Indicator& vartheta,
                                       const MatrixXd& V) {
  if (!vartheta.contains(delta)) throw DomainError("vartheta must contain delta");
  const auto llt = L_factor(m, delta);
  const MatrixXd LinvV = llt.solve(V);
  const auto added = vartheta.minus(delta).ones();
  if (added.empty()) return LinvV;
  const MatrixXd XS = gather_columns(m.X(), added);
  const MatrixXd LinvXS = llt.solve(XS);
  const MatrixXd core = MatrixXd::Identity(XS.cols(), XS.cols()) + m.tau() * XS.transpose() * LinvXS;
  return LinvV - m.tau() * LinvXS * core.ldlt().solve(XS.transpose() * LinvV);
}

// ---------------------------------------------------------------------------
// Marginal model posterior

/// log Pi(delta|z) - log Pi(delta0|z) =
///   (|delta| - |delta0|) log(q/(1-q)) + 1/2 [log det L_delta0 - log det L_delta]
///   + 1/(2 sigma^2) [z' L_delta0^{-1} z - z' L_delta^{-1} z].
inline double log_posterior_ratio(const SpikeSlabModel& m, const Indicator& delta, const Indicator& delta0) {
  if (delta == delta0) return 0.0;
  const auto a = log_L_delta_quadratics(m, delta);
  const auto b = log_L_delta_quadratics(m, delta0);
  const double dk = static_cast<double>(delta.count()) - static_cast<double>(delta0.count());
  return dk * m.log_prior_odds() + 0.5 * (b.log_det - a.log_det) + (b.quad - a.quad) / (2.0 * m.sigma2());
}

/// Unnormalized log posterior of delta relative to the empty model.
inline double log_posterior_unnormalized(const SpikeSlabModel& m, const Indicator& delta) {
  const auto a = log_L_delta_quadratics(m, delta);
  return static_cast<double>(delta.count()) * m.log_prior_odds() - 0.5 * a.log_det - a.quad / (2.0 * m.sigma2());
}

inline double log_sum_exp(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - top);
  return top + std::log(acc);
}

inline constexpr Index kMaxEnumerationP = 15;

/// Exact Pi(delta|z) over all 2^p models, indexed by bitmask (bit j = coordinate j).
struct ModelPosterior {
  std::size_t p = 0;
  std::vector<double> log_post;
  std::vector<double> prob;

  double operator()(const Indicator& delta) const { return prob.at(static_cast<std::size_t>(delta.mask())); }

  template <class Pred>
  double mass(Pred&& pred) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < prob.size(); ++k)
      if (pred(Indicator::from_mask(k, p))) acc += prob[k];
    return acc;
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "delta_bits,log_post,post\n";
    for (std::size_t k = 0; k < prob.size(); ++k)
      out << Indicator::from_mask(k, p).to_bits() << ',' << io::fmt_exact(log_post[k]) << ','
          << io::fmt_exact(prob[k]) << '\n';
    return out.str();
  }
};

inline ModelPosterior exact_model_posterior(const SpikeSlabModel& m, const Indicator* reference = nullptr) {
  if (m.p() > kMaxEnumerationP)
    throw CapacityError("exact enumeration limited to p <= " + std::to_string(kMaxEnumerationP));
  const auto p = static_cast<std::size_t>(m.p());
  const Indicator ref = reference ? *reference : Indicator(p);
  const std::size_t count = std::size_t{1} << p;
  ModelPosterior post;
  post.p = p;
  post.log_post.resize(count);
  for (std::size_t k = 0; k < count; ++k) post.log_post[k] = log_posterior_ratio(m, Indicator::from_mask(k, p), ref);
  const double lse = log_sum_exp(post.log_post);
  post.prob.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    post.log_post[k] -= lse;
    post.prob[k] = std::exp(post.log_post[k]);
  }
  return post;
}

// ---------------------------------------------------------------------------
// Signal detectability

/// epsilon = sigma sqrt(log(p)/n)
inline double detectability_threshold(double sigma, Index n, Index p) {
  return sigma * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

/// Coordinates with |theta_j| > eps.
inline Indicator detectable_support(const VectorXd& theta_star, double eps) {
  Indicator d(static_cast<std::size_t>(theta_star.size()));
  for (Index j = 0; j < theta_star.size(); ++j)
    if (std::abs(theta_star[j]) > eps) d.set(static_cast<std::size_t>(j));
  return d;
}

inline Indicator support(const VectorXd& theta) { return detectable_support(theta, 0.0); }

struct GroundTruth {
  VectorXd theta_star;
  Indicator delta_star;
  Indicator delta_tilde_star;
  double eps = 0.0;
  double amplitude = 0.0;

  std::size_t s_star() const { return delta_star.count(); }
  std::size_t s_tilde_star() const { return delta_tilde_star.count(); }

  static GroundTruth from_theta(VectorXd theta, double sigma, Index n, double amplitude = 0.0) {
    GroundTruth t;
    t.eps = detectability_threshold(sigma, n, theta.size());
    t.delta_star = support(theta);
    t.delta_tilde_star = detectable_support(theta, t.eps);
    t.theta_star = std::move(theta);
    t.amplitude = amplitude;
    return t;
  }
};

// ---------------------------------------------------------------------------
// Design/response text: one observation per row, "z,x_1,...,x_p".

inline std::string format_design(const SpikeSlabModel& m) {
  std::ostringstream out;
  for (Index i = 0; i < m.n(); ++i) {
    out << io::fmt_exact(m.z()[i]);
    for (Index j = 0; j < m.p(); ++j) out << ',' << io::fmt_exact(m.X()(i, j));
    out << '\n';
  }
  return out.str();
}

struct DesignData {
  MatrixXd X;
  VectorXd z;
};

inline DesignData parse_design(std::istream& in) {
  const auto lines = io::content_lines(in);
  if (lines.empty()) throw ParseError("empty design file");
  std::vector<std::vector<double>> rows;
  for (const auto& line : lines) {
    rows.push_back(io::parse_row(line));
    if (rows.back().size() < 2) throw ParseError("design row needs a response and at least one covariate", line.number);
    if (rows.back().size() != rows.front().size()) throw ParseError("ragged design row", line.number);
  }
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(rows.front().size()) - 1;
  DesignData d{MatrixXd(n, p), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    d.z[i] = rows[static_cast<std::size_t>(i)][0];
    for (Index j = 0; j < p; ++j) d.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
  }
  return d;
}

}  // namespace zetagap

#endif
