#ifndef ZETAGAP_FINITE_CHAIN_HPP
#define ZETAGAP_FINITE_CHAIN_HPP

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "zetagap/errors.hpp"
#include "zetagap/text_io.hpp"

namespace zetagap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Solves pi P = pi, sum(pi) = 1. Throws if the solution is not a strictly positive law.
inline VectorXd stationary_distribution(const MatrixXd& P) {
  const Index d = P.rows();
  MatrixXd A = P.transpose() - MatrixXd::Identity(d, d);
  A.row(d - 1).setOnes();
  VectorXd rhs = VectorXd::Zero(d);
  rhs[d - 1] = 1.0;
  VectorXd pi = A.fullPivLu().solve(rhs);
  if (!pi.allFinite() || (A * pi - rhs).norm() > 1e-9)
    throw ValidationError("stationary distribution is not unique; supply pi explicitly");
  for (Index x = 0; x < d; ++x)
    if (!(pi[x] > 0.0))
      throw ValidationError("stationary distribution has non-positive mass at state " + std::to_string(x));
  return pi / pi.sum();
}

/// A finite-state Markov kernel that is reversible with respect to a strictly
/// positive stationary law and lazy (P[x,x] >= 1/2). Immutable once built.
class FiniteChain {
 public:
  explicit FiniteChain(MatrixXd P, std::optional<VectorXd> pi = std::nullopt) : P_(std::move(P)) {
    const Index d = P_.rows();
    if (d < 2 || P_.cols() != d) throw ValidationError("transition matrix must be square with at least 2 states");
    if (!P_.allFinite()) throw ValidationError("transition matrix has non-finite entries");
    for (Index x = 0; x < d; ++x) {
      for (Index y = 0; y < d; ++y)
        if (P_(x, y) < 0.0)
          throw ValidationError("negative transition probability P[" + std::to_string(x) + "," + std::to_string(y) + "]");
      if (std::abs(P_.row(x).sum() - 1.0) > tol::kSum)
        throw ValidationError("row " + std::to_string(x) + " does not sum to 1");
      if (P_(x, x) < 0.5 - tol::kSum)
        throw ValidationError("kernel is not lazy at state " + std::to_string(x) + " (P[x,x] < 1/2)");
    }
    if (pi) {
      if (pi->size() != d) throw ValidationError("stationary law has wrong length");
      for (Index x = 0; x < d; ++x)
        if (!(( *pi)[x] > 0.0)) throw ValidationError("stationary law must be strictly positive");
      if (std::abs(pi->sum() - 1.0) > tol::kSum) throw ValidationError("stationary law does not sum to 1");
      pi_ = *pi;
    } else {
      pi_ = stationary_distribution(P_);
    }
    for (Index x = 0; x < d; ++x)
      for (Index y = x + 1; y < d; ++y)
        if (std::abs(pi_[x] * P_(x, y) - pi_[y] * P_(y, x)) > tol::kConstruction)
          throw ValidationError("detailed balance violated for pair (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");

    sqrt_pi_ = pi_.cwiseSqrt();
    sym_ = sqrt_pi_.asDiagonal() * P_ * sqrt_pi_.cwiseInverse().asDiagonal();
    sym_ = 0.5 * (sym_ + sym_.transpose()).eval();
  }

  Index size() const noexcept { return P_.rows(); }
  const MatrixXd& transition() const noexcept { return P_; }
  const VectorXd& stationary() const noexcept { return pi_; }

  /// D^{1/2} P D^{-1/2}, symmetric by reversibility.
  const MatrixXd& symmetrized() const noexcept { return sym_; }
  const VectorXd& sqrt_stationary() const noexcept { return sqrt_pi_; }

  /// pi[x] P[x,y], the (symmetric) edge-flow matrix.
  MatrixXd flow() const { return pi_.asDiagonal() * P_; }

 private:
  MatrixXd P_;
  VectorXd pi_;
  VectorXd sqrt_pi_;
  MatrixXd sym_;
};

/// Exponent m of the star-norm ||f||_{m,pi}, restricted to (2, +inf].
class NormSpec {
 public:
  explicit NormSpec(double m) : m_(m) {
    if (!(m > 2.0)) throw DomainError("star-norm exponent must satisfy m > 2");
  }
  static NormSpec infinity() { return NormSpec(std::numeric_limits<double>::infinity()); }

  double m() const noexcept { return m_; }
  bool is_infinite() const noexcept { return std::isinf(m_); }

  /// 1 + 2/(m-2), with the m = inf limit equal to 1.
  double mass_exponent() const noexcept { return is_infinite() ? 1.0 : 1.0 + 2.0 / (m_ - 2.0); }

  std::string to_string() const { return is_infinite() ? "inf" : io::fmt_exact(m_); }

 private:
  double m_;
};

inline NormSpec parse_norm(std::string_view token) {
  auto t = io::trim(token);
  if (t == "inf" || t == "infinity" || t == "Inf") return NormSpec::infinity();
  return NormSpec(io::parse_double(t));
}

/// Chain file: first line d, then d rows of P, then optionally a line with pi.
inline FiniteChain parse_chain(std::istream& in) {
  const auto lines = io::content_lines(in);
  if (lines.empty()) throw ParseError("empty chain file");
  const auto header = io::split_fields(lines[0].text);
  if (header.size() != 1) throw ParseError("first line must hold the state count", lines[0].number);
  const long long d = io::parse_int(header[0], lines[0].number);
  if (d < 2) throw ParseError("state count must be at least 2", lines[0].number);
  if (lines.size() != static_cast<std::size_t>(d) + 1 && lines.size() != static_cast<std::size_t>(d) + 2)
    throw ParseError("expected " + std::to_string(d) + " matrix rows and an optional stationary row, got " +
                     std::to_string(lines.size() - 1) + " rows");
  MatrixXd P(d, d);
  for (long long x = 0; x < d; ++x) {
    const auto& line = lines[static_cast<std::size_t>(x) + 1];
    const auto row = io::parse_row(line);
    if (row.size() != static_cast<std::size_t>(d))
      throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(d), line.number);
    for (long long y = 0; y < d; ++y) P(x, y) = row[static_cast<std::size_t>(y)];
  }
  std::optional<VectorXd> pi;
  if (lines.size() == static_cast<std::size_t>(d) + 2) {
    const auto& line = lines.back();
    const auto row = io::parse_row(line);
    if (row.size() != static_cast<std::size_t>(d)) throw ParseError("stationary row has wrong length", line.number);
    pi = Eigen::Map<const VectorXd>(row.data(), d);
  }
  return FiniteChain(std::move(P), std::move(pi));
}

inline FiniteChain parse_chain(const std::string& text) {
  std::istringstream in(text);
  return parse_chain(in);
}

inline std::string format_chain(const FiniteChain& chain) {
  std::ostringstream out;
  const Index d = chain.size();
  out << d << '\n';
  for (Index x = 0; x < d; ++x) {
    for (Index y = 0; y < d; ++y) out << (y ? " " : "") << io::fmt_exact(chain.transition()(x, y));
    out << '\n';
  }
  for (Index x = 0; x < d; ++x) out << (x ? " " : "") << io::fmt_exact(chain.stationary()[x]);
  out << '\n';
  return out.str();
}

}  // namespace zetagap

#endif
