#ifndef ZETAGAP_RNG_HPP
#define ZETAGAP_RNG_HPP

// Random number streams.
//
// Every stochastic component draws from a std::mt19937_64 whose seed is
// derived from a base seed and a list of stream coordinates (replicate index,
// purpose tag, ...) through SplitMix64 mixing:
//
//   s_0 = splitmix64(base)
//   s_{i+1} = splitmix64(s_i ^ coord_i)
//
// Distinct coordinate tuples give statistically independent streams, and the
// same tuple always reproduces the same stream. Gaussian variates come from
// std::normal_distribution, so bit-reproducibility holds within one standard
// library build; the generator identity string is written into run manifests.

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace zetagap {

using Rng = std::mt19937_64;

inline constexpr const char* kGeneratorName = "mt19937_64/splitmix64-derived";

/// Purposes used as the final stream coordinate.
enum class Stream : std::uint64_t {
  kData = 0x11,
  kInit = 0x22,
  kChain = 0x33,
  kSelection = 0x44,
  kSearch = 0x55,
  kVerify = 0x66,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t s = splitmix64(base);
  for (auto c : coords) s = splitmix64(s ^ c);
  return s;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replicate, Stream purpose) {
  return derive_seed(base, {replicate, static_cast<std::uint64_t>(purpose)});
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform01(Rng& rng) {
  // 53 random bits mapped onto (0,1); never returns 0 or 1.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline bool fair_coin(Rng& rng) { return (rng() >> 63) != 0; }

inline Eigen::VectorXd standard_normal(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::MatrixXd standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill, so the matrix depends only on (seed, rows, cols).
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace zetagap

#endif
