// One pass/fail line per acceptance criterion; exit status 0 iff all pass.
// Usage: acceptance [seed]

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "zetagap/verify.hpp"

using namespace zetagap;

namespace {

struct Criterion {
  int id;
  std::string title;
  /// Wall-time budget in seconds; 0 means none.
  double budget_s;
  std::function<std::vector<verify::Check>()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;

  const std::vector<Criterion> criteria{
      {1, "Cheeger sandwich on 200 random chains", 10.0, [&] { return std::vector{verify::cheeger(seed, 200)}; }},
      {2, "zeta-gap mixing bound on 50 random instances, n <= 200", 30.0,
       [&] { return std::vector{verify::mixing_bound(seed, 50)}; }},
      {3, "zeta-gap sandwich: SpecGap <= lower <= upper", 0.0,
       [&] { return std::vector{verify::gap_sandwich(seed, 60, 400)}; }},
      {4, "three-state mixture example; randomized mixture lower bounds", 60.0,
       [&] { return std::vector{verify::mixture_example(), verify::mixture_bounds(seed, 60, 400)}; }},
      {5, "posterior ratio vs Gaussian integral; determinant and Woodbury identities", 0.0,
       [&] { return std::vector{verify::posterior_identity(seed, 100), verify::nested_identities(seed, 100)}; }},
      {6, "Gibbs delta-marginal within TV 0.05 of enumeration (p = 8, 2e5 iterations)", 120.0,
       [&] { return std::vector{verify::sampler_stationary(seed, 200000, 0.05)}; }},
      {7, "theta moments within 4 MC standard errors, direct and woodbury", 0.0,
       [&] {
         return std::vector{verify::theta_moments(seed, ThetaStrategy::kDirect, 100000),
                            verify::theta_moments(seed, ThetaStrategy::kWoodbury, 100000)};
       }},
      {8, "desk-scale study ordering at p = 500, n = 50, R = 20, T = 20000", 1800.0,
       [&] { return std::vector{verify::study_ordering(verify::desk_study_config(seed)).check}; }},
      {9, "orthogonal-design diagnostics and brute-force enumeration", 0.0,
       [&] { return std::vector{verify::diagnostics_orthogonal(seed), verify::diagnostics_oracle(seed)}; }},
      {10, "lazy fraction within the 4-sigma Binomial(1e4, 1/2) band", 0.0,
       [&] { return std::vector{verify::laziness(seed, 10000)}; }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto checks = c.run();
    bool ok = true;
    double seconds = 0.0;
    std::ostringstream detail;
    for (const auto& k : checks) {
      ok = ok && k.passed;
      seconds += k.seconds;
      detail << "\n      " << verify::format_check(k);
    }
    const bool in_time = c.budget_s <= 0.0 || seconds < c.budget_s;
    const bool pass = ok && in_time;
    failed += pass ? 0 : 1;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": " << c.title << "  (" << std::fixed
              << std::setprecision(2) << seconds << " s";
    if (c.budget_s > 0.0) std::cout << ", budget " << std::setprecision(0) << c.budget_s << " s";
    std::cout << ')';
    if (!in_time) std::cout << " over time budget";
    std::cout << detail.str() << std::endl;
  }
  std::cout << (failed == 0 ? "all 10 criteria passed" : std::to_string(failed) + " criterion/criteria failed")
            << " (seed " << seed << ")\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
