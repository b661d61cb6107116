#ifndef ZETAGAP_MIXTURE_HPP
#define ZETAGAP_MIXTURE_HPP

// Finite mixtures of reversible lazy kernels: the mixture kernel
// K(x,.) = sum_i pi(i|x) K_i(x,.), overlap graphs between components, and the
// Madras-Randall and zeta-gap lower bounds built from component gaps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zetagap/chain_analysis.hpp"
#include "zetagap/errors.hpp"
#include "zetagap/finite_chain.hpp"
#include "zetagap/text_io.hpp"

namespace zetagap {

struct MixtureComponent {
  double weight;
  /// pi_i on the d states; zero entries allowed.
  VectorXd law;
  /// K_i, reversible w.r.t. law and lazy on every state.
  MatrixXd kernel;
};

class MixtureSpec {
 public:
  MixtureSpec(std::vector<MixtureComponent> components, std::vector<std::size_t> i0 = {},
              std::vector<StateSet> regions = {})
      : components_(std::move(components)), i0_(std::move(i0)), regions_(std::move(regions)) {
    if (components_.empty()) throw ValidationError("mixture needs at least one component");
    const Index d = components_.front().law.size();
    if (d < 2) throw ValidationError("mixture state space needs at least 2 states");
    double total = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) validate(i, d), total += components_[i].weight;
    if (std::abs(total - 1.0) > tol::kSum) throw ValidationError("component weights do not sum to 1");
    if (i0_.empty())
      for (std::size_t i = 0; i < components_.size(); ++i) i0_.push_back(i);
    std::sort(i0_.begin(), i0_.end());
    i0_.erase(std::unique(i0_.begin(), i0_.end()), i0_.end());
    for (auto i : i0_)
      if (i >= components_.size()) throw ValidationError("I0 index out of range");
    if (regions_.empty()) regions_.assign(components_.size(), full_set(d));
    if (regions_.size() != components_.size()) throw ValidationError("need one region B_i per component");
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      if (static_cast<Index>(regions_[i].size()) != d) throw ValidationError("region mask has wrong length");
      if (!(region_mass(i) > 0.0)) throw ValidationError("component " + std::to_string(i) + " gives its region zero mass");
    }
  }

  std::size_t components() const noexcept { return components_.size(); }
  Index states() const noexcept { return components_.front().law.size(); }
  const MixtureComponent& component(std::size_t i) const { return components_.at(i); }
  const std::vector<std::size_t>& i0() const noexcept { return i0_; }
  const StateSet& region(std::size_t i) const { return regions_.at(i); }

  /// pi_i(B_i)
  double region_mass(std::size_t i) const {
    double m = 0.0;
    for (Index x = 0; x < states(); ++x)
      if (regions_[i][static_cast<std::size_t>(x)]) m += components_[i].law[x];
    return m;
  }

  /// pi(x) = sum_i pi(i) pi_i(x)
  VectorXd mixture_law() const {
    VectorXd pi = VectorXd::Zero(states());
    for (const auto& c : components_) pi += c.weight * c.law;
    return pi;
  }

  bool regions_are_full() const {
    for (const auto& r : regions_)
      if (std::find(r.begin(), r.end(), false) != r.end()) return false;
    return true;
  }

 private:
  void validate(std::size_t i, Index d) const {
    const auto& c = components_[i];
    const std::string who = "component " + std::to_string(i) + ": ";
    if (!(c.weight > 0.0)) throw ValidationError(who + "weight must be positive");
    if (c.law.size() != d || c.kernel.rows() != d || c.kernel.cols() != d)
      throw ValidationError(who + "dimension mismatch");
    if ((c.law.array() < 0.0).any() || std::abs(c.law.sum() - 1.0) > tol::kSum)
      throw ValidationError(who + "law must be nonnegative and sum to 1");
    for (Index x = 0; x < d; ++x) {
      if ((c.kernel.row(x).array() < 0.0).any() || std::abs(c.kernel.row(x).sum() - 1.0) > tol::kSum)
        throw ValidationError(who + "kernel row " + std::to_string(x) + " is not a probability vector");
      if (c.kernel(x, x) < 0.5 - tol::kSum) throw ValidationError(who + "kernel is not lazy at state " + std::to_string(x));
      for (Index y = x + 1; y < d; ++y)
        if (std::abs(c.law[x] * c.kernel(x, y) - c.law[y] * c.kernel(y, x)) > tol::kConstruction)
          throw ValidationError(who + "detailed balance violated for pair (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");
    }
  }

  std::vector<MixtureComponent> components_;
  std::vector<std::size_t> i0_;
  std::vector<StateSet> regions_;
};

/// K(x,y) = sum_i [pi(i) pi_i(x) / pi(x)] K_i(x,y), reversible w.r.t. the mixture law.
inline FiniteChain build_mixture_kernel(const MixtureSpec& spec) {
  const Index d = spec.states();
  const VectorXd pi = spec.mixture_law();
  MatrixXd K = MatrixXd::Zero(d, d);
  for (Index x = 0; x < d; ++x) {
    if (!(pi[x] > 0.0))
      throw ValidationError("state " + std::to_string(x) + " has zero mixture mass; prune it before building the kernel");
    for (std::size_t i = 0; i < spec.components(); ++i) {
      const auto& c = spec.component(i);
      const double w = c.weight * c.law[x] / pi[x];
      if (w > 0.0) K.row(x) += w * c.kernel.row(x);
    }
    K.row(x) /= K.row(x).sum();
  }
  return FiniteChain(std::move(K), pi / pi.sum());
}

/// K_i restricted to the support of pi_i, with the map back to mixture states.
struct ComponentChain {
  FiniteChain chain;
  std::vector<Index> states;
};

inline ComponentChain component_chain(const MixtureSpec& spec, std::size_t i) {
  const auto& c = spec.component(i);
  std::vector<Index> states;
  for (Index x = 0; x < spec.states(); ++x)
    if (c.law[x] > 0.0) states.push_back(x);
  const auto k = static_cast<Index>(states.size());
  if (k < 2) throw DomainError("component " + std::to_string(i) + " is supported on fewer than 2 states");
  MatrixXd P(k, k);
  VectorXd law(k);
  for (Index a = 0; a < k; ++a) {
    law[a] = c.law[states[static_cast<std::size_t>(a)]];
    for (Index b = 0; b < k; ++b) P(a, b) = c.kernel(states[static_cast<std::size_t>(a)], states[static_cast<std::size_t>(b)]);
    P.row(a) /= P.row(a).sum();
  }
  return {FiniteChain(std::move(P), law / law.sum()), std::move(states)};
}

inline double component_spectral_gap(const MixtureSpec& spec, std::size_t i) {
  return spectral_gap(component_chain(spec, i).chain);
}

/// SpecGap_{B_i}(K_i), with B_i intersected with the support of pi_i.
inline double component_restricted_gap(const MixtureSpec& spec, std::size_t i) {
  const auto cc = component_chain(spec, i);
  StateSet sub(cc.states.size());
  for (std::size_t a = 0; a < cc.states.size(); ++a) sub[a] = spec.region(i)[static_cast<std::size_t>(cc.states[a])];
  if (std::count(sub.begin(), sub.end(), true) < 2)
    throw DomainError("region of component " + std::to_string(i) + " meets its support in fewer than 2 states");
  return restricted_spectral_gap(cc.chain, sub).value;
}

/// sum over B_i ∩ B_j of min(pi_i(x)/pi_i(B_i), pi_j(x)/pi_j(B_j)).
inline double overlap(const MixtureSpec& spec, std::size_t i, std::size_t j) {
  const double mi = spec.region_mass(i), mj = spec.region_mass(j);
  double acc = 0.0;
  for (Index x = 0; x < spec.states(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    if (spec.region(i)[ux] && spec.region(j)[ux])
      acc += std::min(spec.component(i).law[x] / mi, spec.component(j).law[x] / mj);
  }
  return std::clamp(acc, 0.0, 1.0);
}

struct OverlapGraph {
  std::vector<std::size_t> members;
  MatrixXd kappa_matrix;
  double threshold;
  std::vector<std::vector<bool>> adjacency;
  /// Longest shortest path in edges; nullopt when disconnected.
  std::optional<int> diameter;
};

/// All-pairs BFS. A single vertex has diameter 0.
inline std::optional<int> graph_diameter(const std::vector<std::vector<bool>>& adjacency) {
  const std::size_t n = adjacency.size();
  int diam = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::queue<std::size_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (std::size_t w = 0; w < n; ++w)
        if (adjacency[v][w] && dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
    }
    for (auto dv : dist) {
      if (dv < 0) return std::nullopt;
      diam = std::max(diam, dv);
    }
  }
  return diam;
}

inline MatrixXd overlap_matrix(const MixtureSpec& spec, const std::vector<std::size_t>& members) {
  const auto m = static_cast<Index>(members.size());
  MatrixXd k(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = a; b < m; ++b)
      k(a, b) = k(b, a) = overlap(spec, members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
  return k;
}

inline OverlapGraph build_overlap_graph(const MatrixXd& kappa_matrix, std::vector<std::size_t> members, double threshold) {
  const auto m = members.size();
  std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      adj[a][b] = a != b && kappa_matrix(static_cast<Index>(a), static_cast<Index>(b)) >= threshold;
  auto diam = graph_diameter(adj);
  return {std::move(members), kappa_matrix, threshold, std::move(adj), diam};
}

inline OverlapGraph build_overlap_graph(const MixtureSpec& spec, double threshold) {
  return build_overlap_graph(overlap_matrix(spec, spec.i0()), spec.i0(), threshold);
}

struct MixtureBound {
  double value = 0.0;
  double kappa = 0.0;
  std::optional<int> diameter;
  /// Restricted-region bound only: pi-bar(B-bar), the threshold it must reach, and whether it did.
  double region_mass = 1.0;
  double mass_threshold = 0.0;
  bool mass_ok = true;
  std::string diagnostic;
};

namespace detail {

/// Best kappa/(2D) * factor over thresholds drawn from the distinct positive overlaps
/// (or the single supplied threshold). D = 0 (one vertex) uses factor alone.
inline MixtureBound sweep_kappa(const MatrixXd& kmat, const std::vector<std::size_t>& members, double factor,
                                std::optional<double> kappa) {
  MixtureBound best;
  if (members.size() == 1) {
    best.value = factor;
    best.kappa = 1.0;
    best.diameter = 0;
    return best;
  }
  std::set<double> thresholds;
  if (kappa) {
    thresholds.insert(*kappa);
  } else {
    for (Index a = 0; a < kmat.rows(); ++a)
      for (Index b = a + 1; b < kmat.cols(); ++b)
        if (kmat(a, b) > 0.0) thresholds.insert(kmat(a, b));
  }
  bool any_connected = false;
  for (double t : thresholds) {
    const auto g = build_overlap_graph(kmat, members, t);
    if (!g.diameter) continue;
    any_connected = true;
    const double v = t / (2.0 * *g.diameter) * factor;
    if (v > best.value) {
      best.value = v;
      best.kappa = t;
      best.diameter = g.diameter;
    }
  }
  if (!any_connected) best.diagnostic = "overlap graph is disconnected at every threshold";
  return best;
}

}  // namespace detail

/// (kappa / 2 D(I)) min_i pi(i) SpecGap(K_i) over all components with B_i = X,
/// maximized over kappa unless one is supplied.
inline MixtureBound madras_randall_bound(const MixtureSpec& spec, std::optional<double> kappa = std::nullopt) {
  std::vector<std::size_t> all(spec.components());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const MixtureSpec full(
      [&] {
        std::vector<MixtureComponent> cs;
        for (std::size_t i = 0; i < spec.components(); ++i) cs.push_back(spec.component(i));
        return cs;
      }(),
      all);
  double factor = std::numeric_limits<double>::infinity();
  for (auto i : all) factor = std::min(factor, full.component(i).weight * component_spectral_gap(full, i));
  return detail::sweep_kappa(overlap_matrix(full, all), all, factor, kappa);
}

/// (kappa / 2 D(I0)) min_{I0} pi_i(B_i)^2 min_{I0} pi(i) SpecGap_{B_i}(K_i), valid as a lower
/// bound on SpecGap_zeta(K) when pi-bar(B-bar) >= 1 - (zeta/10)^{1+2/(m-2)}; 0 otherwise.
inline MixtureBound theorem1_bound(const MixtureSpec& spec, double zeta, const NormSpec& norm,
                                   std::optional<double> kappa = std::nullopt) {
  if (!(zeta > 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in (0, 1/2)");
  if (spec.i0().empty()) throw DomainError("I0 is empty");
  double region_mass = 0.0;
  for (auto i : spec.i0()) region_mass += spec.component(i).weight * spec.region_mass(i);
  const double threshold = restriction_mass_threshold(zeta, norm);
  if (region_mass < threshold) {
    MixtureBound b;
    b.region_mass = region_mass;
    b.mass_threshold = threshold;
    b.mass_ok = false;
    b.diagnostic = "mass condition fails: pi-bar(B-bar) = " + io::fmt_exact(region_mass) + " < " + io::fmt_exact(threshold);
    return b;
  }
  double min_mass_sq = std::numeric_limits<double>::infinity();
  double min_weighted_gap = std::numeric_limits<double>::infinity();
  for (auto i : spec.i0()) {
    min_mass_sq = std::min(min_mass_sq, std::pow(spec.region_mass(i), 2));
    min_weighted_gap = std::min(min_weighted_gap, spec.component(i).weight * component_restricted_gap(spec, i));
  }
  auto b = detail::sweep_kappa(overlap_matrix(spec, spec.i0()), spec.i0(), min_mass_sq * min_weighted_gap, kappa);
  b.region_mass = region_mass;
  b.mass_threshold = threshold;
  return b;
}

// ---------------------------------------------------------------------------
// Mixture file: "|I| d", then per component a weight line, a pi_i line, d kernel
// rows and an optional 0/1 mask line for B_i; optionally a final "I0 i j ..." line.

inline MixtureSpec parse_mixture(std::istream& in) {
  const auto lines = io::content_lines(in);
  if (lines.empty()) throw ParseError("empty mixture file");
  const auto header = io::split_fields(lines[0].text);
  if (header.size() != 2) throw ParseError("header must be '<components> <states>'", lines[0].number);
  const auto ncomp = io::parse_int(header[0], lines[0].number);
  const auto d = io::parse_int(header[1], lines[0].number);
  if (ncomp < 1 || d < 2) throw ParseError("need at least 1 component and 2 states", lines[0].number);

  std::size_t pos = 1;
  auto next = [&](const char* what) -> const io::Line& {
    if (pos >= lines.size()) throw ParseError(std::string("unexpected end of file, expected ") + what);
    return lines[pos++];
  };
  auto row_of = [&](const io::Line& line, std::size_t expect, const char* what) {
    auto r = io::parse_row(line);
    if (r.size() != expect)
      throw ParseError(std::string(what) + " has " + std::to_string(r.size()) + " entries, expected " +
                           std::to_string(expect),
                       line.number);
    return r;
  };

  std::vector<MixtureComponent> comps;
  std::vector<StateSet> regions;
  bool any_region = false;
  for (long long i = 0; i < ncomp; ++i) {
    MixtureComponent c;
    c.weight = row_of(next("weight"), 1, "weight line")[0];
    const auto law = row_of(next("law"), static_cast<std::size_t>(d), "law line");
    c.law = Eigen::Map<const VectorXd>(law.data(), d);
    c.kernel.resize(d, d);
    for (long long x = 0; x < d; ++x) {
      const auto r = row_of(next("kernel row"), static_cast<std::size_t>(d), "kernel row");
      for (long long y = 0; y < d; ++y) c.kernel(x, y) = r[static_cast<std::size_t>(y)];
    }
    StateSet region = full_set(d);
    if (pos < lines.size() && io::split_fields(lines[pos].text).size() == static_cast<std::size_t>(d) &&
        io::split_fields(lines[pos].text)[0] != "I0") {
      const auto& line = lines[pos++];
      const auto r = row_of(line, static_cast<std::size_t>(d), "region mask");
      for (long long x = 0; x < d; ++x) {
        const double v = r[static_cast<std::size_t>(x)];
        if (v != 0.0 && v != 1.0) throw ParseError("region mask entries must be 0 or 1", line.number);
        region[static_cast<std::size_t>(x)] = v == 1.0;
      }
      any_region = true;
    }
    comps.push_back(std::move(c));
    regions.push_back(std::move(region));
  }
  std::vector<std::size_t> i0;
  if (pos < lines.size()) {
    const auto& line = lines[pos++];
    const auto f = io::split_fields(line.text);
    if (f.empty() || f[0] != "I0") throw ParseError("unexpected trailing line", line.number);
    for (std::size_t k = 1; k < f.size(); ++k) i0.push_back(static_cast<std::size_t>(io::parse_int(f[k], line.number)));
  }
  if (pos != lines.size()) throw ParseError("unexpected trailing content", lines[pos].number);
  return MixtureSpec(std::move(comps), std::move(i0), any_region ? std::move(regions) : std::vector<StateSet>{});
}

inline MixtureSpec parse_mixture(const std::string& text) {
  std::istringstream in(text);
  return parse_mixture(in);
}

/// Inverse of parse_mixture; masks and the I0 line are written only when they differ from the defaults.
inline std::string format_mixture(const MixtureSpec& spec) {
  std::ostringstream os;
  const Index d = spec.states();
  os << spec.components() << ' ' << d << '\n';
  auto row = [&](const auto& v) {
    for (Index x = 0; x < d; ++x) os << (x ? " " : "") << io::fmt_exact(v[x]);
    os << '\n';
  };
  for (std::size_t i = 0; i < spec.components(); ++i) {
    const auto& c = spec.component(i);
    os << io::fmt_exact(c.weight) << '\n';
    row(c.law);
    for (Index x = 0; x < d; ++x) row(c.kernel.row(x));
    if (!spec.regions_are_full()) {
      for (Index x = 0; x < d; ++x) os << (x ? " " : "") << (spec.region(i)[static_cast<std::size_t>(x)] ? 1 : 0);
      os << '\n';
    }
  }
  if (spec.i0().size() != spec.components()) {
    os << "I0";
    for (auto i : spec.i0()) os << ' ' << i;
    os << '\n';
  }
  return os.str();
}

}  // namespace zetagap

#endif
