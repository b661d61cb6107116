#ifndef ZETAGAP_EXPERIMENT_HPP
#define ZETAGAP_EXPERIMENT_HPP

// Simulation study of empirical mixing times: Gaussian designs, a warm start
// with planted false positives / false negatives, and the first iteration at
// which the sampled model equals the true support.
//
// Seeds: the instance of replicate r at dimension p uses
// derive_seed(seed, {p, r, kData}) (r = 0 for every replicate when the design
// is fixed); the initial indicator and the chain of a cell additionally mix in
// (fp, fn) with kSelection and kChain. All cells at the same (p, r) therefore
// share one instance.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "zetagap/errors.hpp"
#include "zetagap/gibbs.hpp"
#include "zetagap/indicator.hpp"
#include "zetagap/rng.hpp"
#include "zetagap/spike_slab.hpp"
#include "zetagap/text_io.hpp"

namespace zetagap {

struct ExperimentConfig {
  std::vector<Index> p{200, 500};
  /// Sample size; 0 means p / 10.
  Index n = 0;
  Index s_star = 10;
  double sigma2 = 1.0;
  /// Prior odds q / (1 - q) = p^{-(u+1)}.
  double u = 1.0;
  /// a = amplitude_factor * sqrt(log p / n).
  double amplitude_factor = 4.0;
  /// gamma = gamma_factor * sigma2 / lambda_max(X'X).
  double gamma_factor = 0.1;
  /// Slab precision; 0 means 1 / sqrt(n).
  double rho = 0.0;
  std::vector<double> fp_percent{1.0, 5.0, 10.0};
  std::vector<Index> fn_counts{2};
  std::size_t truncation = 20000;
  std::size_t replications = 20;
  std::uint64_t seed = 20240601;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;
  bool fixed_design = false;
  bool normalize_columns = false;
  ThetaStrategy strategy = ThetaStrategy::kAuto;

  Index n_for(Index pp) const { return n > 0 ? n : std::max<Index>(pp / 10, 1); }
  double rho_for(Index nn) const { return rho > 0 ? rho : 1.0 / std::sqrt(static_cast<double>(nn)); }
  double amplitude_for(Index pp) const {
    return amplitude_factor * std::sqrt(std::log(static_cast<double>(pp)) / static_cast<double>(n_for(pp)));
  }
  /// q = 1 / (1 + p^{u+1}), evaluated through the log-odds.
  double q_for(Index pp) const { return logistic(-(u + 1.0) * std::log(static_cast<double>(pp))); }

  void validate() const {
    if (p.empty()) throw ConfigError("p: at least one dimension is required");
    for (Index pp : p) {
      if (pp < 2) throw ConfigError("p must be at least 2");
      if (s_star < 1 || s_star > pp) throw ConfigError("s_star must lie in [1, p]");
      if (n_for(pp) < 1) throw ConfigError("n must be positive");
      for (double f : fp_percent) {
        if (!(f >= 0.0)) throw ConfigError("fp_percent must be nonnegative");
        if (fp_count(pp, f) > static_cast<std::size_t>(pp - s_star))
          throw ConfigError("fp_percent " + io::fmt_exact(f) + " exceeds p - s_star at p = " + std::to_string(pp));
      }
    }
    for (Index fn : fn_counts)
      if (fn < 0 || fn > s_star) throw ConfigError("fn_counts entries must lie in [0, s_star]");
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
    if (!(u > 0.0)) throw ConfigError("u must be positive");
    if (!(gamma_factor > 0.0)) throw ConfigError("gamma_factor must be positive");
    if (rho < 0.0) throw ConfigError("rho must be positive (or 0 for 1/sqrt(n))");
    if (truncation < 1) throw ConfigError("truncation must be at least 1");
    if (replications < 1) throw ConfigError("replications must be at least 1");
  }

  /// FP = x% means round(p x / 100) false positives.
  static std::size_t fp_count(Index pp, double percent) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(pp) * percent / 100.0));
  }

  std::string to_text() const;
  static ExperimentConfig parse(std::string_view text);
};

namespace detail {
template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if constexpr (std::is_floating_point_v<T>)
      os << io::fmt_exact(v[i]);
    else
      os << v[i];
  }
  return os.str();
}

inline bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("expected a boolean, got '" + std::string(v) + "'", line);
}

inline std::uint64_t parse_u64(std::string_view v, std::size_t line) {
  const long long x = io::parse_int(v, line);
  if (x < 0) throw ParseError("expected a nonnegative integer", line);
  return static_cast<std::uint64_t>(x);
}
}  // namespace detail

inline std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "p=" << detail::join(p) << '\n'
     << "n=" << n << '\n'
     << "s_star=" << s_star << '\n'
     << "sigma2=" << io::fmt_exact(sigma2) << '\n'
     << "u=" << io::fmt_exact(u) << '\n'
     << "amplitude_factor=" << io::fmt_exact(amplitude_factor) << '\n'
     << "gamma_factor=" << io::fmt_exact(gamma_factor) << '\n'
     << "rho=" << io::fmt_exact(rho) << '\n'
     << "fp_percent=" << detail::join(fp_percent) << '\n'
     << "fn_counts=" << detail::join(fn_counts) << '\n'
     << "truncation=" << truncation << '\n'
     << "replications=" << replications << '\n'
     << "seed=" << seed << '\n'
     << "threads=" << threads << '\n'
     << "fixed_design=" << (fixed_design ? "true" : "false") << '\n'
     << "normalize_columns=" << (normalize_columns ? "true" : "false") << '\n'
     << "strategy=" << to_string(strategy) << '\n';
  return os.str();
}

/// Flat key=value text; '#' starts a comment; list values are comma separated.
/// Unknown or repeated keys are rejected.
inline ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::map<std::string, std::size_t> seen;
  for (const auto& line : io::content_lines(in)) {
    const auto eq = line.text.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line.number);
    const std::string key(io::trim(std::string_view(line.text).substr(0, eq)));
    const std::string_view value = io::trim(std::string_view(line.text).substr(eq + 1));
    if (!seen.emplace(key, line.number).second) throw ParseError("repeated key '" + key + "'", line.number);
    auto list = [&] { return io::split_fields(value, ", \t"); };
    if (key == "p") {
      c.p.clear();
      for (auto f : list()) c.p.push_back(static_cast<Index>(io::parse_int(f, line.number)));
    } else if (key == "n") {
      c.n = static_cast<Index>(io::parse_int(value, line.number));
    } else if (key == "s_star") {
      c.s_star = static_cast<Index>(io::parse_int(value, line.number));
    } else if (key == "sigma2") {
      c.sigma2 = io::parse_double(value, line.number);
    } else if (key == "u") {
      c.u = io::parse_double(value, line.number);
    } else if (key == "amplitude_factor") {
      c.amplitude_factor = io::parse_double(value, line.number);
    } else if (key == "gamma_factor") {
      c.gamma_factor = io::parse_double(value, line.number);
    } else if (key == "rho") {
      c.rho = io::parse_double(value, line.number);
    } else if (key == "fp_percent") {
      c.fp_percent.clear();
      for (auto f : list()) c.fp_percent.push_back(io::parse_double(f, line.number));
    } else if (key == "fn_counts") {
      c.fn_counts.clear();
      for (auto f : list()) c.fn_counts.push_back(static_cast<Index>(io::parse_int(f, line.number)));
    } else if (key == "truncation") {
      c.truncation = detail::parse_u64(value, line.number);
    } else if (key == "replications") {
      c.replications = detail::parse_u64(value, line.number);
    } else if (key == "seed") {
      c.seed = detail::parse_u64(value, line.number);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(detail::parse_u64(value, line.number));
    } else if (key == "fixed_design") {
      c.fixed_design = detail::parse_bool(value, line.number);
    } else if (key == "normalize_columns") {
      c.normalize_columns = detail::parse_bool(value, line.number);
    } else if (key == "strategy") {
      c.strategy = parse_strategy(value);
    } else {
      throw ConfigError("unknown configuration key '" + key + "' on line " + std::to_string(line.number));
    }
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Instances

/// Largest eigenvalue of X'X by power iteration on v -> X'(Xv).
inline double lambda_max_XtX(const MatrixXd& X, double rel_tol = 1e-13, int max_iter = 100000) {
  if (X.size() == 0) return 0.0;
  VectorXd v = VectorXd::Ones(X.cols()) / std::sqrt(static_cast<double>(X.cols()));
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd w = X.transpose() * (X * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - lam) <= rel_tol * std::abs(next)) return next;
    lam = next;
  }
  return lam;
}

struct Instance {
  SpikeSlabModel model;
  GroundTruth truth;
  double lambda_max = 0.0;
  std::uint64_t seed = 0;
};

inline std::uint64_t instance_seed(const ExperimentConfig& c, Index p, std::size_t replicate) {
  return derive_seed(c.seed, {static_cast<std::uint64_t>(p), c.fixed_design ? 0 : replicate,
                              static_cast<std::uint64_t>(Stream::kData)});
}

/// X iid N(0,1) (optionally rescaled to ||X_j||^2 = n); theta_star nonzero on the first
/// s_star coordinates with magnitude uniform on (a, a+1) and a uniform sign; z = X theta + sigma eps.
inline Instance generate_instance(const ExperimentConfig& c, Index p, std::uint64_t seed) {
  const Index n = c.n_for(p);
  Rng rng = make_rng(seed);
  MatrixXd X = standard_normal(rng, n, p);
  if (c.normalize_columns)
    for (Index j = 0; j < p; ++j) X.col(j) *= std::sqrt(static_cast<double>(n)) / X.col(j).norm();
  const double a = c.amplitude_for(p);
  VectorXd theta = VectorXd::Zero(p);
  for (Index j = 0; j < c.s_star; ++j) {
    const double mag = a + uniform01(rng);
    theta[j] = fair_coin(rng) ? mag : -mag;
  }
  const double sigma = std::sqrt(c.sigma2);
  VectorXd z = X * theta + sigma * standard_normal(rng, n);
  const double lam = lambda_max_XtX(X);
  PriorParams prior;
  prior.sigma2 = c.sigma2;
  prior.q = c.q_for(p);
  prior.rho = c.rho_for(n);
  prior.gamma = c.gamma_factor * c.sigma2 / lam;
  GroundTruth truth = GroundTruth::from_theta(theta, sigma, n, a);
  return {SpikeSlabModel(std::move(X), std::move(z), prior), std::move(truth), lam, seed};
}

/// delta_star plus fp uniformly chosen null coordinates, minus fn uniformly chosen true ones.
inline Indicator build_initial_indicator(const GroundTruth& truth, std::size_t fp, std::size_t fn, std::uint64_t seed) {
  const auto nulls = truth.delta_star.zeros();
  const auto actives = truth.delta_star.ones();
  if (fp > nulls.size()) throw DomainError("fp exceeds the number of null coordinates");
  if (fn > actives.size()) throw DomainError("fn exceeds the support size");
  Rng rng = make_rng(seed);
  Indicator d = truth.delta_star;
  std::vector<std::size_t> pick;
  std::sample(nulls.begin(), nulls.end(), std::back_inserter(pick), fp, rng);
  for (auto j : pick) d.set(j);
  pick.clear();
  std::sample(actives.begin(), actives.end(), std::back_inserter(pick), fn, rng);
  for (auto j : pick) d.reset(j);
  return d;
}

struct SenPrec {
  double sen;
  double prec;
};

/// PREC is 0 for the empty model.
inline SenPrec sen_prec(const Indicator& delta, const Indicator& delta_star) {
  const auto s = delta_star.count();
  if (s == 0) throw DomainError("SEN needs a nonempty true support");
  const double hit = static_cast<double>(delta.intersection_count(delta_star));
  const auto k = delta.count();
  return {hit / static_cast<double>(s), k == 0 ? 0.0 : hit / static_cast<double>(k)};
}

struct MixingRecord {
  Index p = 0, n = 0, s_star = 0;
  std::size_t fp = 0, fn = 0, replicate = 0;
  std::uint64_t seed = 0;
  std::size_t mixing_time = 0;
  bool truncated = false;
  double wall_s = 0.0;
};

/// First k with SEN_k = PREC_k = 1 (k = 0 is the initial indicator); T and truncated otherwise.
inline MixingRecord empirical_mixing_time(const Trajectory& t, const Indicator& delta_star, std::size_t T) {
  MixingRecord r;
  r.p = static_cast<Index>(delta_star.size());
  r.s_star = static_cast<Index>(delta_star.count());
  r.seed = t.seed;
  auto hit = [&](const Indicator& d) {
    const auto sp = sen_prec(d, delta_star);
    return sp.sen == 1.0 && sp.prec == 1.0;
  };
  if (hit(t.initial_delta)) return r;
  for (const auto& rec : t.records) {
    if (rec.iteration > T) break;
    if (hit(rec.delta)) {
      r.mixing_time = rec.iteration;
      return r;
    }
  }
  r.mixing_time = T;
  r.truncated = true;
  return r;
}

struct Cell {
  Index p;
  std::size_t fp;
  std::size_t fn;
  double fp_percent;
};

inline std::vector<Cell> study_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (Index p : c.p) {
    for (double f : c.fp_percent) cells.push_back({p, ExperimentConfig::fp_count(p, f), 0, f});
    for (Index fn : c.fn_counts) cells.push_back({p, 0, static_cast<std::size_t>(fn), 0.0});
  }
  return cells;
}

/// One chain on one cell, stopped at the first exact recovery of delta_star.
inline MixingRecord run_replicate(const ExperimentConfig& c, const Cell& cell, std::size_t replicate,
                                  const Instance& inst) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t p = static_cast<std::uint64_t>(cell.p);
  const std::uint64_t chain_seed =
      derive_seed(c.seed, {p, cell.fp, cell.fn, replicate, static_cast<std::uint64_t>(Stream::kChain)});
  const std::uint64_t sel_seed =
      derive_seed(c.seed, {p, cell.fp, cell.fn, replicate, static_cast<std::uint64_t>(Stream::kSelection)});
  const Indicator& star = inst.truth.delta_star;
  const Indicator init = build_initial_indicator(inst.truth, cell.fp, cell.fn, sel_seed);

  MixingRecord r;
  r.p = cell.p;
  r.n = inst.model.n();
  r.s_star = static_cast<Index>(star.count());
  r.fp = cell.fp;
  r.fn = cell.fn;
  r.replicate = replicate;
  r.seed = chain_seed;
  if (init == star) {
    r.mixing_time = 0;
  } else {
    GibbsState s = init_from_model(inst.model, init, chain_seed, c.strategy);
    std::size_t hit = 0;
    run_observed(
        inst.model, s, c.truncation,
        [&](std::size_t it, bool lazy, const GibbsState& st) {
          if (!lazy && st.last_delta == star) {
            hit = it;
            return false;
          }
          return true;
        },
        c.strategy);
    r.mixing_time = hit ? hit : c.truncation;
    r.truncated = hit == 0;
  }
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct ReplicateFailure {
  Cell cell;
  std::size_t replicate;
  std::string message;
};

struct StudyResult {
  std::vector<MixingRecord> records;
  std::vector<ReplicateFailure> failures;
  /// (p, replicate) -> lambda_max, gamma, instance seed.
  struct InstanceInfo {
    Index p;
    std::size_t replicate;
    std::uint64_t seed;
    Index n;
    double lambda_max, gamma, rho, q, amplitude;
  };
  std::vector<InstanceInfo> instances;
};

inline unsigned worker_count(unsigned requested, std::size_t tasks) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned t = requested == 0 ? hw : requested;
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(t, tasks)));
}

/// Runs tasks 0..count-1 on a pool of `threads` workers; task(i) must only touch slot i.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  const unsigned w = worker_count(threads, count);
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < w; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

using StudyProgress = std::function<void(const MixingRecord&)>;

/// All cells x replicates; failures are recorded and do not stop the study.
/// Output order is (p, replicate, cell) regardless of thread count.
inline StudyResult run_study(const ExperimentConfig& c, const StudyProgress& progress = {}) {
  c.validate();
  const auto cells = study_cells(c);
  StudyResult out;
  std::mutex mu;

  struct Job {
    Index p;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  for (Index p : c.p)
    for (std::size_t r = 0; r < c.replications; ++r) jobs.push_back({p, r});

  std::vector<std::vector<MixingRecord>> recs(jobs.size());
  std::vector<std::vector<ReplicateFailure>> fails(jobs.size());
  std::vector<std::optional<StudyResult::InstanceInfo>> infos(jobs.size());

  parallel_for(jobs.size(), c.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    std::optional<Instance> inst;
    try {
      inst.emplace(generate_instance(c, job.p, instance_seed(c, job.p, job.replicate)));
      infos[i] = StudyResult::InstanceInfo{job.p,
                                           job.replicate,
                                           inst->seed,
                                           inst->model.n(),
                                           inst->lambda_max,
                                           inst->model.gamma(),
                                           inst->model.rho(),
                                           inst->model.q(),
                                           inst->truth.amplitude};
    } catch (const std::exception& e) {
      for (const auto& cell : cells)
        if (cell.p == job.p) fails[i].push_back({cell, job.replicate, std::string("instance: ") + e.what()});
      return;
    }
    for (const auto& cell : cells) {
      if (cell.p != job.p) continue;
      try {
        recs[i].push_back(run_replicate(c, cell, job.replicate, *inst));
        if (progress) {
          std::lock_guard<std::mutex> lock(mu);
          progress(recs[i].back());
        }
      } catch (const std::exception& e) {
        fails[i].push_back({cell, job.replicate, e.what()});
      }
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.records.insert(out.records.end(), recs[i].begin(), recs[i].end());
    out.failures.insert(out.failures.end(), fails[i].begin(), fails[i].end());
    if (infos[i]) out.instances.push_back(*infos[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr const char* kResultsHeader = "p,n,s_star,fp,fn,replicate,seed,mixing_time,truncated,wall_s";

inline std::string results_csv(const std::vector<MixingRecord>& records) {
  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const auto& r : records)
    os << r.p << ',' << r.n << ',' << r.s_star << ',' << r.fp << ',' << r.fn << ',' << r.replicate << ',' << r.seed
       << ',' << r.mixing_time << ',' << (r.truncated ? 1 : 0) << ',' << io::fmt_exact(r.wall_s) << '\n';
  return os.str();
}

inline std::vector<MixingRecord> parse_results_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  const auto lines = io::content_lines(in);
  if (lines.empty() || io::trim(lines.front().text) != kResultsHeader)
    throw ParseError(std::string("results header must be '") + kResultsHeader + "'", lines.empty() ? 0 : lines.front().number);
  std::vector<MixingRecord> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto f = io::split_fields(line.text, ",");
    if (f.size() != 10) throw ParseError("expected 10 fields", line.number);
    MixingRecord r;
    r.p = static_cast<Index>(io::parse_int(f[0], line.number));
    r.n = static_cast<Index>(io::parse_int(f[1], line.number));
    r.s_star = static_cast<Index>(io::parse_int(f[2], line.number));
    r.fp = detail::parse_u64(f[3], line.number);
    r.fn = detail::parse_u64(f[4], line.number);
    r.replicate = detail::parse_u64(f[5], line.number);
    if (std::from_chars(f[6].data(), f[6].data() + f[6].size(), r.seed).ptr != f[6].data() + f[6].size())
      throw ParseError("seed must be an unsigned 64-bit integer", line.number);
    r.mixing_time = detail::parse_u64(f[7], line.number);
    r.truncated = detail::parse_bool(f[8], line.number);
    r.wall_s = io::parse_double(f[9], line.number);
    out.push_back(r);
  }
  return out;
}

inline std::string instances_csv(const StudyResult& s) {
  std::ostringstream os;
  os << "p,replicate,seed,n,lambda_max,gamma,rho,q,amplitude\n";
  for (const auto& i : s.instances)
    os << i.p << ',' << i.replicate << ',' << i.seed << ',' << i.n << ',' << io::fmt_exact(i.lambda_max) << ','
       << io::fmt_exact(i.gamma) << ',' << io::fmt_exact(i.rho) << ',' << io::fmt_exact(i.q) << ','
       << io::fmt_exact(i.amplitude) << '\n';
  return os.str();
}

inline std::string study_manifest(const ExperimentConfig& c, const StudyResult& s) {
  std::ostringstream os;
  os << "# resolved configuration\n" << c.to_text() << "# derived\n"
     << "generator=" << kGeneratorName << '\n';
  for (Index p : c.p) {
    const Index n = c.n_for(p);
    os << "p" << p << ".n=" << n << '\n'
       << "p" << p << ".q=" << io::fmt_exact(c.q_for(p)) << '\n'
       << "p" << p << ".rho=" << io::fmt_exact(c.rho_for(n)) << '\n'
       << "p" << p << ".amplitude=" << io::fmt_exact(c.amplitude_for(p)) << '\n';
  }
  os << "instances=" << s.instances.size() << " (lambda_max and gamma per instance in instances.csv)\n"
     << "records=" << s.records.size() << '\n'
     << "failures=" << s.failures.size() << '\n';
  return os.str();
}

inline std::string failures_csv(const StudyResult& s) {
  std::ostringstream os;
  os << "p,fp,fn,replicate,message\n";
  for (const auto& f : s.failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << f.cell.p << ',' << f.cell.fp << ',' << f.cell.fn << ',' << f.replicate << ',' << msg << '\n';
  }
  return os.str();
}

/// results.csv, instances.csv, manifest.txt and, when some replicate failed, failures.csv.
inline void write_study(const std::filesystem::path& dir, const ExperimentConfig& c, const StudyResult& s) {
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / "results.csv", results_csv(s.records));
  io::write_file_atomic(dir / "instances.csv", instances_csv(s));
  io::write_file_atomic(dir / "manifest.txt", study_manifest(c, s));
  if (!s.failures.empty()) io::write_file_atomic(dir / "failures.csv", failures_csv(s));
}

// ---------------------------------------------------------------------------
// Aggregation

struct CellSummary {
  Index p = 0;
  std::size_t fp = 0, fn = 0;
  std::size_t count = 0;
  double mean = 0, sd = 0, se = 0;
  std::size_t truncated = 0;
  double mean_wall_s = 0;
  std::vector<std::size_t> samples;
};

/// Groups by (p, fp, fn), ordered by p, then by fn, then by fp.
inline std::vector<CellSummary> aggregate(const std::vector<MixingRecord>& records) {
  std::map<std::tuple<Index, std::size_t, std::size_t>, CellSummary> groups;
  for (const auto& r : records) {
    auto& g = groups[{r.p, r.fn, r.fp}];
    g.p = r.p;
    g.fp = r.fp;
    g.fn = r.fn;
    g.samples.push_back(r.mixing_time);
    g.truncated += r.truncated ? 1 : 0;
    g.mean_wall_s += r.wall_s;
  }
  std::vector<CellSummary> out;
  for (auto& [key, g] : groups) {
    g.count = g.samples.size();
    const double k = static_cast<double>(g.count);
    g.mean = std::accumulate(g.samples.begin(), g.samples.end(), 0.0) / k;
    double ss = 0;
    for (auto x : g.samples) ss += (static_cast<double>(x) - g.mean) * (static_cast<double>(x) - g.mean);
    g.sd = g.count > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    g.se = g.sd / std::sqrt(k);
    g.mean_wall_s /= k;
    out.push_back(std::move(g));
  }
  return out;
}

inline std::string cell_label(const CellSummary& c) {
  std::ostringstream os;
  if (c.fn == 0) {
    os << "FP=" << std::setprecision(3) << 100.0 * static_cast<double>(c.fp) / static_cast<double>(c.p) << '%';
  } else {
    os << "FP=" << c.fp << ", FN=" << c.fn;
  }
  return os.str();
}

/// Rows are cells, columns are dimensions; entries "mean (sd)", prefixed by '>' when a
/// replicate was truncated. A second block lists se, truncation counts and wall time.
inline std::string report_table(const std::vector<CellSummary>& cells) {
  std::vector<Index> ps;
  std::map<std::string, std::map<Index, const CellSummary*>> grid;
  std::vector<std::string> labels;
  for (const auto& c : cells) {
    if (std::find(ps.begin(), ps.end(), c.p) == ps.end()) ps.push_back(c.p);
    const auto label = cell_label(c);
    if (!grid.count(label)) labels.push_back(label);
    grid[label][c.p] = &c;
  }
  std::sort(ps.begin(), ps.end());
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  auto header = [&](const char* title) {
    os << std::left << std::setw(16) << title;
    for (Index p : ps) os << std::setw(24) << ("p=" + std::to_string(p));
    os << '\n';
  };
  header("mean (sd)");
  for (const auto& label : labels) {
    os << std::left << std::setw(16) << label;
    for (Index p : ps) {
      auto it = grid[label].find(p);
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(1);
      if (it == grid[label].end()) {
        cell << '-';
      } else {
        const auto& c = *it->second;
        if (c.truncated > 0) cell << '>';
        cell << c.mean << " (" << c.sd << ')';
      }
      os << std::setw(24) << cell.str();
    }
    os << '\n';
  }
  os << '\n';
  header("se / trunc / s");
  for (const auto& label : labels) {
    os << std::left << std::setw(16) << label;
    for (Index p : ps) {
      auto it = grid[label].find(p);
      std::ostringstream cell;
      if (it == grid[label].end()) {
        cell << '-';
      } else {
        const auto& c = *it->second;
        cell << std::fixed << std::setprecision(1) << c.se << " / " << c.truncated << '/' << c.count << " / "
             << std::setprecision(3) << c.mean_wall_s;
      }
      os << std::setw(24) << cell.str();
    }
    os << '\n';
  }
  return os.str();
}

inline std::string plot_file_name(const CellSummary& c) {
  return "mixing_p" + std::to_string(c.p) + "_fp" + std::to_string(c.fp) + "_fn" + std::to_string(c.fn) + ".dat";
}

/// One mixing time per line, for external box plots.
inline std::string plot_data(const CellSummary& c) {
  std::ostringstream os;
  os << "# p=" << c.p << " fp=" << c.fp << " fn=" << c.fn << " replicates=" << c.count << " truncated=" << c.truncated
     << '\n';
  for (auto x : c.samples) os << x << '\n';
  return os.str();
}

/// report.txt plus one plot-data file per cell; a pure function of results.csv.
inline std::string write_report(const std::filesystem::path& dir) {
  const auto records = parse_results_csv(io::read_file(dir / "results.csv"));
  const auto cells = aggregate(records);
  const std::string table = report_table(cells);
  io::write_file_atomic(dir / "report.txt", table);
  for (const auto& c : cells) io::write_file_atomic(dir / plot_file_name(c), plot_data(c));
  return table;
}

}  // namespace zetagap

#endif
