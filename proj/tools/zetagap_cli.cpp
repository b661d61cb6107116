// zetagap: verification suites, chain analysis, and the mixing-time study.
//
// Exit codes: 0 success, 2 configuration/domain/parse/capacity error,
// 3 I/O error, 4 numeric failure, 5 verification failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "zetagap/verify.hpp"
#include "zetagap/zetagap.hpp"

namespace fs = std::filesystem;
using namespace zetagap;

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kIo = 3, kNumeric = 4, kVerification = 5 };

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("cannot read '" + p.string() + "'");
}

/// Creates the directory and proves it is writable before any compute starts.
void require_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  const fs::path probe = dir / ".zetagap-write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

ExperimentConfig load_config(const fs::path& path, std::optional<unsigned> threads) {
  require_file(path);
  auto cfg = ExperimentConfig::parse(io::read_file(path));
  if (threads) cfg.threads = *threads;
  return cfg;
}

std::string vector_text(const VectorXd& v) {
  std::ostringstream os;
  for (Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << io::fmt_exact(v[i]);
  return os.str();
}

std::string set_text(const StateSet& s) {
  std::string out;
  for (bool b : s) out += b ? '1' : '0';
  return out;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& replay_dir, bool timing) {
  const auto checks = verify::run_suite(suite, seed);
  if (!replay_dir.empty()) require_writable_dir(replay_dir);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << verify::format_check(c, timing) << '\n';
    if (c.passed) continue;
    ok = false;
    if (!c.replay.empty()) {
      std::cout << "  failing instance:\n";
      std::istringstream lines(c.replay);
      for (std::string line; std::getline(lines, line);) std::cout << "    " << line << '\n';
      if (!replay_dir.empty())
        io::write_file_atomic(fs::path(replay_dir) / (c.suite + "-" + c.name + ".txt"), c.replay);
    }
  }
  std::cout << (ok ? "all checks passed" : "verification FAILED") << " (suite " << suite << ", seed " << seed << ")\n";
  return ok ? kOk : kVerification;
}

int cmd_analyze_chain(const fs::path& path, double zeta, const std::string& m, std::size_t budget, std::uint64_t seed,
                      const std::string& out) {
  require_file(path);
  const NormSpec norm = parse_norm(m);
  if (!(zeta > 0.0 && zeta < 0.5)) throw DomainError("zeta must lie in (0, 1/2)");
  const FiniteChain chain = parse_chain(io::read_file(path));
  const auto r = analyze_chain(chain, zeta, norm, budget, seed);
  std::ostringstream os;
  os << std::setprecision(12);
  os << "states: " << chain.size() << '\n'
     << "spec_gap: " << r.spec_gap << '\n'
     << "conductance: " << r.conductance << '\n'
     << "zeta: " << zeta << '\n'
     << "norm_m: " << norm.to_string() << '\n'
     << "zeta_conductance: " << (r.zeta_conductance ? io::fmt_exact(*r.zeta_conductance) : std::string("vacuous"))
     << '\n'
     << "restriction_mass_threshold: " << restriction_mass_threshold(zeta, norm) << '\n'
     << "zeta_gap_lower: " << r.zeta_gap_lower << '\n'
     << "zeta_gap_lower_witness: " << set_text(r.witness_subset) << '\n';
  if (r.zeta_gap_upper.value) {
    os << "zeta_gap_upper: " << *r.zeta_gap_upper.value << '\n'
       << "zeta_gap_upper_witness: " << vector_text(r.zeta_gap_upper.witness) << '\n';
  } else {
    os << "zeta_gap_upper: infeasible (no candidate with Var > zeta; read as 1)\n";
  }
  std::cout << os.str();
  if (!out.empty()) io::write_file_atomic(out, os.str());
  return kOk;
}

int cmd_gen_data(const fs::path& config, const fs::path& out, std::optional<unsigned> threads) {
  const auto cfg = load_config(config, threads);
  require_writable_dir(out);
  std::ostringstream inst;
  inst << "p,replicate,seed,n,lambda_max,gamma,rho,q,amplitude,design_file,truth_file\n";
  const std::size_t reps = cfg.fixed_design ? 1 : cfg.replications;
  for (Index p : cfg.p)
    for (std::size_t r = 0; r < reps; ++r) {
      const auto seed = instance_seed(cfg, p, r);
      const auto instance = generate_instance(cfg, p, seed);
      const std::string stem = "p" + std::to_string(p) + "_r" + std::to_string(r);
      io::write_file_atomic(out / ("design_" + stem + ".csv"), format_design(instance.model));
      std::ostringstream truth;
      truth << "j,theta_star,delta_star,delta_tilde_star\n";
      for (Index j = 0; j < p; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        truth << j << ',' << io::fmt_exact(instance.truth.theta_star[j]) << ',' << instance.truth.delta_star[uj] << ','
              << instance.truth.delta_tilde_star[uj] << '\n';
      }
      io::write_file_atomic(out / ("truth_" + stem + ".csv"), truth.str());
      const auto& m = instance.model;
      inst << p << ',' << r << ',' << seed << ',' << m.n() << ',' << io::fmt_exact(instance.lambda_max) << ','
           << io::fmt_exact(m.gamma()) << ',' << io::fmt_exact(m.rho()) << ',' << io::fmt_exact(m.q()) << ','
           << io::fmt_exact(instance.truth.amplitude) << ",design_" << stem << ".csv,truth_" << stem << ".csv\n";
      std::cout << "wrote " << stem << '\n';
    }
  io::write_file_atomic(out / "instances.csv", inst.str());
  io::write_file_atomic(out / "manifest.txt",
                        "# resolved configuration\n" + cfg.to_text() + "generator=" + kGeneratorName + '\n');
  return kOk;
}

int cmd_run_experiment(const fs::path& config, const fs::path& out, std::optional<unsigned> threads, bool quiet) {
  const auto cfg = load_config(config, threads);
  require_writable_dir(out);
  const auto total = study_cells(cfg).size() * cfg.replications;
  std::size_t done = 0;
  const auto result = run_study(cfg, [&](const MixingRecord& r) {
    ++done;
    if (!quiet)
      std::cerr << '[' << done << '/' << total << "] p=" << r.p << " fp=" << r.fp << " fn=" << r.fn
                << " rep=" << r.replicate << " mixing_time=" << r.mixing_time << (r.truncated ? " (truncated)" : "")
                << '\n';
  });
  write_study(out, cfg, result);
  std::cout << report_table(aggregate(result.records));
  if (!result.failures.empty()) {
    std::cerr << result.failures.size() << " replicate(s) failed; see failures.csv\n";
    return kNumeric;
  }
  return kOk;
}

int cmd_report(const fs::path& in) {
  require_file(in / "results.csv");
  std::cout << write_report(in);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeta-spectral-gap toolkit and spike-and-slab Gibbs mixing study"};
  app.require_subcommand(1);
  std::optional<unsigned> threads;
  app.add_option("--threads", threads, "Cap on worker threads (default: hardware concurrency or the config value)")
      ->check(CLI::PositiveNumber);

  std::string suite = "all";
  std::uint64_t verify_seed = 7;
  std::string replay_dir;
  bool timing = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run property suites; exit 0 iff every check passes");
  verify_cmd->add_option("--suite", suite, "lemmas|mixtures|model|sampler|study|all (all excludes study)")
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify_seed, "Base seed")->capture_default_str();
  verify_cmd->add_option("--replay-dir", replay_dir, "Directory for serialized failing instances");
  verify_cmd->add_flag("--timing", timing, "Append wall time to each line (makes output run-dependent)");

  std::string chain_path, m_text = "inf", out_file;
  double zeta = 0.1;
  std::size_t budget = 2000;
  std::uint64_t analyze_seed = 0x5eed;
  auto* analyze_cmd = app.add_subcommand("analyze-chain", "Spectral gap, conductance and zeta-gap bounds of a chain file");
  analyze_cmd->add_option("chain", chain_path, "Chain file: d, then d rows of P, then optionally pi")->required();
  analyze_cmd->add_option("--zeta", zeta, "zeta in (0, 1/2)")->capture_default_str();
  analyze_cmd->add_option("--m", m_text, "Star-norm exponent m > 2 or 'inf'")->capture_default_str();
  analyze_cmd->add_option("--budget", budget, "Random candidates for the upper-bound search")->capture_default_str();
  analyze_cmd->add_option("--seed", analyze_seed, "Seed of the upper-bound search")->capture_default_str();
  analyze_cmd->add_option("--out", out_file, "Also write the report to this file");

  std::string config_path, out_dir, in_dir;
  bool quiet = false;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write the simulated designs, responses and true coefficients");
  gen_cmd->add_option("--config", config_path, "key=value experiment configuration")->required();
  gen_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* run_cmd = app.add_subcommand("run-experiment", "Run the mixing-time study and write results.csv");
  run_cmd->add_option("--config", config_path, "key=value experiment configuration")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_flag("--quiet", quiet, "No per-replicate progress on stderr");

  auto* report_cmd = app.add_subcommand("report", "Aggregate results.csv into report.txt and plot-data files");
  report_cmd->add_option("--in", in_dir, "Directory holding results.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*verify_cmd) return cmd_verify(suite, verify_seed, replay_dir, timing);
    if (*analyze_cmd) return cmd_analyze_chain(chain_path, zeta, m_text, budget, analyze_seed, out_file);
    if (*gen_cmd) return cmd_gen_data(config_path, out_dir, threads);
    if (*run_cmd) return cmd_run_experiment(config_path, out_dir, threads, quiet);
    if (*report_cmd) return cmd_report(in_dir);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
