#include "robustl1/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "robustl1/analytics.hpp"
#include "robustl1/certificates.hpp"
#include "robustl1/config.hpp"
#include "robustl1/harness.hpp"
#include "robustl1/problems.hpp"
#include "robustl1/solvers.hpp"

namespace robustl1 {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string general(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct GlobalOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string method = "l1";
  std::optional<double> eta;
  std::optional<double> lambda;
  double p = 0.5;
  bool strict = false;
};

struct AnalyticsOptions {
  bool eta0 = false;
  bool breakdown = false;
  std::optional<double> gamma;
  std::string grid;
};

struct GenOptions {
  std::size_t m = 100;
  std::size_t n = 1;
  std::size_t k = 1;
  double amplitude = 1.0;
  std::string adversary = "topk_zeroing";
  double magnitude = 1.0;
  double epsilon = 0.1;
  double noise_l1 = 0.0;
  std::optional<double> grid_value;
};

struct SolveOptions {
  std::string problem;
  std::optional<double> grid_value;
  std::size_t max_iterations = SolverOptions{}.max_iterations;
};

struct SweepOptions {
  std::string summary;
  std::optional<std::size_t> threads;
};

struct CertifyOptions {
  std::string problem;
  std::optional<std::size_t> k;
  std::size_t trials = 200;
  std::optional<double> alpha;
  double delta = 0.0;
};

SweepSpec load_spec(const GlobalOptions& g) {
  if (g.config.empty()) throw UsageError("--config is required");
  if (!std::filesystem::exists(g.config)) throw UsageError("config file not found: " + g.config);
  SweepSpec spec = SweepSpec::from_config(KeyValueConfig::load(g.config));
  if (g.seed) spec.base_seed = *g.seed;
  return spec;
}

Problem load_problem(const GlobalOptions& g, const std::string& dir,
                     const std::optional<double>& grid_value, SweepSpec* spec_out) {
  if (!dir.empty()) {
    if (!std::filesystem::is_directory(dir)) throw UsageError("problem directory not found: " + dir);
    return read_problem(dir);
  }
  if (!grid_value) throw UsageError("either --problem DIR or --config with --grid-value is required");
  SweepSpec spec = load_spec(g);
  if (!g.seed) throw UsageError("--seed is required with --grid-value");
  if (spec_out) *spec_out = spec;
  return make_instance(spec, *grid_value, *g.seed);
}

int run_analytics(const GlobalOptions& g, const AnalyticsOptions& a, std::ostream& out) {
  bool printed = false;
  if (a.eta0) {
    out << fixed(eta0().value(), 6) << '\n';
    printed = true;
  }
  if (a.gamma) {
    const Fraction gamma(*a.gamma);
    out << "gamma=" << general(gamma, 10) << " B=" << general(big_b(gamma), 12)
        << " G=" << general(big_g(gamma), 12) << '\n';
    printed = true;
  }
  if (a.breakdown) {
    out << fixed(breakdown_threshold(g.p).value(), 6) << '\n';
    printed = true;
  }
  if (!a.grid.empty()) {
    const AnalyticsTable table = build_analytics_table(parse_grid(a.grid), g.p);
    if (g.out.empty()) {
      write_analytics_csv(out, table);
    } else {
      std::ofstream file(g.out);
      if (!file) throw UsageError("cannot write " + g.out);
      write_analytics_csv(file, table);
    }
    printed = true;
  }
  if (!printed) throw UsageError("analytics needs one of --eta0, --gamma, --breakdown, --grid");
  return kExitOk;
}

int run_gen(const GlobalOptions& g, const GenOptions& o, std::ostream& out) {
  if (g.out.empty()) throw UsageError("gen needs --out DIR");
  const std::uint64_t seed = g.seed.value_or(0);
  Problem problem;
  if (o.grid_value) {
    problem = make_instance(load_spec(g), *o.grid_value, seed);
  } else {
    DenseMatrix x = sample_gaussian_design(o.m, o.n, seed);
    Vector w = sample_sparse_signal(o.n, o.k, o.amplitude, seed);
    const CorruptionSpec cs{Fraction(g.eta.value_or(0.0)), parse_corruption(o.adversary),
                            o.magnitude, o.epsilon};
    problem = assemble_problem(std::move(x), std::move(w), cs,
                               gaussian_noise_with_l1(o.m, o.noise_l1, seed), seed);
  }
  write_problem(g.out, problem);
  out << "wrote " << problem.rows() << "x" << problem.cols() << " problem to " << g.out << '\n';
  return kExitOk;
}

int run_solve(const GlobalOptions& g, const SolveOptions& o, std::ostream& out) {
  // When replaying a sweep row the config supplies p, lambda policy and
  // solver settings.
  SweepSpec spec;
  spec.p = g.p;
  Problem problem = load_problem(g, o.problem, o.grid_value, &spec);
  if (o.problem.empty()) {
    spec.solver.max_iterations = std::min(spec.solver.max_iterations, o.max_iterations);
  } else {
    spec.solver.max_iterations = o.max_iterations;
  }
  if (g.eta) problem.eta = Fraction(*g.eta);
  const double p = spec.p;
  SolverResult r;
  if (g.method == "l1_constrained" && g.lambda) {
    r = l1_regress_constrained(problem.x, problem.y, *g.lambda, spec.solver);
  } else {
    if (std::find(known_methods().begin(), known_methods().end(), g.method) ==
        known_methods().end()) {
      throw UsageError("unknown method '" + g.method + "'");
    }
    r = solve_with_method(spec, g.method, problem, p);
  }

  out << "method=" << g.method << '\n'
      << "termination=" << termination_name(r.termination) << '\n'
      << "iterations=" << r.iterations << '\n'
      << "objective=" << general(r.objective, 10) << '\n'
      << "relative_error=" << format_double(relative_error(r.estimate, problem.w_star)) << '\n'
      << "estimate=";
  for (std::size_t j = 0; j < r.estimate.size(); ++j) {
    out << (j ? "," : "") << general(r.estimate[j], 8);
  }
  out << '\n';
  if (!g.out.empty()) write_vector_csv(g.out, r.estimate);
  if (g.strict && !r.converged) return kExitNumerical;
  return kExitOk;
}

int run_sweep_command(const GlobalOptions& g, const SweepOptions& o, std::ostream& out) {
  SweepSpec spec = load_spec(g);
  if (o.threads) spec.threads = *o.threads;
  spec.validate();
  const SweepResult result = run_sweep(spec);
  if (g.out.empty()) {
    write_sweep_csv(out, result);
  } else {
    std::ofstream file(g.out);
    if (!file) throw UsageError("cannot write " + g.out);
    write_sweep_csv(file, result);
    if (spec.experiment == Experiment::kBreakdown1d) {
      for (const auto& method : spec.methods) {
        const auto b = estimate_breakdown(result, method);
        out << "breakdown[" << method << "]=" << (b ? general(*b, 10) : std::string("none"))
            << '\n';
      }
    }
    out << "wrote " << result.rows.size() << " rows to " << g.out << '\n';
  }
  if (!o.summary.empty()) {
    std::ofstream file(o.summary);
    if (!file) throw UsageError("cannot write " + o.summary);
    file << sweep_summary_json(spec, result) << '\n';
  }
  if (g.strict) {
    for (const auto& row : result.rows) {
      if (!row.converged) return kExitNumerical;
    }
  }
  return kExitOk;
}

int run_certify(const GlobalOptions& g, const CertifyOptions& o, std::ostream& out) {
  if (o.problem.empty()) throw UsageError("certify needs --problem DIR");
  const Problem problem = load_problem(g, o.problem, std::nullopt, nullptr);
  const std::size_t k = o.k.value_or(std::max<std::size_t>(1, problem.sparsity()));
  const Fraction eta(g.eta.value_or(problem.eta));
  const std::uint64_t seed = g.seed.value_or(0);
  const RobustnessReport report = estimate_robust_constants(problem.x, k, eta, o.trials, seed);
  write_report(out, report);
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    const std::filesystem::path dir(g.out);
    write_vector_csv((dir / "witness_min.csv").string(), report.witness_min);
    write_vector_csv((dir / "witness_max.csv").string(), report.witness_max);
    out << "wrote witnesses to " << g.out << '\n';
  }
  if (!o.alpha) return kExitOk;

  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < problem.cols(); ++j) {
    if (problem.w_star[j] != 0.0) support.push_back(j);
  }
  const ShellingCheck check =
      verify_shelling_numerically(problem.x, support, *o.alpha, o.delta, o.trials, seed);
  out << "shelling_passed=" << (check.passed ? "true" : "false") << '\n'
      << "shelling_worst_margin=" << format_double(check.worst_margin) << '\n'
      << "shelling_vectors=" << check.vectors_checked << '\n'
      << "shelling_L=" << format_double(check.bounds.lower) << '\n'
      << "shelling_U=" << format_double(check.bounds.upper) << '\n';
  if (g.strict && !check.passed) return kExitNumerical;
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust L1 regression under sparse label corruption", "robustl1"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "key=value configuration file");
  app.add_option("--out", g.out, "output path");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--method", g.method, "l1, l1_constrained, lp, ls, torrent or filter");
  app.add_option("--eta", g.eta, "corruption fraction")->check(CLI::Range(0.0, 1.0));
  app.add_option("--lambda", g.lambda, "L1-ball radius for l1_constrained")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--p", g.p, "exponent in (0, 1]")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--strict", g.strict, "exit 2 when a solver does not converge");

  AnalyticsOptions a;
  auto* analytics = app.add_subcommand("analytics", "Gaussian tail quantities");
  analytics->add_flag("--eta0", a.eta0, "print the critical fraction");
  analytics->add_option("--gamma", a.gamma, "print B and G at gamma")->check(CLI::Range(0.0, 1.0));
  analytics->add_flag("--breakdown", a.breakdown, "print the breakdown threshold at --p");
  analytics->add_option("--grid", a.grid, "gamma grid start:stop:step, CSV output");

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "generate a corrupted problem directory");
  gen->add_option("--m", gen_opts.m, "rows")->check(CLI::PositiveNumber);
  gen->add_option("--n", gen_opts.n, "columns")->check(CLI::PositiveNumber);
  gen->add_option("--k", gen_opts.k, "signal sparsity")->check(CLI::PositiveNumber);
  gen->add_option("--amplitude", gen_opts.amplitude, "signal amplitude");
  gen->add_option("--adversary", gen_opts.adversary,
                  "none, topk_zeroing, random_sign or dense_adversary");
  gen->add_option("--magnitude", gen_opts.magnitude, "random_sign magnitude");
  gen->add_option("--epsilon", gen_opts.epsilon, "dense adversary epsilon");
  gen->add_option("--noise-l1", gen_opts.noise_l1, "l1 norm of Gaussian dense noise");
  gen->add_option("--grid-value", gen_opts.grid_value, "instance of a sweep config");

  SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "solve a problem");
  solve->add_option("--problem", solve_opts.problem, "problem directory");
  solve->add_option("--grid-value", solve_opts.grid_value, "replay a sweep row (with --config)");
  solve->add_option("--max-iterations", solve_opts.max_iterations, "iteration cap")
      ->check(CLI::PositiveNumber);

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  sweep->add_option("--summary", sweep_opts.summary, "JSON summary path");
  sweep->add_option("--threads", sweep_opts.threads, "worker threads")
      ->check(CLI::PositiveNumber);

  CertifyOptions cert_opts;
  auto* certify = app.add_subcommand("certify", "robustness constants of a design");
  certify->add_option("--problem", cert_opts.problem, "problem directory");
  certify->add_option("--k", cert_opts.k, "sparsity of sampled directions")
      ->check(CLI::PositiveNumber);
  certify->add_option("--trials", cert_opts.trials, "sampled directions")
      ->check(CLI::PositiveNumber);
  certify->add_option("--alpha", cert_opts.alpha, "shelling block ratio (> 1)");
  certify->add_option("--delta", cert_opts.delta, "cone slack")->check(CLI::NonNegativeNumber);

  std::vector<std::string> storage{"robustl1"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analytics->parsed()) return run_analytics(g, a, out);
    if (gen->parsed()) return run_gen(g, gen_opts, out);
    if (solve->parsed()) return run_solve(g, solve_opts, out);
    if (sweep->parsed()) return run_sweep_command(g, sweep_opts, out);
    if (certify->parsed()) return run_certify(g, cert_opts, out);
  } catch (const NotPositiveDefiniteError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SingularMatrixError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const RankDeficientError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "error: no subcommand\n";
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace robustl1
