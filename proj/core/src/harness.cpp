#include "robustl1/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "robustl1/analytics.hpp"
#include "robustl1/random.hpp"

namespace robustl1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_method(const std::string& name) {
  const auto& all = known_methods();
  return std::find(all.begin(), all.end(), name) != all.end();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Runs fn(0..count-1) on up to `threads` workers. Each job writes only its
// own output slot, so the result is independent of scheduling.
void run_jobs(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t j = next++; j < count; j = next++) fn(j);
      } catch (...) {
        errors[t] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SweepRow make_row(const std::string& method, double grid_value, std::size_t trial,
                  std::uint64_t seed, const Problem& problem, const SolverResult& r) {
  SweepRow row;
  row.method = method;
  row.grid_value = grid_value;
  row.trial = trial;
  row.seed = seed;
  row.relative_l2_error = relative_error(r.estimate, problem.w_star);
  row.objective = r.objective;
  row.iterations = r.iterations;
  row.converged = r.converged;
  row.estimate_norm = l2_norm(r.estimate);
  row.value = row.relative_l2_error;
  return row;
}

SweepRow failed_row(const std::string& method, double grid_value, std::size_t trial,
                    std::uint64_t seed) {
  SweepRow row;
  row.method = method;
  row.grid_value = grid_value;
  row.trial = trial;
  row.seed = seed;
  row.relative_l2_error = kInf;
  row.objective = kInf;
  row.estimate_norm = kInf;
  row.value = kInf;
  return row;
}

// Solver failures (singular systems, parameters outside a baseline's range
// such as TORRENT at η = 0.5) are recorded as infinite error.
SweepRow solve_row(const SweepSpec& spec, const std::string& method, double grid_value,
                   std::size_t trial, std::uint64_t seed, const Problem& problem, double p) {
  try {
    return make_row(method, grid_value, trial, seed, problem,
                    solve_with_method(spec, method, problem, p));
  } catch (const std::runtime_error&) {
    return failed_row(method, grid_value, trial, seed);
  } catch (const std::invalid_argument&) {
    return failed_row(method, grid_value, trial, seed);
  }
}

SweepResult run_method_grid(const SweepSpec& spec,
                            const std::function<void(SweepRow&, const Problem&)>& annotate) {
  spec.validate();
  const std::size_t grid_size = spec.grid.size();
  const std::size_t trials = spec.trials_per_point;
  const std::size_t per_method = grid_size * trials;
  SweepResult result;
  result.experiment = spec.experiment;
  result.rows.resize(spec.methods.size() * per_method);
  run_jobs(per_method, spec.threads, [&](std::size_t job) {
    const std::size_t g = job / trials;
    const std::size_t t = job % trials;
    const std::uint64_t seed = job_seed(spec, g, t);
    const Problem problem = make_instance(spec, spec.grid[g], seed);
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      SweepRow row = solve_row(spec, spec.methods[mi], spec.grid[g], t, seed, problem, spec.p);
      if (annotate) annotate(row, problem);
      result.rows[mi * per_method + job] = std::move(row);
    }
  });
  return result;
}

void require_experiment(const SweepSpec& spec, Experiment expected) {
  require(spec.experiment == expected,
          "sweep expects experiment '" + std::string(experiment_name(expected)) + "', got '" +
              std::string(experiment_name(spec.experiment)) + "'");
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kBreakdown1d: return "breakdown_1d";
    case Experiment::kSampleComplexity: return "sample_complexity";
    case Experiment::kDenseNoiseScaling: return "dense_noise_scaling";
    case Experiment::kPThresholdCurve: return "p_threshold_curve";
    case Experiment::kLowerBoundDense: return "lower_bound_dense";
  }
  return "breakdown_1d";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::kBreakdown1d, Experiment::kSampleComplexity,
                 Experiment::kDenseNoiseScaling, Experiment::kPThresholdCurve,
                 Experiment::kLowerBoundDense}) {
    if (experiment_name(e) == name) return e;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"l1", "l1_constrained", "lp", "ls", "torrent",
                                              "filter"};
  return names;
}

void SweepSpec::validate() const {
  for (const auto& method : methods) {
    require(is_method(method), "unknown method '" + method + "'");
  }
  require(!grid.empty(), "sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]), "sweep grid values must be finite");
    require(i == 0 || grid[i] > grid[i - 1], "sweep grid must be strictly increasing");
  }
  require(trials_per_point >= 1, "trials_per_point must be at least 1");
  require(n >= 1 && m >= 1, "m and n must be positive");
  require(k >= 1 && k <= n, "k must satisfy 1 <= k <= n");
  require(std::isfinite(amplitude) && amplitude != 0.0, "amplitude must be finite and nonzero");
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  require(lambda_multiple > 0.0, "lambda_multiple must be positive");
  require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
  solver.validate();
  const bool has_filter = std::find(methods.begin(), methods.end(), "filter") != methods.end();
  require(!has_filter || n == 1, "the filter method is one-dimensional (n = 1)");

  switch (experiment) {
    case Experiment::kBreakdown1d:
      require(n == 1, "breakdown_1d requires n = 1");
      require(grid.front() >= 0.0 && grid.back() <= 1.0, "eta grid must lie in [0, 1]");
      break;
    case Experiment::kSampleComplexity:
      for (double v : grid) {
        require(v >= 1.0 && v == std::floor(v), "m grid values must be positive integers");
      }
      break;
    case Experiment::kDenseNoiseScaling:
      require(grid.front() >= 0.0, "noise l1 grid must be nonnegative");
      require(corruption != CorruptionKind::kDenseAdversary,
              "dense_noise_scaling cannot use the dense adversary");
      break;
    case Experiment::kPThresholdCurve:
      require(grid.front() > 0.0 && grid.back() <= 1.0, "p grid must lie in (0, 1]");
      if (empirical) {
        require(!inner_grid.empty(), "empirical p curve needs inner_grid");
        for (std::size_t i = 0; i < inner_grid.size(); ++i) {
          require(inner_grid[i] >= 0.0 && inner_grid[i] <= 1.0, "inner_grid must lie in [0, 1]");
          require(i == 0 || inner_grid[i] > inner_grid[i - 1],
                  "inner_grid must be strictly increasing");
        }
        require(n == 1, "empirical p curve uses the one-dimensional setting (n = 1)");
      }
      break;
    case Experiment::kLowerBoundDense:
      require(grid.front() > 0.0 && grid.back() < 0.2, "epsilon grid must lie in (0, 0.2)");
      break;
  }
}

SweepSpec SweepSpec::from_config(const KeyValueConfig& cfg) {
  SweepSpec spec;
  spec.experiment = parse_experiment(cfg.get_string("experiment", "breakdown_1d"));
  if (cfg.has("methods")) spec.methods = split_list(*cfg.get("methods"));
  for (const char* key : {"grid", "eta_grid", "m_grid", "c_grid", "p_grid", "epsilon_grid"}) {
    if (cfg.has(key)) spec.grid = parse_grid(*cfg.get(key));
  }
  spec.m = cfg.get_uint("m", spec.m);
  spec.n = cfg.get_uint("n", spec.n);
  spec.k = cfg.get_uint("k", spec.k);
  spec.amplitude = cfg.get_double("amplitude", spec.amplitude);
  const std::string policy = cfg.get_string("lambda_policy", "exact");
  if (policy == "exact") {
    spec.lambda_policy = LambdaPolicy::kExact;
  } else if (policy == "multiple") {
    spec.lambda_policy = LambdaPolicy::kMultiple;
  } else {
    throw ConfigError("lambda_policy must be 'exact' or 'multiple', got '" + policy + "'");
  }
  spec.lambda_multiple = cfg.get_double("lambda_multiple", spec.lambda_multiple);
  spec.trials_per_point = cfg.get_uint("trials_per_point", spec.trials_per_point);
  spec.base_seed = cfg.get_uint("base_seed", spec.base_seed);
  spec.eta = cfg.get_double("eta", spec.eta);
  spec.epsilon = cfg.get_double("epsilon", spec.epsilon);
  spec.p = cfg.get_double("p", spec.p);
  if (cfg.has("corruption")) spec.corruption = parse_corruption(*cfg.get("corruption"));
  spec.magnitude = cfg.get_double("magnitude", spec.magnitude);
  spec.empirical = cfg.get_bool("empirical", spec.empirical);
  if (cfg.has("inner_grid")) spec.inner_grid = parse_grid(*cfg.get("inner_grid"));
  spec.threads = cfg.get_uint("threads", spec.threads);
  spec.solver.max_iterations = cfg.get_uint("max_iterations", spec.solver.max_iterations);
  spec.solver.lp_restarts = cfg.get_uint("lp_restarts", spec.solver.lp_restarts);
  return spec;
}

std::uint64_t job_seed(const SweepSpec& spec, std::size_t grid_index, std::size_t trial) {
  std::uint64_t h = hash_label(spec.base_seed, experiment_name(spec.experiment));
  if (spec.experiment != Experiment::kDenseNoiseScaling) h = hash_combine(h, grid_index);
  return hash_combine(h, trial);
}

Problem make_instance(const SweepSpec& spec, double grid_value, std::uint64_t seed) {
  switch (spec.experiment) {
    case Experiment::kBreakdown1d:
    case Experiment::kPThresholdCurve: {
      DenseMatrix x = sample_gaussian_design(spec.m, 1, seed);
      CorruptionSpec cs{Fraction(grid_value), spec.corruption, spec.magnitude, spec.epsilon};
      return assemble_problem(std::move(x), Vector{spec.amplitude}, cs, Vector{}, seed);
    }
    case Experiment::kSampleComplexity: {
      const auto m = static_cast<std::size_t>(grid_value);
      DenseMatrix x = sample_gaussian_design(m, spec.n, seed);
      Vector w = sample_sparse_signal(spec.n, spec.k, spec.amplitude, seed);
      CorruptionSpec cs{Fraction(spec.eta), spec.corruption, spec.magnitude, spec.epsilon};
      return assemble_problem(std::move(x), std::move(w), cs, Vector{}, seed);
    }
    case Experiment::kDenseNoiseScaling: {
      DenseMatrix x = sample_gaussian_design(spec.m, spec.n, seed);
      Vector w = sample_sparse_signal(spec.n, spec.k, spec.amplitude, seed);
      CorruptionSpec cs{Fraction(spec.eta), spec.corruption, spec.magnitude, spec.epsilon};
      return assemble_problem(std::move(x), std::move(w), cs,
                              gaussian_noise_with_l1(spec.m, grid_value, seed), seed);
    }
    case Experiment::kLowerBoundDense: {
      DenseMatrix x = sample_gaussian_design(spec.m, spec.n, seed);
      Vector w = sample_sparse_signal(spec.n, spec.k, spec.amplitude, seed);
      CorruptionSpec cs{Fraction(0.0), CorruptionKind::kDenseAdversary, 0.0, grid_value};
      return assemble_problem(std::move(x), std::move(w), cs, Vector{}, seed);
    }
  }
  throw std::logic_error("unhandled experiment");
}

SolverResult solve_with_method(const SweepSpec& spec, const std::string& method,
                               const Problem& problem, double p) {
  const SolverOptions& opts = spec.solver;
  if (method == "l1") return l1_regress(problem.x, problem.y, opts);
  if (method == "l1_constrained") {
    double lambda = l1_norm(problem.w_star);
    if (spec.lambda_policy == LambdaPolicy::kMultiple) lambda *= spec.lambda_multiple;
    return l1_regress_constrained(problem.x, problem.y, lambda, opts);
  }
  if (method == "lp") {
    if (p == 1.0) return l1_regress(problem.x, problem.y, opts);
    return lp_regress(problem.x, problem.y, p, opts);
  }
  if (method == "ls") return least_squares(problem.x, problem.y);
  if (method == "torrent") {
    const double eta = problem.adversary_name == "dense_adversary" ? spec.eta : problem.eta;
    return torrent_iht(problem.x, problem.y, Fraction(eta), opts);
  }
  if (method == "filter") {
    if (problem.cols() != 1) throw std::invalid_argument("the filter method needs n = 1");
    return filter_regress_1d(problem.x.data(), problem.y, Fraction(problem.eta), opts);
  }
  throw std::invalid_argument("unknown method '" + method + "'");
}

SweepResult run_breakdown_sweep(const SweepSpec& spec) {
  require_experiment(spec, Experiment::kBreakdown1d);
  return run_method_grid(spec, nullptr);
}

SweepResult run_sample_complexity_sweep(const SweepSpec& spec) {
  require_experiment(spec, Experiment::kSampleComplexity);
  return run_method_grid(spec, nullptr);
}

SweepResult run_dense_noise_scaling(const SweepSpec& spec) {
  require_experiment(spec, Experiment::kDenseNoiseScaling);
  return run_method_grid(spec, nullptr);
}

SweepResult run_lower_bound_dense(const SweepSpec& spec) {
  require_experiment(spec, Experiment::kLowerBoundDense);
  return run_method_grid(spec, [](SweepRow& row, const Problem& problem) {
    if (!std::isfinite(row.relative_l2_error)) return;
    const double noise = l1_norm(problem.d);
    const double abs_error = row.relative_l2_error * l2_norm(problem.w_star);
    row.value = noise > 0.0 ? static_cast<double>(problem.rows()) * abs_error / noise : kInf;
  });
}

SweepResult run_p_threshold_curve(const SweepSpec& spec) {
  require_experiment(spec, Experiment::kPThresholdCurve);
  spec.validate();
  SweepResult result;
  result.experiment = spec.experiment;
  for (double p : spec.grid) {
    SweepRow row;
    row.method = "analytic";
    row.grid_value = p;
    row.converged = true;
    row.value = breakdown_threshold(p).value();
    result.rows.push_back(row);
  }
  if (!spec.empirical) return result;

  const std::size_t trials = spec.trials_per_point;
  std::vector<SweepRow> empirical(spec.grid.size() * trials);
  run_jobs(empirical.size(), spec.threads, [&](std::size_t job) {
    const std::size_t g = job / trials;
    const std::size_t t = job % trials;
    const double p = spec.grid[g];
    const std::uint64_t seed = job_seed(spec, g, t);
    SweepRow row;
    row.method = "lp";
    row.grid_value = p;
    row.trial = t;
    row.seed = seed;
    row.converged = true;
    row.value = kInf;  // no failure on the inner grid
    for (double eta : spec.inner_grid) {
      const Problem problem = make_instance(spec, eta, seed);
      const SweepRow inner = solve_row(spec, "lp", eta, t, seed, problem, p);
      row.iterations += inner.iterations;
      row.converged = row.converged && inner.converged;
      if (inner.relative_l2_error > kExactRecoveryThreshold) {
        row.value = eta;
        row.relative_l2_error = inner.relative_l2_error;
        row.objective = inner.objective;
        row.estimate_norm = inner.estimate_norm;
        break;
      }
    }
    empirical[job] = std::move(row);
  });
  result.rows.insert(result.rows.end(), empirical.begin(), empirical.end());
  return result;
}

SweepResult run_sweep(const SweepSpec& spec) {
  switch (spec.experiment) {
    case Experiment::kBreakdown1d: return run_breakdown_sweep(spec);
    case Experiment::kSampleComplexity: return run_sample_complexity_sweep(spec);
    case Experiment::kDenseNoiseScaling: return run_dense_noise_scaling(spec);
    case Experiment::kPThresholdCurve: return run_p_threshold_curve(spec);
    case Experiment::kLowerBoundDense: return run_lower_bound_dense(spec);
  }
  throw std::logic_error("unhandled experiment");
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<GridSummary> summarize(const SweepResult& result) {
  std::vector<GridSummary> out;
  std::size_t i = 0;
  while (i < result.rows.size()) {
    std::size_t j = i;
    std::vector<double> errors;
    std::vector<double> values;
    std::size_t successes = 0;
    while (j < result.rows.size() && result.rows[j].method == result.rows[i].method &&
           result.rows[j].grid_value == result.rows[i].grid_value) {
      errors.push_back(result.rows[j].relative_l2_error);
      values.push_back(result.rows[j].value);
      if (result.rows[j].relative_l2_error <= kExactRecoveryThreshold) ++successes;
      ++j;
    }
    GridSummary s;
    s.method = result.rows[i].method;
    s.grid_value = result.rows[i].grid_value;
    s.median_error = median(errors);
    s.median_value = median(values);
    s.success_fraction = static_cast<double>(successes) / static_cast<double>(errors.size());
    out.push_back(s);
    i = j;
  }
  return out;
}

std::optional<double> estimate_breakdown(const SweepResult& result, const std::string& method,
                                         double threshold) {
  for (const auto& s : summarize(result)) {
    if (s.method == method && s.median_error > threshold) return s.grid_value;
  }
  return std::nullopt;
}

RecoverySearch find_recovery_sample_size(const SweepSpec& spec, std::uint64_t seed,
                                         std::size_t m_start, std::size_t m_max) {
  require(m_start >= 1 && m_start <= m_max, "recovery search needs 1 <= m_start <= m_max");
  SweepSpec s = spec;
  s.experiment = Experiment::kSampleComplexity;
  RecoverySearch out;
  for (std::size_t m = m_start; m <= m_max; m *= 2) {
    const Problem problem = make_instance(s, static_cast<double>(m), seed);
    const SweepRow row = solve_row(s, "l1_constrained", static_cast<double>(m), 0, seed, problem, s.p);
    out.tried.push_back(m);
    out.errors.push_back(row.relative_l2_error);
    if (row.relative_l2_error <= kExactRecoveryThreshold) {
      out.recovered_at = m;
      break;
    }
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "method,grid_value,trial,seed,relative_l2_error,objective,iterations,converged,"
         "estimate_norm,value\n";
  for (const auto& r : result.rows) {
    out << r.method << ',' << format_double(r.grid_value) << ',' << r.trial << ',' << r.seed
        << ',' << format_double(r.relative_l2_error) << ',' << format_double(r.objective) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.estimate_norm)
        << ',' << format_double(r.value) << '\n';
  }
}

std::string sweep_summary_json(const SweepSpec& spec, const SweepResult& result) {
  using nlohmann::json;
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json doc;
  doc["experiment"] = std::string(experiment_name(spec.experiment));
  doc["base_seed"] = spec.base_seed;
  doc["trials_per_point"] = spec.trials_per_point;
  json points = json::array();
  for (const auto& s : summarize(result)) {
    points.push_back({{"method", s.method},
                      {"grid_value", s.grid_value},
                      {"median_error", num(s.median_error)},
                      {"success_fraction", s.success_fraction},
                      {"median_value", num(s.median_value)}});
  }
  doc["points"] = points;
  if (spec.experiment == Experiment::kBreakdown1d) {
    json breakdown = json::object();
    for (const auto& method : spec.methods) {
      const auto b = estimate_breakdown(result, method);
      breakdown[method] = b ? json(*b) : json(nullptr);
    }
    doc["breakdown"] = breakdown;
  }
  return doc.dump(2);
}

}  // namespace robustl1
