#include "robustl1/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "robustl1/random.hpp"

namespace robustl1 {

namespace {

using IndexSet = std::vector<std::size_t>;

// Removal threshold growth per unit of corruption fraction in the 1-D filter.
constexpr double kFilterVarianceSlope = 2.0;
constexpr double kIrlsSmoothingFloor = 1e-8;
constexpr double kIrlsStall = 1e-9;
constexpr std::size_t kRecurrenceRefresh = 50;
constexpr std::size_t kCertifyEvery = 100;
constexpr std::size_t kCertifyMaxColumns = 64;

void require_rows(const DenseMatrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) {
    throw DimensionError("design has " + std::to_string(x.rows()) + " rows but y has length " +
                         std::to_string(y.size()));
  }
  if (x.cols() == 0 || x.rows() == 0) throw DimensionError("empty design matrix");
}

SpdFactor factor_or_rank_error(const DenseMatrix& g, const char* who) {
  try {
    return SpdFactor(g);
  } catch (const NotPositiveDefiniteError&) {
    throw RankDeficientError(std::string(who) + ": design does not have full column rank");
  }
}

Vector residual(const DenseMatrix& x, std::span<const double> y, std::span<const double> w) {
  return subtract(y, matvec(x, w));
}

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return acc;
}

double mean_abs(std::span<const double> v) {
  return v.empty() ? 0.0 : l1_norm(v) / static_cast<double>(v.size());
}

// Candidate basic solutions near `w`: interpolants through the rows of
// smallest residual. Returns the best one if it beats `objective`.
std::optional<Vector> polish_basic(const DenseMatrix& x, std::span<const double> y,
                                   std::span<const double> w, double objective,
                                   double l1_cap) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  if (m < n) return std::nullopt;
  const Vector r = residual(x, y, w);
  const std::size_t pool = n <= 3 ? std::min(m, n + 2) : n;
  IndexSet rows = bottom_abs_indices(r, pool);
  // Order the pool by residual magnitude so the first subset is the n smallest.
  std::stable_sort(rows.begin(), rows.end(),
                   [&](std::size_t a, std::size_t b) { return std::fabs(r[a]) < std::fabs(r[b]); });

  std::optional<Vector> best;
  double best_objective = objective;
  std::vector<bool> pick(pool, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
  do {
    IndexSet subset;
    for (std::size_t i = 0; i < pool; ++i)
      if (pick[i]) subset.push_back(rows[i]);
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = y[subset[i]];
    try {
      const Vector candidate = LuFactor(x.select_rows(subset)).solve(rhs);
      if (l1_norm(candidate) > l1_cap) continue;
      const double obj = l1_objective(x, y, candidate);
      if (obj < best_objective) {
        best_objective = obj;
        best = candidate;
      }
    } catch (const SingularMatrixError&) {
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Basic solution through the n rows of smallest residual at `w`, returned
// only when it is a nondegenerate vertex carrying an optimality certificate:
// Σ_{i∉B} sign(rᵢ) xᵢ = X_Bᵀ λ with ‖λ‖∞ ≤ 1.
std::optional<Vector> certified_vertex(const DenseMatrix& x, std::span<const double> y,
                                       std::span<const double> w) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  if (m <= n) return std::nullopt;
  const IndexSet basis = bottom_abs_indices(residual(x, y, w), n);
  const DenseMatrix xb = x.select_rows(basis);
  Vector yb(n);
  for (std::size_t i = 0; i < n; ++i) yb[i] = y[basis[i]];
  try {
    Vector vertex = LuFactor(xb).solve(yb);
    const Vector r = residual(x, y, vertex);
    const double tiny = 1e-12 * std::max(1.0, linf_norm(y));
    std::vector<char> in_basis(m, 0);
    for (std::size_t i : basis) in_basis[i] = 1;
    Vector g(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (in_basis[i]) continue;
      if (std::fabs(r[i]) <= tiny) return std::nullopt;
      const double sign = r[i] > 0.0 ? 1.0 : -1.0;
      const auto row = x.row(i);
      for (std::size_t j = 0; j < n; ++j) g[j] += sign * row[j];
    }
    const Vector lambda = LuFactor(xb.transpose()).solve(g);
    if (linf_norm(lambda) <= 1.0 + 1e-10) return vertex;
  } catch (const SingularMatrixError&) {
  }
  return std::nullopt;
}

// Solves (XᵀX + βI) w = r. Wide designs with β > 0 factor the m×m matrix
// XXᵀ + βI instead and apply the Woodbury identity.
class NormalSystem {
 public:
  NormalSystem(const DenseMatrix& x, double beta, const char* who)
      : x_(x), beta_(beta), wide_(beta > 0.0 && x.rows() < x.cols()) {
    if (wide_) {
      DenseMatrix k = gram(x.transpose());
      for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += beta;
      factor_.emplace(k);
    } else {
      gram_ = gram(x);
      DenseMatrix g = gram_;
      for (std::size_t j = 0; j < g.rows(); ++j) g(j, j) += beta;
      factor_.emplace(factor_or_rank_error(g, who));
    }
  }

  void solve_in_place(Vector& r) const {
    if (!wide_) {
      factor_->solve_in_place(r);
      return;
    }
    Vector t = matvec(x_, r);
    factor_->solve_in_place(t);
    const Vector back = matvec_transpose(x_, t);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = (r[j] - back[j]) / beta_;
  }

  bool wide() const { return wide_; }
  /// XᵀX; empty for wide systems.
  const DenseMatrix& gram_matrix() const { return gram_; }

 private:
  const DenseMatrix& x_;
  double beta_;
  bool wide_;
  DenseMatrix gram_;
  std::optional<SpdFactor> factor_;
};

struct AdmmProblem {
  const DenseMatrix& x;
  std::span<const double> y;
  std::optional<double> lambda;  // set for the ball-constrained variant
};

SolverResult run_admm(const AdmmProblem& prob, const SolverOptions& opts) {
  const DenseMatrix& x = prob.x;
  const std::span<const double> y = prob.y;
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  const bool constrained = prob.lambda.has_value();
  const double lambda = prob.lambda.value_or(0.0);

  double beta = 0.0;
  if (constrained) {
    const double trace = squared_norm(x.data());
    beta = opts.penalty * std::max(trace / static_cast<double>(n), 1e-12);
  }
  const NormalSystem system(x, beta, constrained ? "l1_regress_constrained" : "l1_regress");
  const Vector xty = matvec_transpose(x, y);
  // Direct Xᵀu costs mn per iteration, the recurrence n².
  const bool direct_xtu = system.wide() || m <= n;

  // Warm start: (ridge) least squares, projected when constrained.
  Vector w = xty;
  system.solve_in_place(w);
  Vector c = constrained ? project_l1_ball(w, lambda) : Vector{};
  Vector v(constrained ? n : 0, 0.0);
  Vector xw = matvec(x, w);
  Vector z = subtract(xw, y);
  Vector u(m, 0.0);

  const double residual_scale = mean_abs(z);
  double rho = opts.penalty / (residual_scale > 0.0 ? residual_scale : 1.0);

  Vector xtz = matvec_transpose(x, z);
  Vector xtu(n, 0.0);
  const double y_norm = l2_norm(y);

  SolverResult result;
  Vector best = constrained ? c : w;
  double best_objective = constrained ? l1_objective(x, y, c) : l1_norm(z);

  // Vertex certificates cost O(n³); skipped for large n.
  const bool certify = m > n && n <= kCertifyMaxColumns;
  std::optional<Vector> certified;

  Vector rhs(n);
  Vector z_old(m);
  Vector c_old(constrained ? n : 0);
  std::size_t iter = 0;
  for (iter = 1; iter <= opts.max_iterations; ++iter) {
    for (std::size_t j = 0; j < n; ++j) {
      rhs[j] = xty[j] + xtz[j] - xtu[j];
      if (constrained) rhs[j] += beta * (c[j] - v[j]);
    }
    system.solve_in_place(rhs);
    w.swap(rhs);
    xw = matvec(x, w);

    z_old.swap(z);
    const double threshold = 1.0 / rho;
    for (std::size_t i = 0; i < m; ++i) {
      const double t = xw[i] - y[i] + u[i];
      z[i] = t > threshold ? t - threshold : (t < -threshold ? t + threshold : 0.0);
    }
    if (constrained) {
      c_old.swap(c);
      Vector shifted = add(w, v);
      c = project_l1_ball(shifted, lambda);
    }

    double primal_sq = 0.0;
    double du_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = xw[i] - y[i] - z[i];
      u[i] += r;
      primal_sq += r * r;
    }
    du_sq = primal_sq;
    double dc_sq = 0.0;
    double dv_sq = 0.0;
    if (constrained) {
      for (std::size_t j = 0; j < n; ++j) {
        const double r = w[j] - c[j];
        v[j] += r;
        dv_sq += r * r;
        const double dc = c[j] - c_old[j];
        dc_sq += dc * dc;
      }
      primal_sq += beta * dv_sq;
    }

    const Vector xtz_new = matvec_transpose(x, z);
    double dual_sq = 0.0;
    double dz_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = xtz_new[j] - xtz[j];
      if (constrained) s += beta * (c[j] - c_old[j]);
      dual_sq += s * s;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double dz = z[i] - z_old[i];
      dz_sq += dz * dz;
    }

    // Xᵀu follows u += Xw - y - z; refreshed periodically against drift.
    if (direct_xtu || iter % kRecurrenceRefresh == 0) {
      xtu = matvec_transpose(x, u);
    } else {
      const Vector gw = matvec(system.gram_matrix(), w);
      for (std::size_t j = 0; j < n; ++j) xtu[j] += gw[j] - xty[j] - xtz_new[j];
    }
    xtz = xtz_new;

    const double primal = std::sqrt(primal_sq);
    const double dual = rho * std::sqrt(dual_sq);
    if (opts.record_history) {
      result.residual_history.push_back(primal);
      result.merit_history.push_back(rho * (dz_sq + beta * dc_sq) +
                                     rho * (du_sq + beta * dv_sq));
    }

    double xtu_norm_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = xtu[j] + (constrained ? beta * v[j] : 0.0);
      xtu_norm_sq += s * s;
    }
    const double eps_primal =
        std::sqrt(static_cast<double>(m + (constrained ? n : 0))) * opts.primal_tolerance +
        opts.relative_tolerance * std::max({l2_norm(xw), l2_norm(z), y_norm});
    const double eps_dual = std::sqrt(static_cast<double>(n)) * opts.dual_tolerance +
                            opts.relative_tolerance * rho * std::sqrt(xtu_norm_sq);

    result.final_primal_residual = primal;
    result.final_dual_residual = dual;

    if (!constrained) {
      double obj = 0.0;
      for (std::size_t i = 0; i < m; ++i) obj += std::fabs(y[i] - xw[i]);
      if (obj < best_objective) {
        best_objective = obj;
        best = w;
      }
    } else if (iter % 100 == 0) {
      const double obj = l1_objective(x, y, c);
      if (obj < best_objective) {
        best_objective = obj;
        best = c;
      }
    }

    if (primal <= eps_primal && dual <= eps_dual) {
      result.converged = true;
      result.termination = Termination::kConverged;
      break;
    }
    if (certify && iter % kCertifyEvery == 0) {
      if (auto vertex = certified_vertex(x, y, constrained ? c : w)) {
        if (!constrained || l1_norm(*vertex) < lambda) {
          certified = std::move(vertex);
          result.converged = true;
          result.termination = Termination::kExact;
          break;
        }
      }
    }

    if (opts.adaptive_penalty && iter < kPenaltyAdaptIterations && iter % 10 == 0) {
      double factor_change = 1.0;
      if (primal > 10.0 * dual) {
        factor_change = 2.0;
      } else if (dual > 10.0 * primal) {
        factor_change = 0.5;
      }
      if (factor_change != 1.0) {
        rho *= factor_change;
        for (double& e : u) e /= factor_change;
        for (double& e : xtu) e /= factor_change;
        for (double& e : v) e /= factor_change;
      }
    }
  }
  result.iterations = std::min(iter, opts.max_iterations);
  if (certified) {
    result.objective = l1_objective(x, y, *certified);
    result.estimate = std::move(*certified);
    return result;
  }

  Vector final_estimate = constrained ? c : w;
  double final_objective = l1_objective(x, y, final_estimate);
  if (!result.converged && best_objective < final_objective) {
    final_estimate = best;
    final_objective = best_objective;
  }
  if (opts.polish) {
    const double cap = constrained ? lambda * (1.0 + 1e-12) : std::numeric_limits<double>::infinity();
    if (auto polished = polish_basic(x, y, final_estimate, final_objective, cap)) {
      final_estimate = std::move(*polished);
      final_objective = l1_objective(x, y, final_estimate);
    }
  }
  result.estimate = std::move(final_estimate);
  result.objective = final_objective;
  return result;
}

}  // namespace

void SolverOptions::validate() const {
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(primal_tolerance > 0.0) || !(dual_tolerance > 0.0) || !(relative_tolerance >= 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (!(irls_smoothing > 0.0)) throw std::invalid_argument("irls_smoothing must be positive");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIterations: return "max_iterations";
    case Termination::kStalled: return "stalled";
    case Termination::kExact: return "exact";
  }
  return "unknown";
}

double l1_objective(const DenseMatrix& x, std::span<const double> y, std::span<const double> w) {
  return l1_norm(residual(x, y, w));
}

double lp_objective(const DenseMatrix& x, std::span<const double> y, std::span<const double> w,
                    double p) {
  const Vector r = residual(x, y, w);
  Vector powered(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) powered[i] = std::pow(std::fabs(r[i]), p);
  return compensated_sum(powered);
}

double relative_error(std::span<const double> estimate, std::span<const double> truth) {
  const double denom = l2_norm(truth);
  const double err = l2_norm(subtract(estimate, truth));
  return denom > 0.0 ? err / denom : err;
}

SolverResult l1_regress(const DenseMatrix& x, std::span<const double> y,
                        const SolverOptions& opts) {
  opts.validate();
  require_rows(x, y);
  if (x.rows() < x.cols()) {
    throw DimensionError("l1_regress needs at least as many rows as columns");
  }
  return run_admm({x, y, std::nullopt}, opts);
}

SolverResult l1_regress_constrained(const DenseMatrix& x, std::span<const double> y,
                                    double lambda, const SolverOptions& opts) {
  opts.validate();
  require_rows(x, y);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be a finite nonnegative number");
  }
  if (lambda == 0.0) {
    SolverResult result;
    result.estimate.assign(x.cols(), 0.0);
    result.objective = l1_norm(y);
    result.converged = true;
    result.termination = Termination::kExact;
    return result;
  }
  return run_admm({x, y, lambda}, opts);
}

Vector soft_threshold(std::span<const double> v, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("soft_threshold: theta must be >= 0");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::fabs(v[i]) - theta;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

Vector project_l1_ball(std::span<const double> v, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("project_l1_ball: lambda must be >= 0");
  if (l1_norm(v) <= lambda) return Vector(v.begin(), v.end());
  if (lambda == 0.0) return Vector(v.size(), 0.0);
  // Sort-based simplex threshold on |v|.
  Vector mags(v.size());
  std::transform(v.begin(), v.end(), mags.begin(), [](double e) { return std::fabs(e); });
  Vector sorted = mags;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - lambda) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = mags[i] - theta;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  // Rounding can leave the sum a few ulps above lambda; pull it back inside.
  const double total = l1_norm(out);
  if (total > lambda) {
    const double shrink = lambda / total;
    for (double& e : out) e *= shrink;
  }
  return out;
}

SolverResult least_squares(const DenseMatrix& x, std::span<const double> y) {
  require_rows(x, y);
  if (x.rows() < x.cols()) throw RankDeficientError("least_squares: fewer rows than columns");
  const SpdFactor factor = factor_or_rank_error(gram(x), "least_squares");
  SolverResult result;
  result.estimate = factor.solve(matvec_transpose(x, y));
  result.iterations = 1;
  result.objective = l1_objective(x, y, result.estimate);
  result.converged = true;
  result.termination = Termination::kExact;
  return result;
}

SolverResult torrent_iht(const DenseMatrix& x, std::span<const double> y, Fraction eta,
                         const SolverOptions& opts) {
  opts.validate();
  require_rows(x, y);
  if (!(eta.value() < 0.5)) throw std::invalid_argument("torrent_iht requires eta < 0.5");
  const std::size_t m = x.rows();
  const std::size_t keep = m - fraction_floor(eta, m);
  if (keep < x.cols()) throw RankDeficientError("torrent_iht: too few trusted rows");

  Vector trusted(m, 1.0);
  IndexSet active(m);
  std::iota(active.begin(), active.end(), std::size_t{0});
  SolverResult result;
  Vector w;
  for (std::size_t iter = 1; iter <= opts.max_iterations; ++iter) {
    Vector weighted_y(m);
    for (std::size_t i = 0; i < m; ++i) weighted_y[i] = trusted[i] * y[i];
    const SpdFactor factor = factor_or_rank_error(weighted_gram(x, trusted), "torrent_iht");
    w = factor.solve(matvec_transpose(x, weighted_y));
    result.iterations = iter;
    const Vector r = residual(x, y, w);
    IndexSet next = bottom_abs_indices(r, keep);
    if (next == active) {
      result.converged = true;
      result.termination = Termination::kConverged;
      break;
    }
    active = std::move(next);
    std::fill(trusted.begin(), trusted.end(), 0.0);
    for (std::size_t i : active) trusted[i] = 1.0;
  }
  result.estimate = w;
  result.objective = l1_objective(x, y, w);
  return result;
}

SolverResult filter_regress_1d(std::span<const double> x, std::span<const double> y,
                               Fraction eta, const SolverOptions& opts) {
  opts.validate();
  if (x.size() != y.size()) throw DimensionError("filter_regress_1d: x and y lengths differ");
  if (x.empty()) throw std::invalid_argument("filter_regress_1d: empty input");
  const std::size_t m = x.size();
  Vector ratio(m, 0.0);
  Vector weight(m, 0.0);
  std::vector<char> alive(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] == 0.0) continue;
    ratio[i] = y[i] / x[i];
    weight[i] = std::fabs(x[i]);
    alive[i] = 1;
  }

  SolverResult result;
  const double slack = 1.0 + kFilterVarianceSlope * eta.value();
  double mean = 0.0;
  for (std::size_t round = 0;; ++round) {
    Vector wsum;
    Vector wr;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      wsum.push_back(weight[i]);
      wr.push_back(weight[i] * ratio[i]);
    }
    if (wsum.empty()) throw std::runtime_error("filter_regress_1d: every sample was removed");
    const double total = compensated_sum(wsum);
    mean = compensated_sum(wr) / total;
    Vector spread;
    for (std::size_t i = 0; i < m; ++i) {
      if (alive[i]) spread.push_back(weight[i] * (ratio[i] - mean) * (ratio[i] - mean));
    }
    const double variance = compensated_sum(spread) / total;
    result.iterations = round;
    if (variance <= opts.primal_tolerance * (1.0 + mean * mean) * slack) {
      result.converged = true;
      result.termination = Termination::kConverged;
      break;
    }
    std::size_t worst = m;
    double worst_dev = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      const double dev = (ratio[i] - mean) * (ratio[i] - mean);
      if (dev > worst_dev) {
        worst_dev = dev;
        worst = i;
      }
    }
    alive[worst] = 0;
  }
  result.estimate = {mean};
  Vector r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - x[i] * mean;
  result.objective = l1_norm(r);
  return result;
}

namespace {

using IndexSet = std::vector<std::size_t>;

struct IrlsOutcome {
  Vector estimate;
  std::size_t iterations = 0;
  bool converged = false;
};

double smoothed_lp(std::span<const double> r, double p, double mu) {
  Vector terms(r.size());
  const double mu_sq = mu * mu;
  for (std::size_t i = 0; i < r.size(); ++i) terms[i] = std::pow(r[i] * r[i] + mu_sq, 0.5 * p);
  return compensated_sum(terms);
}

IrlsOutcome irls(const DenseMatrix& x, std::span<const double> y, double p, Vector w,
                 const SolverOptions& opts) {
  const std::size_t m = x.rows();
  Vector r = residual(x, y, w);
  const double rms = std::sqrt(squared_norm(r) / static_cast<double>(m));
  IrlsOutcome out;
  if (rms == 0.0) {
    out.estimate = std::move(w);
    out.converged = true;
    return out;
  }
  double mu = std::max(opts.irls_smoothing * rms, kIrlsSmoothingFloor);
  double current = smoothed_lp(r, p, mu);
  Vector weights(m);
  Vector weighted_y(m);
  for (std::size_t iter = 1; iter <= opts.max_iterations; ++iter) {
    out.iterations = iter;
    for (std::size_t i = 0; i < m; ++i) {
      weights[i] = std::pow(r[i] * r[i] + mu * mu, 0.5 * p - 1.0);
      weighted_y[i] = weights[i] * y[i];
    }
    Vector candidate;
    try {
      candidate = SpdFactor(weighted_gram(x, weights)).solve(matvec_transpose(x, weighted_y));
    } catch (const NotPositiveDefiniteError&) {
      break;
    }
    Vector r_new = residual(x, y, candidate);
    const double next = smoothed_lp(r_new, p, mu);
    const bool improved = next <= current;
    if (improved) {
      w = std::move(candidate);
      r = std::move(r_new);
    }
    const double decrease = improved ? (current - next) / std::max(current, 1e-300) : 0.0;
    if (improved) current = next;
    if (decrease < kIrlsStall) {
      if (mu <= kIrlsSmoothingFloor) {
        out.converged = true;
        break;
      }
      mu = std::max(0.5 * mu, kIrlsSmoothingFloor);
      current = smoothed_lp(r, p, mu);
    }
  }
  out.estimate = std::move(w);
  return out;
}

}  // namespace

SolverResult lp_regress(const DenseMatrix& x, std::span<const double> y, double p,
                        const SolverOptions& opts) {
  opts.validate();
  require_rows(x, y);
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("lp_regress requires 0 < p < 1");
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  if (m < n) throw DimensionError("lp_regress needs at least as many rows as columns");

  std::vector<Vector> starts;
  starts.push_back(l1_regress(x, y, opts).estimate);
  const CounterRng rng = make_rng(opts.seed, Stream::kSolver);
  for (std::size_t restart = 0; restart < opts.lp_restarts; ++restart) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + rng.below(restart * n + i, m - i);
      std::swap(perm[i], perm[j]);
    }
    perm.resize(n);
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = y[perm[i]];
    try {
      starts.push_back(LuFactor(x.select_rows(perm)).solve(rhs));
    } catch (const SingularMatrixError&) {
    }
  }

  SolverResult result;
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& start : starts) {
    IrlsOutcome run = irls(x, y, p, start, opts);
    const double objective = lp_objective(x, y, run.estimate, p);
    result.iterations += run.iterations;
    if (objective < best) {
      best = objective;
      result.estimate = std::move(run.estimate);
      result.converged = run.converged;
    }
  }
  result.objective = best;
  result.termination = result.converged ? Termination::kConverged : Termination::kMaxIterations;
  return result;
}

Vector oracle_l1_enum(const DenseMatrix& x, std::span<const double> y) {
  require_rows(x, y);
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  if (m > 12 || n > 3 || m < n) {
    throw std::invalid_argument("oracle_l1_enum supports n <= m <= 12 and n <= 3");
  }
  std::vector<bool> pick(m, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
  std::optional<Vector> best;
  double best_objective = std::numeric_limits<double>::infinity();
  do {
    IndexSet subset;
    for (std::size_t i = 0; i < m; ++i)
      if (pick[i]) subset.push_back(i);
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = y[subset[i]];
    try {
      Vector candidate = LuFactor(x.select_rows(subset)).solve(rhs);
      const double obj = l1_objective(x, y, candidate);
      if (obj < best_objective) {
        best_objective = obj;
        best = std::move(candidate);
      }
    } catch (const SingularMatrixError&) {
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  if (!best) throw SingularMatrixError("oracle_l1_enum: every row subset is singular");
  return *best;
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw std::invalid_argument("weighted_median: empty input");
  if (values.size() != weights.size()) {
    throw DimensionError("weighted_median: values and weights differ in length");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weighted_median: weights must be finite and nonnegative");
    }
  }
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) throw std::invalid_argument("weighted_median: weights are all zero");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weights[i];
    if (cumulative >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

}  // namespace robustl1
