#include "robustl1/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "robustl1/random.hpp"

namespace robustl1 {

namespace {

Corruption negate_on(std::span<const double> signal, const IndexSet& chosen) {
  Corruption out;
  out.values.assign(signal.size(), 0.0);
  for (std::size_t i : chosen) {
    if (signal[i] == 0.0) continue;
    out.values[i] = -signal[i];
    out.indices.push_back(i);
  }
  return out;
}

// First `count` entries of a seeded Fisher–Yates shuffle of [0, n).
IndexSet random_subset(std::size_t n, std::size_t count, const CounterRng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(i, n - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(count);
  return perm;
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(path + ": malformed line '" + line + "'");
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace

std::string_view corruption_name(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kNone: return "none";
    case CorruptionKind::kTopkZeroing: return "topk_zeroing";
    case CorruptionKind::kRandomSign: return "random_sign";
    case CorruptionKind::kDenseAdversary: return "dense_adversary";
  }
  return "none";
}

CorruptionKind parse_corruption(std::string_view name) {
  for (auto kind : {CorruptionKind::kNone, CorruptionKind::kTopkZeroing,
                    CorruptionKind::kRandomSign, CorruptionKind::kDenseAdversary}) {
    if (corruption_name(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown corruption kind '" + std::string(name) + "'");
}

std::size_t Problem::sparsity() const {
  return static_cast<std::size_t>(
      std::count_if(w_star.begin(), w_star.end(), [](double v) { return v != 0.0; }));
}

void Problem::check_invariants() const {
  const std::size_t m = x.rows();
  if (w_star.size() != x.cols() || zeta.size() != m || d.size() != m || y.size() != m) {
    throw InvariantViolation("problem dimensions are inconsistent");
  }
  const Vector signal = matvec(x, w_star);
  for (std::size_t i = 0; i < m; ++i) {
    const double expected = (signal[i] + zeta[i]) + d[i];
    if (std::memcmp(&expected, &y[i], sizeof(double)) != 0) {
      throw InvariantViolation("y differs from X w* + zeta + d at row " + std::to_string(i));
    }
  }
  std::vector<char> marked(m, 0);
  for (std::size_t k = 0; k < corrupted_indices.size(); ++k) {
    const std::size_t i = corrupted_indices[k];
    if (i >= m || (k > 0 && corrupted_indices[k - 1] >= i)) {
      throw InvariantViolation("corrupted indices must be ascending and in range");
    }
    marked[i] = 1;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if ((zeta[i] != 0.0) != static_cast<bool>(marked[i])) {
      throw InvariantViolation("zeta support differs from corrupted indices at row " +
                               std::to_string(i));
    }
  }
}

DenseMatrix sample_gaussian_design(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("design dimensions must be positive");
  const CounterRng rng = make_rng(seed, Stream::kDesign);
  DenseMatrix x(m, n);
  auto data = x.data();
  for (std::size_t c = 0; c < data.size(); ++c) data[c] = rng.normal(c);
  return x;
}

Vector sample_sparse_signal(std::size_t n, std::size_t k, double amplitude, std::uint64_t seed) {
  if (k == 0 || k > n) {
    throw std::invalid_argument("sparsity k must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
  if (!std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be finite");
  const IndexSet support = random_subset(n, k, make_rng(seed, Stream::kSignalSupport));
  const CounterRng signs = make_rng(seed, Stream::kSignalSign);
  Vector w(n, 0.0);
  for (std::size_t s = 0; s < support.size(); ++s) {
    w[support[s]] = (signs.bits(s) & 1) ? -amplitude : amplitude;
  }
  return w;
}

Corruption corrupt_topk_zeroing(const DenseMatrix& x, std::span<const double> w_star,
                                Fraction eta) {
  const Vector signal = matvec(x, w_star);
  const std::size_t budget = fraction_floor(eta, signal.size());
  return negate_on(signal, top_abs_indices(signal, budget));
}

Corruption adversarial_dense_noise(const DenseMatrix& x, std::span<const double> w_star,
                                   double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.2)) {
    throw std::invalid_argument("dense adversary requires 0 < epsilon < 0.2, got " +
                                std::to_string(epsilon));
  }
  const Vector signal = matvec(x, w_star);
  const double kept = 1.0 - (eta0().value() + 0.5 * epsilon);
  const std::size_t count = fraction_floor(kept, signal.size());
  return negate_on(signal, bottom_abs_indices(signal, count));
}

Corruption random_corruption(std::size_t m, Fraction eta, double magnitude, std::uint64_t seed) {
  if (!std::isfinite(magnitude)) throw std::invalid_argument("magnitude must be finite");
  const CounterRng rng = make_rng(seed, Stream::kCorruption);
  IndexSet chosen = random_subset(m, fraction_floor(eta, m), rng);
  std::sort(chosen.begin(), chosen.end());
  Corruption out;
  out.values.assign(m, 0.0);
  if (magnitude == 0.0) return out;
  for (std::size_t i : chosen) {
    out.values[i] = (rng.bits(m + i) & 1) ? -magnitude : magnitude;
    out.indices.push_back(i);
  }
  return out;
}

Vector gaussian_noise_with_l1(std::size_t m, double l1_norm_target, std::uint64_t seed) {
  if (!(l1_norm_target >= 0.0)) throw std::invalid_argument("noise l1 norm must be >= 0");
  Vector d(m, 0.0);
  if (l1_norm_target == 0.0 || m == 0) return d;
  const CounterRng rng = make_rng(seed, Stream::kNoise);
  for (std::size_t i = 0; i < m; ++i) d[i] = rng.normal(i);
  const double factor = l1_norm_target / l1_norm(d);
  for (double& v : d) v *= factor;
  return d;
}

Problem assemble_problem(DenseMatrix x, Vector w_star, const CorruptionSpec& spec,
                         Vector dense_noise, std::uint64_t seed) {
  const std::size_t m = x.rows();
  if (w_star.size() != x.cols()) {
    throw DimensionError("w_star length " + std::to_string(w_star.size()) +
                         " does not match design columns " + std::to_string(x.cols()));
  }
  if (!dense_noise.empty() && dense_noise.size() != m) {
    throw DimensionError("dense noise length does not match design rows");
  }
  Problem p;
  p.seed = seed;
  p.eta = spec.eta;
  p.adversary_name = std::string(corruption_name(spec.kind));
  p.zeta.assign(m, 0.0);
  p.d = dense_noise.empty() ? Vector(m, 0.0) : std::move(dense_noise);

  switch (spec.kind) {
    case CorruptionKind::kNone:
      break;
    case CorruptionKind::kTopkZeroing: {
      Corruption c = corrupt_topk_zeroing(x, w_star, spec.eta);
      p.zeta = std::move(c.values);
      p.corrupted_indices = std::move(c.indices);
      break;
    }
    case CorruptionKind::kRandomSign: {
      Corruption c = random_corruption(m, spec.eta, spec.magnitude, seed);
      p.zeta = std::move(c.values);
      p.corrupted_indices = std::move(c.indices);
      break;
    }
    case CorruptionKind::kDenseAdversary: {
      if (l1_norm(p.d) != 0.0) {
        throw std::invalid_argument("the dense adversary cannot be combined with extra dense noise");
      }
      p.d = adversarial_dense_noise(x, w_star, spec.epsilon).values;
      break;
    }
  }

  const Vector signal = matvec(x, w_star);
  p.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) p.y[i] = (signal[i] + p.zeta[i]) + p.d[i];
  p.x = std::move(x);
  p.w_star = std::move(w_star);
  p.check_invariants();
  return p;
}

Problem assemble_problem(DenseMatrix x, Vector w_star, const CorruptionSpec& spec,
                         const NoiseGenerator& noise, std::uint64_t seed) {
  Vector d = noise ? noise(x.rows(), seed) : Vector{};
  return assemble_problem(std::move(x), std::move(w_star), spec, std::move(d), seed);
}

void write_problem(const std::string& directory, const Problem& problem) {
  problem.check_invariants();
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  write_matrix_csv((dir / "X.csv").string(), problem.x);
  write_vector_csv((dir / "wstar.csv").string(), problem.w_star);
  write_vector_csv((dir / "y.csv").string(), problem.y);
  write_vector_csv((dir / "zeta.csv").string(), problem.zeta);
  write_vector_csv((dir / "d.csv").string(), problem.d);
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot write manifest in " + directory);
  manifest << "m=" << problem.rows() << '\n'
           << "n=" << problem.cols() << '\n'
           << "k=" << problem.sparsity() << '\n'
           << "eta=" << format_double(problem.eta) << '\n'
           << "adversary=" << problem.adversary_name << '\n'
           << "seed=" << problem.seed << '\n';
}

Problem read_problem(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  const auto manifest = read_manifest((dir / "manifest.txt").string());
  auto field = [&](const std::string& key) -> const std::string& {
    const auto it = manifest.find(key);
    if (it == manifest.end()) throw std::invalid_argument("manifest lacks key '" + key + "'");
    return it->second;
  };
  Problem p;
  p.x = read_matrix_csv((dir / "X.csv").string());
  p.w_star = read_vector_csv((dir / "wstar.csv").string());
  p.y = read_vector_csv((dir / "y.csv").string());
  p.zeta = read_vector_csv((dir / "zeta.csv").string());
  p.d = read_vector_csv((dir / "d.csv").string());
  p.eta = std::stod(field("eta"));
  p.adversary_name = field("adversary");
  p.seed = std::stoull(field("seed"));
  if (std::stoull(field("m")) != p.x.rows() || std::stoull(field("n")) != p.x.cols()) {
    throw DimensionError("manifest dimensions disagree with X.csv");
  }
  for (std::size_t i = 0; i < p.zeta.size(); ++i) {
    if (p.zeta[i] != 0.0) p.corrupted_indices.push_back(i);
  }
  p.check_invariants();
  return p;
}

}  // namespace robustl1
