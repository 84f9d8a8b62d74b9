#include "sdca/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sdca/dc/errors.hpp"
#include "sdca/random.hpp"

namespace sdca::data {

namespace {

// Balanced labels 1..Q in random order.
std::vector<int> balanced_labels(std::size_t n, int num_classes, SplitMix64& rng) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(num_classes)) + 1;
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

std::string describe(const std::string& kind, std::size_t n, std::size_t d, std::uint64_t seed) {
  std::ostringstream os;
  os << "generator:" << kind << " n=" << n << " d=" << d << " seed=" << seed;
  return os.str();
}

}  // namespace

Dataset generate_sim1(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw DataError("sim1 needs n >= 4");
  constexpr std::size_t kDim = 50;
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal;
  const auto labels = balanced_labels(n, 4, rng);
  Dataset out(kDim, 4);
  std::vector<double> row(kDim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(labels[i] - 1);
    for (std::size_t j = 0; j < kDim; ++j) {
      const double mean = (j >= 10 * k && j < 10 * (k + 1)) ? 0.5 : 0.0;
      row[j] = mean + normal(rng);
    }
    out.add_dense_row(row, labels[i]);
  }
  out.provenance = describe("sim1", n, kDim, seed);
  return out;
}

Dataset generate_sim2(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw DataError("sim2 needs n >= 3");
  constexpr int kDim = 50;
  constexpr int kBlock = 10;
  Eigen::MatrixXd sigma(kBlock, kBlock);
  for (int a = 0; a < kBlock; ++a) {
    for (int b = 0; b < kBlock; ++b) sigma(a, b) = std::pow(0.6, std::abs(a - b));
  }
  const Eigen::MatrixXd chol = sigma.llt().matrixL();

  SplitMix64 rng(seed);
  std::normal_distribution<double> normal;
  const auto labels = balanced_labels(n, 3, rng);
  Dataset out(kDim, 3);
  std::vector<double> row(kDim);
  Eigen::VectorXd z(kBlock);
  for (std::size_t i = 0; i < n; ++i) {
    const double level = 0.4 * (labels[i] - 1);
    for (int blk = 0; blk < kDim / kBlock; ++blk) {
      for (int a = 0; a < kBlock; ++a) z[a] = normal(rng);
      const Eigen::VectorXd x = chol * z;
      for (int a = 0; a < kBlock; ++a) {
        const int j = blk * kBlock + a;
        row[static_cast<std::size_t>(j)] = (j < 40 ? level : 0.0) + x[a];
      }
    }
    out.add_dense_row(row, labels[i]);
  }
  out.provenance = describe("sim2", n, kDim, seed);
  return out;
}

Dataset generate_sim3(std::size_t n_per_class, std::size_t d, std::uint64_t seed) {
  if (d <= 100) throw dc::ConfigError("sim3 needs d > 100");
  if (n_per_class == 0) throw DataError("sim3 needs at least one row per class");
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal;
  const auto labels = balanced_labels(4 * n_per_class, 4, rng);
  Dataset out(d, 4);
  std::vector<double> row(d);
  for (int label : labels) {
    const double mean = (label - 1) / 3.0;
    for (std::size_t j = 0; j < d; ++j) row[j] = (j < 100 ? mean : 0.0) + normal(rng);
    out.add_dense_row(row, label);
  }
  out.provenance = describe("sim3", labels.size(), d, seed);
  return out;
}

std::string GeneratorSpec::to_text() const {
  std::ostringstream os;
  os << "kind = " << kind << "\nn = " << n << "\nd = " << d << "\nseed = " << seed << "\n";
  return os.str();
}

GeneratorSpec GeneratorSpec::parse(const std::string& text) {
  GeneratorSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), '=', ' ');
    std::istringstream fields(line);
    std::string key, value;
    if (!(fields >> key)) continue;
    if (!(fields >> value)) {
      throw DataError("generator spec line " + std::to_string(line_no) + ": missing value for '" + key + "'");
    }
    try {
      if (key == "kind") {
        spec.kind = value;
      } else if (key == "n") {
        spec.n = std::stoull(value);
      } else if (key == "d") {
        spec.d = std::stoull(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else {
        throw DataError("generator spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw DataError("generator spec line " + std::to_string(line_no) + ": bad value '" + value + "'");
    }
  }
  return spec;
}

GeneratorSpec GeneratorSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open generator spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Dataset generate(const GeneratorSpec& spec) {
  if (spec.kind == "sim1") return generate_sim1(spec.n, spec.seed);
  if (spec.kind == "sim2") return generate_sim2(spec.n, spec.seed);
  if (spec.kind == "sim3") {
    return generate_sim3(std::max<std::size_t>(1, spec.n / 4), spec.d == 0 ? 500 : spec.d, spec.seed);
  }
  throw DataError("unknown generator kind '" + spec.kind + "'");
}

}  // namespace sdca::data
