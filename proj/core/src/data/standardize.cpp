#include "sdca/data/standardize.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

namespace sdca::data {

Scaler Scaler::fit(const Dataset& train) {
  if (train.size() == 0) throw DataError("cannot fit a scaler on an empty dataset");
  const std::size_t d = train.dimension();
  const double n = static_cast<double>(train.size());
  std::vector<double> sum(d, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const SparseRow row = train.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) sum[row.indices[k]] += row.values[k];
  }
  Scaler s;
  s.mean_.resize(d);
  for (std::size_t j = 0; j < d; ++j) s.mean_[j] = sum[j] / n;
  // Two-pass variance; implicit zeros contribute mean^2 each.
  std::vector<double> sq(d, 0.0);
  std::vector<std::size_t> present(d, 0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const SparseRow row = train.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      const double dev = row.values[k] - s.mean_[row.indices[k]];
      sq[row.indices[k]] += dev * dev;
      ++present[row.indices[k]];
    }
  }
  s.scale_.resize(d);
  s.constant_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double zeros = n - static_cast<double>(present[j]);
    const double var = (sq[j] + zeros * s.mean_[j] * s.mean_[j]) / n;
    s.constant_[j] = var < kVarianceFloor;
    s.scale_[j] = s.constant_[j] ? 1.0 : std::sqrt(var);
    if (s.constant_[j]) s.mean_[j] = 0.0;
  }
  return s;
}

Dataset Scaler::transform(const Dataset& dataset) const {
  if (dataset.dimension() != mean_.size()) {
    throw DataError("scaler dimension does not match dataset");
  }
  const std::size_t d = mean_.size();
  Dataset out(d, dataset.num_classes());
  out.provenance = dataset.provenance + " standardized";
  out.label_names = dataset.label_names;
  std::vector<double> dense(d);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    std::fill(dense.begin(), dense.end(), 0.0);
    const SparseRow row = dataset.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) dense[row.indices[k]] = row.values[k];
    for (std::size_t j = 0; j < d; ++j) {
      if (!constant_[j]) dense[j] = (dense[j] - mean_[j]) / scale_[j];
    }
    out.add_dense_row(dense, dataset.label(i));
  }
  return out;
}

void Scaler::write(std::ostream& out) const {
  out << "scaler " << mean_.size() << '\n' << std::setprecision(17);
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    out << mean_[j] << ' ' << scale_[j] << ' ' << static_cast<int>(constant_[j]) << '\n';
  }
}

Scaler Scaler::read(std::istream& in) {
  std::string tag;
  std::size_t d = 0;
  if (!(in >> tag >> d) || tag != "scaler") throw DataError("malformed scaler header");
  Scaler s;
  s.mean_.resize(d);
  s.scale_.resize(d);
  s.constant_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    int constant = 0;
    if (!(in >> s.mean_[j] >> s.scale_[j] >> constant)) throw DataError("truncated scaler");
    s.constant_[j] = static_cast<char>(constant != 0);
  }
  return s;
}

Scaler standardize(DataSplit& split) {
  Scaler scaler = Scaler::fit(split.train);
  split.train = scaler.transform(split.train);
  split.validation = scaler.transform(split.validation);
  split.test = scaler.transform(split.test);
  return scaler;
}

}  // namespace sdca::data
