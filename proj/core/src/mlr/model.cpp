#include "sdca/mlr/model.hpp"

#include <cmath>

namespace sdca::mlr {

ModelState ModelState::zeros(std::size_t dimension, std::size_t num_classes) {
  const auto d = static_cast<Eigen::Index>(dimension);
  const auto q = static_cast<Eigen::Index>(num_classes);
  return ModelState{Matrix::Zero(d, q), Vector::Zero(q), Vector::Zero(d)};
}

double row_norm(const Matrix& W, std::size_t j, prox::Norm q) {
  const Vector row = W.row(static_cast<Eigen::Index>(j)).transpose();
  return prox::norm(row, q);
}

void ModelState::sync_group_norms(prox::Norm q) {
  t.resize(W.rows());
  for (Eigen::Index j = 0; j < W.rows(); ++j) t[j] = row_norm(W, static_cast<std::size_t>(j), q);
}

Vector ModelState::pack() const {
  const Eigen::Index dq = W.size();
  Vector x(dq + b.size() + t.size());
  x.head(dq) = Eigen::Map<const Vector>(W.data(), dq);
  x.segment(dq, b.size()) = b;
  x.tail(t.size()) = t;
  return x;
}

ModelState ModelState::unpack(const Vector& x, std::size_t dimension, std::size_t num_classes) {
  const auto d = static_cast<Eigen::Index>(dimension);
  const auto q = static_cast<Eigen::Index>(num_classes);
  if (x.size() != d * q + q + d) {
    throw std::invalid_argument("packed model has the wrong length");
  }
  ModelState m;
  m.W = Eigen::Map<const Matrix>(x.data(), d, q);
  m.b = x.segment(d * q, q);
  m.t = x.tail(d);
  return m;
}

Vector logits(const ModelState& model, const data::SparseRow& x) {
  Vector s = model.b;
  const auto d = static_cast<data::FeatureIndex>(model.W.rows());
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    if (x.indices[k] >= d) {
      throw std::invalid_argument("observation has more features than the model");
    }
    s.noalias() += x.values[k] * model.W.row(x.indices[k]).transpose();
  }
  return s;
}

namespace {

void require_finite(const Vector& s) {
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s[k])) {
      throw NumericError(static_cast<std::size_t>(k + 1),
                         "logit of class " + std::to_string(k + 1) + " is not finite");
    }
  }
}

}  // namespace

Vector softmax_probabilities(const ModelState& model, const data::SparseRow& x) {
  const Vector s = logits(model, x);
  require_finite(s);
  const Vector e = (s.array() - s.maxCoeff()).exp();
  return e / e.sum();
}

double nll_loss(const ModelState& model, const data::SparseRow& x, int y) {
  if (y < 1 || y > static_cast<int>(model.num_classes())) {
    throw std::invalid_argument("label outside 1..Q");
  }
  const Vector s = logits(model, x);
  require_finite(s);
  const double m = s.maxCoeff();
  return m + std::log((s.array() - m).exp().sum()) - s[y - 1];
}

int predict(const ModelState& model, const data::SparseRow& x) {
  const Vector s = logits(model, x);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < s.size(); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return static_cast<int>(best) + 1;
}

}  // namespace sdca::mlr
