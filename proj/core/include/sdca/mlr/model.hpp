#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "sdca/data/dataset.hpp"
#include "sdca/prox/prox.hpp"

namespace sdca::mlr {

using Vector = Eigen::VectorXd;
/// Row-major so that each feature's class weights W_{j,:} are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when logits overflow to inf/nan.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::size_t class_index, const std::string& what)
      : std::runtime_error(what), class_index_(class_index) {}
  /// 1-based class whose logit was not finite.
  std::size_t class_index() const { return class_index_; }

 private:
  std::size_t class_index_;
};

/// (W, b, t): weights d x Q, biases Q and group-norm bounds d.
struct ModelState {
  Matrix W;
  Vector b;
  Vector t;

  static ModelState zeros(std::size_t dimension, std::size_t num_classes);

  std::size_t dimension() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(W.cols()); }

  /// Sets t_j = ||W_{j,:}||_q.
  void sync_group_norms(prox::Norm q);
  bool all_finite() const { return W.allFinite() && b.allFinite() && t.allFinite(); }

  /// Flat layout [W row-major (d*Q), b (Q), t (d)] used by the DC engine.
  Vector pack() const;
  static ModelState unpack(const Vector& x, std::size_t dimension, std::size_t num_classes);
};

/// ||W_{j,:}||_q, the single definition used for t updates and feasibility.
double row_norm(const Matrix& W, std::size_t j, prox::Norm q);

/// b + W^T x.
Vector logits(const ModelState& model, const data::SparseRow& x);

/// Softmax of the logits with max-subtraction. Throws NumericError naming
/// the first non-finite logit.
Vector softmax_probabilities(const ModelState& model, const data::SparseRow& x);

/// -log p(y | x), y in 1..Q.
double nll_loss(const ModelState& model, const data::SparseRow& x, int y);

/// argmax of the logits; ties go to the smallest class. Returns 1..Q.
int predict(const ModelState& model, const data::SparseRow& x);

}  // namespace sdca::mlr
