#include "sdca/mlr/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdca::mlr {

namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void MlrDcSpec::validate() const {
  if (dataset == nullptr) throw std::invalid_argument("MLR spec has no dataset");
  penalty.validate();
  if (!(lipschitz > 0.0)) throw std::invalid_argument("Lipschitz estimate must be positive");
  if (!(rho > lipschitz)) throw std::invalid_argument("rho must exceed the Lipschitz estimate");
}

double estimate_lipschitz(const data::Dataset& dataset) {
  if (dataset.size() == 0) throw data::DataError("cannot estimate Lipschitz constant of an empty dataset");
  double worst = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    worst = std::max(worst, dataset.row(i).squared_norm());
  }
  return 0.5 * (worst + 1.0);
}

ComponentSubgradient component_subgradient(std::size_t i, const ModelState& model,
                                           const MlrDcSpec& spec) {
  const data::SparseRow x = spec.dataset->row(i);
  const int y = spec.dataset->label(i);
  Vector r = softmax_probabilities(model, x);
  r[y - 1] -= 1.0;

  ComponentSubgradient out;
  out.U = spec.rho * model.W;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    out.U.row(x.indices[k]) -= x.values[k] * r.transpose();
  }
  out.v = spec.rho * model.b - r;
  out.z.resize(model.t.size());
  for (Eigen::Index j = 0; j < model.t.size(); ++j) out.z[j] = penalty_slope(model.t[j], spec.penalty);
  return out;
}

ModelState solve_surrogate(const Matrix& U, const Vector& v, const Vector& z, const MlrDcSpec& spec) {
  const auto d = U.rows();
  ModelState out;
  out.W.resize(d, U.cols());
  out.t.resize(d);
  prox::ProxQuery query;
  query.rho = spec.rho;
  query.q = spec.penalty.q;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (z[j] > 0.0) throw std::invalid_argument("surrogate penalty slope z must be <= 0");
    query.u = U.row(j).transpose();
    query.c = -z[j];
    out.W.row(j) = prox::prox(query).transpose();
    out.t[j] = row_norm(out.W, static_cast<std::size_t>(j), spec.penalty.q);
  }
  out.b = v / spec.rho;
  return out;
}

namespace {

// Block members are scattered through the dataset and the hardware
// prefetcher cannot follow them.
void prefetch_row(const data::SparseRow& x) {
  constexpr std::size_t kLine = 64;
  const auto* v = reinterpret_cast<const char*>(x.values.data());
  for (std::size_t off = 0; off < x.values.size_bytes(); off += kLine) __builtin_prefetch(v + off);
  const auto* ix = reinterpret_cast<const char*>(x.indices.data());
  for (std::size_t off = 0; off < x.indices.size_bytes(); off += kLine) __builtin_prefetch(ix + off);
}

// Plain loops: Q is small and Eigen's dynamic-size setup dominated these.
// Small Q is unrolled at compile time.
template <std::size_t Q>
void gather_fixed(const data::SparseRow& x, const double* __restrict W, double* __restrict s) {
  double acc[Q] = {};
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double* w = W + static_cast<std::size_t>(x.indices[k]) * Q;
    const double xv = x.values[k];
    for (std::size_t c = 0; c < Q; ++c) acc[c] += xv * w[c];
  }
  for (std::size_t c = 0; c < Q; ++c) s[c] += acc[c];
}

template <std::size_t Q>
void scatter_fixed(const data::SparseRow& x, const double* __restrict r, double* __restrict U) {
  double rr[Q];
  for (std::size_t c = 0; c < Q; ++c) rr[c] = r[c];
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    double* u = U + static_cast<std::size_t>(x.indices[k]) * Q;
    const double xv = x.values[k];
    for (std::size_t c = 0; c < Q; ++c) u[c] -= xv * rr[c];
  }
}

void gather_logits(const data::SparseRow& x, const double* __restrict W, std::size_t q,
                   double* __restrict s) {
  switch (q) {
    case 2: return gather_fixed<2>(x, W, s);
    case 3: return gather_fixed<3>(x, W, s);
    case 4: return gather_fixed<4>(x, W, s);
    case 5: return gather_fixed<5>(x, W, s);
    case 6: return gather_fixed<6>(x, W, s);
    case 7: return gather_fixed<7>(x, W, s);
    case 8: return gather_fixed<8>(x, W, s);
    default: break;
  }
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double* w = W + static_cast<std::size_t>(x.indices[k]) * q;
    const double xv = x.values[k];
    for (std::size_t c = 0; c < q; ++c) s[c] += xv * w[c];
  }
}

void scatter_residual(const data::SparseRow& x, const double* __restrict r, std::size_t q,
                      double* __restrict U) {
  switch (q) {
    case 2: return scatter_fixed<2>(x, r, U);
    case 3: return scatter_fixed<3>(x, r, U);
    case 4: return scatter_fixed<4>(x, r, U);
    case 5: return scatter_fixed<5>(x, r, U);
    case 6: return scatter_fixed<6>(x, r, U);
    case 7: return scatter_fixed<7>(x, r, U);
    case 8: return scatter_fixed<8>(x, r, U);
    default: break;
  }
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    double* u = U + static_cast<std::size_t>(x.indices[k]) * q;
    const double xv = x.values[k];
    for (std::size_t c = 0; c < q; ++c) u[c] -= xv * r[c];
  }
}

}  // namespace

MlrProblem::MlrProblem(const data::Dataset& dataset, const PenaltyConfig& penalty,
                       std::optional<double> rho)
    : dataset_(&dataset), d_(dataset.dimension()), q_(dataset.num_classes()) {
  if (dataset.size() == 0) throw data::DataError("cannot build a problem on an empty dataset");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int y = dataset.label(i);
    if (y < 1 || static_cast<std::size_t>(y) > q_) {
      throw data::DataError("row " + std::to_string(i) + ": label " + std::to_string(y) +
                            " outside 1.." + std::to_string(q_));
    }
  }
  spec_.dataset = &dataset;
  spec_.penalty = penalty;
  spec_.lipschitz = estimate_lipschitz(dataset);
  spec_.rho = rho.value_or((1.0 + kRhoMargin) * spec_.lipschitz);
  spec_.validate();
  sample_sq_norms_.resize(static_cast<Eigen::Index>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    sample_sq_norms_[static_cast<Eigen::Index>(i)] = dataset.row(i).squared_norm();
  }
}

double MlrProblem::residual(std::size_t i, const double* W, const double* b, double eps,
                            Vector& s, Vector& r) const {
  const data::SparseRow x = dataset_->row(i);
  const auto q = static_cast<Eigen::Index>(q_);
  s = Eigen::Map<const Vector>(b, q);
  gather_logits(x, W, q_, s.data());
  for (Eigen::Index k = 0; k < q; ++k) {
    if (!std::isfinite(s[k])) {
      throw NumericError(static_cast<std::size_t>(k + 1),
                         "sample " + std::to_string(i) + ": logit of class " + std::to_string(k + 1) +
                             " is not finite");
    }
  }
  const double m = s.maxCoeff();
  r = (s.array() - m).exp();
  const double z = r.sum();
  const double loss = m + std::log(z) - s[dataset_->label(i) - 1];

  if (eps > 0.0 && q_ > 1) {
    // Dropped mass D <= (Q-1) e^{-tau} perturbs r by at most 2D in l2, and the
    // (W, b) block of v by 2D sqrt(||x||^2 + 1).
    const double modulus = spec_.rho - spec_.lipschitz;
    const double budget = std::sqrt(2.0 * modulus * eps) /
                          (2.0 * std::sqrt(sample_sq_norms_[static_cast<Eigen::Index>(i)] + 1.0));
    const double tau = budget >= static_cast<double>(q_ - 1)
                           ? 0.0
                           : std::log(static_cast<double>(q_ - 1) / budget);
    for (Eigen::Index k = 0; k < q; ++k) {
      if (s[k] < m - tau) r[k] = 0.0;
    }
    r /= r.sum();
  } else {
    r /= z;
  }
  r[dataset_->label(i) - 1] -= 1.0;
  return loss;
}

bool MlrProblem::feasible(const dc::Vector& x) const {
  const ConstMatrixMap W(x.data(), static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(q_));
  const auto t = x.tail(static_cast<Eigen::Index>(d_));
  for (std::size_t j = 0; j < d_; ++j) {
    const Vector row = W.row(static_cast<Eigen::Index>(j)).transpose();
    const double tj = t[static_cast<Eigen::Index>(j)];
    if (prox::norm(row, spec_.penalty.q) > tj + 1e-12 * std::max(1.0, std::abs(tj))) return false;
  }
  return true;
}

double MlrProblem::penalty_sum(const dc::Vector& x) const {
  const auto t = x.tail(static_cast<Eigen::Index>(d_));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) sum += penalty_value(t[j], spec_.penalty);
  return spec_.penalty.lambda * sum;
}

double MlrProblem::objective(const dc::Vector& x) const {
  if (!feasible(x)) return kInf;
  const auto dq = static_cast<Eigen::Index>(d_ * q_);
  Vector s, r;
  double loss = 0.0;
  for (std::size_t i = 0; i < size(); ++i) loss += residual(i, x.data(), x.data() + dq, 0.0, s, r);
  return loss / static_cast<double>(size()) + penalty_sum(x);
}

double MlrProblem::component_objective(std::size_t i, const dc::Vector& x) const {
  if (!feasible(x)) return kInf;
  const auto dq = static_cast<Eigen::Index>(d_ * q_);
  Vector s, r;
  return residual(i, x.data(), x.data() + dq, 0.0, s, r) + penalty_sum(x);
}

double MlrProblem::g_value(const dc::Vector& x) const {
  if (!feasible(x)) return kInf;
  return 0.5 * spec_.rho * x.head(static_cast<Eigen::Index>(d_ * q_ + q_)).squaredNorm();
}

double MlrProblem::h_value(std::size_t i, const dc::Vector& x) const {
  const auto dq = static_cast<Eigen::Index>(d_ * q_);
  Vector s, r;
  const double loss = residual(i, x.data(), x.data() + dq, 0.0, s, r);
  return 0.5 * spec_.rho * x.head(dq + static_cast<Eigen::Index>(q_)).squaredNorm() - loss -
         penalty_sum(x);
}

dc::Vector MlrProblem::subgradient_h(std::size_t i, const dc::Vector& x) const {
  return eps_subgradient_h(i, x, 0.0);
}

dc::Vector MlrProblem::eps_subgradient_h(std::size_t i, const dc::Vector& x, double eps) const {
  const auto d = static_cast<Eigen::Index>(d_);
  const auto q = static_cast<Eigen::Index>(q_);
  const auto dq = d * q;
  Vector s, r;
  residual(i, x.data(), x.data() + dq, eps, s, r);

  dc::Vector v(x.size());
  v.head(dq + q) = spec_.rho * x.head(dq + q);
  MatrixMap U(v.data(), d, q);
  const data::SparseRow row = dataset_->row(i);
  for (std::size_t k = 0; k < row.nnz(); ++k) U.row(row.indices[k]) -= row.values[k] * r.transpose();
  v.segment(dq, q) -= r;
  const auto t = x.tail(d);
  for (Eigen::Index j = 0; j < d; ++j) v[dq + q + j] = penalty_slope(t[j], spec_.penalty);
  return v;
}

dc::Linearization MlrProblem::linearize(std::span<const std::size_t> indices, const dc::Vector& x,
                                        double eps) const {
  const auto d = static_cast<Eigen::Index>(d_);
  const auto q = static_cast<Eigen::Index>(q_);
  const auto dq = d * q;
  dc::Linearization lin;
  lin.slope = dc::Vector::Zero(x.size());
  auto v = lin.slope.segment(dq, q);

  Vector s, r;
  double sum_rs_minus_loss = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (k + 1 < indices.size()) prefetch_row(dataset_->row(indices[k + 1]));
    const double loss = residual(i, x.data(), x.data() + dq, eps, s, r);
    sum_rs_minus_loss += r.dot(s) - loss;
    const data::SparseRow row = dataset_->row(i);
    scatter_residual(row, r.data(), q_, lin.slope.data());
    v -= r;
  }

  const double m = static_cast<double>(indices.size());
  const auto wb = x.head(dq + q);
  lin.slope.head(dq + q) += (m * spec_.rho) * wb;
  const auto t = x.tail(d);
  double zt = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double zj = penalty_slope(t[j], spec_.penalty);
    lin.slope[dq + q + j] = m * zj;
    zt += zj * t[j];
  }
  // sum_i h_i(x) - <v_i, x> = m (-(rho/2)||wb||^2 - penalty - <z, t>) + sum_i (<r_i, s_i> - l_i)
  lin.offset = m * (-0.5 * spec_.rho * wb.squaredNorm() - penalty_sum(x) - zt) + sum_rs_minus_loss;
  return lin;
}

dc::Vector MlrProblem::solve_surrogate(const dc::Vector& slope, double eps) const {
  (void)eps;  // the closed form is exact, hence an eps-solution for every eps
  const auto d = static_cast<Eigen::Index>(d_);
  const auto q = static_cast<Eigen::Index>(q_);
  const auto dq = d * q;
  const Matrix U = ConstMatrixMap(slope.data(), d, q);
  return mlr::solve_surrogate(U, slope.segment(dq, q), slope.tail(d), spec_).pack();
}

double MlrProblem::loss(const ModelState& model) const {
  const dc::Vector x = model.pack();
  const auto dq = static_cast<Eigen::Index>(d_ * q_);
  Vector s, r;
  double loss = 0.0;
  for (std::size_t i = 0; i < size(); ++i) loss += residual(i, x.data(), x.data() + dq, 0.0, s, r);
  return loss / static_cast<double>(size());
}

double MlrProblem::penalized_objective(const ModelState& model) const {
  double pen = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    pen += penalty_value(row_norm(model.W, j, spec_.penalty.q), spec_.penalty);
  }
  return loss(model) + spec_.penalty.lambda * pen;
}

dc::Vector MlrProblem::point(ModelState model) const {
  model.sync_group_norms(spec_.penalty.q);
  return model.pack();
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDca:
      return "dca";
    case Algorithm::kSdca:
      return "sdca";
    case Algorithm::kIsdca:
      return "isdca";
  }
  return "sdca";
}

FitResult fit(const MlrProblem& problem, Algorithm algorithm, const ModelState& init,
              const dc::SolverConfig& config, const dc::SolverHooks& hooks) {
  const dc::Vector x0 = problem.point(init);
  FitResult out;
  switch (algorithm) {
    case Algorithm::kDca:
      out.solver = dc::run_dca(problem, x0, config, hooks);
      break;
    case Algorithm::kSdca:
      out.solver = dc::run_sdca(problem, x0, config, hooks);
      break;
    case Algorithm::kIsdca:
      out.solver = dc::run_isdca(problem, x0, config, hooks);
      break;
  }
  out.model = problem.state(out.solver.x);
  return out;
}

}  // namespace sdca::mlr
