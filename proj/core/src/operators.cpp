#include "bistoch/operators.hpp"

#include <cmath>
#include <utility>

namespace bistoch {

namespace {

void check_converged(const ScalingResult& scaling, const char* who) {
  if (!scaling.converged) {
    throw InputError(std::string(who) + ": scaling has not converged");
  }
  if (!scaling.d.allFinite() || (scaling.d.array() <= 0.0).any()) {
    throw InputError(std::string(who) + ": scaling vector must be positive and finite");
  }
}

int power_steps(double t, double eps, const char* who) {
  if (!(t > 0.0)) {
    throw InputError(std::string(who) + ": t must be positive");
  }
  const int steps = static_cast<int>(std::llround(t / eps));
  if (steps < 1) {
    throw InputError(std::string(who) + ": round(t/eps) is zero; no step to take");
  }
  return steps;
}

}  // namespace

BistochasticOperator::BistochasticOperator(KernelMatrix K, ScalingResult scaling, WeightVector w)
    : kernel_(std::move(K)), scaling_(std::move(scaling)), weights_(std::move(w)) {
  if (!kernel_.symmetric || kernel_.rows() != kernel_.cols()) {
    throw InputError("BistochasticOperator: kernel must be symmetric and square");
  }
  if (scaling_.d.size() != kernel_.rows() || weights_.size() != kernel_.rows()) {
    throw InputError("BistochasticOperator: inconsistent dimensions");
  }
  check_converged(scaling_, "BistochasticOperator");
}

Eigen::VectorXd BistochasticOperator::apply(const Eigen::VectorXd& f) const {
  if (f.size() != size()) {
    throw InputError("BistochasticOperator::apply: vector length mismatch");
  }
  const Eigen::VectorXd t =
      f.array() / (weights_.weights.array() * scaling_.d.array());
  return (kernel_.values * t).cwiseQuotient(scaling_.d);
}

Eigen::MatrixXd BistochasticOperator::apply(const Eigen::MatrixXd& F) const {
  if (F.rows() != size()) {
    throw InputError("BistochasticOperator::apply: row count mismatch");
  }
  const Eigen::VectorXd u = (weights_.weights.array() * scaling_.d.array()).inverse();
  Eigen::MatrixXd t = u.asDiagonal() * F;
  return scaling_.d.cwiseInverse().asDiagonal() * (kernel_.values * t);
}

Eigen::VectorXd BistochasticOperator::generator_apply(const Eigen::VectorXd& f) const {
  return (f - apply(f)) / kernel_.eps;
}

Eigen::VectorXd BistochasticOperator::power_apply(const Eigen::VectorXd& f, double t,
                                                  int* steps) const {
  const int count = power_steps(t, kernel_.eps, "BistochasticOperator::power_apply");
  if (steps != nullptr) *steps = count;
  Eigen::VectorXd out = f;
  for (int i = 0; i < count; ++i) out = apply(out);
  return out;
}

ReferenceOperator::ReferenceOperator(KernelMatrix K, ScalingResult scaling, WeightVector w,
                                     WeightVector v)
    : kernel_(std::move(K)),
      scaling_(std::move(scaling)),
      weights_(std::move(w)),
      ref_weights_(std::move(v)) {
  if (scaling_.d.size() != kernel_.rows() || weights_.size() != kernel_.rows() ||
      ref_weights_.size() != kernel_.cols()) {
    throw InputError("ReferenceOperator: inconsistent dimensions");
  }
  check_converged(scaling_, "ReferenceOperator");
}

Eigen::VectorXd ReferenceOperator::apply(const Eigen::VectorXd& f) const {
  if (f.size() != data_size()) {
    throw InputError("ReferenceOperator::apply: vector length mismatch");
  }
  // K (V^{-1} (K^T (D^{-1} (W^{-1} f)))), never forming the n x n product.
  const Eigen::VectorXd t =
      f.array() / (weights_.weights.array() * scaling_.d.array());
  const Eigen::VectorXd s = (kernel_.values.transpose() * t).cwiseQuotient(ref_weights_.weights);
  return (kernel_.values * s).cwiseQuotient(scaling_.d);
}

Eigen::VectorXd ReferenceOperator::generator_apply(const Eigen::VectorXd& f) const {
  return (f - apply(f)) / kernel_.eps;
}

Eigen::VectorXd ReferenceOperator::power_apply(const Eigen::VectorXd& f, double t,
                                               int* steps) const {
  const int count = power_steps(t, kernel_.eps, "ReferenceOperator::power_apply");
  if (steps != nullptr) *steps = count;
  Eigen::VectorXd out = f;
  for (int i = 0; i < count; ++i) out = apply(out);
  return out;
}

AveragingOperator::AveragingOperator(const KernelMatrix& K) {
  if (!K.symmetric || K.rows() != K.cols()) {
    throw InputError("AveragingOperator: kernel must be symmetric and square");
  }
  const Eigen::VectorXd q = degree_vector(K);
  const Eigen::VectorXd qi = q.cwiseInverse();
  normalized_ = qi.asDiagonal() * K.values * qi.asDiagonal();
  row_norms_ = normalized_.rowwise().sum();
}

Eigen::VectorXd AveragingOperator::apply(const Eigen::VectorXd& f) const {
  if (f.size() != size()) {
    throw InputError("AveragingOperator::apply: vector length mismatch");
  }
  return (normalized_ * f).cwiseQuotient(row_norms_);
}

}  // namespace bistoch
