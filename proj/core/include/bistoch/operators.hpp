#pragma once

#include <Eigen/Dense>

#include "bistoch/geometry.hpp"
#include "bistoch/measures.hpp"
#include "bistoch/sinkhorn.hpp"

namespace bistoch {

/// The balanced diffusion operator f -> D^{-1} K D^{-1} W^{-1} f.
///
/// Constructed from a converged scaling; preserves the constant vector up to
/// the balancing residual and is self-adjoint in the W^{-1}-weighted inner
/// product. Immutable; applications are pure and safe to run concurrently.
class BistochasticOperator {
 public:
  BistochasticOperator(KernelMatrix K, ScalingResult scaling, WeightVector w);

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  /// Column-wise application, used for barycenters and gradient fields.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& F) const;

  /// (f - B f) / eps, the discrete generator action.
  Eigen::VectorXd generator_apply(const Eigen::VectorXd& f) const;

  /// Applies the operator round(t/eps) times (>= 1 required). The step count
  /// actually used is written to steps when non-null.
  Eigen::VectorXd power_apply(const Eigen::VectorXd& f, double t, int* steps = nullptr) const;

  Eigen::Index size() const { return kernel_.rows(); }
  double eps() const { return kernel_.eps; }
  const KernelMatrix& kernel() const { return kernel_; }
  const Eigen::VectorXd& scaling() const { return scaling_.d; }
  const ScalingResult& scaling_result() const { return scaling_; }
  const WeightVector& weights() const { return weights_; }

 private:
  KernelMatrix kernel_;
  ScalingResult scaling_;
  WeightVector weights_;
};

/// The reference-factored operator f -> D^{-1} K V^{-1} K^T D^{-1} W^{-1} f.
/// The n x n product kernel is never materialized; applications run through
/// chained n x m products.
class ReferenceOperator {
 public:
  ReferenceOperator(KernelMatrix K, ScalingResult scaling, WeightVector w, WeightVector v);

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  Eigen::VectorXd generator_apply(const Eigen::VectorXd& f) const;
  Eigen::VectorXd power_apply(const Eigen::VectorXd& f, double t, int* steps = nullptr) const;

  Eigen::Index data_size() const { return kernel_.rows(); }
  Eigen::Index reference_size() const { return kernel_.cols(); }
  double eps() const { return kernel_.eps; }
  const KernelMatrix& kernel() const { return kernel_; }
  const Eigen::VectorXd& scaling() const { return scaling_.d; }
  const ScalingResult& scaling_result() const { return scaling_; }
  const WeightVector& weights() const { return weights_; }
  const WeightVector& reference_weights() const { return ref_weights_; }

 private:
  KernelMatrix kernel_;
  ScalingResult scaling_;
  WeightVector weights_;
  WeightVector ref_weights_;
};

/// The row-stochastic averaging operator: the kernel is normalized by the
/// degree on both sides and then by its row sums. Only the rows sum to one;
/// it exists as the comparison construction for the balanced operator.
class AveragingOperator {
 public:
  explicit AveragingOperator(const KernelMatrix& K);

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

  Eigen::Index size() const { return normalized_.rows(); }
  /// The degree-normalized kernel k(i,j) / (q_i q_j).
  const Eigen::MatrixXd& normalized_kernel() const { return normalized_; }
  /// Row sums of the normalized kernel (the v(x)^2 normalizer).
  const Eigen::VectorXd& row_norms() const { return row_norms_; }

 private:
  Eigen::MatrixXd normalized_;
  Eigen::VectorXd row_norms_;
};

}  // namespace bistoch
