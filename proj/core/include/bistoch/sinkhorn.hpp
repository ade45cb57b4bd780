#pragma once

#include <Eigen/Dense>

#include "bistoch/geometry.hpp"
#include "bistoch/measures.hpp"

namespace bistoch {

struct SinkhornOptions {
  enum class Variant { standard, accelerated };

  double tolerance = 1e-10;
  int max_iterations = 1000;
  Variant variant = Variant::standard;
};

/// The diagonal scaling d solving the balancing equation, with convergence
/// diagnostics.
struct ScalingResult {
  Eigen::VectorXd d;
  double residual = 0.0;
  int iterations = 0;
  /// Even/odd oscillation constant: geometric mean of the ratio between the
  /// last raw iterate and the returned geometric-mean scaling.
  double alpha_estimate = 1.0;
  bool converged = false;
  /// Elementwise standard deviation of the final consecutive-iterate ratio;
  /// near zero when the oscillation has settled to a single constant alpha.
  double oscillation_std = 0.0;
};

/// Raised when the iteration hits max_iterations (or is detected diverging)
/// before the marginal residual reaches tolerance. Carries the partial result.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, ScalingResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const ScalingResult& partial() const { return partial_; }

 private:
  ScalingResult partial_;
};

/// Balances a symmetric positive kernel: finds d > 0 with
///   max_i | sum_j K(i,j) / (d_i d_j w_j) - 1 | <= tolerance.
///
/// Iterates D_{k+1} = diag(K D_k^{-1} W^{-1} 1) from D_0 = I and returns the
/// geometric mean of the final iterate pair, which cancels the even/odd
/// oscillation of the raw sequence.
ScalingResult sinkhorn_symmetric(const KernelMatrix& K, const WeightVector& w,
                                 const SinkhornOptions& opts = {});

/// Convergence-accelerated variant: one full balancing step followed by one
/// square-root step per iteration. The full step alone is the standard
/// update; the square-root step damps the oscillation it introduces, which
/// typically cuts the iteration count by an order of magnitude on Gaussian
/// kernels. The heuristic carries no guarantee, so divergence (residual
/// growing 10x over 50 iterations) raises ConvergenceError.
ScalingResult sinkhorn_symmetric_accelerated(const KernelMatrix& K, const WeightVector& w,
                                             const SinkhornOptions& opts = {});

/// Balances the implicit reference kernel K V^{-1} K^T against w. The n x n
/// product is never materialized; every marginal is evaluated by chained
/// matrix-vector products. opts.variant selects the iteration.
ScalingResult sinkhorn_reference(const KernelMatrix& K, const WeightVector& v,
                                 const WeightVector& w, const SinkhornOptions& opts = {});

/// Max-norm deviation of both row and column marginals from 1 for the scaled
/// kernel K(i,j) / (d_i d_j) integrated against the w-divided measure.
double bistochastic_residual(const KernelMatrix& K, const Eigen::VectorXd& d,
                             const WeightVector& w);

/// Reference form: marginals of D^{-1} K V^{-1} K^T D^{-1} W^{-1}.
double bistochastic_residual(const KernelMatrix& K, const Eigen::VectorXd& d,
                             const WeightVector& w, const WeightVector& v);

}  // namespace bistoch
