#pragma once

#include <Eigen/Dense>

#include "bistoch/operators.hpp"
#include "bistoch/spectral.hpp"

namespace bistoch {

/// Guard against the 1/lambda amplification in the gradient formulas.
inline constexpr double kDefaultLambdaFloor = 1e-4;

/// Per-point ambient gradient vectors of one eigenfunction.
struct GradientField {
  Eigen::MatrixXd vectors;  // n x d
  int eigen_index = 0;
  double eigenvalue = 0.0;
};

/// Diffusion-weighted barycenters: row i is the operator applied to each
/// coordinate of X.
Eigen::MatrixXd barycenters_b(const BistochasticOperator& op, const Eigen::MatrixXd& X);

/// Extension-type gradient of eigenfunction k for the single-measure
/// operator:
///   [ B diag(phi_k) X - lambda_k diag(phi_k) Xbar ] / (eps lambda_k).
/// Valid for the Gaussian profile only (the formula differentiates the
/// Gaussian shape); other profiles are rejected. For k = 0 the two terms
/// cancel and the field vanishes identically.
GradientField eigen_gradient_b(const BistochasticOperator& op, const SpectralDecomposition& dec,
                               const Eigen::MatrixXd& X, int k,
                               double lambda_floor = kDefaultLambdaFloor);

/// The n x m reference coupling F f = D^{-1} K diag(K^T D^{-1} W^{-1} f) V^{-1}.
Eigen::MatrixXd f_epsilon_apply(const ReferenceOperator& op, const Eigen::VectorXd& f);

/// Reference-measure gradient:
///   [ (F phi_k) R - lambda_k diag(phi_k) Rbar ] / (lambda_k eps),
/// with Rbar = (F 1) R.
GradientField eigen_gradient_c(const ReferenceOperator& op, const SpectralDecomposition& dec,
                               const Eigen::MatrixXd& R, int k,
                               double lambda_floor = kDefaultLambdaFloor);

/// Gradient of an arbitrary function through its eigen expansion truncated to
/// the leading modes; the constant mode contributes nothing and is skipped.
Eigen::MatrixXd gradient_of_function(const BistochasticOperator& op,
                                     const SpectralDecomposition& dec, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& f, int truncation,
                                     double lambda_floor = kDefaultLambdaFloor);

}  // namespace bistoch
