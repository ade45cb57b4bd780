#pragma once

#include <Eigen/Dense>

#include "bistoch/operators.hpp"

namespace bistoch {

/// Top eigenpairs of a balanced operator in the W^{-1}-weighted geometry.
///
/// Columns of phi are Phi = W^{1/2} U with U orthonormal, so
/// Phi^T W^{-1} Phi = I. Eigenvalues are sorted descending with the constant
/// mode first; for the reference kind they are squared singular values and
/// hence nonnegative.
struct SpectralDecomposition {
  enum class Kind { single, reference };

  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd phi;          // n x k
  Eigen::VectorXd w;            // weights defining the inner product
  Kind kind = Kind::single;
  /// Right singular vectors of the conjugated n x m factor (reference kind
  /// only; kept under a distinct name to avoid collision with the reference
  /// weight matrix). Diagnostic output, empty for the single kind.
  Eigen::MatrixXd reference_side;

  Eigen::Index count() const { return eigenvalues.size(); }
};

/// Top-k eigenpairs via the symmetric conjugation
/// W^{-1/2} D^{-1} K D^{-1} W^{-1/2} = U S U^T, returned as Phi = W^{1/2} U.
/// Sign convention: the largest-magnitude entry of each phi column is
/// positive, which makes repeated runs bitwise identical.
SpectralDecomposition eigendecompose_b(const BistochasticOperator& op, int k);

/// Top-k pairs from the thin SVD of W^{-1/2} D^{-1} K V^{-1/2}; eigenvalues
/// are the squared singular values.
SpectralDecomposition svd_reference(const ReferenceOperator& op, int k);

/// max_k ||op phi_k - lambda_k phi_k||_2 / ||phi_k||_2.
double verify_eigenpairs(const BistochasticOperator& op, const SpectralDecomposition& dec);
double verify_eigenpairs(const ReferenceOperator& op, const SpectralDecomposition& dec);

}  // namespace bistoch
