#pragma once

#include <Eigen/Dense>

#include "bistoch/geometry.hpp"

namespace bistoch {

/// Strictly positive weights defining the divided measure d(mu-hat) = d(mu)/w.
///
/// Discrete measures carry a 1/n normalization in principle; that constant is
/// absorbed into the balancing vector d (which is determined only up to the
/// balancing equation), so degree and weight vectors here omit it. Spectral
/// output and bi-stochasticity residuals are unaffected.
struct WeightVector {
  enum class Scheme { explicit_values, degree_power };

  Eigen::VectorXd weights;
  Scheme scheme = Scheme::explicit_values;
  double beta = 0.0;  // meaningful for degree_power

  Eigen::Index size() const { return weights.size(); }

  static WeightVector explicit_values(Eigen::VectorXd w);
};

/// Row sums of a kernel matrix: the kernel density estimate q_eps up to the
/// absorbed 1/n factor.
Eigen::VectorXd degree_vector(const KernelMatrix& K);

/// Entrywise degrees^beta with beta restricted to [-1, 1].
/// beta = 1 recovers the density-estimate weighting; beta = -1 its inverse.
WeightVector weight_from_degree(const Eigen::VectorXd& degrees, double beta);

}  // namespace bistoch
