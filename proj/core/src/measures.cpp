#include "bistoch/measures.hpp"

#include <cmath>
#include <utility>

namespace bistoch {

WeightVector WeightVector::explicit_values(Eigen::VectorXd w) {
  if (w.size() < 1 || !w.allFinite() || (w.array() <= 0.0).any()) {
    throw InputError("WeightVector: weights must be finite and strictly positive");
  }
  WeightVector out;
  out.weights = std::move(w);
  out.scheme = Scheme::explicit_values;
  return out;
}

Eigen::VectorXd degree_vector(const KernelMatrix& K) {
  if (K.cols() < 1) {
    throw InputError("degree_vector: kernel matrix has no columns");
  }
  return K.values.rowwise().sum();
}

WeightVector weight_from_degree(const Eigen::VectorXd& degrees, double beta) {
  if ((degrees.array() <= 0.0).any() || !degrees.allFinite()) {
    throw InputError("weight_from_degree: degrees must be positive and finite");
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw InputError("weight_from_degree: beta must lie in [-1, 1]");
  }
  WeightVector out;
  if (beta == 1.0) {
    out.weights = degrees;  // exact power-1 map, bitwise
  } else if (beta == 0.0) {
    out.weights = Eigen::VectorXd::Ones(degrees.size());
  } else {
    out.weights = degrees.array().pow(beta);
  }
  out.scheme = WeightVector::Scheme::degree_power;
  out.beta = beta;
  return out;
}

}  // namespace bistoch
