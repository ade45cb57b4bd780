#include "bistoch/gradients.hpp"

#include <string>

namespace bistoch {

namespace {

void require_gaussian(const KernelProfile& profile, const char* who) {
  if (!profile.is_gaussian()) {
    throw InputError(std::string(who) + ": gradient formulas are specific to the gaussian "
                                        "profile (got '" + profile.name() + "')");
  }
}

void require_mode(const SpectralDecomposition& dec, int k, double lambda_floor,
                  const char* who) {
  if (k < 0 || k >= dec.count()) {
    throw InputError(std::string(who) + ": eigen index out of range");
  }
  if (!(dec.eigenvalues(k) > lambda_floor)) {
    throw ConditioningError(std::string(who) + ": lambda_" + std::to_string(k) + " = " +
                            std::to_string(dec.eigenvalues(k)) +
                            " is at or below the floor " + std::to_string(lambda_floor));
  }
}

}  // namespace

Eigen::MatrixXd barycenters_b(const BistochasticOperator& op, const Eigen::MatrixXd& X) {
  if (X.rows() != op.size()) {
    throw InputError("barycenters_b: data matrix row count mismatch");
  }
  return op.apply(X);
}

GradientField eigen_gradient_b(const BistochasticOperator& op, const SpectralDecomposition& dec,
                               const Eigen::MatrixXd& X, int k, double lambda_floor) {
  require_gaussian(op.kernel().profile, "eigen_gradient_b");
  require_mode(dec, k, lambda_floor, "eigen_gradient_b");
  if (X.rows() != op.size() || dec.phi.rows() != op.size()) {
    throw InputError("eigen_gradient_b: dimension mismatch");
  }
  const double lambda = dec.eigenvalues(k);
  const Eigen::VectorXd phi = dec.phi.col(k);
  const Eigen::MatrixXd xbar = op.apply(X);
  const Eigen::MatrixXd num =
      op.apply(Eigen::MatrixXd(phi.asDiagonal() * X)) - lambda * (phi.asDiagonal() * xbar);
  GradientField field;
  field.vectors = num / (op.eps() * lambda);
  field.eigen_index = k;
  field.eigenvalue = lambda;
  return field;
}

Eigen::MatrixXd f_epsilon_apply(const ReferenceOperator& op, const Eigen::VectorXd& f) {
  if (f.size() != op.data_size()) {
    throw InputError("f_epsilon_apply: vector length mismatch");
  }
  require_gaussian(op.kernel().profile, "f_epsilon_apply");
  const Eigen::VectorXd t =
      f.array() / (op.weights().weights.array() * op.scaling().array());
  const Eigen::VectorXd g = op.kernel().values.transpose() * t;  // K^T D^{-1} W^{-1} f
  const Eigen::VectorXd colscale = g.cwiseQuotient(op.reference_weights().weights);
  return op.scaling().cwiseInverse().asDiagonal() * op.kernel().values *
         colscale.asDiagonal();
}

GradientField eigen_gradient_c(const ReferenceOperator& op, const SpectralDecomposition& dec,
                               const Eigen::MatrixXd& R, int k, double lambda_floor) {
  require_gaussian(op.kernel().profile, "eigen_gradient_c");
  require_mode(dec, k, lambda_floor, "eigen_gradient_c");
  if (R.rows() != op.reference_size() || dec.phi.rows() != op.data_size()) {
    throw InputError("eigen_gradient_c: dimension mismatch");
  }
  const double lambda = dec.eigenvalues(k);
  const Eigen::VectorXd phi = dec.phi.col(k);
  const Eigen::MatrixXd coupling = f_epsilon_apply(op, phi);
  const Eigen::MatrixXd rbar =
      f_epsilon_apply(op, Eigen::VectorXd::Ones(op.data_size())) * R;
  GradientField field;
  field.vectors =
      (coupling * R - lambda * (phi.asDiagonal() * rbar)) / (lambda * op.eps());
  field.eigen_index = k;
  field.eigenvalue = lambda;
  return field;
}

Eigen::MatrixXd gradient_of_function(const BistochasticOperator& op,
                                     const SpectralDecomposition& dec, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& f, int truncation,
                                     double lambda_floor) {
  if (truncation < 1 || truncation > dec.count()) {
    throw InputError("gradient_of_function: truncation out of range");
  }
  if (f.size() != op.size()) {
    throw InputError("gradient_of_function: vector length mismatch");
  }
  for (int k = 1; k < truncation; ++k) {
    require_mode(dec, k, lambda_floor, "gradient_of_function");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), X.cols());
  const Eigen::VectorXd fw = f.cwiseQuotient(op.weights().weights);
  for (int k = 1; k < truncation; ++k) {
    const double coeff = dec.phi.col(k).dot(fw);  // <f, phi_k> in W^{-1}
    out += coeff * eigen_gradient_b(op, dec, X, k, lambda_floor).vectors;
  }
  return out;
}

}  // namespace bistoch
