#include "bistoch/spectral.hpp"

#include <cmath>

namespace bistoch {

namespace {

// Flip column signs so the largest-magnitude entry of each phi column is
// positive; ties resolve to the first occurrence.
void fix_signs(Eigen::MatrixXd& phi, Eigen::MatrixXd* companion) {
  for (Eigen::Index c = 0; c < phi.cols(); ++c) {
    Eigen::Index at = 0;
    phi.col(c).cwiseAbs().maxCoeff(&at);
    if (phi(at, c) < 0.0) {
      phi.col(c) = -phi.col(c);
      if (companion != nullptr && companion->cols() == phi.cols()) {
        companion->col(c) = -companion->col(c);
      }
    }
  }
}

template <typename Op>
double verify_impl(const Op& op, const SpectralDecomposition& dec) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < dec.count(); ++c) {
    const Eigen::VectorXd phi = dec.phi.col(c);
    const double rel =
        (op.apply(phi) - dec.eigenvalues(c) * phi).norm() / phi.norm();
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace

SpectralDecomposition eigendecompose_b(const BistochasticOperator& op, int k) {
  const Eigen::Index n = op.size();
  if (k < 1 || k > n) {
    throw InputError("eigendecompose_b: k must lie in [1, n]");
  }
  // s_i = 1 / (d_i sqrt(w_i)); M(i,j) = K(i,j) s_i s_j, exactly symmetric.
  const Eigen::VectorXd s =
      (op.scaling().array() * op.weights().weights.array().sqrt()).inverse();
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = op.kernel().values(i, j) * (s(i) * s(j));
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigendecompose_b: eigensolver failed to converge");
  }
  SpectralDecomposition dec;
  dec.kind = SpectralDecomposition::Kind::single;
  dec.w = op.weights().weights;
  dec.eigenvalues.resize(k);
  dec.phi.resize(n, k);
  const Eigen::VectorXd wsqrt = op.weights().weights.array().sqrt();
  for (int c = 0; c < k; ++c) {
    const Eigen::Index src = n - 1 - c;  // solver sorts ascending
    dec.eigenvalues(c) = solver.eigenvalues()(src);
    dec.phi.col(c) = wsqrt.cwiseProduct(solver.eigenvectors().col(src));
  }
  fix_signs(dec.phi, nullptr);
  return dec;
}

SpectralDecomposition svd_reference(const ReferenceOperator& op, int k) {
  const Eigen::Index n = op.data_size();
  const Eigen::Index m = op.reference_size();
  if (k < 1 || k > std::min(n, m)) {
    throw InputError("svd_reference: k must lie in [1, min(n, m)]");
  }
  const Eigen::VectorXd left =
      (op.scaling().array() * op.weights().weights.array().sqrt()).inverse();
  const Eigen::VectorXd right = op.reference_weights().weights.array().sqrt().inverse();
  const Eigen::MatrixXd G =
      left.asDiagonal() * op.kernel().values * right.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("svd_reference: SVD failed");
  }
  SpectralDecomposition dec;
  dec.kind = SpectralDecomposition::Kind::reference;
  dec.w = op.weights().weights;
  dec.eigenvalues = svd.singularValues().head(k).array().square();
  const Eigen::VectorXd wsqrt = op.weights().weights.array().sqrt();
  dec.phi = wsqrt.asDiagonal() * svd.matrixU().leftCols(k);
  dec.reference_side = svd.matrixV().leftCols(k);
  fix_signs(dec.phi, &dec.reference_side);
  return dec;
}

double verify_eigenpairs(const BistochasticOperator& op, const SpectralDecomposition& dec) {
  return verify_impl(op, dec);
}

double verify_eigenpairs(const ReferenceOperator& op, const SpectralDecomposition& dec) {
  return verify_impl(op, dec);
}

}  // namespace bistoch
