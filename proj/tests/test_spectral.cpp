#include <doctest.h>

#include <cmath>
#include <cstring>

#include "bistoch/analytic.hpp"
#include "bistoch/spectral.hpp"
#include "test_helpers.hpp"

using namespace bistoch;

namespace {

BistochasticOperator balanced_operator(const PointCloud& cloud, double eps, double beta = 1.0) {
  const KernelMatrix k = build_kernel_matrix(cloud, eps);
  const WeightVector w = weight_from_degree(degree_vector(k), beta);
  SinkhornOptions opts;
  opts.tolerance = 1e-11;
  opts.max_iterations = 2000;
  opts.variant = SinkhornOptions::Variant::accelerated;
  return {k, sinkhorn_symmetric_accelerated(k, w, opts), w};
}

ReferenceOperator reference_operator(const PointCloud& data, const PointCloud& ref, double eps) {
  const KernelMatrix kxr = build_kernel_matrix(data, ref, eps);
  const KernelMatrix kxx = build_kernel_matrix(data, eps);
  const KernelMatrix krr = build_kernel_matrix(ref, eps);
  const WeightVector w = weight_from_degree(degree_vector(kxx), 1.0);
  const WeightVector v = weight_from_degree(degree_vector(krr), 1.0);
  SinkhornOptions opts;
  opts.tolerance = 1e-11;
  opts.max_iterations = 2000;
  opts.variant = SinkhornOptions::Variant::accelerated;
  return {kxr, sinkhorn_reference(kxr, v, w, opts), w, v};
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("two-point kernel has the closed-form spectrum {1, 1/3}") {
  KernelMatrix k;
  k.values = (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.5, 1.0).finished();
  k.eps = 1.0;
  k.symmetric = true;
  const WeightVector w = WeightVector::explicit_values(Eigen::VectorXd::Ones(2));
  const ScalingResult scaling = sinkhorn_symmetric(k, w);
  const BistochasticOperator op(k, scaling, w);
  const SpectralDecomposition dec = eigendecompose_b(op, 2);
  // The conjugated matrix is [[2/3, 1/3], [1/3, 2/3]].
  CHECK(dec.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dec.eigenvalues(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("constant mode: lambda_0 = 1 and phi_0 constant") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(50, 2, 80), 0.4);
  const SpectralDecomposition dec = eigendecompose_b(op, 6);
  CHECK(std::abs(dec.eigenvalues(0) - 1.0) <= 1e-8);
  const Eigen::VectorXd phi0 = dec.phi.col(0);
  const double cv = std::sqrt((phi0.array() - phi0.mean()).square().mean()) /
                    std::abs(phi0.mean());
  CHECK(cv <= 1e-6);
}

TEST_CASE("weighted orthonormality holds for both kinds") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(60, 2, 81), 0.4);
  const SpectralDecomposition dec = eigendecompose_b(op, 10);
  const Eigen::MatrixXd gram =
      dec.phi.transpose() * dec.w.cwiseInverse().asDiagonal() * dec.phi;
  CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-8);

  const PointCloud data = sample_domain(Domain::disc(), 70, 82);
  const PointCloud ref = sample_domain(Domain::disc(), 15, 83);
  const ReferenceOperator rop = reference_operator(data, ref, 0.4);
  const SpectralDecomposition rdec = svd_reference(rop, 8);
  const Eigen::MatrixXd rgram =
      rdec.phi.transpose() * rdec.w.cwiseInverse().asDiagonal() * rdec.phi;
  CHECK((rgram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((rdec.eigenvalues.array() >= 0.0).all());
  CHECK(rdec.reference_side.rows() == 15);
}

TEST_CASE("eigenvalues are descending and the residual check is tight") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(40, 2, 84), 0.5);
  const SpectralDecomposition dec = eigendecompose_b(op, 12);
  for (int i = 1; i < 12; ++i) CHECK(dec.eigenvalues(i) <= dec.eigenvalues(i - 1) + 1e-14);
  CHECK(verify_eigenpairs(op, dec) <= 1e-6);

  const SpectralDecomposition only_constant = eigendecompose_b(op, 1);
  CHECK(verify_eigenpairs(op, only_constant) <= 1e-8);

  // Mispairing a column with the wrong eigenvalue is detected at the scale
  // of the eigenvalue gap.
  SpectralDecomposition broken = dec;
  std::swap(broken.eigenvalues(1), broken.eigenvalues(3));
  CHECK(verify_eigenpairs(op, broken) >=
        0.9 * std::abs(dec.eigenvalues(1) - dec.eigenvalues(3)));
}

TEST_CASE("decompositions are bitwise deterministic") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(35, 2, 85), 0.5);
  const SpectralDecomposition a = eigendecompose_b(op, 8);
  const SpectralDecomposition b = eigendecompose_b(op, 8);
  CHECK(std::memcmp(a.eigenvalues.data(), b.eigenvalues.data(), 8 * sizeof(double)) == 0);
  CHECK(std::memcmp(a.phi.data(), b.phi.data(), sizeof(double) * a.phi.size()) == 0);
}

TEST_CASE("sign convention: the largest-magnitude entry of each column is positive") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(30, 2, 86), 0.5);
  const SpectralDecomposition dec = eigendecompose_b(op, 6);
  for (int c = 0; c < 6; ++c) {
    Eigen::Index at = 0;
    dec.phi.col(c).cwiseAbs().maxCoeff(&at);
    CHECK(dec.phi(at, c) > 0.0);
  }
}

TEST_CASE("spectral mapping under power application") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(40, 2, 87), 0.5);
  const SpectralDecomposition dec = eigendecompose_b(op, 6);
  for (int c = 0; c < 6; ++c) {
    const double lambda = dec.eigenvalues(c);
    if (lambda <= 0.1) continue;
    const double t = 7.0 * op.eps();
    const Eigen::VectorXd got = op.power_apply(dec.phi.col(c), t);
    const Eigen::VectorXd want = std::pow(lambda, 7) * dec.phi.col(c);
    CHECK((got - want).norm() / want.norm() <= 1e-8);
  }
}

TEST_CASE("reference decomposition matches the materialized product spectrum") {
  const PointCloud data = sample_domain(Domain::disc(), 50, 88);
  const ReferenceOperator rop = reference_operator(data, data, 0.5);
  const SpectralDecomposition rdec = svd_reference(rop, 6);

  // Same spectrum through a dense eigendecomposition of the product operator.
  const Eigen::VectorXd d = rop.scaling();
  const Eigen::VectorXd w = rop.weights().weights;
  const Eigen::VectorXd v = rop.reference_weights().weights;
  const Eigen::MatrixXd G = (d.array() * w.array().sqrt()).inverse().matrix().asDiagonal() *
                            rop.kernel().values *
                            v.array().sqrt().inverse().matrix().asDiagonal();
  const Eigen::MatrixXd M = G * G.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  for (int c = 0; c < 6; ++c) {
    CHECK(std::abs(rdec.eigenvalues(c) - solver.eigenvalues()(49 - c)) <= 1e-8);
  }
}

TEST_CASE("circle spectrum has the k^2 multiplicity-2 ladder") {
  const PointCloud cloud = sample_domain(Domain::circle(), 2000, 89);
  const BistochasticOperator op = balanced_operator(cloud, 0.01);
  const SpectralDecomposition dec = eigendecompose_b(op, 7);
  const double base = 1.0 - dec.eigenvalues(1);
  const double targets[6] = {1, 1, 4, 4, 9, 9};
  for (int k = 1; k <= 6; ++k) {
    const double ratio = (1.0 - dec.eigenvalues(k)) / base;
    CHECK(std::abs(ratio - targets[k - 1]) / targets[k - 1] <= 0.10);
  }
}

TEST_CASE("k bounds are validated") {
  const BistochasticOperator op = balanced_operator(testutil::random_cloud(10, 2, 90), 0.5);
  CHECK_THROWS_AS(eigendecompose_b(op, 0), InputError);
  CHECK_THROWS_AS(eigendecompose_b(op, 11), InputError);
}

}  // TEST_SUITE
