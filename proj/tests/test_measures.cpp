#include <doctest.h>

#include "bistoch/measures.hpp"
#include "test_helpers.hpp"

using namespace bistoch;

TEST_SUITE("measures") {

TEST_CASE("degree vector: fixed values") {
  KernelMatrix k;
  k.values = (Eigen::MatrixXd(1, 1) << 1.0).finished();
  k.symmetric = true;
  CHECK(degree_vector(k)(0) == 1.0);

  k.values = (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.5, 1.0).finished();
  const Eigen::VectorXd deg = degree_vector(k);
  CHECK(deg(0) == doctest::Approx(1.5));
  CHECK(deg(1) == doctest::Approx(1.5));
}

TEST_CASE("degree vector matches loop summation on a random kernel") {
  const PointCloud cloud = testutil::random_cloud(10, 2, 21);
  const KernelMatrix k = build_kernel_matrix(cloud, 0.5);
  const Eigen::VectorXd deg = degree_vector(k);
  for (int i = 0; i < 10; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 10; ++j) acc += k.values(i, j);
    CHECK(std::abs(deg(i) - acc) / acc <= 1e-14);
  }
}

TEST_CASE("degree vector of a symmetric kernel equals its column sums") {
  const PointCloud cloud = testutil::random_cloud(12, 3, 22);
  const KernelMatrix k = build_kernel_matrix(cloud, 0.7);
  const Eigen::VectorXd rows = degree_vector(k);
  const Eigen::VectorXd cols = k.values.colwise().sum();
  CHECK(testutil::max_abs_diff(rows, cols) <= 1e-14);
}

TEST_CASE("weight from degree: powers and range") {
  Eigen::VectorXd deg(2);
  deg << 1.5, 1.5;
  CHECK(weight_from_degree(deg, 0.0).weights.isOnes());
  CHECK(weight_from_degree(deg, 1.0).weights(0) == 1.5);  // bitwise identity power

  Eigen::VectorXd four(1);
  four << 4.0;
  CHECK(weight_from_degree(four, -1.0).weights(0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(weight_from_degree(deg, 1.5), InputError);
  CHECK_THROWS_AS(weight_from_degree(deg, -2.0), InputError);
  Eigen::VectorXd bad(1);
  bad << 0.0;
  CHECK_THROWS_AS(weight_from_degree(bad, 1.0), InputError);
}

TEST_CASE("beta = 1 weights are bitwise equal to the degrees") {
  const PointCloud cloud = testutil::random_cloud(20, 2, 23);
  const KernelMatrix k = build_kernel_matrix(cloud, 0.4);
  const Eigen::VectorXd deg = degree_vector(k);
  const WeightVector w = weight_from_degree(deg, 1.0);
  for (int i = 0; i < 20; ++i) CHECK(w.weights(i) == deg(i));
}

TEST_CASE("explicit weights validate positivity") {
  Eigen::VectorXd ok(2);
  ok << 0.5, 2.0;
  CHECK(WeightVector::explicit_values(ok).weights(1) == 2.0);
  Eigen::VectorXd bad(2);
  bad << 0.5, -2.0;
  CHECK_THROWS_AS(WeightVector::explicit_values(bad), InputError);
}

}  // TEST_SUITE
