#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "bistoch/analytic.hpp"
#include "test_helpers.hpp"

using namespace bistoch;

namespace {

// Integral representation J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt,
// composite Simpson with a grid fine enough for 1e-10 at |x| <= 50.
double bessel_integral_oracle(int n, double x) {
  const int steps = 40000;
  const double h = M_PI / steps;
  double acc = std::cos(-0.0) + std::cos(n * M_PI - x * std::sin(M_PI));
  for (int i = 1; i < steps; ++i) {
    const double t = i * h;
    acc += (i % 2 == 1 ? 4.0 : 2.0) * std::cos(n * t - x * std::sin(t));
  }
  return acc * h / 3.0 / M_PI;
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("bessel values against the integral representation") {
  for (double x : {0.0, 0.5, 1.0, 1.8412, 3.0, 7.5, 11.9, 12.1, 20.0, 35.0, 49.5}) {
    CHECK(std::abs(bessel_j0(x) - bessel_integral_oracle(0, x)) <= 1e-10);
    CHECK(std::abs(bessel_j1(x) - bessel_integral_oracle(1, x)) <= 1e-10);
  }
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j1(-2.0) == -bessel_j1(2.0));
  CHECK(bessel_j0(-2.0) == bessel_j0(2.0));
}

TEST_CASE("bessel values against the standard library") {
  for (double x = 0.1; x <= 50.0; x += 0.7) {
    CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) <= 1e-10);
    CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) <= 1e-10);
  }
}

TEST_CASE("bessel window is enforced") {
  CHECK_THROWS_AS(bessel_j1(51.0), InputError);
  CHECK_THROWS_AS(bessel_j0(-51.0), InputError);
}

TEST_CASE("first root of J1'") {
  const double root = j1prime_root();
  CHECK(root == doctest::Approx(1.8411837813406593).epsilon(1e-10));
  CHECK(std::abs(bessel_j1_prime(root)) <= 1e-12);
  CHECK(std::abs(bessel_j1(1.8412) - 0.5819) <= 1e-4);
  CHECK(std::abs(bessel_j1(root) - bessel_integral_oracle(1, root)) <= 1e-10);
}

TEST_CASE("rectangle modes: eigenvalues and evaluators") {
  const AnalyticMode constant = rectangle_mode(0, 0, 1.5, 1.0);
  CHECK(constant.eigenvalue == 0.0);
  CHECK(constant.value(Eigen::Vector2d(0.3, 0.7)) == 1.0);

  const AnalyticMode first = rectangle_mode(1, 0, 1.5, 1.0);
  CHECK(first.eigenvalue == doctest::Approx(std::pow(2.0 * M_PI / 3.0, 2)).epsilon(1e-12));

  // The first four nontrivial eigenvalues of the 3/2 x 1 rectangle in order.
  const double expected[4] = {4.3864908449286, 9.8696044010893, 14.256095246018,
                              17.545963379714};
  const int idx[4][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}};
  for (int i = 0; i < 4; ++i) {
    const AnalyticMode m = rectangle_mode(idx[i][0], idx[i][1], 1.5, 1.0);
    CHECK(m.eigenvalue == doctest::Approx(expected[i]).epsilon(1e-10));
    if (i > 0) CHECK(expected[i] > expected[i - 1]);
  }
}

TEST_CASE("disc modes: values, eigenvalue, Neumann boundary") {
  const AnalyticMode mode = disc_mode(AngularVariant::cosine);
  CHECK(mode.value(Eigen::Vector2d(0.0, 0.0)) == 0.0);
  CHECK(mode.eigenvalue == doctest::Approx(3.3899577166718897).epsilon(1e-10));

  for (int t = 0; t < 32; ++t) {
    const double th = 2.0 * M_PI * t / 32.0;
    const Eigen::Vector2d x(std::cos(th), std::sin(th));
    const Eigen::Vector2d g = mode.gradient(x);
    CHECK(std::abs(g.dot(x)) <= 1e-8);  // radial derivative vanishes at r = 1
  }
}

TEST_CASE("circle modes and heat coefficients") {
  const AnalyticMode c1 = circle_mode(1, AngularVariant::cosine);
  CHECK(c1.eigenvalue == 1.0);
  CHECK(c1.value(Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(1.0));
  const AnalyticMode s3 = circle_mode(3, AngularVariant::sine);
  CHECK(s3.eigenvalue == 9.0);

  CHECK(circle_heat_coefficient(1, 0.0) == 1.0);
  CHECK(circle_heat_coefficient(1, 0.1) == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
  CHECK(circle_heat_coefficient(3, 0.1) == doctest::Approx(std::exp(-0.9)).epsilon(1e-12));
}

TEST_CASE("every mode satisfies its own Laplacian identity") {
  std::mt19937_64 eng(300);
  std::vector<AnalyticMode> modes = {
      rectangle_mode(1, 0, 1.5, 1.0), rectangle_mode(2, 1, 1.5, 1.0),
      disc_mode(AngularVariant::cosine), disc_mode(AngularVariant::sine),
      circle_mode(2, AngularVariant::sine)};
  for (const AnalyticMode& mode : modes) {
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::Vector2d x;
      if (mode.domain.kind == Domain::Kind::rectangle) {
        x = Eigen::Vector2d(1.5 * testutil::unit_double(eng), testutil::unit_double(eng));
      } else if (mode.domain.kind == Domain::Kind::disc) {
        const double r = 0.05 + 0.9 * testutil::unit_double(eng);
        const double th = 2.0 * M_PI * testutil::unit_double(eng);
        x = Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
      } else {
        const double th = 2.0 * M_PI * testutil::unit_double(eng);
        x = Eigen::Vector2d(std::cos(th), std::sin(th));
      }
      CHECK(std::abs(mode.laplacian(x) - mode.eigenvalue * mode.value(x)) <= 1e-10);
    }
  }
}

TEST_CASE("gradients agree with central finite differences") {
  std::mt19937_64 eng(301);
  std::vector<AnalyticMode> modes = {rectangle_mode(1, 1, 1.5, 1.0),
                                     disc_mode(AngularVariant::sine)};
  const double h = 1e-6;
  for (const AnalyticMode& mode : modes) {
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::Vector2d x;
      if (mode.domain.kind == Domain::Kind::rectangle) {
        x = Eigen::Vector2d(0.1 + 1.3 * testutil::unit_double(eng),
                            0.1 + 0.8 * testutil::unit_double(eng));
      } else {
        const double r = 0.05 + 0.85 * testutil::unit_double(eng);
        const double th = 2.0 * M_PI * testutil::unit_double(eng);
        x = Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
      }
      const Eigen::Vector2d g = mode.gradient(x);
      for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d hi = x;
        Eigen::Vector2d lo = x;
        hi(c) += h;
        lo(c) -= h;
        const double fd = (mode.value(hi) - mode.value(lo)) / (2.0 * h);
        CHECK(std::abs(g(c) - fd) <= 1e-4);
      }
    }
  }
}

TEST_CASE("samplers: ranges, moments, determinism") {
  const PointCloud rect = sample_domain(Domain::rectangle(1.5, 1.0), 1000, 42);
  CHECK((rect.points().col(0).array() >= 0.0).all());
  CHECK((rect.points().col(0).array() <= 1.5).all());
  CHECK((rect.points().col(1).array() >= 0.0).all());
  CHECK((rect.points().col(1).array() <= 1.0).all());
  CHECK(std::abs(rect.points().col(0).mean() - 0.75) <= 3.0 * 1.5 / std::sqrt(12.0 * 1000));
  CHECK(std::abs(rect.points().col(1).mean() - 0.50) <= 3.0 * 1.0 / std::sqrt(12.0 * 1000));

  const PointCloud disc = sample_domain(Domain::disc(), 1000, 43);
  CHECK((disc.points().rowwise().norm().array() <= 1.0).all());
  const double mean_r2 = disc.points().rowwise().squaredNorm().mean();
  CHECK(std::abs(mean_r2 - 0.5) <= 3.0 / std::sqrt(12.0 * 1000));

  const PointCloud circle = sample_domain(Domain::circle(), 500, 44);
  CHECK((circle.points().rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);

  const PointCloud again = sample_domain(Domain::disc(), 1000, 43);
  CHECK(std::memcmp(disc.points().data(), again.points().data(),
                    sizeof(double) * disc.points().size()) == 0);
}

TEST_CASE("sampler uniformity: chi-squared over 16 bins") {
  // 0.1% critical value for 15 degrees of freedom.
  const double critical = 37.697;
  const PointCloud circle = sample_domain(Domain::circle(), 4000, 45);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(16);
  for (Eigen::Index i = 0; i < 4000; ++i) {
    double th = std::atan2(circle.points()(i, 1), circle.points()(i, 0));
    if (th < 0) th += 2.0 * M_PI;
    counts(std::min<int>(15, static_cast<int>(th / (2.0 * M_PI) * 16))) += 1.0;
  }
  const double expected = 4000.0 / 16.0;
  const double chi2 = ((counts.array() - expected).square() / expected).sum();
  CHECK(chi2 <= critical);

  const PointCloud rect = sample_domain(Domain::rectangle(1.5, 1.0), 4000, 46);
  counts.setZero();
  for (Eigen::Index i = 0; i < 4000; ++i) {
    counts(std::min<int>(15, static_cast<int>(rect.points()(i, 0) / 1.5 * 16))) += 1.0;
  }
  const double chi2r = ((counts.array() - expected).square() / expected).sum();
  CHECK(chi2r <= critical);
}

TEST_CASE("slope fit: exact data, outlier sensitivity, validation") {
  const double c = 0.37;
  const double eps = 0.01;
  std::vector<std::pair<double, double>> pairs;
  for (double mu : {1.0, 4.0, 9.0}) pairs.emplace_back(mu, 1.0 - c * eps * mu);
  CHECK(generator_slope_fit(pairs, eps) == doctest::Approx(c).epsilon(1e-12));

  auto with_outlier = pairs;
  with_outlier.emplace_back(16.0, 1.0 - 2.0 * c * eps * 16.0);
  const double skewed = generator_slope_fit(with_outlier, eps);
  CHECK(std::abs(skewed - c) > 1e-3);
  with_outlier.pop_back();
  CHECK(generator_slope_fit(with_outlier, eps) == doctest::Approx(c).epsilon(1e-12));

  CHECK_THROWS_AS(generator_slope_fit({{1.0, 0.9}}, eps), InputError);
}

}  // TEST_SUITE
