#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bistoch/geometry.hpp"

namespace bistoch {

/// Validation domains with closed-form Neumann eigenfunctions.
struct Domain {
  enum class Kind { rectangle, disc, circle };

  Kind kind = Kind::rectangle;
  double a = 0.0;  // rectangle side lengths
  double b = 0.0;

  static Domain rectangle(double a, double b);
  static Domain disc();
  static Domain circle();
};

enum class AngularVariant { cosine, sine };

/// A closed-form Neumann Laplacian eigenfunction with pointwise evaluators
/// for the function, its ambient gradient, and its (positive semi-definite)
/// Laplacian.
struct AnalyticMode {
  Domain domain;
  std::string name;
  double eigenvalue = 0.0;
  std::function<double(const Eigen::Vector2d&)> value;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> gradient;
  std::function<double(const Eigen::Vector2d&)> laplacian;
};

/// cos(p pi x1 / a) cos(q pi x2 / b) on [0,a] x [0,b], eigenvalue
/// pi^2 (p^2/a^2 + q^2/b^2).
AnalyticMode rectangle_mode(int p, int q, double a, double b);

/// Bessel functions of the first kind, power series for |x| <= 12 and the
/// large-argument expansion beyond, valid for |x| <= 50.
double bessel_j0(double x);
double bessel_j1(double x);
/// J1'(x) = J0(x) - J1(x)/x (limit 1/2 at x = 0).
double bessel_j1_prime(double x);
/// Smallest positive root of J1', located by bisection to 1e-12.
double j1prime_root();

/// J1(lambda1 r) cos(theta) or sin(theta) on the unit disc, where lambda1 is
/// the first positive root of J1'; eigenvalue lambda1^2. The gradient at the
/// origin is the finite limit of the chain-rule expression.
AnalyticMode disc_mode(AngularVariant variant);

/// cos(k theta) / sin(k theta) on the unit circle, eigenvalue k^2.
AnalyticMode circle_mode(int k, AngularVariant variant);

/// Heat semigroup coefficient e^{-k^2 t} of circle mode k.
double circle_heat_coefficient(int k, double t);

/// Seeded, reproducible uniform sampler (mt19937_64 with a fixed 53-bit
/// mantissa mapping, so outputs are bitwise stable across platforms).
/// Rectangle: independent uniforms per coordinate. Disc: r = sqrt(u) method.
/// Circle: uniform angle, embedded in R^2.
PointCloud sample_domain(const Domain& domain, int n, std::uint64_t seed);

/// Least-squares slope through the origin of (1 - lambda)/eps against the
/// analytic eigenvalue, over (mu_analytic, lambda_measured) pairs.
double generator_slope_fit(const std::vector<std::pair<double, double>>& pairs, double eps);

}  // namespace bistoch
