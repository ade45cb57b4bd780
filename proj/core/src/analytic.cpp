#include "bistoch/analytic.hpp"

#include <cmath>
#include <random>

namespace bistoch {

namespace {

constexpr double kSeriesSwitch = 12.0;
constexpr double kBesselWindow = 50.0;

// Power series sum_m (-1)^m (x^2/4)^m / (m! (m+nu)!) scaled for nu = 0, 1.
double bessel_series(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m <= 60; ++m) {
    term *= -q / (static_cast<double>(m) * (m + nu));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return nu == 0 ? sum : 0.5 * x * sum;
}

// Large-argument expansion via the P/Q envelope series.
double bessel_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  const double omega = x - 0.5 * nu * M_PI - 0.25 * M_PI;
  double c = 1.0;
  double p = 1.0;
  double q = 0.0;
  double prev = 1.0;
  for (int k = 1; k <= 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(c) > prev) break;  // asymptotic tail started growing
    prev = std::abs(c);
    const int phase = (k % 4);
    switch (phase) {
      case 1: q += c; break;
      case 2: p -= c; break;
      case 3: q -= c; break;
      default: p += c; break;
    }
    if (std::abs(c) < 1e-18) break;
  }
  return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(omega) - q * std::sin(omega));
}

double bessel_j(int nu, double x) {
  if (!(std::abs(x) <= kBesselWindow)) {
    throw InputError("bessel: |x| exceeds the supported window of 50");
  }
  const double ax = std::abs(x);
  double v = ax <= kSeriesSwitch ? bessel_series(nu, ax) : bessel_asymptotic(nu, ax);
  if (nu == 1 && x < 0.0) v = -v;  // J1 odd, J0 even
  return v;
}

double unit_double(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

Domain Domain::rectangle(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InputError("Domain::rectangle: side lengths must be positive");
  }
  Domain d;
  d.kind = Kind::rectangle;
  d.a = a;
  d.b = b;
  return d;
}

Domain Domain::disc() {
  Domain d;
  d.kind = Kind::disc;
  return d;
}

Domain Domain::circle() {
  Domain d;
  d.kind = Kind::circle;
  return d;
}

AnalyticMode rectangle_mode(int p, int q, double a, double b) {
  if (p < 0 || q < 0) {
    throw InputError("rectangle_mode: mode indices must be nonnegative");
  }
  const Domain dom = Domain::rectangle(a, b);
  const double kx = p * M_PI / a;
  const double ky = q * M_PI / b;
  AnalyticMode mode;
  mode.domain = dom;
  mode.name = "rect(" + std::to_string(p) + "," + std::to_string(q) + ")";
  mode.eigenvalue = kx * kx + ky * ky;
  mode.value = [kx, ky](const Eigen::Vector2d& x) {
    return std::cos(kx * x(0)) * std::cos(ky * x(1));
  };
  mode.gradient = [kx, ky](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(-kx * std::sin(kx * x(0)) * std::cos(ky * x(1)),
                           -ky * std::cos(kx * x(0)) * std::sin(ky * x(1)));
  };
  mode.laplacian = [kx, ky](const Eigen::Vector2d& x) {
    const double f = std::cos(kx * x(0)) * std::cos(ky * x(1));
    const double fxx = -kx * kx * f;
    const double fyy = -ky * ky * f;
    return -(fxx + fyy);
  };
  return mode;
}

double bessel_j0(double x) { return bessel_j(0, x); }

double bessel_j1(double x) { return bessel_j(1, x); }

double bessel_j1_prime(double x) {
  if (std::abs(x) < 1e-12) return 0.5;
  return bessel_j0(x) - bessel_j1(x) / x;
}

double j1prime_root() {
  static const double root = [] {
    double lo = 1.5;
    double hi = 2.5;
    double flo = bessel_j1_prime(lo);
    if (!(flo > 0.0) || !(bessel_j1_prime(hi) < 0.0)) {
      throw NumericError("j1prime_root: bisection bracket lost");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = bessel_j1_prime(mid);
      if (fm > 0.0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

AnalyticMode disc_mode(AngularVariant variant) {
  const double k = j1prime_root();
  const bool cosine = variant == AngularVariant::cosine;
  AnalyticMode mode;
  mode.domain = Domain::disc();
  mode.name = cosine ? "disc(J1 cos)" : "disc(J1 sin)";
  mode.eigenvalue = k * k;
  mode.value = [k, cosine](const Eigen::Vector2d& x) {
    const double r = x.norm();
    if (r < 1e-300) return 0.0;
    const double th = std::atan2(x(1), x(0));
    return bessel_j1(k * r) * (cosine ? std::cos(th) : std::sin(th));
  };
  mode.gradient = [k, cosine](const Eigen::Vector2d& x) {
    const double r = x.norm();
    if (r < 1e-9) {
      // J1(kr) ~ kr/2, so the mode is ~ (k/2) x_1 (cosine) or (k/2) x_2.
      return cosine ? Eigen::Vector2d(0.5 * k, 0.0) : Eigen::Vector2d(0.0, 0.5 * k);
    }
    const double th = std::atan2(x(1), x(0));
    const double ang = cosine ? std::cos(th) : std::sin(th);
    const double dang = cosine ? -std::sin(th) : std::cos(th);
    const Eigen::Vector2d rhat(std::cos(th), std::sin(th));
    const Eigen::Vector2d that(-std::sin(th), std::cos(th));
    return Eigen::Vector2d(k * bessel_j1_prime(k * r) * ang * rhat +
                           bessel_j1(k * r) * dang / r * that);
  };
  mode.laplacian = [k, cosine](const Eigen::Vector2d& x) {
    const double r = x.norm();
    if (r < 1e-9) return 0.0;
    const double th = std::atan2(x(1), x(0));
    const double ang = cosine ? std::cos(th) : std::sin(th);
    const double u = k * r;
    const double j1 = bessel_j1(u);
    const double j1p = bessel_j1_prime(u);
    // J1'' from J1' = J0 - J1/x and J0' = -J1.
    const double j1pp = -j1 - j1p / u + j1 / (u * u);
    const double radial = k * k * j1pp + k * j1p / r - j1 / (r * r);
    return -(radial * ang);
  };
  return mode;
}

AnalyticMode circle_mode(int k, AngularVariant variant) {
  if (k < 1) {
    throw InputError("circle_mode: k must be positive");
  }
  const bool cosine = variant == AngularVariant::cosine;
  const double kk = k;
  AnalyticMode mode;
  mode.domain = Domain::circle();
  mode.name = (cosine ? "circle(cos " : "circle(sin ") + std::to_string(k) + "t)";
  mode.eigenvalue = kk * kk;
  mode.value = [kk, cosine](const Eigen::Vector2d& x) {
    const double th = std::atan2(x(1), x(0));
    return cosine ? std::cos(kk * th) : std::sin(kk * th);
  };
  mode.gradient = [kk, cosine](const Eigen::Vector2d& x) {
    const double r2 = x.squaredNorm();
    const double th = std::atan2(x(1), x(0));
    const double df = cosine ? -kk * std::sin(kk * th) : kk * std::cos(kk * th);
    return Eigen::Vector2d(df * -x(1) / r2, df * x(0) / r2);
  };
  mode.laplacian = [kk, cosine](const Eigen::Vector2d& x) {
    const double th = std::atan2(x(1), x(0));
    const double f = cosine ? std::cos(kk * th) : std::sin(kk * th);
    return kk * kk * f;  // -(d^2/dtheta^2) on the unit circle
  };
  return mode;
}

double circle_heat_coefficient(int k, double t) {
  if (k < 1 || t < 0.0) {
    throw InputError("circle_heat_coefficient: need k >= 1 and t >= 0");
  }
  return std::exp(-static_cast<double>(k) * k * t);
}

PointCloud sample_domain(const Domain& domain, int n, std::uint64_t seed) {
  if (n < 1) {
    throw InputError("sample_domain: n must be >= 1");
  }
  std::mt19937_64 eng(seed);
  Eigen::MatrixXd pts(n, 2);
  switch (domain.kind) {
    case Domain::Kind::rectangle:
      if (!(domain.a > 0.0) || !(domain.b > 0.0)) {
        throw InputError("sample_domain: rectangle sides must be positive");
      }
      for (int i = 0; i < n; ++i) {
        pts(i, 0) = domain.a * unit_double(eng);
        pts(i, 1) = domain.b * unit_double(eng);
      }
      break;
    case Domain::Kind::disc:
      for (int i = 0; i < n; ++i) {
        const double r = std::sqrt(unit_double(eng));
        const double th = 2.0 * M_PI * unit_double(eng);
        pts(i, 0) = r * std::cos(th);
        pts(i, 1) = r * std::sin(th);
      }
      break;
    case Domain::Kind::circle:
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * unit_double(eng);
        pts(i, 0) = std::cos(th);
        pts(i, 1) = std::sin(th);
      }
      break;
  }
  return PointCloud(std::move(pts));
}

double generator_slope_fit(const std::vector<std::pair<double, double>>& pairs, double eps) {
  if (pairs.size() < 2) {
    throw InputError("generator_slope_fit: need at least two pairs");
  }
  if (!(eps > 0.0)) {
    throw InputError("generator_slope_fit: eps must be positive");
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& [mu, lambda] : pairs) {
    const double rate = (1.0 - lambda) / eps;
    num += mu * rate;
    den += mu * mu;
  }
  if (!(den > 0.0)) {
    throw InputError("generator_slope_fit: analytic eigenvalues are all zero");
  }
  return num / den;
}

}  // namespace bistoch
