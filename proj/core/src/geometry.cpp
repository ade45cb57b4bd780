#include "bistoch/geometry.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace bistoch {

namespace {

constexpr double kPositivityFloor = 1e-300;

// Adaptive Simpson on [a, b]. tol is an absolute tolerance for this interval.
double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  if (depth > 60) {
    throw NumericError("adaptive quadrature did not converge (recursion depth exhausted)");
  }
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw NumericError("adaptive quadrature: non-finite integrand");
  }
  const double whole = simpson(a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

// Surface area of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int dim) {
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

}  // namespace

PointCloud::PointCloud(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw InputError("PointCloud requires n >= 1 points and dimension >= 1");
  }
  if (!points_.allFinite()) {
    throw InputError("PointCloud coordinates must be finite");
  }
}

double PointCloud::diameter() const {
  const Eigen::Index n = size();
  double best = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      best = std::max(best, (points_.row(i) - points_.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

KernelProfile::KernelProfile(std::string name, std::function<double(double)> shape)
    : name_(std::move(name)), shape_(std::move(shape)), cache_(std::make_shared<Cache>()) {}

KernelProfile KernelProfile::gaussian() {
  return KernelProfile("gaussian", [](double u) { return std::exp(-u); });
}

KernelProfile KernelProfile::custom(std::string name, std::function<double(double)> shape) {
  if (name == "gaussian") {
    throw InputError("kernel profile: the name 'gaussian' is reserved for the built-in");
  }
  KernelProfile p(std::move(name), std::move(shape));
  p.validate();
  return p;
}

void KernelProfile::validate() const {
  const double h0 = shape_(0.0);
  if (!(h0 > 0.0) || !std::isfinite(h0)) {
    throw InputError("kernel profile: h(0) must be positive and finite");
  }
  double prev = h0;
  for (double u : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    const double hu = shape_(u);
    if (!(hu > 0.0) || !std::isfinite(hu)) {
      throw InputError("kernel profile: h must be strictly positive and finite");
    }
    if (hu > prev * (1.0 + 1e-12)) {
      throw InputError("kernel profile: h must be nonincreasing");
    }
    prev = hu;
  }
  // Exponential envelope: anchor the rate at u = 1 and require half that
  // rate to keep bounding h out to the tail samples.
  const double anchor = -std::log(shape_(1.0) / h0);
  if (!(anchor > 0.0)) {
    throw InputError("kernel profile: h must decay at least exponentially");
  }
  const double rate = 0.5 * anchor;
  for (double u : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    if (shape_(u) > h0 * std::exp(-rate * u) * (1.0 + 1e-9)) {
      throw InputError("kernel profile: h must decay at least exponentially");
    }
  }
}

Moments KernelProfile::moments(int dim) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->by_dim.find(dim);
    if (it != cache_->by_dim.end()) return it->second;
  }
  const Moments m = kernel_moments(*this, dim);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->by_dim[dim] = m;
  return m;
}

Eigen::MatrixXd pairwise_sq_dists(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) {
    throw InputError("pairwise_sq_dists: ambient dimensions differ");
  }
  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  Eigen::MatrixXd out(n, m);
  const bool same = (&a == &b);
  if (same) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = (a.points().row(i) - a.points().row(j)).squaredNorm();
        out(i, j) = v;
        out(j, i) = v;
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        out(i, j) = (a.points().row(i) - b.points().row(j)).squaredNorm();
      }
    }
  }
  return out;
}

namespace {

KernelMatrix kernel_from_dists(Eigen::MatrixXd dists, double eps, const KernelProfile& profile,
                               bool symmetric) {
  if (!(eps > 0.0)) {
    throw InputError("build_kernel_matrix: eps must be positive");
  }
  if (!dists.allFinite()) {
    throw InputError("build_kernel_matrix: non-finite pairwise distance");
  }
  KernelMatrix K;
  K.eps = eps;
  K.profile = profile;
  K.symmetric = symmetric;
  K.values = dists.unaryExpr([&](double u) {
    const double v = profile(u / eps);
    return v < kPositivityFloor ? DBL_MIN : v;
  });
  return K;
}

}  // namespace

KernelMatrix build_kernel_matrix(const PointCloud& a, const PointCloud& b, double eps,
                                 const KernelProfile& profile) {
  const bool same = (&a == &b);
  return kernel_from_dists(same ? pairwise_sq_dists(a, a) : pairwise_sq_dists(a, b), eps,
                           profile, same);
}

KernelMatrix build_kernel_matrix(const PointCloud& a, double eps, const KernelProfile& profile) {
  return kernel_from_dists(pairwise_sq_dists(a, a), eps, profile, true);
}

Moments kernel_moments(const KernelProfile& profile, int dim) {
  if (dim < 1) {
    throw InputError("kernel_moments: dimension must be >= 1");
  }
  // Pick the radial cutoff from the profile's decay.
  double radius = 4.0;
  while (radius < 1024.0 &&
         profile(radius * radius) * (std::pow(radius, dim + 1) + 1.0) > 1e-30) {
    radius *= 2.0;
  }
  const auto radial = [&](int power) {
    const std::function<double(double)> f = [&profile, power](double r) {
      return profile(r * r) * std::pow(r, power);
    };
    return adaptive_simpson(f, 0.0, radius, 1e-13);
  };
  const double area = unit_sphere_area(dim);
  Moments m;
  m.m0 = area * radial(dim - 1);
  m.m2 = area / dim * radial(dim + 1);
  if (!(m.m0 > 0.0) || !(m.m2 > 0.0) || !std::isfinite(m.m0) || !std::isfinite(m.m2)) {
    throw NumericError("kernel_moments: quadrature produced a non-positive moment");
  }
  return m;
}

double median_bandwidth(const PointCloud& a, double scale) {
  if (a.size() < 2) {
    throw InputError("median_bandwidth: need at least two points");
  }
  if (!(scale > 0.0)) {
    throw InputError("median_bandwidth: scale must be positive");
  }
  const Eigen::Index n = a.size();
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      vals.push_back((a.points().row(i) - a.points().row(j)).squaredNorm());
    }
  }
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  double med = vals[mid];
  if (vals.size() % 2 == 0) {
    const double lower = *std::max_element(vals.begin(), vals.begin() + mid);
    med = 0.5 * (med + lower);
  }
  if (!(med > 0.0)) {
    throw InputError("median_bandwidth: all points identical (zero median distance)");
  }
  return scale * med;
}

}  // namespace bistoch
