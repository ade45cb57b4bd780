#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "bistoch/errors.hpp"

namespace bistoch {

/// A set of n points in the ambient space R^d, stored row-wise.
///
/// Immutable after construction; all coordinates are validated to be finite.
class PointCloud {
 public:
  explicit PointCloud(Eigen::MatrixXd points);

  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::RowVectorXd point(Eigen::Index i) const { return points_.row(i); }

  /// Largest pairwise Euclidean distance (O(n^2)).
  double diameter() const;

 private:
  Eigen::MatrixXd points_;
};

/// Radial kernel moments m0 = \int h(|t|^2) dt and m2 = \int t_1^2 h(|t|^2) dt
/// over R^dim.
struct Moments {
  double m0 = 0.0;
  double m2 = 0.0;
};

/// A decreasing kernel shape u >= 0 -> (0, h(0)].
///
/// The default Gaussian profile is h(u) = exp(-u). Custom profiles are
/// validated at construction: h(0) > 0, h nonincreasing, and h bounded by an
/// exponential envelope h(u) <= h(0) * exp(-c u) for some c > 0 on sampled u.
class KernelProfile {
 public:
  static KernelProfile gaussian();
  static KernelProfile custom(std::string name, std::function<double(double)> shape);

  double operator()(double u) const { return shape_(u); }
  const std::string& name() const { return name_; }
  bool is_gaussian() const { return name_ == "gaussian"; }

  /// Moments for a given ambient dimension; computed numerically on first use
  /// and cached. Copies of a profile share the cache.
  Moments moments(int dim) const;

 private:
  KernelProfile(std::string name, std::function<double(double)> shape);
  void validate() const;

  struct Cache {
    std::mutex mutex;
    std::map<int, Moments> by_dim;
  };

  std::string name_;
  std::function<double(double)> shape_;
  std::shared_ptr<Cache> cache_;
};

/// Dense kernel evaluations h(|x_i - y_j|^2 / eps) between two clouds.
///
/// Entries are strictly positive: values below 1e-300 are flushed to the
/// smallest positive normal double so that the balancing iteration always
/// operates on a positive matrix.
struct KernelMatrix {
  Eigen::MatrixXd values;
  double eps = 0.0;
  KernelProfile profile = KernelProfile::gaussian();
  bool symmetric = false;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Entry (i,j) = |a_i - b_j|^2, computed by the direct difference form.
/// When both arguments are the same object the result has an exactly zero
/// diagonal and is bitwise symmetric.
Eigen::MatrixXd pairwise_sq_dists(const PointCloud& a, const PointCloud& b);

KernelMatrix build_kernel_matrix(const PointCloud& a, const PointCloud& b, double eps,
                                 const KernelProfile& profile = KernelProfile::gaussian());

/// Symmetric kernel of a cloud against itself.
KernelMatrix build_kernel_matrix(const PointCloud& a, double eps,
                                 const KernelProfile& profile = KernelProfile::gaussian());

/// m0 and m2 by radial reduction and 1-D adaptive quadrature (relative
/// accuracy better than 1e-8). Throws NumericError if the quadrature does
/// not settle.
Moments kernel_moments(const KernelProfile& profile, int dim);

/// scale times the median off-diagonal pairwise squared distance.
/// Throws InputError when all points coincide (zero median).
double median_bandwidth(const PointCloud& a, double scale = 1.0);

}  // namespace bistoch
