#include "bistoch/sinkhorn.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <string>

namespace bistoch {

namespace {

using KernelAction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

constexpr double kIterateFloor = 1e-300;

void check_iterate(const Eigen::VectorXd& v, const char* where) {
  if (!v.allFinite()) {
    throw NumericError(std::string(where) + ": non-finite marginal iterate");
  }
  if ((v.array() < kIterateFloor).any()) {
    throw NumericError(std::string(where) + ": marginal iterate underflowed");
  }
}

double geometric_mean(const Eigen::VectorXd& v) {
  return std::exp(v.array().log().mean());
}

double elementwise_std(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().mean());
}

double marginal_residual(const KernelAction& act, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& w) {
  const Eigen::VectorXd u = (d.array() * w.array()).inverse();
  const Eigen::VectorXd marg = act(u).cwiseQuotient(d);
  return (marg.array() - 1.0).abs().maxCoeff();
}

ScalingResult balance_standard(const KernelAction& act, const Eigen::VectorXd& w,
                               const SinkhornOptions& opts) {
  const Eigen::Index n = w.size();
  Eigen::VectorXd iterate = Eigen::VectorXd::Ones(n);
  ScalingResult result;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Eigen::VectorXd next = act((iterate.array() * w.array()).inverse().matrix());
    check_iterate(next, "sinkhorn");
    const Eigen::VectorXd d = (next.array() * iterate.array()).sqrt().matrix();
    result.d = d;
    result.iterations = it;
    result.residual = marginal_residual(act, d, w);
    if (result.residual <= opts.tolerance) {
      result.converged = true;
      result.alpha_estimate = geometric_mean(next.cwiseQuotient(d));
      result.oscillation_std = elementwise_std(next.cwiseQuotient(iterate));
      return result;
    }
    iterate = next;
  }
  throw ConvergenceError("sinkhorn: max iterations reached with residual " +
                             std::to_string(result.residual),
                         result);
}

ScalingResult balance_accelerated(const KernelAction& act, const Eigen::VectorXd& w,
                                  const SinkhornOptions& opts) {
  const Eigen::Index n = w.size();
  Eigen::VectorXd scaling = Eigen::VectorXd::Ones(n);
  std::deque<double> history;
  ScalingResult result;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const Eigen::VectorXd full = act((scaling.array() * w.array()).inverse().matrix());
    check_iterate(full, "sinkhorn accelerated");
    const Eigen::VectorXd ratio = full.cwiseQuotient(scaling);
    result.d = scaling;
    result.iterations = it;
    result.residual = (ratio.array() - 1.0).abs().maxCoeff();
    if (result.residual <= opts.tolerance) {
      result.converged = true;
      result.alpha_estimate = geometric_mean(ratio);
      result.oscillation_std = elementwise_std(ratio);
      return result;
    }
    history.push_back(result.residual);
    if (history.size() > 50) {
      const double past = history.front();
      history.pop_front();
      if (result.residual > 10.0 * past) {
        throw ConvergenceError("sinkhorn accelerated: residual diverging (" +
                                   std::to_string(result.residual) + " after " +
                                   std::to_string(it) + " iterations)",
                               result);
      }
    }
    if (it == opts.max_iterations) break;
    const Eigen::VectorXd half = act((full.array() * w.array()).inverse().matrix());
    check_iterate(half, "sinkhorn accelerated");
    scaling = (full.array() * half.array()).sqrt().matrix();
  }
  throw ConvergenceError("sinkhorn accelerated: max iterations reached with residual " +
                             std::to_string(result.residual),
                         result);
}

void check_symmetric_inputs(const KernelMatrix& K, const WeightVector& w) {
  if (!K.symmetric || K.rows() != K.cols()) {
    throw InputError("sinkhorn_symmetric: kernel must be symmetric and square");
  }
  if (w.size() != K.rows()) {
    throw InputError("sinkhorn_symmetric: weight length does not match kernel size");
  }
  if (!(K.values.array() > 0.0).all()) {
    throw InputError("sinkhorn_symmetric: kernel entries must be strictly positive");
  }
}

KernelAction reference_action(const KernelMatrix& K, const WeightVector& v) {
  return [&K, &v](const Eigen::VectorXd& x) {
    const Eigen::VectorXd t = (K.values.transpose() * x).cwiseQuotient(v.weights);
    return Eigen::VectorXd(K.values * t);
  };
}

}  // namespace

ScalingResult sinkhorn_symmetric(const KernelMatrix& K, const WeightVector& w,
                                 const SinkhornOptions& opts) {
  check_symmetric_inputs(K, w);
  const KernelAction act = [&K](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(K.values * x);
  };
  return balance_standard(act, w.weights, opts);
}

ScalingResult sinkhorn_symmetric_accelerated(const KernelMatrix& K, const WeightVector& w,
                                             const SinkhornOptions& opts) {
  check_symmetric_inputs(K, w);
  const KernelAction act = [&K](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(K.values * x);
  };
  return balance_accelerated(act, w.weights, opts);
}

ScalingResult sinkhorn_reference(const KernelMatrix& K, const WeightVector& v,
                                 const WeightVector& w, const SinkhornOptions& opts) {
  if (w.size() != K.rows() || v.size() != K.cols()) {
    throw InputError("sinkhorn_reference: weight lengths do not match kernel shape");
  }
  if (!(K.values.array() > 0.0).all()) {
    throw InputError("sinkhorn_reference: kernel entries must be strictly positive");
  }
  const KernelAction act = reference_action(K, v);
  if (opts.variant == SinkhornOptions::Variant::accelerated) {
    return balance_accelerated(act, w.weights, opts);
  }
  return balance_standard(act, w.weights, opts);
}

double bistochastic_residual(const KernelMatrix& K, const Eigen::VectorXd& d,
                             const WeightVector& w) {
  if (d.size() != K.rows() || w.size() != K.cols() || K.rows() != K.cols()) {
    throw InputError("bistochastic_residual: inconsistent dimensions");
  }
  const Eigen::VectorXd u = (d.array() * w.weights.array()).inverse();
  const Eigen::VectorXd row = (K.values * u).cwiseQuotient(d);
  const Eigen::VectorXd col = (K.values.transpose() * u).cwiseQuotient(d);
  return std::max((row.array() - 1.0).abs().maxCoeff(), (col.array() - 1.0).abs().maxCoeff());
}

double bistochastic_residual(const KernelMatrix& K, const Eigen::VectorXd& d,
                             const WeightVector& w, const WeightVector& v) {
  if (d.size() != K.rows() || w.size() != K.rows() || v.size() != K.cols()) {
    throw InputError("bistochastic_residual: inconsistent dimensions");
  }
  const Eigen::VectorXd marg = reference_action(K, v)(
      (d.array() * w.weights.array()).inverse().matrix()).cwiseQuotient(d);
  return (marg.array() - 1.0).abs().maxCoeff();
}

}  // namespace bistoch
