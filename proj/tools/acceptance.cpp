#include "acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "bistoch/analytic.hpp"
#include "bistoch/geometry.hpp"
#include "bistoch/gradients.hpp"
#include "bistoch/measures.hpp"
#include "bistoch/operators.hpp"
#include "bistoch/refselect.hpp"
#include "bistoch/sinkhorn.hpp"
#include "bistoch/spectral.hpp"

namespace bistoch::acceptance {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double unit_double(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Relative elementwise difference after removing the global constant the
// balancing equation leaves free (matched in log space).
double rel_diff_up_to_constant(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double s = std::exp((a.array().log() - b.array().log()).mean());
  return ((b * s - a).cwiseQuotient(a)).cwiseAbs().maxCoeff();
}

double weighted_norm(const Eigen::VectorXd& f, const Eigen::VectorXd& w) {
  return std::sqrt((f.array().square() / w.array()).sum());
}

double weighted_dot(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                    const Eigen::VectorXd& w) {
  return (f.array() * g.array() / w.array()).sum();
}

SinkhornOptions accel_opts(double tol = 1e-10, int maxit = 500) {
  SinkhornOptions o;
  o.tolerance = tol;
  o.max_iterations = maxit;
  o.variant = SinkhornOptions::Variant::accelerated;
  return o;
}

// ---------------------------------------------------------------------------
// Shared fixtures

struct RectangleContext {
  PointCloud cloud;
  KernelMatrix kernel;
  WeightVector weights;
  ScalingResult scaling;  // standard variant, tol 1e-10
  std::unique_ptr<BistochasticOperator> op;
  SpectralDecomposition dec;  // k = 20

  RectangleContext()
      : cloud(sample_domain(Domain::rectangle(1.5, 1.0), 500, 101)),
        kernel(build_kernel_matrix(cloud, median_bandwidth(cloud))) {
    weights = weight_from_degree(degree_vector(kernel), 1.0);
    SinkhornOptions opts;  // standard, tol 1e-10, max 1000
    scaling = sinkhorn_symmetric(kernel, weights, opts);
    op = std::make_unique<BistochasticOperator>(kernel, scaling, weights);
    dec = eigendecompose_b(*op, 20);
  }
};

struct CircleContext {
  PointCloud cloud;
  KernelMatrix kernel;
  WeightVector weights;
  std::unique_ptr<BistochasticOperator> op;
  SpectralDecomposition dec;       // k = 8
  Eigen::VectorXd averaging_top;   // top eigenvalues of the averaging operator

  CircleContext() : cloud(sample_domain(Domain::circle(), 2000, 303)),
                    kernel(build_kernel_matrix(cloud, 0.01)) {
    weights = weight_from_degree(degree_vector(kernel), 1.0);
    const ScalingResult scaling = sinkhorn_symmetric_accelerated(kernel, weights, accel_opts());
    op = std::make_unique<BistochasticOperator>(kernel, scaling, weights);
    dec = eigendecompose_b(*op, 8);

    AveragingOperator avg(kernel);
    const Eigen::VectorXd s = avg.row_norms().array().sqrt().inverse();
    const Eigen::MatrixXd sym = s.asDiagonal() * avg.normalized_kernel() * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    averaging_top = solver.eigenvalues().tail(8).reverse();
  }
};

struct DiscContext {
  PointCloud data;
  std::optional<PointCloud> ref;
  std::optional<KernelMatrix> kernel;  // n x m
  WeightVector weights;
  WeightVector ref_weights;
  std::unique_ptr<ReferenceOperator> op;
  SpectralDecomposition dec;  // k = 6

  DiscContext() : data(sample_domain(Domain::disc(), 1000, 404)) {
    const double eps = 0.05;
    const KernelMatrix kxx = build_kernel_matrix(data, eps);
    const SelectionResult sel = pivoted_gram_schmidt(kxx, 100);
    Eigen::MatrixXd pts(100, 2);
    for (int i = 0; i < 100; ++i) pts.row(i) = data.points().row(sel.indices[i]);
    ref.emplace(std::move(pts));
    kernel = build_kernel_matrix(data, *ref, eps);
    const KernelMatrix krr = build_kernel_matrix(*ref, eps);
    weights = weight_from_degree(degree_vector(kxx), 1.0);
    ref_weights = weight_from_degree(degree_vector(krr), 1.0);
    const ScalingResult scaling = sinkhorn_reference(*kernel, ref_weights, weights, accel_opts());
    op = std::make_unique<ReferenceOperator>(*kernel, scaling, weights, ref_weights);
    dec = svd_reference(*op, 6);
  }
};

struct HeatContext {
  PointCloud cloud;
  std::unique_ptr<BistochasticOperator> op;
  SpectralDecomposition dec;  // k = 4

  HeatContext() : cloud(sample_domain(Domain::circle(), 2000, 505)) {
    const KernelMatrix k = build_kernel_matrix(cloud, 0.005);
    const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
    const ScalingResult scaling = sinkhorn_symmetric_accelerated(k, w, accel_opts());
    op = std::make_unique<BistochasticOperator>(k, scaling, w);
    dec = eigendecompose_b(*op, 4);
  }
};

struct Session {
  std::optional<RectangleContext> rect;
  std::optional<CircleContext> circle;
  std::optional<DiscContext> disc;
  std::optional<HeatContext> heat;

  RectangleContext& rectangle() {
    if (!rect) rect.emplace();
    return *rect;
  }
  CircleContext& circle_ctx() {
    if (!circle) circle.emplace();
    return *circle;
  }
  DiscContext& disc_ctx() {
    if (!disc) disc.emplace();
    return *disc;
  }
  HeatContext& heat_ctx() {
    if (!heat) heat.emplace();
    return *heat;
  }
};

// ---------------------------------------------------------------------------
// Criteria

CheckResult check_bistochasticity(Session& s) {
  auto& ctx = s.rectangle();
  const Eigen::VectorXd& d = ctx.scaling.d;
  const Eigen::VectorXd& w = ctx.weights.weights;
  const Eigen::Index n = d.size();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    double col = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      row += ctx.kernel.values(i, j) / (d(i) * d(j) * w(j));
      col += ctx.kernel.values(j, i) / (d(j) * d(i) * w(j));
    }
    worst = std::max({worst, std::abs(row - 1.0), std::abs(col - 1.0)});
  }
  const bool pass = ctx.scaling.converged && ctx.scaling.iterations <= 1000 &&
                    ctx.scaling.residual <= 1e-10 && worst <= 1e-10;
  CheckResult r{1, "bi-stochasticity (n=500 rectangle, median eps, beta=1)", pass,
                "iterations=" + std::to_string(ctx.scaling.iterations) +
                    ", residual=" + num(ctx.scaling.residual) +
                    ", marginal deviation=" + num(worst) + " (tol 1e-10)"};
  return r;
}

CheckResult check_constant_mode(Session& s) {
  auto eval = [](const SpectralDecomposition& dec) {
    const double lam_err = std::abs(dec.eigenvalues(0) - 1.0);
    const Eigen::VectorXd phi0 = dec.phi.col(0);
    const double mean = phi0.mean();
    const double cv = std::sqrt((phi0.array() - mean).square().mean()) / std::abs(mean);
    return std::pair<double, double>(lam_err, cv);
  };
  const auto [berr, bcv] = eval(s.rectangle().dec);
  const auto [cerr, ccv] = eval(s.disc_ctx().dec);
  const bool pass = berr <= 1e-8 && cerr <= 1e-8 && bcv <= 1e-6 && ccv <= 1e-6;
  return {2, "constant mode lambda_0 = 1, phi_0 constant (both pipelines)", pass,
          "|lambda0-1|: single=" + num(berr) + ", reference=" + num(cerr) +
              "; phi0 cv: single=" + num(bcv) + ", reference=" + num(ccv)};
}

CheckResult check_zero_gradient(Session& s) {
  // Rebalance the rectangle tighter so the k = 0 cancellation is tested at
  // its algebraic scale rather than at the default solver tolerance.
  auto& rect = s.rectangle();
  const ScalingResult tight =
      sinkhorn_symmetric_accelerated(rect.kernel, rect.weights, accel_opts(1e-12, 500));
  const BistochasticOperator bop(rect.kernel, tight, rect.weights);
  const SpectralDecomposition bdec = eigendecompose_b(bop, 2);
  const GradientField gb = eigen_gradient_b(bop, bdec, rect.cloud.points(), 0);
  const double bbound = 1e-10 * rect.cloud.diameter() / bop.eps();
  const double bmax = gb.vectors.cwiseAbs().maxCoeff();

  auto& disc = s.disc_ctx();
  const GradientField gc = eigen_gradient_c(*disc.op, disc.dec, disc.ref->points(), 0);
  const double cbound = 1e-10 * disc.data.diameter() / disc.op->eps();
  const double cmax = gc.vectors.cwiseAbs().maxCoeff();

  const bool pass = bmax <= bbound && cmax <= cbound;
  return {3, "constant-mode gradient vanishes (both variants)", pass,
          "single: max=" + num(bmax) + " bound=" + num(bbound) +
              "; reference: max=" + num(cmax) + " bound=" + num(cbound)};
}

CheckResult check_oscillation(Session& s) {
  auto& ctx = s.rectangle();
  const bool pass = ctx.scaling.oscillation_std <= 1e-8 && ctx.scaling.residual <= 1e-10;
  return {4, "even/odd iterate oscillation settles to a constant", pass,
          "ratio std=" + num(ctx.scaling.oscillation_std) +
              " (tol 1e-8), geometric-mean residual=" + num(ctx.scaling.residual)};
}

CheckResult check_circle_spectrum(Session& s) {
  auto& ctx = s.circle_ctx();
  const double base = 1.0 - ctx.dec.eigenvalues(1);
  const double targets[6] = {1, 1, 4, 4, 9, 9};
  double worst = 0.0;
  std::vector<std::pair<double, double>> pairs;
  for (int k = 1; k <= 6; ++k) {
    const double ratio = (1.0 - ctx.dec.eigenvalues(k)) / base;
    worst = std::max(worst, std::abs(ratio - targets[k - 1]) / targets[k - 1]);
    pairs.emplace_back(targets[k - 1], ctx.dec.eigenvalues(k));
  }
  const double slope = generator_slope_fit(pairs, 0.01);
  const Moments mom = KernelProfile::gaussian().moments(2);
  const double expected = mom.m2 / (2.0 * mom.m0);
  const double slope_err = std::abs(slope - expected) / expected;
  const bool pass = worst <= 0.10 && slope_err <= 0.15;
  return {5, "circle spectrum ratios {1,1,4,4,9,9} and generator slope", pass,
          "max ratio error=" + num(worst) + " (tol 0.10); slope=" + num(slope) +
              " vs " + num(expected) + " (err " + num(slope_err) + ", tol 0.15)"};
}

CheckResult check_rectangle_modes(Session&) {
  const double a = 1.5;
  const double b = 1.0;
  const double eps = 0.02;
  const int mode_idx[4][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}};
  Eigen::Vector4d resid_sum = Eigen::Vector4d::Zero();
  double cos_sum = 0.0;
  const std::uint64_t seeds[5] = {11, 12, 13, 14, 15};
  for (std::uint64_t seed : seeds) {
    const PointCloud cloud = sample_domain(Domain::rectangle(a, b), 1000, seed);
    const KernelMatrix k = build_kernel_matrix(cloud, eps);
    const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
    const ScalingResult scaling = sinkhorn_symmetric_accelerated(k, w, accel_opts());
    const BistochasticOperator op(k, scaling, w);
    const SpectralDecomposition dec = eigendecompose_b(op, 5);

    for (int m = 0; m < 4; ++m) {
      const AnalyticMode mode = rectangle_mode(mode_idx[m][0], mode_idx[m][1], a, b);
      Eigen::VectorXd f(cloud.size());
      for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        f(i) = mode.value(cloud.points().row(i).transpose());
      }
      const double fn = weighted_norm(f, w.weights);
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(cloud.size());
      for (int j = 1; j <= 4; ++j) {
        proj += weighted_dot(f, dec.phi.col(j), w.weights) * dec.phi.col(j);
      }
      resid_sum(m) += weighted_norm(f - proj, w.weights) / fn;
    }

    const GradientField grad = eigen_gradient_b(op, dec, cloud.points(), 1);
    const AnalyticMode first = rectangle_mode(1, 0, a, b);
    double csum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
      const Eigen::Vector2d x = cloud.points().row(i).transpose();
      if (x(0) < 0.15 || x(0) > a - 0.15 || x(1) < 0.15 || x(1) > b - 0.15) continue;
      const Eigen::Vector2d g = grad.vectors.row(i).transpose();
      const Eigen::Vector2d ga = first.gradient(x);
      const double nn = g.norm() * ga.norm();
      if (nn < 1e-14) continue;
      csum += g.dot(ga) / nn;
      ++count;
    }
    cos_sum += std::abs(csum / count);
  }
  const Eigen::Vector4d resid = resid_sum / 5.0;
  const double mean_cos = cos_sum / 5.0;
  const bool pass = resid.maxCoeff() <= 0.25 && mean_cos >= 0.90;
  return {6, "rectangle top-4 mode subspace + first gradient field (5 seeds)", pass,
          "projection residuals=[" + num(resid(0)) + ", " + num(resid(1)) + ", " +
              num(resid(2)) + ", " + num(resid(3)) + "] (tol 0.25); interior |cos|=" +
              num(mean_cos) + " (min 0.90)"};
}

CheckResult check_disc_reference(Session& s) {
  auto& ctx = s.disc_ctx();
  const double l1 = ctx.dec.eigenvalues(1);
  const double l2 = ctx.dec.eigenvalues(2);
  const double gap = std::abs(l1 - l2) / l1;

  const AnalyticMode mc = disc_mode(AngularVariant::cosine);
  const AnalyticMode ms = disc_mode(AngularVariant::sine);
  std::vector<Eigen::Index> interior;
  for (Eigen::Index i = 0; i < ctx.data.size(); ++i) {
    if (ctx.data.points().row(i).norm() < 0.8) interior.push_back(i);
  }
  Eigen::MatrixXd basis(2 * interior.size(), 2);
  for (std::size_t t = 0; t < interior.size(); ++t) {
    const Eigen::Vector2d x = ctx.data.points().row(interior[t]).transpose();
    basis.block<2, 1>(2 * t, 0) = mc.gradient(x);
    basis.block<2, 1>(2 * t, 1) = ms.gradient(x);
  }
  double resid_sum = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const GradientField g = eigen_gradient_c(*ctx.op, ctx.dec, ctx.ref->points(), k);
    Eigen::VectorXd y(2 * interior.size());
    for (std::size_t t = 0; t < interior.size(); ++t) {
      y.segment<2>(2 * t) = g.vectors.row(interior[t]).transpose();
    }
    const Eigen::Vector2d coeffs = basis.colPivHouseholderQr().solve(y);
    resid_sum += (y - basis * coeffs).norm() / y.norm();
  }
  const double mean_resid = resid_sum / 2.0;
  const bool pass = gap <= 0.10 && mean_resid <= 0.3;
  return {7, "disc reference pipeline: multiplicity-2 mode and gradient span", pass,
          "|l1-l2|/l1=" + num(gap) + " (tol 0.10); mean interior span residual=" +
              num(mean_resid) + " (tol 0.3)"};
}

CheckResult check_heat_semigroup(Session& s) {
  auto& ctx = s.heat_ctx();
  const double eps = ctx.op->eps();
  const double c = (1.0 - ctx.dec.eigenvalues(1)) / eps;
  const Moments mom = KernelProfile::gaussian().moments(2);
  const double expected = mom.m2 / (2.0 * mom.m0);  // times analytic rate 1
  const double c_err = std::abs(c - expected) / expected;

  Eigen::VectorXd f(ctx.cloud.size());
  for (Eigen::Index i = 0; i < ctx.cloud.size(); ++i) {
    f(i) = std::atan2(ctx.cloud.points()(i, 1), ctx.cloud.points()(i, 0));
    f(i) = std::cos(f(i));
  }
  const double t = 0.1;
  int steps = 0;
  const Eigen::VectorXd evolved = ctx.op->power_apply(f, t, &steps);
  const Eigen::VectorXd target = std::exp(-c * t) * f;
  const double rel = (evolved - target).norm() / f.norm();
  const bool pass = rel <= 0.05 && c_err <= 0.15;
  return {8, "heat semigroup on the circle (t=0.1, eps=0.005)", pass,
          "steps=" + std::to_string(steps) + ", relative L2 error=" + num(rel) +
              " (tol 0.05); rate c=" + num(c) + " vs " + num(expected) + " (err " +
              num(c_err) + ", tol 0.15)"};
}

CheckResult check_oracle_equivalences(Session&) {
  std::ostringstream details;
  bool pass = true;

  // (a) reference balancing vs symmetric balancing on the materialized product.
  {
    const PointCloud cloud = sample_domain(Domain::rectangle(1.0, 1.0), 40, 606);
    const double eps = median_bandwidth(cloud, 0.5);
    const KernelMatrix k = build_kernel_matrix(cloud, eps);
    const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
    const ScalingResult ref = sinkhorn_reference(k, w, w, accel_opts(1e-12, 2000));

    const Eigen::Index n = cloud.size();
    Eigen::MatrixXd prod(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        double acc = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
          acc += k.values(i, l) * k.values(j, l) / w.weights(l);
        }
        prod(i, j) = acc;
        prod(j, i) = acc;
      }
    }
    KernelMatrix pk;
    pk.values = prod;
    pk.eps = eps;
    pk.symmetric = true;
    const ScalingResult sym = sinkhorn_symmetric_accelerated(pk, w, accel_opts(1e-12, 2000));
    const double diff = rel_diff_up_to_constant(sym.d, ref.d);
    pass = pass && diff <= 1e-8;
    details << "reference-vs-product d diff=" << num(diff) << " (tol 1e-8)";
  }

  // (b) gradient formulas vs term-by-term transcriptions on small instances.
  {
    const PointCloud cloud = sample_domain(Domain::rectangle(1.0, 1.0), 8, 707);
    const double eps = median_bandwidth(cloud, 0.5);
    const KernelMatrix k = build_kernel_matrix(cloud, eps);
    const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
    const ScalingResult scaling = sinkhorn_symmetric_accelerated(k, w, accel_opts(1e-13, 2000));
    const BistochasticOperator op(k, scaling, w);
    const SpectralDecomposition dec = eigendecompose_b(op, 4);
    double worst = 0.0;
    for (int mode = 1; mode <= 2; ++mode) {
      const GradientField field = eigen_gradient_b(op, dec, cloud.points(), mode);
      const double lambda = dec.eigenvalues(mode);
      for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        Eigen::RowVector2d xbar = Eigen::RowVector2d::Zero();
        for (Eigen::Index j = 0; j < cloud.size(); ++j) {
          const double bij = k.values(i, j) / (scaling.d(i) * scaling.d(j));
          xbar += bij / w.weights(j) * cloud.points().row(j);
        }
        Eigen::RowVector2d grad = Eigen::RowVector2d::Zero();
        for (Eigen::Index j = 0; j < cloud.size(); ++j) {
          const double bij = k.values(i, j) / (scaling.d(i) * scaling.d(j));
          grad += (cloud.points().row(j) - xbar) / eps * bij * dec.phi(j, mode) /
                  w.weights(j);
        }
        grad /= lambda;
        worst = std::max(worst, (grad - field.vectors.row(i)).cwiseAbs().maxCoeff() /
                                    field.vectors.cwiseAbs().maxCoeff());
      }
    }
    pass = pass && worst <= 1e-10;
    details << "; single-measure gradient oracle diff=" << num(worst);

    // Reference variant: disc with a selected reference subset.
    const PointCloud ddata = sample_domain(Domain::disc(), 12, 808);
    const double deps = median_bandwidth(ddata, 0.5);
    const KernelMatrix dxx = build_kernel_matrix(ddata, deps);
    const SelectionResult sel = pivoted_gram_schmidt(dxx, 5);
    Eigen::MatrixXd rpts(5, 2);
    for (int i = 0; i < 5; ++i) rpts.row(i) = ddata.points().row(sel.indices[i]);
    const PointCloud rcloud(rpts);
    const KernelMatrix kxr = build_kernel_matrix(ddata, rcloud, deps);
    const KernelMatrix krr = build_kernel_matrix(rcloud, deps);
    const WeightVector dw = weight_from_degree(degree_vector(dxx), 1.0);
    const WeightVector dv = weight_from_degree(degree_vector(krr), 1.0);
    const ScalingResult dscaling = sinkhorn_reference(kxr, dv, dw, accel_opts(1e-13, 2000));
    const ReferenceOperator rop(kxr, dscaling, dw, dv);
    const SpectralDecomposition rdec = svd_reference(rop, 3);
    const GradientField rfield = eigen_gradient_c(rop, rdec, rcloud.points(), 1);
    const double rlambda = rdec.eigenvalues(1);
    const Eigen::Index n = ddata.size();
    const Eigen::Index m = rcloud.size();
    auto coupling = [&](const Eigen::VectorXd& f, Eigen::Index i, Eigen::Index j) {
      double acc = 0.0;
      for (Eigen::Index l = 0; l < n; ++l) {
        acc += kxr.values(l, j) * f(l) / (dscaling.d(l) * dw.weights(l));
      }
      return kxr.values(i, j) * acc / (dscaling.d(i) * dv.weights(j));
    };
    double rworst = 0.0;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd phi = rdec.phi.col(1);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::RowVector2d rbar = Eigen::RowVector2d::Zero();
      for (Eigen::Index j = 0; j < m; ++j) {
        rbar += coupling(ones, i, j) * rcloud.points().row(j);
      }
      Eigen::RowVector2d grad = Eigen::RowVector2d::Zero();
      for (Eigen::Index j = 0; j < m; ++j) {
        grad += (rcloud.points().row(j) - rbar) / deps * coupling(phi, i, j);
      }
      grad /= rlambda;
      rworst = std::max(rworst, (grad - rfield.vectors.row(i)).cwiseAbs().maxCoeff() /
                                    rfield.vectors.cwiseAbs().maxCoeff());
    }
    pass = pass && rworst <= 1e-10;
    details << ", reference gradient oracle diff=" << num(rworst) << " (tol 1e-10)";
  }

  // (c) pivoted selection vs a literal transcription of the update formula.
  {
    int mismatches = 0;
    for (int inst = 0; inst < 20; ++inst) {
      const PointCloud cloud =
          sample_domain(Domain::rectangle(1.0, 1.0), 30, 1000 + inst);
      const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud, 0.5));
      const SelectionResult got = pivoted_gram_schmidt(k, 5);

      Eigen::MatrixXd cols = k.values;
      std::vector<Eigen::Index> expected;
      for (int step = 0; step < 5; ++step) {
        Eigen::Index best = 0;
        double best_norm = -1.0;
        for (Eigen::Index i = 0; i < cols.cols(); ++i) {
          double nrm2 = 0.0;
          for (Eigen::Index r = 0; r < cols.rows(); ++r) nrm2 += cols(r, i) * cols(r, i);
          const double nrm = std::sqrt(nrm2);
          if (nrm > best_norm) {
            best_norm = nrm;
            best = i;
          }
        }
        expected.push_back(best);
        const Eigen::VectorXd pivot = cols.col(best);
        double denom = 0.0;
        for (Eigen::Index r = 0; r < pivot.size(); ++r) denom += pivot(r) * pivot(r);
        Eigen::MatrixXd next = cols;
        for (Eigen::Index i = 0; i < cols.cols(); ++i) {
          double dot = 0.0;
          for (Eigen::Index r = 0; r < pivot.size(); ++r) dot += cols(r, i) * pivot(r);
          for (Eigen::Index r = 0; r < pivot.size(); ++r) {
            next(r, i) = cols(r, i) - dot / denom * pivot(r);
          }
        }
        cols = next;
      }
      if (expected != got.indices) ++mismatches;
    }
    pass = pass && mismatches == 0;
    details << "; selection mismatches=" << mismatches << "/20";
  }

  return {9, "oracle equivalences (balancing, gradients, selection)", pass, details.str()};
}

CheckResult check_self_adjointness(Session& s) {
  auto& ctx = s.rectangle();
  const Eigen::Index n = ctx.cloud.size();
  std::mt19937_64 eng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd f(n);
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f(i) = 2.0 * unit_double(eng) - 1.0;
      g(i) = 2.0 * unit_double(eng) - 1.0;
    }
    f /= f.norm();
    g /= g.norm();
    const double left = weighted_dot(ctx.op->apply(f), g, ctx.weights.weights);
    const double right = weighted_dot(f, ctx.op->apply(g), ctx.weights.weights);
    worst = std::max(worst, std::abs(left - right));
  }
  const Eigen::MatrixXd gram =
      ctx.dec.phi.transpose() *
      ctx.weights.weights.cwiseInverse().asDiagonal() * ctx.dec.phi;
  const double orth =
      (gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff();
  const bool pass = worst <= 1e-12 && orth <= 1e-8;
  return {10, "self-adjointness and weighted orthonormality (k=20)", pass,
          "max <Bf,g>-<f,Bg>=" + num(worst) + " (tol 1e-12); |Phi' W^-1 Phi - I|=" +
              num(orth) + " (tol 1e-8)"};
}

CheckResult check_averaging_comparison(Session& s) {
  // Row-stochasticity and column deviation on a deliberately nonuniform
  // segment sample (density piles up near the origin).
  std::mt19937_64 eng(909);
  Eigen::MatrixXd pts(200, 2);
  for (int i = 0; i < 200; ++i) {
    const double u = unit_double(eng);
    pts(i, 0) = u * u;
    pts(i, 1) = 0.0;
  }
  const PointCloud cloud((Eigen::MatrixXd(pts)));
  const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud, 0.3));
  const AveragingOperator avg(k);
  const Eigen::Index n = cloud.size();
  double row_dev = 0.0;
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = avg.normalized_kernel()(i, j) / avg.row_norms()(i);
      row += a;
      colsum(j) += a;
    }
    row_dev = std::max(row_dev, std::abs(row - 1.0));
  }
  const double col_dev = (colsum.array() - 1.0).abs().maxCoeff();

  auto& ctx = s.circle_ctx();
  double rate_err = 0.0;
  for (int kk = 1; kk <= 4; ++kk) {
    const double ra = 1.0 - ctx.averaging_top(kk);
    const double rb = 1.0 - ctx.dec.eigenvalues(kk);
    rate_err = std::max(rate_err, std::abs(ra / rb - 1.0));
  }
  const bool pass = row_dev <= 1e-14 && col_dev > 1e-3 && rate_err <= 0.10;
  return {11, "averaging operator: row-stochastic only, same decay rates", pass,
          "row deviation=" + num(row_dev) + " (tol 1e-14); column deviation=" +
              num(col_dev) + " (must exceed 1e-3); rate mismatch=" + num(rate_err) +
              " (tol 0.10)"};
}

CheckResult check_accelerated_consistency(Session&) {
  double worst = 0.0;
  int std_min = 1 << 30, std_max = 0, acc_min = 1 << 30, acc_max = 0;
  const double betas[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int inst = 0; inst < 10; ++inst) {
    const Domain dom = inst % 2 == 0 ? Domain::rectangle(1.0 + 0.1 * inst, 1.0)
                                     : Domain::disc();
    const PointCloud cloud = sample_domain(dom, 60, 900 + inst);
    const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud, 0.5));
    const WeightVector w = weight_from_degree(degree_vector(k), betas[inst % 5]);
    SinkhornOptions std_opts;
    std_opts.tolerance = 1e-11;
    std_opts.max_iterations = 200000;
    const ScalingResult std_run = sinkhorn_symmetric(k, w, std_opts);
    const ScalingResult acc_run =
        sinkhorn_symmetric_accelerated(k, w, accel_opts(1e-11, 2000));
    worst = std::max(worst, rel_diff_up_to_constant(std_run.d, acc_run.d));
    std_min = std::min(std_min, std_run.iterations);
    std_max = std::max(std_max, std_run.iterations);
    acc_min = std::min(acc_min, acc_run.iterations);
    acc_max = std::max(acc_max, acc_run.iterations);
  }
  const bool pass = worst <= 1e-6;
  return {12, "accelerated variant matches standard scaling (10 instances)", pass,
          "max relative d difference=" + num(worst) +
              " (tol 1e-6); iterations standard " + std::to_string(std_min) + "-" +
              std::to_string(std_max) + ", accelerated " + std::to_string(acc_min) +
              "-" + std::to_string(acc_max)};
}

}  // namespace

std::vector<CheckResult> run_checks(const std::vector<int>& only) {
  using Fn = CheckResult (*)(Session&);
  const Fn checks[12] = {
      check_bistochasticity,  check_constant_mode,     check_zero_gradient,
      check_oscillation,      check_circle_spectrum,   check_rectangle_modes,
      check_disc_reference,   check_heat_semigroup,    check_oracle_equivalences,
      check_self_adjointness, check_averaging_comparison, check_accelerated_consistency};
  Session session;
  std::vector<CheckResult> results;
  for (int id = 1; id <= 12; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    results.push_back(checks[id - 1](session));
  }
  return results;
}

}  // namespace bistoch::acceptance
