#include <benchmark/benchmark.h>

#include "bistoch/analytic.hpp"
#include "bistoch/gradients.hpp"
#include "bistoch/measures.hpp"
#include "bistoch/operators.hpp"
#include "bistoch/sinkhorn.hpp"
#include "bistoch/spectral.hpp"

using namespace bistoch;

namespace {

SinkhornOptions accel(double tol = 1e-10) {
  SinkhornOptions o;
  o.tolerance = tol;
  o.max_iterations = 2000;
  o.variant = SinkhornOptions::Variant::accelerated;
  return o;
}

void BM_KernelAssembly(benchmark::State& state) {
  const PointCloud cloud = sample_domain(Domain::rectangle(1.5, 1.0), state.range(0), 1);
  for (auto _ : state) {
    KernelMatrix k = build_kernel_matrix(cloud, 0.02);
    benchmark::DoNotOptimize(k.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelAssembly)->Range(256, 2048)->Complexity(benchmark::oNSquared);

void BM_SinkhornStandard(benchmark::State& state) {
  const PointCloud cloud = sample_domain(Domain::rectangle(1.5, 1.0), state.range(0), 2);
  const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud));
  const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
  SinkhornOptions opts;
  opts.max_iterations = 100000;
  for (auto _ : state) {
    ScalingResult r = sinkhorn_symmetric(k, w, opts);
    benchmark::DoNotOptimize(r.d.data());
  }
}
BENCHMARK(BM_SinkhornStandard)->Range(128, 512);

void BM_SinkhornAccelerated(benchmark::State& state) {
  const PointCloud cloud = sample_domain(Domain::rectangle(1.5, 1.0), state.range(0), 2);
  const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud));
  const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
  for (auto _ : state) {
    ScalingResult r = sinkhorn_symmetric_accelerated(k, w, accel());
    benchmark::DoNotOptimize(r.d.data());
  }
}
BENCHMARK(BM_SinkhornAccelerated)->Range(128, 512);

void BM_Eigendecomposition(benchmark::State& state) {
  const PointCloud cloud = sample_domain(Domain::rectangle(1.5, 1.0), state.range(0), 3);
  const KernelMatrix k = build_kernel_matrix(cloud, 0.05);
  const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
  const BistochasticOperator op(k, sinkhorn_symmetric_accelerated(k, w, accel()), w);
  for (auto _ : state) {
    SpectralDecomposition d = eigendecompose_b(op, 8);
    benchmark::DoNotOptimize(d.phi.data());
  }
}
BENCHMARK(BM_Eigendecomposition)->Range(128, 1024);

void BM_GradientField(benchmark::State& state) {
  const PointCloud cloud = sample_domain(Domain::rectangle(1.5, 1.0), state.range(0), 4);
  const KernelMatrix k = build_kernel_matrix(cloud, 0.05);
  const WeightVector w = weight_from_degree(degree_vector(k), 1.0);
  const BistochasticOperator op(k, sinkhorn_symmetric_accelerated(k, w, accel()), w);
  const SpectralDecomposition dec = eigendecompose_b(op, 4);
  for (auto _ : state) {
    GradientField g = eigen_gradient_b(op, dec, cloud.points(), 1);
    benchmark::DoNotOptimize(g.vectors.data());
  }
}
BENCHMARK(BM_GradientField)->Range(256, 1024);

}  // namespace

BENCHMARK_MAIN();
