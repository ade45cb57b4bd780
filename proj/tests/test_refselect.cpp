#include <doctest.h>

#include <cmath>
#include <vector>

#include "bistoch/refselect.hpp"
#include "test_helpers.hpp"

using namespace bistoch;

namespace {

KernelMatrix symmetric_kernel(Eigen::MatrixXd values) {
  KernelMatrix k;
  k.values = std::move(values);
  k.eps = 1.0;
  k.symmetric = true;
  return k;
}

// Literal transcription of the staged update: recompute norms from scratch,
// orthogonalize every column against the current pivot column.
std::vector<Eigen::Index> literal_selection(const Eigen::MatrixXd& kernel, int m) {
  Eigen::MatrixXd cols = kernel;
  std::vector<Eigen::Index> out;
  for (int step = 0; step < m; ++step) {
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
    out.push_back(best);
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
  return out;
}

}  // namespace

TEST_SUITE("refselect") {

TEST_CASE("diagonal kernels are selected in magnitude order") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() << 2.0, 5.0, 1.0, 3.0;
  const SelectionResult sel = pivoted_gram_schmidt(symmetric_kernel(d), 4);
  CHECK(sel.indices == std::vector<Eigen::Index>{1, 3, 0, 2});
  CHECK(sel.pivot_norms(0) == doctest::Approx(5.0));
  CHECK(sel.pivot_norms(3) == doctest::Approx(1.0));
}

TEST_CASE("duplicate points: the twin column zeroes out and is never selected") {
  Eigen::MatrixXd pts(5, 2);
  pts << 0.1, 0.2, 0.8, 0.3, 0.1, 0.2, 0.5, 0.9, 0.4, 0.4;  // rows 0 and 2 coincide
  const PointCloud cloud{pts};
  const KernelMatrix k = build_kernel_matrix(cloud, 0.5);
  const SelectionResult sel = pivoted_gram_schmidt(k, 4);
  const bool has0 = std::find(sel.indices.begin(), sel.indices.end(), 0) != sel.indices.end();
  const bool has2 = std::find(sel.indices.begin(), sel.indices.end(), 2) != sel.indices.end();
  CHECK_FALSE((has0 && has2));
}

TEST_CASE("matches the literal transcription on random kernels") {
  for (int inst = 0; inst < 5; ++inst) {
    const PointCloud cloud = testutil::random_cloud(30, 2, 200 + inst);
    const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud, 0.5));
    const SelectionResult got = pivoted_gram_schmidt(k, 5);
    CHECK(got.indices == literal_selection(k.values, 5));
  }
}

TEST_CASE("pivot norms are nonincreasing") {
  const PointCloud cloud = testutil::random_cloud(40, 2, 210);
  const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud, 0.5));
  const SelectionResult sel = pivoted_gram_schmidt(k, 20);
  for (int i = 1; i < 20; ++i) {
    CHECK(sel.pivot_norms(i) <= sel.pivot_norms(i - 1) * (1.0 + 1e-12));
  }
}

TEST_CASE("ties break toward the lowest index") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 2.0, 2.0, 1.0;  // exactly tied columns 0 and 1
  const SelectionResult sel = pivoted_gram_schmidt(symmetric_kernel(d), 2);
  CHECK(sel.indices[0] == 0);
  CHECK(sel.indices[1] == 1);
}

TEST_CASE("selection order survives relabeling of unselected points") {
  const PointCloud cloud = testutil::random_cloud(20, 2, 220);
  const KernelMatrix k = build_kernel_matrix(cloud, median_bandwidth(cloud, 0.5));
  const SelectionResult base = pivoted_gram_schmidt(k, 4);

  // Reverse the point order and map the selection back.
  Eigen::MatrixXd rev = cloud.points().colwise().reverse();
  const PointCloud rcloud{rev};
  const KernelMatrix rk = build_kernel_matrix(rcloud, k.eps);
  const SelectionResult flipped = pivoted_gram_schmidt(rk, 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(19 - flipped.indices[i] == base.indices[i]);
  }
}

TEST_CASE("rank deficiency reports the number selected") {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(6, 6, 0.5);  // rank one
  bool thrown = false;
  try {
    pivoted_gram_schmidt(symmetric_kernel(ones), 3);
  } catch (const RankDeficiencyError& e) {
    thrown = true;
    CHECK(e.selected() == 1);
  }
  CHECK(thrown);
}

TEST_CASE("bounds are validated") {
  const PointCloud cloud = testutil::random_cloud(5, 2, 230);
  const KernelMatrix k = build_kernel_matrix(cloud, 0.5);
  CHECK_THROWS_AS(pivoted_gram_schmidt(k, 0), InputError);
  CHECK_THROWS_AS(pivoted_gram_schmidt(k, 6), InputError);
}

}  // TEST_SUITE
