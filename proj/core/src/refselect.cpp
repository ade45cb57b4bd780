#include "bistoch/refselect.hpp"

#include <string>

namespace bistoch {

SelectionResult pivoted_gram_schmidt(const KernelMatrix& K, int m) {
  if (!K.symmetric || K.rows() != K.cols()) {
    throw InputError("pivoted_gram_schmidt: kernel must be symmetric and square");
  }
  const Eigen::Index n = K.cols();
  if (m < 1 || m > n) {
    throw InputError("pivoted_gram_schmidt: m must lie in [1, n]");
  }
  Eigen::MatrixXd cols = K.values;
  SelectionResult result;
  result.indices.reserve(m);
  result.pivot_norms.resize(m);
  for (int step = 0; step < m; ++step) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double nrm = cols.col(i).norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = i;
      }
    }
    if (best_norm < 1e-12) {
      throw RankDeficiencyError(
          "pivoted_gram_schmidt: pivot norm " + std::to_string(best_norm) +
              " below 1e-12 after selecting " + std::to_string(step) + " of " +
              std::to_string(m) + " columns",
          step);
    }
    result.indices.push_back(best);
    result.pivot_norms(step) = best_norm;
    const Eigen::VectorXd pivot = cols.col(best);
    const double denom = pivot.squaredNorm();
    // k_i <- k_i - (k_i . pivot / |pivot|^2) pivot, for every column.
    const Eigen::VectorXd coeffs = (cols.transpose() * pivot) / denom;
    cols.noalias() -= pivot * coeffs.transpose();
  }
  return result;
}

}  // namespace bistoch
