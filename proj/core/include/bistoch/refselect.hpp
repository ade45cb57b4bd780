#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bistoch/geometry.hpp"

namespace bistoch {

/// Raised when the pivoted selection runs out of numerically independent
/// columns before the requested count is reached.
class RankDeficiencyError : public InputError {
 public:
  RankDeficiencyError(const std::string& what, int selected)
      : InputError(what), selected_(selected) {}
  int selected() const { return selected_; }

 private:
  int selected_;
};

struct SelectionResult {
  std::vector<Eigen::Index> indices;  // in selection order
  Eigen::VectorXd pivot_norms;        // nonincreasing
};

/// Pivoted Gram-Schmidt column selection on a symmetric kernel matrix.
///
/// At each step the column of largest Euclidean norm is selected (ties broken
/// by lowest index) and every column is orthogonalized against the selected
/// one at its current stage. Classical single-pass orthogonalization, as the
/// desk-scale sizes here keep the loss of orthogonality harmless.
SelectionResult pivoted_gram_schmidt(const KernelMatrix& K, int m);

}  // namespace bistoch
