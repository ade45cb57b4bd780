#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bistoch/geometry.hpp"
#include "bistoch/gradients.hpp"
#include "bistoch/refselect.hpp"
#include "bistoch/sinkhorn.hpp"
#include "bistoch/spectral.hpp"

namespace bistoch {

/// Everything needed to run one embedding end to end. Field names double as
/// the keys of the flat key = value config file format.
struct PipelineConfig {
  enum class Mode { single, reference };
  enum class ReferenceSource { file, gram_schmidt };

  Mode mode = Mode::single;
  double eps = 0.0;  // 0 selects the median heuristic
  double eps_median_scale = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double sinkhorn_tolerance = 1e-10;
  int sinkhorn_max_iterations = 1000;
  SinkhornOptions::Variant sinkhorn_variant = SinkhornOptions::Variant::standard;
  int k = 8;
  std::vector<int> gradient_indices;
  bool svg = true;
  ReferenceSource reference_source = ReferenceSource::file;
  int reference_m = 0;
  std::uint64_t seed = 42;
  std::string out_dir = "out";

  SinkhornOptions sinkhorn_options() const;
  void validate() const;
};

/// Parses the flat config format: one `key = value` per line, `#` comments.
/// Unknown keys and reference-only keys in single mode are rejected.
PipelineConfig parse_config_file(const std::string& path);

/// One point per row, comma-separated finite decimal fields; an optional
/// single header row (non-numeric first row) is skipped. Parse errors carry
/// the 1-based line number.
PointCloud ingest_csv(const std::string& path);

/// Writes with 17 significant digits so a round trip through ingest_csv
/// reproduces every coordinate exactly.
void write_point_cloud_csv(const PointCloud& cloud, const std::string& path);

/// Deterministic quiver plot: one dot per point, one arrow per nonzero
/// vector, arrows scaled so the 95th-percentile length maps to 3% of the
/// canvas width. Planar data only.
void emit_quiver_svg(const Eigen::MatrixXd& points, const Eigen::MatrixXd& field,
                     const std::string& path);

struct PipelineResult {
  double eps_used = 0.0;
  ScalingResult scaling;
  SpectralDecomposition decomposition;
  std::vector<GradientField> gradients;
  std::optional<PointCloud> reference;
  std::optional<SelectionResult> selection;
  std::vector<std::pair<std::string, std::string>> diagnostics;
  std::string content_hash;
  std::vector<std::string> files_written;
};

/// Runs kernel -> weights -> balancing -> spectral -> gradients and persists
/// eigenvalues.csv, eigenvectors.csv, gradients_<k>.csv, optional quiver
/// SVGs, and a diagnostics report under config.out_dir. Any stage error is
/// rethrown with the stage name prefixed and all partial outputs removed.
PipelineResult run_pipeline(const PipelineConfig& config, const PointCloud& data,
                            const std::optional<PointCloud>& reference = std::nullopt);

/// FNV-1a 64-bit content hash, printed as 16 hex digits.
std::string content_hash_hex(const std::string& bytes);

}  // namespace bistoch
