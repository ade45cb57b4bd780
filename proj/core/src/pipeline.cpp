#include "bistoch/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bistoch/measures.hpp"
#include "bistoch/operators.hpp"

namespace bistoch {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double_token(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

double require_double(const std::string& value, const std::string& key) {
  double v = 0.0;
  if (!parse_double_token(value, v)) {
    throw InputError("config: key '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

long long require_int(const std::string& value, const std::string& key) {
  long long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw InputError("config: key '" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

bool require_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InputError("config: key '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<int> parse_index_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  if (trim(value).empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<int>(require_int(trim(item), key)));
  }
  return out;
}

// Rethrows the active library exception with the pipeline stage prefixed,
// keeping the error class (and any convergence partial result).
[[noreturn]] void rethrow_with_stage(const char* stage) {
  try {
    throw;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(stage) + ": " + e.what(), e.partial());
  } catch (const ConditioningError& e) {
    throw ConditioningError(std::string(stage) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string(stage) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(stage) + ": " + e.what());
  }
}

template <typename F>
auto run_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const Error&) {
    rethrow_with_stage(stage);
  }
}

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open output file: " + path);
  }
  out << content;
  written.push_back(path);
}

std::string matrix_csv(const std::string& header, const Eigen::MatrixXd& m) {
  std::string out = header;
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += fmt_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string column_header(const std::string& prefix, Eigen::Index count) {
  std::string h;
  for (Eigen::Index j = 0; j < count; ++j) {
    if (j > 0) h += ',';
    h += prefix + std::to_string(j);
  }
  return h;
}

}  // namespace

SinkhornOptions PipelineConfig::sinkhorn_options() const {
  SinkhornOptions opts;
  opts.tolerance = sinkhorn_tolerance;
  opts.max_iterations = sinkhorn_max_iterations;
  opts.variant = sinkhorn_variant;
  return opts;
}

void PipelineConfig::validate() const {
  if (eps < 0.0 || !(eps_median_scale > 0.0)) {
    throw InputError("config: eps must be >= 0 and eps_median_scale > 0");
  }
  if (beta < -1.0 || beta > 1.0 || gamma < -1.0 || gamma > 1.0) {
    throw InputError("config: beta and gamma must lie in [-1, 1]");
  }
  if (!(sinkhorn_tolerance > 0.0) || sinkhorn_max_iterations < 1) {
    throw InputError("config: sinkhorn tolerance/max_iterations out of range");
  }
  if (k < 1) {
    throw InputError("config: k must be >= 1");
  }
  for (int g : gradient_indices) {
    if (g < 0 || g >= k) {
      throw InputError("config: gradient index " + std::to_string(g) +
                       " outside [0, k)");
    }
  }
  if (mode == Mode::reference && reference_source == ReferenceSource::gram_schmidt &&
      reference_m < 1) {
    throw InputError("config: gram_schmidt reference selection needs reference_m >= 1");
  }
}

PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("config file not found: " + path);
  }
  PipelineConfig cfg;
  bool saw_gamma = false;
  bool saw_reference_source = false;
  bool saw_reference_m = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "mode") {
      if (value == "single") cfg.mode = PipelineConfig::Mode::single;
      else if (value == "reference") cfg.mode = PipelineConfig::Mode::reference;
      else throw InputError("config: mode must be 'single' or 'reference'");
    } else if (key == "eps") {
      cfg.eps = require_double(value, key);
    } else if (key == "eps_median_scale") {
      cfg.eps_median_scale = require_double(value, key);
    } else if (key == "beta") {
      cfg.beta = require_double(value, key);
    } else if (key == "gamma") {
      cfg.gamma = require_double(value, key);
      saw_gamma = true;
    } else if (key == "sinkhorn_tolerance") {
      cfg.sinkhorn_tolerance = require_double(value, key);
    } else if (key == "sinkhorn_max_iterations") {
      cfg.sinkhorn_max_iterations = static_cast<int>(require_int(value, key));
    } else if (key == "sinkhorn_variant") {
      if (value == "standard") cfg.sinkhorn_variant = SinkhornOptions::Variant::standard;
      else if (value == "accelerated") cfg.sinkhorn_variant = SinkhornOptions::Variant::accelerated;
      else throw InputError("config: sinkhorn_variant must be 'standard' or 'accelerated'");
    } else if (key == "k") {
      cfg.k = static_cast<int>(require_int(value, key));
    } else if (key == "gradient_indices") {
      cfg.gradient_indices = parse_index_list(value, key);
    } else if (key == "svg") {
      cfg.svg = require_bool(value, key);
    } else if (key == "reference_source") {
      if (value == "file") cfg.reference_source = PipelineConfig::ReferenceSource::file;
      else if (value == "gram_schmidt")
        cfg.reference_source = PipelineConfig::ReferenceSource::gram_schmidt;
      else throw InputError("config: reference_source must be 'file' or 'gram_schmidt'");
      saw_reference_source = true;
    } else if (key == "reference_m") {
      cfg.reference_m = static_cast<int>(require_int(value, key));
      saw_reference_m = true;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(require_int(value, key));
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw InputError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.mode == PipelineConfig::Mode::single &&
      (saw_gamma || saw_reference_source || saw_reference_m)) {
    throw InputError("config: reference-only keys present but mode = single");
  }
  cfg.validate();
  return cfg;
}

PointCloud ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("data file not found: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  Eigen::Index width = -1;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> tokens;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) tokens.push_back(trim(tok));
    std::vector<double> vals;
    vals.reserve(tokens.size());
    bool numeric = true;
    for (const auto& t : tokens) {
      double v = 0.0;
      if (!parse_double_token(t, v)) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (first_content_line) {
        first_content_line = false;  // header row
        continue;
      }
      throw InputError("csv line " + std::to_string(lineno) + ": non-numeric field");
    }
    for (double v : vals) {
      if (!std::isfinite(v)) {
        throw InputError("csv line " + std::to_string(lineno) + ": non-finite value");
      }
    }
    if (width < 0) {
      width = static_cast<Eigen::Index>(vals.size());
      if (width == 0) {
        throw InputError("csv line " + std::to_string(lineno) + ": empty row");
      }
    } else if (static_cast<Eigen::Index>(vals.size()) != width) {
      throw InputError("csv line " + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " fields, got " + std::to_string(vals.size()));
    }
    first_content_line = false;
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) {
    throw InputError("csv file has no data rows: " + path);
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), width);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = 0; j < width; ++j) pts(i, j) = rows[i][j];
  }
  return PointCloud(std::move(pts));
}

void write_point_cloud_csv(const PointCloud& cloud, const std::string& path) {
  std::vector<std::string> written;
  write_file(path, matrix_csv(column_header("x_", cloud.dim()), cloud.points()), written);
}

std::string content_hash_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void emit_quiver_svg(const Eigen::MatrixXd& points, const Eigen::MatrixXd& field,
                     const std::string& path) {
  if (points.cols() != 2 || field.cols() != 2) {
    throw InputError("emit_quiver_svg: plotting restricted to planar data");
  }
  if (points.rows() != field.rows()) {
    throw InputError("emit_quiver_svg: points/field row mismatch");
  }
  const Eigen::Index n = points.rows();
  const double minx = points.col(0).minCoeff();
  const double maxx = points.col(0).maxCoeff();
  const double miny = points.col(1).minCoeff();
  const double maxy = points.col(1).maxCoeff();
  const double spanx = std::max(maxx - minx, 1e-12);
  const double spany = std::max(maxy - miny, 1e-12);
  const double pad = 0.05;
  const double width = 1000.0;
  const double height = std::max(10.0, width * spany / spanx);
  const auto px = [&](double x) { return (x - minx) / spanx * width * (1 - 2 * pad) + width * pad; };
  const auto py = [&](double y) {
    return (maxy - y) / spany * height * (1 - 2 * pad) + height * pad;
  };

  std::vector<double> norms(n);
  for (Eigen::Index i = 0; i < n; ++i) norms[i] = field.row(i).norm();
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t q95 = sorted.empty() ? 0 : (sorted.size() * 95 + 99) / 100 - 1;
  const double ref_len = sorted.empty() ? 0.0 : sorted[std::min(q95, sorted.size() - 1)];
  const double scale = ref_len > 0.0 ? 0.03 * width / ref_len : 0.0;

  char buf[256];
  std::string svg;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const double cx = px(points(i, 0));
    const double cy = py(points(i, 1));
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"1.2\" fill=\"#444\"/>\n",
                  cx, cy);
    svg += buf;
    const double len = norms[i] * scale;
    if (scale <= 0.0 || len < 1e-9) continue;
    const double dx = field(i, 0) * scale;
    const double dy = -field(i, 1) * scale;  // svg y axis points down
    const double tx = cx + dx;
    const double ty = cy + dy;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
                  "stroke=\"#1f6fb5\" stroke-width=\"1\"/>\n",
                  cx, cy, tx, ty);
    svg += buf;
    // Arrowhead: two barbs at 150 degrees off the shaft direction.
    const double ang = std::atan2(dy, dx);
    const double barb = std::min(6.0, 0.35 * len);
    for (double off : {2.6179938779914944, -2.6179938779914944}) {
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
                    "stroke=\"#1f6fb5\" stroke-width=\"1\"/>\n",
                    tx, ty, tx + barb * std::cos(ang + off), ty + barb * std::sin(ang + off));
      svg += buf;
    }
  }
  svg += "</svg>\n";
  std::vector<std::string> written;
  write_file(path, svg, written);
}

PipelineResult run_pipeline(const PipelineConfig& config, const PointCloud& data,
                            const std::optional<PointCloud>& reference) {
  config.validate();
  PipelineResult result;
  std::vector<std::string>& written = result.files_written;
  try {
    const KernelProfile profile = KernelProfile::gaussian();

    const double eps = run_stage("kernel", [&] {
      return config.eps > 0.0 ? config.eps : median_bandwidth(data, config.eps_median_scale);
    });
    result.eps_used = eps;
    const KernelMatrix kxx =
        run_stage("kernel", [&] { return build_kernel_matrix(data, eps, profile); });

    const WeightVector w = run_stage("weights", [&] {
      return weight_from_degree(degree_vector(kxx), config.beta);
    });

    std::optional<BistochasticOperator> bop;
    std::optional<ReferenceOperator> cop;
    std::optional<WeightVector> v;
    double balanced_residual = 0.0;

    if (config.mode == PipelineConfig::Mode::single) {
      result.scaling = run_stage("sinkhorn", [&] {
        return config.sinkhorn_variant == SinkhornOptions::Variant::accelerated
                   ? sinkhorn_symmetric_accelerated(kxx, w, config.sinkhorn_options())
                   : sinkhorn_symmetric(kxx, w, config.sinkhorn_options());
      });
      bop.emplace(kxx, result.scaling, w);
      balanced_residual = bistochastic_residual(kxx, result.scaling.d, w);
      result.decomposition =
          run_stage("spectral", [&] { return eigendecompose_b(*bop, config.k); });
      run_stage("gradients", [&] {
        for (int g : config.gradient_indices) {
          result.gradients.push_back(eigen_gradient_b(*bop, result.decomposition,
                                                      data.points(), g));
        }
        return 0;
      });
    } else {
      run_stage("reference", [&] {
        if (config.reference_source == PipelineConfig::ReferenceSource::gram_schmidt) {
          result.selection = pivoted_gram_schmidt(kxx, config.reference_m);
          Eigen::MatrixXd sel(config.reference_m, data.dim());
          for (int i = 0; i < config.reference_m; ++i) {
            sel.row(i) = data.points().row(result.selection->indices[i]);
          }
          result.reference.emplace(std::move(sel));
        } else {
          if (!reference.has_value()) {
            throw InputError("reference mode with reference_source = file needs a reference set");
          }
          result.reference = reference;
        }
        return 0;
      });
      const PointCloud& ref = *result.reference;
      const KernelMatrix kxr =
          run_stage("kernel", [&] { return build_kernel_matrix(data, ref, eps, profile); });
      const KernelMatrix krr =
          run_stage("kernel", [&] { return build_kernel_matrix(ref, eps, profile); });
      v = run_stage("weights", [&] {
        return weight_from_degree(degree_vector(krr), config.gamma);
      });
      result.scaling = run_stage("sinkhorn", [&] {
        return sinkhorn_reference(kxr, *v, w, config.sinkhorn_options());
      });
      cop.emplace(kxr, result.scaling, w, *v);
      balanced_residual = bistochastic_residual(kxr, result.scaling.d, w, *v);
      result.decomposition =
          run_stage("spectral", [&] { return svd_reference(*cop, config.k); });
      run_stage("gradients", [&] {
        for (int g : config.gradient_indices) {
          result.gradients.push_back(eigen_gradient_c(*cop, result.decomposition,
                                                      ref.points(), g));
        }
        return 0;
      });
    }

    run_stage("persist", [&] {
      fs::create_directories(config.out_dir);
      const fs::path out(config.out_dir);
      std::string hashed;

      std::string eig = "index,lambda\n";
      for (Eigen::Index i = 0; i < result.decomposition.count(); ++i) {
        eig += std::to_string(i) + "," + fmt_double(result.decomposition.eigenvalues(i)) + "\n";
      }
      hashed += eig;
      write_file((out / "eigenvalues.csv").string(), eig, written);

      const std::string vecs = matrix_csv(column_header("phi_", result.decomposition.count()),
                                          result.decomposition.phi);
      hashed += vecs;
      write_file((out / "eigenvectors.csv").string(), vecs, written);

      for (const GradientField& g : result.gradients) {
        const std::string body =
            matrix_csv(column_header("g_", g.vectors.cols()), g.vectors);
        hashed += body;
        const std::string name = "gradients_" + std::to_string(g.eigen_index) + ".csv";
        write_file((out / name).string(), body, written);
        if (config.svg && g.vectors.cols() == 2 && data.dim() == 2) {
          const std::string svg_path =
              (out / ("quiver_phi_" + std::to_string(g.eigen_index) + ".svg")).string();
          emit_quiver_svg(data.points(), g.vectors, svg_path);
          written.push_back(svg_path);
        }
      }

      if (result.selection.has_value()) {
        std::string idx = "index\n";
        for (Eigen::Index i : result.selection->indices) idx += std::to_string(i) + "\n";
        write_file((out / "reference_indices.csv").string(), idx, written);
        const std::string refcsv =
            matrix_csv(column_header("x_", result.reference->dim()),
                       result.reference->points());
        write_file((out / "reference_points.csv").string(), refcsv, written);
      }

      result.content_hash = content_hash_hex(hashed);

      auto& diag = result.diagnostics;
      diag.emplace_back("mode", config.mode == PipelineConfig::Mode::single ? "single"
                                                                            : "reference");
      diag.emplace_back("n", std::to_string(data.size()));
      diag.emplace_back("m", std::to_string(result.reference ? result.reference->size()
                                                             : data.size()));
      diag.emplace_back("d", std::to_string(data.dim()));
      diag.emplace_back("seed", std::to_string(config.seed));
      diag.emplace_back("eps", fmt_double(eps));
      diag.emplace_back("eps_source", config.eps > 0.0 ? "explicit" : "median");
      diag.emplace_back("eps_median_scale", fmt_double(config.eps_median_scale));
      diag.emplace_back("beta", fmt_double(config.beta));
      if (config.mode == PipelineConfig::Mode::reference) {
        diag.emplace_back("gamma", fmt_double(config.gamma));
      }
      diag.emplace_back("k", std::to_string(config.k));
      diag.emplace_back("sinkhorn_variant",
                        config.sinkhorn_variant == SinkhornOptions::Variant::accelerated
                            ? "accelerated"
                            : "standard");
      diag.emplace_back("sinkhorn_iterations", std::to_string(result.scaling.iterations));
      diag.emplace_back("sinkhorn_residual", fmt_double(result.scaling.residual));
      diag.emplace_back("sinkhorn_alpha", fmt_double(result.scaling.alpha_estimate));
      diag.emplace_back("sinkhorn_oscillation_std",
                        fmt_double(result.scaling.oscillation_std));
      diag.emplace_back("bistochastic_residual", fmt_double(balanced_residual));
      diag.emplace_back("lambda_0", fmt_double(result.decomposition.eigenvalues(0)));
      const Moments mom = profile.moments(static_cast<int>(data.dim()));
      diag.emplace_back("kernel_m0", fmt_double(mom.m0));
      diag.emplace_back("kernel_m2", fmt_double(mom.m2));
      diag.emplace_back("generator_constant", fmt_double(mom.m2 / (2.0 * mom.m0)));
      diag.emplace_back("content_hash", result.content_hash);

      std::string report;
      for (const auto& [key, value] : diag) report += key + " = " + value + "\n";
      write_file((out / "diagnostics.txt").string(), report, written);
      return 0;
    });
  } catch (...) {
    for (const std::string& f : written) {
      std::error_code ec;
      fs::remove(f, ec);
    }
    throw;
  }
  return result;
}

}  // namespace bistoch
