// Command-line front end: embeds point clouds with the balanced kernel
// pipelines, selects reference subsets, and runs the built-in quantitative
// checks. Exit codes: 0 success, 1 input error, 2 convergence error,
// 3 numeric error.

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "bistoch/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string data_path;
  std::string reference_path;
  std::string out_dir;
  std::string seed_str;
};

bistoch::PipelineConfig load_config(const CommonArgs& args) {
  bistoch::PipelineConfig cfg;
  if (!args.config_path.empty()) {
    cfg = bistoch::parse_config_file(args.config_path);
  }
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.seed_str.empty()) {
    std::uint64_t seed = 0;
    const auto res = std::from_chars(args.seed_str.data(),
                                     args.seed_str.data() + args.seed_str.size(), seed);
    if (res.ec != std::errc() || res.ptr != args.seed_str.data() + args.seed_str.size()) {
      throw bistoch::InputError("--seed expects an unsigned integer, got '" +
                                args.seed_str + "'");
    }
    cfg.seed = seed;
  }
  return cfg;
}

int run_embed(const CommonArgs& args, bistoch::PipelineConfig::Mode mode) {
  bistoch::PipelineConfig cfg = load_config(args);
  cfg.mode = mode;
  if (args.data_path.empty()) {
    throw bistoch::InputError("--data is required");
  }
  const bistoch::PointCloud data = bistoch::ingest_csv(args.data_path);
  std::optional<bistoch::PointCloud> reference;
  if (!args.reference_path.empty()) {
    reference = bistoch::ingest_csv(args.reference_path);
  }
  const bistoch::PipelineResult result = bistoch::run_pipeline(cfg, data, reference);
  std::printf("eps = %.6g, sinkhorn iterations = %d, residual = %.3g\n", result.eps_used,
              result.scaling.iterations, result.scaling.residual);
  std::printf("lambda_0 = %.12f, k = %d eigenpairs written\n",
              result.decomposition.eigenvalues(0),
              static_cast<int>(result.decomposition.count()));
  std::printf("outputs in %s (content hash %s)\n", cfg.out_dir.c_str(),
              result.content_hash.c_str());
  return 0;
}

int run_select_ref(const CommonArgs& args) {
  bistoch::PipelineConfig cfg = load_config(args);
  if (args.data_path.empty()) {
    throw bistoch::InputError("--data is required");
  }
  if (cfg.reference_m < 1) {
    throw bistoch::InputError("select-ref needs reference_m >= 1 in the config");
  }
  const bistoch::PointCloud data = bistoch::ingest_csv(args.data_path);
  const double eps =
      cfg.eps > 0.0 ? cfg.eps : bistoch::median_bandwidth(data, cfg.eps_median_scale);
  const bistoch::KernelMatrix kernel = bistoch::build_kernel_matrix(data, eps);
  const bistoch::SelectionResult sel = bistoch::pivoted_gram_schmidt(kernel, cfg.reference_m);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  {
    std::string idx = "index\n";
    for (Eigen::Index i : sel.indices) idx += std::to_string(i) + "\n";
    std::ofstream f(out / "reference_indices.csv", std::ios::binary);
    f << idx;
  }
  Eigen::MatrixXd pts(cfg.reference_m, data.dim());
  for (int i = 0; i < cfg.reference_m; ++i) pts.row(i) = data.points().row(sel.indices[i]);
  bistoch::write_point_cloud_csv(bistoch::PointCloud(pts),
                                 (out / "reference_points.csv").string());
  std::printf("selected %d reference points (eps = %.6g) into %s\n", cfg.reference_m, eps,
              cfg.out_dir.c_str());
  return 0;
}

int run_check(const std::vector<int>& only) {
  const auto results = bistoch::acceptance::run_checks(only);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s — %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.details.c_str());
    all = all && r.pass;
  }
  std::printf("%zu/%zu checks passed\n",
              static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                     [](const auto& r) { return r.pass; })),
              results.size());
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-stochastic kernel embeddings of point clouds"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<int> only;

  auto add_common = [&](CLI::App* cmd, bool with_reference) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--data", args.data_path, "input point cloud CSV");
    if (with_reference) {
      cmd->add_option("--reference", args.reference_path, "reference point cloud CSV");
    }
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed_str, "seed recorded in diagnostics (overrides config)");
  };

  CLI::App* embed = app.add_subcommand("embed", "single-measure embedding");
  add_common(embed, false);
  CLI::App* refembed = app.add_subcommand("refembed", "reference-measure embedding");
  add_common(refembed, true);
  CLI::App* selref = app.add_subcommand("select-ref", "pivoted Gram-Schmidt reference selection");
  add_common(selref, false);
  CLI::App* check = app.add_subcommand("check", "run the quantitative acceptance checks");
  check->add_option("--only", only, "criterion ids to run (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (embed->parsed()) {
      return run_embed(args, bistoch::PipelineConfig::Mode::single);
    }
    if (refembed->parsed()) {
      return run_embed(args, bistoch::PipelineConfig::Mode::reference);
    }
    if (selref->parsed()) {
      return run_select_ref(args);
    }
    return run_check(only);
  } catch (const bistoch::ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 2;
  } catch (const bistoch::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const bistoch::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
