#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pst/error.hpp"
#include "pst/pipeline.hpp"

namespace {

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, bool verbose) {
  pst::SceneConfig cfg = pst::load_scene_config(config_path);
  if (seed) cfg.seed = *seed;
  pst::write_scene_files(cfg, out_dir);
  if (verbose)
    std::cout << "scene written to " << out_dir << " (seed " << cfg.seed << ", "
              << cfg.vehicles.size() << " vehicles, " << cfg.cameras.size() << " cameras)\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::optional<std::uint64_t> seed, int parallel_override,
            const std::string& mask_override, bool verbose) {
  pst::PipelineConfig cfg = pst::load_pipeline_config(config_path);
  if (seed && cfg.scene) cfg.scene->seed = *seed;
  if (parallel_override > 0) cfg.parallel = parallel_override;
  if (!mask_override.empty()) cfg.optimizer.mask = pst::parse_mask(mask_override);
  if (verbose) cfg.verbose = true;
  const std::string out_dir = out_override.empty() ? cfg.output_dir : out_override;

  const pst::RunSummary summary = pst::run_pipeline(cfg, out_dir);
  for (const auto& cam : summary.cameras) {
    if (cam.ok) {
      std::cout << "camera " << cam.camera_id << ": converged=" << (cam.fit.converged ? "yes" : "no")
                << " pairs=" << cam.assignment.pairs.size()
                << " rmse_d " << cam.fit.rmse_d_before << " -> " << cam.fit.rmse_d_after
                << " rmse_a " << cam.fit.rmse_a_before << " -> " << cam.fit.rmse_a_after << "\n";
      if (!cam.error.empty()) std::cout << "  note: " << cam.error << "\n";
    } else {
      std::cout << "warning: camera " << cam.camera_id << " failed: " << cam.error << "\n";
    }
  }
  std::cout << "reports written to " << out_dir << "\n";
  // Partial per-camera failure still counts as a (warned) success.
  const bool all_failed = !summary.cameras.empty() &&
                          summary.failures == static_cast<int>(summary.cameras.size());
  return all_failed ? 1 : 0;
}

int cmd_report(const std::string& run_dir) {
  std::cout << pst::summarize_run(run_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Roadside multi-sensor spatial synchronization toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, mask;
  std::optional<std::uint64_t> seed;
  int parallel = 0;
  bool verbose = false;
  app.add_flag("--verbose", verbose, "Chatty progress output");

  auto* gen = app.add_subcommand("generate", "Write synthetic scene track files and a manifest");
  gen->add_option("--config", config_path, "Scene config (JSON)")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--seed", seed, "Override the scene seed");

  auto* run = app.add_subcommand("run", "Run the full per-camera synchronization pipeline");
  run->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Override the scene seed");
  run->add_option("--parallel", parallel, "Worker threads for per-camera stages");
  run->add_option("--mask", mask, "Parameters to optimize, e.g. f,phi,H,omega_h");

  auto* rep = app.add_subcommand("report", "Summarize the fit reports of a run directory");
  rep->add_option("--run", run_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_dir, seed, verbose);
    if (run->parsed()) return cmd_run(config_path, out_dir, seed, parallel, mask, verbose);
    if (rep->parsed()) return cmd_report(run_dir);
  } catch (const pst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
