#include "hvi/error.hpp"
#include "hvi/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  CLI::App app{"Two-solution search and certification for -Laplace x - lambda_k x in dj(x)"};
  std::string config_path;
  bool check_only = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> tol_inner, tol_outer, tol_residual;
  app.add_option("--config", config_path, "Config file (flat key = value lines)")->check(CLI::ExistingFile);
  app.add_flag("--check-only", check_only, "Build the basis and check the hypotheses only");
  app.add_option("--seed", seed, "Seed for all random sampling");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--tol-inner", tol_inner, "Inner (reduction) tolerance");
  app.add_option("--tol-outer", tol_outer, "Outer (reduced critical point) tolerance");
  app.add_option("--tol-residual", tol_residual, "Pointwise residual certificate tolerance");
  CLI11_PARSE(app, argc, argv);

  try {
    hvi::SolverConfig cfg = config_path.empty() ? hvi::SolverConfig{} : hvi::parse_config_file(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    if (tol_inner) cfg.tol_inner = *tol_inner;
    if (tol_outer) cfg.tol_outer = *tol_outer;
    if (tol_residual) cfg.tol_residual = *tol_residual;
    cfg.validate();

    const hvi::RunOutput out = hvi::run(cfg, cfg.output_dir, check_only);
    const auto& r = out.result;
    std::printf("outcome: %s (exit %d)\n", hvi::to_string(r.outcome).c_str(), out.exit_code);
    if (!r.message.empty()) std::printf("stage %s: %s\n", r.failed_stage.c_str(), r.message.c_str());
    for (std::size_t i = 0; i < r.solutions.size(); ++i) {
      const auto& s = r.solutions[i];
      std::printf("solution %zu: psi=%.10g |x|_H1=%.10g max_violation=%.3g %s\n", i + 1, s.point.psi_value,
                  s.h1_norm, s.residual.max_violation, s.certified ? "certified" : "NOT certified");
    }
    std::printf("report: %s\n", (std::filesystem::path(cfg.output_dir) / "report.txt").string().c_str());
    return out.exit_code;
  } catch (const hvi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
