#pragma once

#include "hvi/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hvi {

// Structured text: [section] headers, `key = value` lines in a fixed order,
// reals with 17 significant digits. Contains no timings, so identical
// config and seed give identical bytes.
std::string render_report(const SolverConfig& cfg, const PipelineResult& res);

// Re-parses the [config] section of a rendered report.
SolverConfig config_from_report(const std::string& report_text);

struct PlotRow {
  Point z;
  double x = 0.0;
  double r = 0.0;  // -Laplace x - lambda_k x
  double lower = 0.0;
  double upper = 0.0;
};

// Uniform plot grid: 512 nodes in 1D, 128 x 128 on the rectangle, endpoints
// included.
std::vector<Point> plot_grid(const DomainSpec& domain);
std::vector<PlotRow> plot_rows(const EnergyContext& ctx, const SpectralVector& x);
std::string solution_csv(const EnergyContext& ctx, const SpectralVector& x);
std::string psi_summary_csv(const PipelineResult& res);
std::string timings_text(const PipelineResult& res);

struct RunOutput {
  PipelineResult result;
  std::vector<std::filesystem::path> files;
  int exit_code = 0;
};

// solve_hvi plus report.txt, timings.txt, psi_summary.csv and
// solution_<i>.csv in `out_dir` (created if missing).
RunOutput run(const SolverConfig& cfg, const std::filesystem::path& out_dir, bool check_only = false);

}  // namespace hvi
