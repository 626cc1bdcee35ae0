#include "hvi/report.hpp"

#include "hvi/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hvi {

namespace {

class Writer {
 public:
  void section(const std::string& name) {
    if (!first_) os_ << '\n';
    first_ = false;
    os_ << '[' << name << "]\n";
  }
  void kv(const std::string& k, const std::string& v) { os_ << k << " = " << v << '\n'; }
  void kv(const std::string& k, double v) { kv(k, format_double(v)); }
  void kv(const std::string& k, int v) { kv(k, std::to_string(v)); }
  void kv(const std::string& k, std::size_t v) { kv(k, std::to_string(v)); }
  void kv(const std::string& k, bool v) { kv(k, std::string(v ? "true" : "false")); }
  void raw(const std::string& text) { os_ << text; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s + "]";
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::string render_report(const SolverConfig& cfg, const PipelineResult& res) {
  Writer w;
  w.section("run");
  w.kv("outcome", to_string(res.outcome));
  w.kv("exit_code", exit_code(res.outcome));
  w.kv("failed_stage", res.failed_stage.empty() ? std::string("none") : res.failed_stage);
  w.kv("message", res.message.empty() ? std::string("none") : one_line(res.message));
  w.kv("check_only", res.check_only);
  w.kv("hypothesis_override", res.override_used);
  w.kv("seed", std::to_string(cfg.seed));

  w.section("config");
  w.raw(config_text(cfg));

  w.section("potential");
  w.kv("description", cfg.potential().describe());

  w.section("basis");
  w.kv("n_modes", res.basis.n_modes);
  w.kv("dim_hbar0", res.basis.dim_hbar0);
  w.kv("dim_hhat", res.basis.dim_hhat);
  w.kv("last_group", res.basis.last_group);
  w.kv("quadrature_rule", res.basis.quadrature_rule);
  w.kv("quadrature_nodes", res.basis.n_nodes);
  w.kv("lambda_k", res.basis.lambda_k);
  w.kv("group_eigenvalues", join(res.basis.group_eigenvalues));
  {
    std::vector<double> mult(res.basis.group_multiplicities.begin(), res.basis.group_multiplicities.end());
    w.kv("group_multiplicities", join(mult));
  }

  if (res.hypotheses) {
    w.section("hypotheses");
    w.kv("all_pass", res.hypotheses->all_pass());
    for (const auto& c : res.hypotheses->checks) {
      const std::string p = c.id + ".";
      w.kv(p + "verdict", to_string(c.verdict));
      w.kv(p + "detail", one_line(c.detail));
      for (const auto& [name, value] : c.constants) w.kv(p + name, value);
      if (!c.witnesses.empty()) w.kv(p + "witnesses", join(c.witnesses));
    }
  }

  if (res.linking) {
    w.section("linking");
    w.kv("delta", res.linking->delta);
    w.kv("y_vacuous", res.linking->y_vacuous);
    w.kv("evaluations", res.linking->evaluations);
    w.kv("min_psi_y", res.linking->min_psi_y);
    w.kv("max_psi_v", res.linking->max_psi_v);
    w.kv("witnesses", res.linking->witnesses.size());
    for (std::size_t i = 0; i < res.linking->witness_values.size(); ++i)
      w.kv("witness_" + std::to_string(i + 1) + ".psi", res.linking->witness_values[i]);
  }

  if (res.minimize || res.second) {
    w.section("search");
    if (res.minimize) {
      const auto& m = *res.minimize;
      w.kv("starts", m.starts);
      w.kv("converged_starts", m.converged_starts);
      w.kv("iterations", m.iterations);
      w.kv("evaluations", m.evaluations);
      w.kv("distinct_minima", m.minima.size());
      w.kv("min_iterate_psi", m.min_iterate_psi);
      w.kv("psi_floor", cfg.psi_floor);
      w.kv("infimum_psi", m.best.psi_value);
      for (std::size_t i = 0; i < m.minima.size(); ++i)
        w.kv("minimum_" + std::to_string(i + 1) + ".psi", m.minima[i].psi_value);
    }
    if (res.second) {
      const auto& s = *res.second;
      w.kv("branch", s.branch);
      w.kv("second_method", s.method);
      w.kv("pass_value", s.pass_value);
      w.kv("path_points", s.path_points);
      w.kv("degenerate_pass", s.degenerate_pass);
      w.kv("second_attempts", s.attempts);
    }
  }

  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    const auto& s = res.solutions[i];
    w.section("solution." + std::to_string(i + 1));
    w.kv("kind", to_string(s.point.kind));
    w.kv("certified", s.certified);
    if (!s.certified) w.kv("failure", s.failure);
    w.kv("psi", s.point.psi_value);
    w.kv("reduced_residual", s.point.reduced_residual);
    w.kv("inner_residual", s.inner_residual);
    w.kv("full_min_norm", s.full_min_norm);
    w.kv("lift_bound", s.lift_bound);
    w.kv("h1_norm", s.h1_norm);
    w.kv("u_h1_norm", s.point.u.h1_seminorm(res.context->basis()));
    w.kv("residual.max_violation", s.residual.max_violation);
    w.kv("residual.max_relative_violation", s.residual.max_relative_violation);
    w.kv("residual.violating_fraction", s.residual.violating_fraction);
    w.kv("residual.violating_nodes", s.residual.violating_nodes);
    w.kv("residual.tol", s.residual.tol);
    w.kv("residual.n_nodes", s.residual.n_nodes);
    w.kv("partner_certified", s.partner_certified);
    w.kv("partner_max_violation", s.partner_max_violation);
    std::vector<double> coeffs;
    for (std::size_t idx : res.context->decomposition().hbar0) coeffs.push_back(s.point.u[idx]);
    w.kv("u_coefficients", join(coeffs));
  }

  if (!res.distances.empty()) {
    w.section("distances");
    std::size_t n = res.solutions.size(), c = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        w.kv("h1." + std::to_string(a + 1) + "_" + std::to_string(b + 1), res.distances[c++]);
  }

  if (res.context && !res.solutions.empty()) {
    const auto& d = res.diagnostics;
    w.section("diagnostics");
    w.kv("l", d.l);
    w.kv("gap", d.gap);
    if (d.coercivity) {
      w.kv("coercivity.xi", d.coercivity->xi);
      w.kv("coercivity.modes", d.coercivity->modes_used);
      w.kv("coercivity.positive", d.coercivity->positive);
    }
    w.kv("strong_convexity.min_margin", d.min_strong_convexity_margin);
    w.kv("strong_convexity.respects_coercivity", d.margin_respects_coercivity);
    w.kv("continuity.radius", d.continuity_radius);
    w.kv("continuity.ratio", d.continuity_ratio);
  }
  return w.str();
}

SolverConfig config_from_report(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  bool inside = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[') {
      if (inside) break;
      inside = line == "[config]";
      continue;
    }
    if (inside) body += line + '\n';
  }
  if (body.empty()) throw ConfigError("report has no [config] section");
  return parse_config(body);
}

std::vector<Point> plot_grid(const DomainSpec& domain) {
  std::vector<Point> pts;
  if (domain.kind == DomainKind::rectangle) {
    constexpr int n = 128;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pts.push_back({domain.lx * i / (n - 1.0), domain.ly * j / (n - 1.0)});
  } else {
    constexpr int n = 512;
    for (int i = 0; i < n; ++i) pts.push_back({domain.length * i / (n - 1.0), 0.0});
  }
  return pts;
}

std::vector<PlotRow> plot_rows(const EnergyContext& ctx, const SpectralVector& x) {
  const auto pts = plot_grid(ctx.basis().domain());
  const Eigen::MatrixXd U = basis_values(ctx.basis(), pts);
  const Eigen::VectorXd xv = U.transpose() * x.coeffs();
  const Eigen::VectorXd rv = U.transpose() * ctx.shifted_eigenvalues().cwiseProduct(x.coeffs());
  std::vector<PlotRow> rows(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    const auto iv = ctx.potential().clarke_interval(xv(e));
    rows[i] = {pts[i], xv(e), rv(e), iv.lo, iv.hi};
  }
  return rows;
}

std::string solution_csv(const EnergyContext& ctx, const SpectralVector& x) {
  const bool two_d = ctx.basis().domain().dimension() == 2;
  std::ostringstream os;
  os << (two_d ? "z1,z2,x,r,dj_lower,dj_upper\n" : "z,x,r,dj_lower,dj_upper\n");
  for (const auto& row : plot_rows(ctx, x)) {
    os << format_double(row.z.x) << ',';
    if (two_d) os << format_double(row.z.y) << ',';
    os << format_double(row.x) << ',' << format_double(row.r) << ',' << format_double(row.lower) << ','
       << format_double(row.upper) << '\n';
  }
  return os.str();
}

std::string psi_summary_csv(const PipelineResult& res) {
  std::ostringstream os;
  os << "index,kind,psi,reduced_residual,h1_norm,max_violation,certified\n";
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    const auto& s = res.solutions[i];
    os << i + 1 << ',' << to_string(s.point.kind) << ',' << format_double(s.point.psi_value) << ','
       << format_double(s.point.reduced_residual) << ',' << format_double(s.h1_norm) << ','
       << format_double(s.residual.max_violation) << ',' << (s.certified ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string timings_text(const PipelineResult& res) {
  std::ostringstream os;
  double total = 0.0;
  for (const auto& t : res.timings) {
    os << t.stage << " = " << format_double(t.seconds) << '\n';
    total += t.seconds;
  }
  os << "total = " << format_double(total) << '\n';
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + p.string() + "'");
}

}  // namespace

RunOutput run(const SolverConfig& cfg, const std::filesystem::path& out_dir, bool check_only) {
  RunOutput out;
  out.result = solve_hvi(cfg, check_only);
  out.exit_code = exit_code(out.result.outcome);
  std::filesystem::create_directories(out_dir);
  for (const auto& stale : {"solution_1.csv", "solution_2.csv", "psi_summary.csv"})
    std::filesystem::remove(out_dir / stale);
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    out.files.push_back(out_dir / name);
  };
  emit("report.txt", render_report(cfg, out.result));
  emit("timings.txt", timings_text(out.result));
  if (out.result.context && !out.result.solutions.empty()) {
    for (std::size_t i = 0; i < out.result.solutions.size(); ++i)
      emit("solution_" + std::to_string(i + 1) + ".csv", solution_csv(*out.result.context, out.result.solutions[i].x));
    emit("psi_summary.csv", psi_summary_csv(out.result));
  }
  return out;
}

}  // namespace hvi
