#include "hvi/config.hpp"

#include "hvi/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace hvi {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

NamedParams default_potential_params(const std::string& family) {
  if (family == "example") return {{"mu", 1.5}, {"slope_neg", 0.5}, {"slope_pos", 0.5}};
  if (family == "max") return {{"xi", 1.0}, {"c", 0.25}};
  if (family == "quadratic") return {{"epsilon", 0.1}};
  if (family == "zero") return {};
  throw ConfigError("unknown potential family '" + family + "' (expected example, max, quadratic, zero)",
                    "potential.family");
}

void SolverConfig::validate() const {
  try {
    domain.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), "domain");
  }
  if (k < 1) throw ConfigError("solver.k must be >= 1", "solver.k");
  if (m < 1 || m > k) throw ConfigError("solver.m must satisfy 1 <= m <= k", "solver.m");
  if (n_trunc < 1) throw ConfigError("solver.n_trunc must be >= 1", "solver.n_trunc");
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be positive", key);
  };
  positive(tol_inner, "tolerance.inner");
  positive(tol_outer, "tolerance.outer");
  positive(tol_residual, "tolerance.residual");
  if (!(tol_grouping >= 0.0)) throw ConfigError("tolerance.grouping must be >= 0 (0 selects the default)", "tolerance.grouping");
  positive(nontriviality, "threshold.nontriviality");
  positive(distinctness, "threshold.distinctness");
  positive(branch_tol, "search.branch_tol");
  positive(delta_max, "search.delta_max");
  if (!(psi_floor < 0.0)) throw ConfigError("search.psi_floor must be negative", "search.psi_floor");
  if (!(start_scale >= 0.0)) throw ConfigError("search.start_scale must be >= 0", "search.start_scale");
  if (multistart < 1) throw ConfigError("search.multistart must be >= 1", "search.multistart");
  if (n_grad < 0) throw ConfigError("search.n_grad must be >= 0", "search.n_grad");
  if (search_max_iter < 1) throw ConfigError("search.max_iter must be >= 1", "search.max_iter");
  if (path_segments < 2) throw ConfigError("search.path_segments must be >= 2", "search.path_segments");
  if (path_refinements < 0) throw ConfigError("search.path_refinements must be >= 0", "search.path_refinements");
  if (linking_samples < 2) throw ConfigError("search.linking_samples must be >= 2", "search.linking_samples");
  if (inner_max_iter < 1) throw ConfigError("solver.inner_max_iter must be >= 1", "solver.inner_max_iter");
  if (quadrature_nodes < 0) throw ConfigError("quadrature.nodes must be >= 0", "quadrature.nodes");
  const NamedParams defaults = default_potential_params(potential_family);
  if (potential_params.size() != defaults.size())
    throw ConfigError("potential parameters do not match family '" + potential_family + "'", "potential.family");
  for (std::size_t i = 0; i < defaults.size(); ++i)
    if (potential_params[i].first != defaults[i].first)
      throw ConfigError("potential parameters do not match family '" + potential_family + "'", "potential." + potential_params[i].first);
  try {
    (void)potential();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), "potential.family");
  }
}

InnerOptions SolverConfig::inner_options() const {
  InnerOptions o;
  o.tol = tol_inner;
  o.max_iter = inner_max_iter;
  o.method = inner_method;
  return o;
}

SearchOptions SolverConfig::search_options() const {
  SearchOptions o;
  o.outer_tol = tol_outer;
  o.multistart = multistart;
  o.seed = seed;
  o.psi_floor = psi_floor;
  o.n_grad = n_grad;
  o.start_scale = start_scale;
  o.max_iter = search_max_iter;
  o.nontriviality = nontriviality;
  o.distinctness = distinctness;
  o.path_segments = path_segments;
  o.path_refinements = path_refinements;
  o.branch_tol = branch_tol;
  o.delta_max = delta_max;
  o.linking_samples = linking_samples;
  return o;
}

PiecewisePotential SolverConfig::potential() const { return make_potential(potential_family, potential_params); }

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& v, const std::string& key, int line) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a real number, got '" + v + "'", key, line);
  return out;
}

long long parse_int(const std::string& v, const std::string& key, int line) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" + v + "'", key, line);
  return out;
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects true or false, got '" + v + "'", key, line);
}

}  // namespace

SolverConfig parse_config(const std::string& text) {
  SolverConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::map<std::string, int> seen;
  std::vector<std::tuple<std::string, std::string, int>> potential_keys;
  bool m_set = false;

  using Setter = std::function<void(const std::string&, const std::string&, int)>;
  auto real = [](double SolverConfig::*field, SolverConfig& c) {
    return [field, &c](const std::string& v, const std::string& k, int l) { c.*field = parse_real(v, k, l); };
  };
  auto integer = [](int SolverConfig::*field, SolverConfig& c, long long lo) {
    return [field, &c, lo](const std::string& v, const std::string& k, int l) {
      const long long x = parse_int(v, k, l);
      if (x < lo || x > 1000000000LL)
        throw ConfigError("line " + std::to_string(l) + ": '" + k + "' out of range", k, l);
      c.*field = static_cast<int>(x);
    };
  };
  std::map<std::string, Setter> setters = {
      {"domain.kind", [&](const std::string& v, const std::string& k, int l) {
         try {
           cfg.domain.kind = domain_kind_from_string(v);
         } catch (const InvalidArgument&) {
           throw ConfigError("line " + std::to_string(l) + ": unknown domain kind '" + v + "'", k, l);
         }
       }},
      {"domain.length", [&](const std::string& v, const std::string& k, int l) { cfg.domain.length = parse_real(v, k, l); }},
      {"domain.lx", [&](const std::string& v, const std::string& k, int l) { cfg.domain.lx = parse_real(v, k, l); }},
      {"domain.ly", [&](const std::string& v, const std::string& k, int l) { cfg.domain.ly = parse_real(v, k, l); }},
      {"domain.n_grid", [&](const std::string& v, const std::string& k, int l) {
         cfg.domain.n_grid = static_cast<int>(parse_int(v, k, l));
       }},
      {"potential.family", [&](const std::string& v, const std::string&, int) { cfg.potential_family = v; }},
      {"solver.k", integer(&SolverConfig::k, cfg, -1000000)},
      {"solver.m", [&](const std::string& v, const std::string& k, int l) {
         cfg.m = static_cast<int>(parse_int(v, k, l));
         m_set = true;
       }},
      {"solver.n_trunc", [&](const std::string& v, const std::string& k, int l) {
         const long long x = parse_int(v, k, l);
         if (x < 1) throw ConfigError("line " + std::to_string(l) + ": solver.n_trunc must be >= 1", k, l);
         cfg.n_trunc = static_cast<std::size_t>(x);
       }},
      {"solver.seed", [&](const std::string& v, const std::string& k, int l) {
         std::uint64_t x = 0;
         auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
         if (ec != std::errc() || p != v.data() + v.size())
           throw ConfigError("line " + std::to_string(l) + ": solver.seed expects an unsigned integer", k, l);
         cfg.seed = x;
       }},
      {"solver.inner_method", [&](const std::string& v, const std::string& k, int l) {
         try {
           cfg.inner_method = inner_method_from_string(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError("line " + std::to_string(l) + ": " + e.what(), k, l);
         }
       }},
      {"solver.inner_max_iter", integer(&SolverConfig::inner_max_iter, cfg, 1)},
      {"quadrature.rule", [&](const std::string& v, const std::string& k, int l) {
         try {
           cfg.quadrature_rule = quadrature_rule_from_string(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError("line " + std::to_string(l) + ": " + e.what(), k, l);
         }
       }},
      {"quadrature.nodes", integer(&SolverConfig::quadrature_nodes, cfg, 0)},
      {"tolerance.inner", real(&SolverConfig::tol_inner, cfg)},
      {"tolerance.outer", real(&SolverConfig::tol_outer, cfg)},
      {"tolerance.residual", real(&SolverConfig::tol_residual, cfg)},
      {"tolerance.grouping", real(&SolverConfig::tol_grouping, cfg)},
      {"threshold.nontriviality", real(&SolverConfig::nontriviality, cfg)},
      {"threshold.distinctness", real(&SolverConfig::distinctness, cfg)},
      {"search.multistart", integer(&SolverConfig::multistart, cfg, 1)},
      {"search.psi_floor", real(&SolverConfig::psi_floor, cfg)},
      {"search.n_grad", integer(&SolverConfig::n_grad, cfg, 0)},
      {"search.start_scale", real(&SolverConfig::start_scale, cfg)},
      {"search.max_iter", integer(&SolverConfig::search_max_iter, cfg, 1)},
      {"search.path_segments", integer(&SolverConfig::path_segments, cfg, 2)},
      {"search.path_refinements", integer(&SolverConfig::path_refinements, cfg, 0)},
      {"search.branch_tol", real(&SolverConfig::branch_tol, cfg)},
      {"search.delta_max", real(&SolverConfig::delta_max, cfg)},
      {"search.linking_samples", integer(&SolverConfig::linking_samples, cfg, 2)},
      {"output.dir", [&](const std::string& v, const std::string&, int) { cfg.output_dir = v; }},
      {"check.override", [&](const std::string& v, const std::string& k, int l) { cfg.check_override = parse_bool(v, k, l); }},
  };

  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + body + "'", {}, line);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key", {}, line);
    if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value for '" + key + "'", key, line);
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "' (first set on line " +
                            std::to_string(it->second) + ")",
                        key, line);
    seen[key] = line;
    if (key.rfind("potential.", 0) == 0 && key != "potential.family") {
      potential_keys.emplace_back(key.substr(10), value, line);
      continue;
    }
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", key, line);
    it->second(value, key, line);
  }

  for (const char* req : {"domain.kind", "solver.k", "potential.family"})
    if (!seen.count(req)) throw ConfigError(std::string("missing required key '") + req + "'", req, 0);

  cfg.potential_params = default_potential_params(cfg.potential_family);
  for (const auto& [name, value, l] : potential_keys) {
    auto it = std::find_if(cfg.potential_params.begin(), cfg.potential_params.end(),
                           [&](const auto& p) { return p.first == name; });
    if (it == cfg.potential_params.end())
      throw ConfigError("line " + std::to_string(l) + ": unknown key 'potential." + name + "' for family '" +
                            cfg.potential_family + "'",
                        "potential." + name, l);
    it->second = parse_real(value, "potential." + name, l);
  }
  if (!m_set) cfg.m = cfg.k;
  if (cfg.m > cfg.k) {
    const int l = seen.count("solver.m") ? seen["solver.m"] : 0;
    throw ConfigError("line " + std::to_string(l) + ": solver.m = " + std::to_string(cfg.m) +
                          " violates the constraint m <= k (k = " + std::to_string(cfg.k) + ")",
                      "solver.m", l);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const int l = seen.count(e.key()) ? seen[e.key()] : 0;
    throw ConfigError(l > 0 ? "line " + std::to_string(l) + ": " + e.what() : std::string(e.what()), e.key(), l);
  }
  return cfg;
}

SolverConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_text(const SolverConfig& c) {
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  kv("domain.kind", to_string(c.domain.kind));
  kv("domain.length", format_double(c.domain.length));
  kv("domain.lx", format_double(c.domain.lx));
  kv("domain.ly", format_double(c.domain.ly));
  kv("domain.n_grid", std::to_string(c.domain.n_grid));
  kv("potential.family", c.potential_family);
  for (const auto& [name, value] : c.potential_params) kv("potential." + name, format_double(value));
  kv("solver.k", std::to_string(c.k));
  kv("solver.m", std::to_string(c.m));
  kv("solver.n_trunc", std::to_string(c.n_trunc));
  kv("solver.seed", std::to_string(c.seed));
  kv("solver.inner_method", to_string(c.inner_method));
  kv("solver.inner_max_iter", std::to_string(c.inner_max_iter));
  kv("quadrature.rule", to_string(c.quadrature_rule));
  kv("quadrature.nodes", std::to_string(c.quadrature_nodes));
  kv("tolerance.inner", format_double(c.tol_inner));
  kv("tolerance.outer", format_double(c.tol_outer));
  kv("tolerance.residual", format_double(c.tol_residual));
  kv("tolerance.grouping", format_double(c.tol_grouping));
  kv("threshold.nontriviality", format_double(c.nontriviality));
  kv("threshold.distinctness", format_double(c.distinctness));
  kv("search.multistart", std::to_string(c.multistart));
  kv("search.psi_floor", format_double(c.psi_floor));
  kv("search.n_grad", std::to_string(c.n_grad));
  kv("search.start_scale", format_double(c.start_scale));
  kv("search.max_iter", std::to_string(c.search_max_iter));
  kv("search.path_segments", std::to_string(c.path_segments));
  kv("search.path_refinements", std::to_string(c.path_refinements));
  kv("search.branch_tol", format_double(c.branch_tol));
  kv("search.delta_max", format_double(c.delta_max));
  kv("search.linking_samples", std::to_string(c.linking_samples));
  kv("output.dir", c.output_dir);
  kv("check.override", c.check_override ? "true" : "false");
  return os.str();
}

}  // namespace hvi
