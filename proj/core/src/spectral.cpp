#include "hvi/spectral.hpp"

#include "hvi/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace hvi {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::grid1d: return "grid1d";
  }
  return "interval";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "interval") return DomainKind::interval;
  if (name == "rectangle") return DomainKind::rectangle;
  if (name == "grid1d") return DomainKind::grid1d;
  throw InvalidArgument("unknown domain kind '" + name + "'");
}

DomainSpec DomainSpec::interval(double length) {
  DomainSpec d;
  d.kind = DomainKind::interval;
  d.length = length;
  return d;
}

DomainSpec DomainSpec::rectangle(double lx, double ly) {
  DomainSpec d;
  d.kind = DomainKind::rectangle;
  d.lx = lx;
  d.ly = ly;
  return d;
}

DomainSpec DomainSpec::grid1d(double length, int n_grid) {
  DomainSpec d;
  d.kind = DomainKind::grid1d;
  d.length = length;
  d.n_grid = n_grid;
  return d;
}

double DomainSpec::measure() const {
  return kind == DomainKind::rectangle ? lx * ly : length;
}

void DomainSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  switch (kind) {
    case DomainKind::interval:
      if (!positive(length)) throw InvalidArgument("interval length must be positive");
      break;
    case DomainKind::rectangle:
      if (!positive(lx) || !positive(ly))
        throw InvalidArgument("rectangle side lengths must be positive");
      break;
    case DomainKind::grid1d:
      if (!positive(length)) throw InvalidArgument("grid1d length must be positive");
      if (n_grid < 3) throw InvalidArgument("grid1d needs n_grid >= 3");
      break;
  }
}

double default_grouping_tolerance(DomainKind kind) {
  return kind == DomainKind::grid1d ? 1e-6 : 1e-9;
}

EigenBasis::EigenBasis(DomainSpec domain, std::vector<Mode> modes, double grouping_tol,
                       bool last_group_complete)
    : domain_(domain),
      modes_(std::move(modes)),
      grouping_tol_(grouping_tol),
      last_group_complete_(last_group_complete) {
  group_of_.resize(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const double lam = modes_[i].eigenvalue;
    if (!groups_.empty()) {
      const double ref = modes_[groups_.back().front()].eigenvalue;
      if (std::abs(lam - ref) <= grouping_tol_ * std::abs(ref)) {
        groups_.back().push_back(i);
        group_of_[i] = static_cast<int>(groups_.size());
        continue;
      }
    }
    groups_.push_back({i});
    group_of_[i] = static_cast<int>(groups_.size());
  }
}

Eigen::VectorXd EigenBasis::eigenvalues() const {
  Eigen::VectorXd lam(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i)
    lam(static_cast<Eigen::Index>(i)) = modes_[i].eigenvalue;
  return lam;
}

std::size_t EigenBasis::complete_group_count() const {
  if (groups_.empty()) return 0;
  return last_group_complete_ ? groups_.size() : groups_.size() - 1;
}

const std::vector<std::size_t>& EigenBasis::group(int g) const {
  if (g < 1 || static_cast<std::size_t>(g) > groups_.size())
    throw InvalidArgument("distinct eigenvalue index " + std::to_string(g) +
                          " out of range (basis has " + std::to_string(groups_.size()) +
                          " groups)");
  return groups_[static_cast<std::size_t>(g - 1)];
}

double EigenBasis::group_eigenvalue(int g) const {
  return modes_[group(g).front()].eigenvalue;
}

int EigenBasis::group_of_mode(std::size_t i) const { return group_of_.at(i); }

namespace {

double grid_spacing(const DomainSpec& d) { return d.length / (d.n_grid + 1); }

double sine_mode(int p, double z, double length) {
  return std::sqrt(2.0 / length) * std::sin(p * kPi * z / length);
}

double sine_mode_derivative(int p, double z, double length) {
  const double w = p * kPi / length;
  return std::sqrt(2.0 / length) * w * std::cos(w * z);
}

}  // namespace

double EigenBasis::value(std::size_t i, Point z) const {
  const Mode& md = modes_.at(i);
  switch (domain_.kind) {
    case DomainKind::interval:
      return sine_mode(md.p, z.x, domain_.length);
    case DomainKind::rectangle:
      return sine_mode(md.p, z.x, domain_.lx) * sine_mode(md.q, z.y, domain_.ly);
    case DomainKind::grid1d: {
      // Piecewise-linear interpolant of the nodal eigenvector.
      const double h = grid_spacing(domain_);
      if (z.x <= 0.0 || z.x >= domain_.length) return 0.0;
      const double s = z.x / h;
      const double cell = std::floor(s);
      const double t = s - cell;
      const double a = sine_mode(md.p, cell * h, domain_.length);
      const double b = sine_mode(md.p, (cell + 1.0) * h, domain_.length);
      return t == 0.0 ? a : (1.0 - t) * a + t * b;
    }
  }
  return 0.0;
}

Point EigenBasis::gradient(std::size_t i, Point z) const {
  const Mode& md = modes_.at(i);
  switch (domain_.kind) {
    case DomainKind::interval:
      return {sine_mode_derivative(md.p, z.x, domain_.length), 0.0};
    case DomainKind::rectangle:
      return {sine_mode_derivative(md.p, z.x, domain_.lx) * sine_mode(md.q, z.y, domain_.ly),
              sine_mode(md.p, z.x, domain_.lx) * sine_mode_derivative(md.q, z.y, domain_.ly)};
    case DomainKind::grid1d: {
      const double h = grid_spacing(domain_);
      if (z.x < 0.0 || z.x > domain_.length) return {0.0, 0.0};
      const double cell = std::min(std::floor(z.x / h), static_cast<double>(domain_.n_grid));
      const double a = sine_mode(md.p, cell * h, domain_.length);
      const double b = sine_mode(md.p, (cell + 1.0) * h, domain_.length);
      return {(b - a) / h, 0.0};
    }
  }
  return {};
}

int EigenBasis::highest_wave_number(int axis) const {
  int best = 0;
  for (const Mode& md : modes_) best = std::max(best, axis == 0 ? md.p : md.q);
  return best;
}

EigenBasis build_basis(const DomainSpec& domain, std::size_t n_max, double grouping_tol) {
  domain.validate();
  if (n_max < 3) throw InvalidArgument("build_basis needs n_max >= 3");
  const double tol = grouping_tol > 0.0 ? grouping_tol : default_grouping_tolerance(domain.kind);

  std::vector<Mode> modes;
  bool complete = true;
  switch (domain.kind) {
    case DomainKind::interval: {
      for (std::size_t n = 1; n <= n_max; ++n) {
        const double w = static_cast<double>(n) * kPi / domain.length;
        modes.push_back({w * w, static_cast<int>(n), 0});
      }
      break;
    }
    case DomainKind::rectangle: {
      // Any mode among the first n_max has p, q <= n_max + 1.
      const int bound = static_cast<int>(n_max) + 1;
      std::vector<Mode> all;
      all.reserve(static_cast<std::size_t>(bound * bound));
      for (int p = 1; p <= bound; ++p) {
        for (int q = 1; q <= bound; ++q) {
          const double wx = p * kPi / domain.lx;
          const double wy = q * kPi / domain.ly;
          all.push_back({wx * wx + wy * wy, p, q});
        }
      }
      std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
        return std::tie(a.eigenvalue, a.p, a.q) < std::tie(b.eigenvalue, b.p, b.q);
      });
      modes.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_max));
      const double last = modes.back().eigenvalue;
      const double next = all[n_max].eigenvalue;
      complete = std::abs(next - last) > tol * std::abs(last);
      break;
    }
    case DomainKind::grid1d: {
      if (n_max > static_cast<std::size_t>(domain.n_grid))
        throw InvalidArgument("grid1d basis: n_max = " + std::to_string(n_max) +
                              " exceeds grid resolution n_grid = " +
                              std::to_string(domain.n_grid));
      const double h = grid_spacing(domain);
      const int cells = domain.n_grid + 1;
      for (std::size_t n = 1; n <= n_max; ++n) {
        const double s = std::sin(static_cast<double>(n) * kPi / (2.0 * cells));
        modes.push_back({4.0 / (h * h) * s * s, static_cast<int>(n), 0});
      }
      break;
    }
  }
  return EigenBasis(domain, std::move(modes), tol, complete);
}

std::string to_string(QuadratureRule rule) {
  switch (rule) {
    case QuadratureRule::automatic: return "auto";
    case QuadratureRule::gauss: return "gauss";
    case QuadratureRule::collocation: return "collocation";
  }
  return "auto";
}

QuadratureRule quadrature_rule_from_string(const std::string& name) {
  if (name == "auto") return QuadratureRule::automatic;
  if (name == "gauss") return QuadratureRule::gauss;
  if (name == "collocation") return QuadratureRule::collocation;
  throw InvalidArgument("unknown quadrature rule '" + name + "'");
}

double Quadrature::integrate(std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * values[i];
  return s;
}

void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre needs at least one node");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - t * t) * dp * dp);
    x[static_cast<std::size_t>(i)] = -t;
    x[static_cast<std::size_t>(n - 1 - i)] = t;
    w[static_cast<std::size_t>(i)] = wt;
    w[static_cast<std::size_t>(n - 1 - i)] = wt;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
}

namespace {

void map_rule(const std::vector<double>& x, const std::vector<double>& w, double length,
              std::vector<double>& z, std::vector<double>& wz) {
  z.resize(x.size());
  wz.resize(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = 0.5 * length * (x[i] + 1.0);
    wz[i] = 0.5 * length * w[i];
  }
}

void trapezoid_1d(int cells, double length, std::vector<double>& z, std::vector<double>& wz) {
  const double h = length / cells;
  z.resize(static_cast<std::size_t>(cells + 1));
  wz.assign(static_cast<std::size_t>(cells + 1), h);
  for (int i = 0; i <= cells; ++i) z[static_cast<std::size_t>(i)] = i * h;
  wz.front() = 0.5 * h;
  wz.back() = 0.5 * h;
}

Quadrature tensor(const std::vector<double>& zx, const std::vector<double>& wx,
                  const std::vector<double>& zy, const std::vector<double>& wy,
                  QuadratureRule rule) {
  Quadrature q;
  q.rule = rule;
  q.nodes.reserve(zx.size() * zy.size());
  q.weights.reserve(zx.size() * zy.size());
  for (std::size_t i = 0; i < zx.size(); ++i) {
    for (std::size_t j = 0; j < zy.size(); ++j) {
      q.nodes.push_back({zx[i], zy[j]});
      q.weights.push_back(wx[i] * wy[j]);
    }
  }
  return q;
}

}  // namespace

Quadrature Quadrature::gauss_legendre(const DomainSpec& domain, int nx, int ny) {
  domain.validate();
  std::vector<double> x, w, zx, wx;
  gauss_legendre_nodes(nx, x, w);
  if (domain.kind != DomainKind::rectangle) {
    map_rule(x, w, domain.length, zx, wx);
    return tensor(zx, wx, {0.0}, {1.0}, QuadratureRule::gauss);
  }
  map_rule(x, w, domain.lx, zx, wx);
  std::vector<double> zy, wy;
  gauss_legendre_nodes(ny > 0 ? ny : nx, x, w);
  map_rule(x, w, domain.ly, zy, wy);
  return tensor(zx, wx, zy, wy, QuadratureRule::gauss);
}

Quadrature Quadrature::trapezoid(const DomainSpec& domain, int cells_x, int cells_y) {
  domain.validate();
  if (cells_x < 1) throw InvalidArgument("trapezoid rule needs at least one cell");
  std::vector<double> zx, wx;
  if (domain.kind != DomainKind::rectangle) {
    trapezoid_1d(cells_x, domain.length, zx, wx);
    return tensor(zx, wx, {0.0}, {1.0}, QuadratureRule::collocation);
  }
  trapezoid_1d(cells_x, domain.lx, zx, wx);
  std::vector<double> zy, wy;
  trapezoid_1d(cells_y > 0 ? cells_y : cells_x, domain.ly, zy, wy);
  return tensor(zx, wx, zy, wy, QuadratureRule::collocation);
}

Quadrature Quadrature::for_basis(const EigenBasis& basis, QuadratureRule rule,
                                 int nodes_per_dim) {
  const DomainSpec& d = basis.domain();
  if (d.kind == DomainKind::grid1d) return trapezoid(d, d.n_grid + 1);
  if (rule == QuadratureRule::automatic)
    rule = d.kind == DomainKind::interval ? QuadratureRule::collocation : QuadratureRule::gauss;
  const int px = basis.highest_wave_number(0);
  const int py = basis.highest_wave_number(1);
  if (rule == QuadratureRule::collocation) {
    if (nodes_per_dim > 0) return trapezoid(d, nodes_per_dim, nodes_per_dim);
    return trapezoid(d, px + 1, py + 1);
  }
  if (nodes_per_dim > 0) return gauss_legendre(d, nodes_per_dim, nodes_per_dim);
  return gauss_legendre(d, 4 * px + 8, 4 * std::max(py, 1) + 8);
}

SpectralVector SpectralVector::unit(std::size_t n, std::size_t i, double scale) {
  SpectralVector v(n);
  v[i] = scale;
  return v;
}

double SpectralVector::h1_seminorm(const EigenBasis& basis) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += basis.eigenvalue(i) * (*this)[i] * (*this)[i];
  return std::sqrt(s);
}

SpectralVector SpectralVector::restricted(std::span<const std::size_t> indices) const {
  SpectralVector out(size());
  for (std::size_t i : indices) out[i] = (*this)[i];
  return out;
}

double h1_distance(const EigenBasis& basis, const SpectralVector& a, const SpectralVector& b) {
  return (a - b).h1_seminorm(basis);
}

std::vector<double> evaluate(const EigenBasis& basis, const SpectralVector& x,
                             std::span<const Point> points) {
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t j = 0; j < points.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != 0.0) s += x[i] * basis.value(i, points[j]);
    }
    out[j] = s;
  }
  return out;
}

Eigen::MatrixXd basis_values(const EigenBasis& basis, std::span<const Point> points) {
  Eigen::MatrixXd u(static_cast<Eigen::Index>(basis.size()),
                    static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j)
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = basis.value(i, points[j]);
  return u;
}

namespace {

// Highest complete group whose modes all lie below `n_trunc`.
int last_complete_group(const EigenBasis& basis, std::size_t n_trunc) {
  int last = 0;
  for (int g = 1; g <= static_cast<int>(basis.complete_group_count()); ++g) {
    if (basis.group(g).back() < n_trunc) last = g;
    else break;
  }
  return last;
}

void append_groups(const EigenBasis& basis, int from, int to, std::vector<std::size_t>& out) {
  for (int g = from; g <= to; ++g) {
    const auto& grp = basis.group(g);
    out.insert(out.end(), grp.begin(), grp.end());
  }
}

}  // namespace

SpaceDecomposition decompose(const EigenBasis& basis, int k, int m, std::size_t n_trunc) {
  if (m < 1 || m > k)
    throw InvalidArgument("decompose: need 1 <= m <= k (got m = " + std::to_string(m) +
                          ", k = " + std::to_string(k) + ")");
  n_trunc = std::min(n_trunc, basis.size());
  const int last = last_complete_group(basis, n_trunc);
  if (last < k + 1)
    throw InvalidArgument("decompose: distinct group k + 1 = " + std::to_string(k + 1) +
                          " is not available within the truncation (Hhat would be empty)");
  SpaceDecomposition d;
  d.k = k;
  d.m = m;
  d.last_group = last;
  append_groups(basis, 1, k - 1, d.hbar);
  append_groups(basis, k, k, d.ek);
  append_groups(basis, k + 1, last, d.hhat);
  append_groups(basis, 1, m - 1, d.y);
  append_groups(basis, m, k, d.v);
  append_groups(basis, 1, k, d.hbar0);
  d.n_modes = d.hbar0.size() + d.hhat.size();
  return d;
}

CoercivityResult coercivity_constant(const EigenBasis& basis, int n, const WeightFunction& beta,
                                     std::size_t n_trunc, const Quadrature& quad) {
  if (n < 1) throw InvalidArgument("coercivity_constant: n must be >= 1");
  n_trunc = std::min(n_trunc, basis.size());
  const int last = last_complete_group(basis, n_trunc);
  if (last < n + 1)
    throw InvalidArgument("coercivity_constant: group n + 1 not inside the truncation");

  std::vector<std::size_t> idx;
  append_groups(basis, n + 1, last, idx);
  const auto dim = static_cast<Eigen::Index>(idx.size());

  std::vector<double> bw(quad.size());
  const double gap = basis.group_eigenvalue(n + 1);
  CoercivityResult res;
  res.beta_touches_gap = true;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double b = beta(quad.nodes[q]);
    if (b > gap * (1.0 + 1e-12)) res.beta_exceeds_gap = true;
    if (std::abs(b - gap) > 1e-12 * gap) res.beta_touches_gap = false;
    bw[q] = b * quad.weights[q];
  }

  Eigen::MatrixXd u(dim, static_cast<Eigen::Index>(quad.size()));
  for (Eigen::Index a = 0; a < dim; ++a)
    for (std::size_t q = 0; q < quad.size(); ++q)
      u(a, static_cast<Eigen::Index>(q)) = basis.value(idx[static_cast<std::size_t>(a)], quad.nodes[q]);

  const Eigen::Map<const Eigen::VectorXd> bwv(bw.data(), static_cast<Eigen::Index>(bw.size()));
  Eigen::MatrixXd b = u * bwv.asDiagonal() * u.transpose();
  Eigen::VectorXd inv_sqrt(dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    inv_sqrt(a) = 1.0 / std::sqrt(basis.eigenvalue(idx[static_cast<std::size_t>(a)]));
  Eigen::MatrixXd s = -(inv_sqrt.asDiagonal() * b * inv_sqrt.asDiagonal());
  s.diagonal().array() += 1.0;
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);

  res.xi = eig.eigenvalues()(0);
  res.modes_used = idx.size();
  res.last_group = last;
  res.positive = res.xi > 1e-12;
  return res;
}

}  // namespace hvi
