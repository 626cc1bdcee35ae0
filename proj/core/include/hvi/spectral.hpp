#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hvi {

inline constexpr double kPi = 3.14159265358979323846;

enum class DomainKind { interval, rectangle, grid1d };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Geometry of Z. `length` is used by interval and grid1d, `lx`/`ly` by
// rectangle. For grid1d, `n_grid` counts interior grid points; the mesh width
// is length / (n_grid + 1).
struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  double length = kPi;
  double lx = kPi;
  double ly = kPi;
  int n_grid = 0;

  static DomainSpec interval(double length);
  static DomainSpec rectangle(double lx, double ly);
  static DomainSpec grid1d(double length, int n_grid);

  int dimension() const { return kind == DomainKind::rectangle ? 2 : 1; }
  double measure() const;
  void validate() const;

  bool operator==(const DomainSpec&) const = default;
};

struct Mode {
  double eigenvalue = 0.0;
  int p = 0;  // wave number along x
  int q = 0;  // wave number along y (0 in 1D)
};

// Dirichlet eigenpairs of -Laplace on Z, L2-orthonormal, sorted by
// eigenvalue and grouped into distinct eigenvalues. Group indices exposed by
// the API are 1-based (group 1 holds lambda_1).
class EigenBasis {
 public:
  EigenBasis(DomainSpec domain, std::vector<Mode> modes, double grouping_tol,
             bool last_group_complete);

  const DomainSpec& domain() const { return domain_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t i) const { return modes_.at(i); }
  double eigenvalue(std::size_t i) const { return modes_.at(i).eigenvalue; }
  Eigen::VectorXd eigenvalues() const;

  std::size_t group_count() const { return groups_.size(); }
  // Groups whose full multiplicity is present in the basis.
  std::size_t complete_group_count() const;
  const std::vector<std::size_t>& group(int g) const;
  double group_eigenvalue(int g) const;
  int group_of_mode(std::size_t i) const;
  double grouping_tolerance() const { return grouping_tol_; }

  double value(std::size_t i, Point z) const;
  // Gradient of u_i; for grid1d the derivative of the piecewise-linear
  // interpolant.
  Point gradient(std::size_t i, Point z) const;
  int highest_wave_number(int axis) const;

 private:
  DomainSpec domain_;
  std::vector<Mode> modes_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<int> group_of_;
  double grouping_tol_;
  bool last_group_complete_;
};

// Relative tolerance used when none is given: 1e-9 analytic, 1e-6 grid1d.
double default_grouping_tolerance(DomainKind kind);

EigenBasis build_basis(const DomainSpec& domain, std::size_t n_max,
                       double grouping_tol = 0.0);

enum class QuadratureRule { automatic, gauss, collocation };

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(const std::string& name);

struct Quadrature {
  std::vector<Point> nodes;
  std::vector<double> weights;
  QuadratureRule rule = QuadratureRule::gauss;

  std::size_t size() const { return nodes.size(); }
  double integrate(std::span<const double> values) const;

  // Tensorized Gauss-Legendre with `per_dim` nodes per axis.
  static Quadrature gauss_legendre(const DomainSpec& domain, int nx, int ny = 0);
  // Trapezoid rule on `cells_x` (x `cells_y`) equal cells, endpoints included.
  static Quadrature trapezoid(const DomainSpec& domain, int cells_x,
                              int cells_y = 0);
  // Rule used by the solver for a given basis. Gauss uses 4x the highest wave
  // number plus 8 per axis unless `nodes_per_dim` overrides it; collocation uses
  // highest wave number + 1 cells (grid1d always uses its own grid).
  static Quadrature for_basis(const EigenBasis& basis, QuadratureRule rule,
                              int nodes_per_dim = 0);
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w);

// Function in H^1_0 as coefficients in the eigenbasis (one per mode).
class SpectralVector {
 public:
  SpectralVector() = default;
  explicit SpectralVector(std::size_t n) : c_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}
  explicit SpectralVector(Eigen::VectorXd c) : c_(std::move(c)) {}

  static SpectralVector unit(std::size_t n, std::size_t i, double scale = 1.0);

  std::size_t size() const { return static_cast<std::size_t>(c_.size()); }
  double operator[](std::size_t i) const { return c_(static_cast<Eigen::Index>(i)); }
  double& operator[](std::size_t i) { return c_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& coeffs() const { return c_; }
  Eigen::VectorXd& coeffs() { return c_; }

  double l2_norm() const { return c_.norm(); }
  double h1_seminorm(const EigenBasis& basis) const;
  bool finite() const { return c_.allFinite(); }

  // Copy with every coefficient outside `indices` set to zero.
  SpectralVector restricted(std::span<const std::size_t> indices) const;

  SpectralVector& operator+=(const SpectralVector& o) { c_ += o.c_; return *this; }
  SpectralVector& operator-=(const SpectralVector& o) { c_ -= o.c_; return *this; }
  SpectralVector& operator*=(double s) { c_ *= s; return *this; }
  friend SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
  friend SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
  friend SpectralVector operator*(double s, SpectralVector a) { return a *= s; }
  friend SpectralVector operator-(SpectralVector a) { a.c_ = -a.c_; return a; }
  bool operator==(const SpectralVector& o) const { return c_ == o.c_; }

 private:
  Eigen::VectorXd c_;
};

// H^1 seminorm distance between two coefficient vectors.
double h1_distance(const EigenBasis& basis, const SpectralVector& a,
                   const SpectralVector& b);

std::vector<double> evaluate(const EigenBasis& basis, const SpectralVector& x,
                             std::span<const Point> points);

// Values u_i(node_j), size modes x nodes.
Eigen::MatrixXd basis_values(const EigenBasis& basis, std::span<const Point> points);

// Index sets of the splitting H = Hbar + E(lambda_k) + Hhat_trunc and of
// Hbar_0 = Y + V. All index vectors hold 0-based mode indices in ascending
// order; k and m are 1-based distinct-eigenvalue indices.
struct SpaceDecomposition {
  int k = 1;
  int m = 1;
  std::vector<std::size_t> hbar;
  std::vector<std::size_t> ek;
  std::vector<std::size_t> hhat;
  std::vector<std::size_t> y;
  std::vector<std::size_t> v;
  std::vector<std::size_t> hbar0;
  std::size_t n_modes = 0;  // modes kept (|Hbar0| + |Hhat|)
  int last_group = 0;       // highest distinct group inside the truncation

  std::size_t dim_hbar0() const { return hbar0.size(); }
  std::size_t dim_hhat() const { return hhat.size(); }
};

// `n_trunc` is the total number of modes to keep; the truncation is rounded
// down to a complete distinct group and must contain group k + 1.
SpaceDecomposition decompose(const EigenBasis& basis, int k, int m,
                             std::size_t n_trunc);

using WeightFunction = std::function<double(Point)>;

struct CoercivityResult {
  double xi = 0.0;                // smallest generalized eigenvalue
  std::size_t modes_used = 0;     // size of the truncated Hhat_n
  int last_group = 0;
  bool positive = false;          // xi > 0 at this truncation
  bool beta_exceeds_gap = false;  // beta > lambda_{n+1} at some node
  bool beta_touches_gap = false;  // beta == lambda_{n+1} at every node
};

// min over truncated Hhat_n of (|grad x|^2 - int beta x^2) / |grad x|^2,
// computed from (Lambda - B) c = xi Lambda c. `n` is 1-based; `n_trunc` is the
// total mode count as in `decompose`.
CoercivityResult coercivity_constant(const EigenBasis& basis, int n,
                                     const WeightFunction& beta,
                                     std::size_t n_trunc, const Quadrature& quad);

}  // namespace hvi
