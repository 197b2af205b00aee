#pragma once

// Truncated velocity lattice, scalar fields on it, Maxwellians, fluid
// moments, the macroscopic basis and its projections.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hydrolimit/euler_riemann.hpp"

namespace hydrolimit {

/// Uniform tensor lattice of N^3 cell centres covering center + [-L, L]^3,
/// spacing h = 2L/N, equal weights h^3. N even, so the centre itself is not a
/// node and the lattice is symmetric under v - center -> -(v - center).
class VelocityGrid {
 public:
  VelocityGrid(double half_width, int n_per_axis, Vec3 center = {0.0, 0.0, 0.0});

  [[nodiscard]] double half_width() const { return L_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  [[nodiscard]] double spacing() const { return h_; }
  [[nodiscard]] double weight() const { return h_ * h_ * h_; }
  [[nodiscard]] const Vec3& center() const { return center_; }

  /// Coordinate along `axis` of lattice index k.
  [[nodiscard]] double coord(int axis, int k) const { return center_[axis] - L_ + (k + 0.5) * h_; }
  [[nodiscard]] std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  [[nodiscard]] Vec3 node(std::size_t idx) const;

  bool operator==(const VelocityGrid& o) const = default;

 private:
  double L_;
  int n_;
  Vec3 center_;
  double h_;
};

/// Values of a scalar function at the nodes of a grid.
struct GridFunction {
  VelocityGrid grid;
  std::vector<double> values;

  explicit GridFunction(const VelocityGrid& g) : grid(g), values(g.size(), 0.0) {}
  GridFunction(const VelocityGrid& g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  [[nodiscard]] std::size_t size() const { return values.size(); }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);
  [[nodiscard]] bool all_finite() const;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Throws ConfigError if the grids differ.
void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where);

/// Quadrature of f g over the lattice.
double inner(const GridFunction& f, const GridFunction& g);
double integral(const GridFunction& f);
double sup_norm(const GridFunction& f);
/// sqrt(sum f^2 w)
double l2_norm(const GridFunction& f);

/// Number of thermal radii sqrt(R theta) that fit between u and the nearest
/// face of the box.
double thermal_margin(const GasState& s, const VelocityGrid& g);

/// M_[rho,u,theta](v). Emits a warning when fewer than six thermal radii fit.
GridFunction maxwellian(const GasState& s, const VelocityGrid& g);
/// Global Maxwellian mu = M_[1,0,3/2].
GridFunction global_maxwellian(const VelocityGrid& g);
GasState reference_state();

/// Fluid moments (rho, u, theta) with e = theta. Throws DomainError when the
/// density or temperature is not positive.
GasState moments(const GridFunction& f);
/// The five raw moments int psi_i F for psi = 1, v1, v2, v3, |v|^2/2.
std::array<double, 5> conserved_moments(const GridFunction& f);

/// chi_i and chi_i / M (a polynomial, evaluated without dividing by M).
struct MacroBasis {
  GasState state;
  std::array<GridFunction, 5> chi;
  std::array<GridFunction, 5> chi_over_m;
};

MacroBasis macro_basis(const GasState& s, const VelocityGrid& g);

/// Coefficients <h, chi_i / M>.
std::array<double, 5> macro_coefficients(const GridFunction& h, const MacroBasis& basis);
GridFunction project_P0(const GridFunction& h, const MacroBasis& basis);
GridFunction project_P1(const GridFunction& h, const MacroBasis& basis);

/// <v>^{gamma+2}
double weight_w(const Vec3& v, double gamma);

/// sigma^{ij} at every node, stored as the six independent entries
/// (11, 22, 33, 12, 13, 23).
struct CollisionCoeffs {
  VelocityGrid grid;
  double gamma = -3.0;
  std::array<std::vector<double>, 6> sigma;

  [[nodiscard]] double entry(int i, int j, std::size_t node) const;
};

/// Centred-difference gradient along `axis`, second-order one-sided at the
/// faces of the box.
std::vector<double> gradient(const GridFunction& f, int axis);

/// |h|_{sigma,l}^2 = sum_ij int w^{2l} (sigma^ij d_i h d_j h + sigma^ij v_i v_j h^2 / 4).
double sigma_norm_squared(const GridFunction& h, const CollisionCoeffs& c, int ell);
double sigma_norm(const GridFunction& h, const CollisionCoeffs& c, int ell);

/// Square of the equivalent norm
/// |<v>^{(gamma+2)/2} h|^2 + |<v>^{gamma/2} grad h . v/|v||^2 + |<v>^{(gamma+2)/2} grad h x v/|v||^2.
double sigma_equivalent_squared(const GridFunction& h, double gamma);

/// || (M1 - M2) / sqrt(mu) ||_{L^2_v} in closed form. Throws DomainError
/// when a Gaussian integral diverges (temperature too far above 3/2).
double maxwellian_l2mu_distance(const GasState& s1, const GasState& s2);

/// Serialization with a (L, N, gamma, center) header.
void write_grid_function_csv(std::ostream& os, const GridFunction& f, double gamma);
GridFunction read_grid_function_csv(std::istream& is, double* gamma = nullptr);
void write_grid_function_binary(std::ostream& os, const GridFunction& f, double gamma);
GridFunction read_grid_function_binary(std::istream& is, double* gamma = nullptr);

}  // namespace hydrolimit
