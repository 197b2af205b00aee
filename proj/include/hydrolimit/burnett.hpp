#pragma once

// Burnett functions A_hat_j, B_hat_ij, their microscopic preimages
// A_j = L_M^{-1}(A_hat_j M), B_ij = L_M^{-1}(B_hat_ij M), the transport
// coefficients built from them, and the correction field G_bar.

#include <string>
#include <vector>

#include "hydrolimit/burgers_wave.hpp"
#include "hydrolimit/landau.hpp"
#include "hydrolimit/velocity_grid.hpp"

namespace hydrolimit {

/// A_hat_j(xi) = (|xi|^2 - 5)/2 xi_j
double burnett_A_hat(const Vec3& xi, int j);
/// B_hat_ij(xi) = xi_i xi_j - delta_ij |xi|^2 / 3
double burnett_B_hat(const Vec3& xi, int i, int j);

/// Grid centred at u with half-width `radii` sqrt(R theta) per axis.
VelocityGrid thermal_grid(const GasState& s, int n, double radii = 8.0);

/// Polynomials A_hat_j, B_hat_ij at xi = (v - u)/sqrt(R theta) on the grid,
/// and the same multiplied by M (the sources of the inverse problems).
struct BurnettHats {
  std::vector<GridFunction> a_poly;  // 3
  std::vector<GridFunction> b_poly;  // 9, row-major (i, j)
  std::vector<GridFunction> a_src;
  std::vector<GridFunction> b_src;
};

BurnettHats burnett_hats(const GasState& s, const VelocityGrid& g);

struct BurnettOptions {
  int n = 32;
  double radii = 8.0;
  KernelParams kernel{};
  InverseOptions inverse{};
  /// Solve every component instead of generating A_2, A_3, B_22, ... from
  /// A_1, B_11, B_12 by axis permutations.
  bool solve_all = false;
};

struct ComponentSolve {
  std::string name;
  int iterations = 0;
  /// |L_M g - src| / |src| recomputed from the stored solution (M^{-1}-weighted).
  double residual = 0.0;
  bool solved = false;  ///< false: produced by permutation
};

struct BurnettSolution {
  GasState state;
  VelocityGrid grid;
  BurnettHats hats;
  std::vector<GridFunction> A;  // 3
  std::vector<GridFunction> B;  // 9
  double mu_theta = 0.0;
  double kappa_theta = 0.0;
  /// sup|Q(M,M)| / sup|L_M(B_hat_12 M)|: the relative size of the discrete
  /// equilibrium defect, used as the grid part of every tolerance.
  double grid_defect = 0.0;
  double solver_tol = 0.0;
  std::vector<ComponentSolve> solves;

  [[nodiscard]] const GridFunction& b(int i, int j) const { return B[3 * i + j]; }
};

/// Throws whatever invert_LM_micro throws for the failing component.
BurnettSolution burnett_solve(const GasState& s, const BurnettOptions& opt = {});

/// <A_hat_i, A_j>, <A_hat_i, B_jk>, <B_hat_ij, B_kl> (plain L^2_v pairing).
double pair_AA(const BurnettSolution& sol, int i, int j);
double pair_AB(const BurnettSolution& sol, int i, int j, int k);
double pair_BB(const BurnettSolution& sol, int i, int j, int k, int l);

struct PropertyItem {
  std::string name;
  double value = 0.0;
  /// Relative defect (scaled by the natural size of the quantity).
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct PropertyReport {
  std::vector<PropertyItem> items;
  [[nodiscard]] bool all_pass() const;
};

/// Every bullet of the Burnett property list, each with its defect against
/// tolerance = solver_tol + grid_defect (times `slack`).
PropertyReport burnett_property_check(const BurnettSolution& sol, double slack = 1.0);

struct DecayEntry {
  double epsilon = 0.0;
  /// Smallest C with |A_j| + |B_ij| <= C M^{1-eps} on the nodes inside the ball.
  double constant = 0.0;
  /// |xi| where the ratio peaks.
  double argmax_radius = 0.0;
};

/// Pointwise decay check on the nodes with |xi| <= ball_radii.
std::vector<DecayEntry> decay_check(const BurnettSolution& sol, const std::vector<double>& epsilons,
                                    double ball_radii = 6.0);

/// G_bar = eps^{1-a} [ (sqrt(R) theta_y / sqrt(theta)) A_1 + u1_y B_11 ] at the
/// physical point (t, x), with d/dy = eps^a d/dx. `s` must equal sol.state.
GridFunction gbar_construct(const SmoothWave& w, double t, double x, const GasState& s, double eps, double a,
                            const BurnettSolution& sol);

/// Same from the gradients directly.
GridFunction gbar_from_gradients(double u1_y, double theta_y, double eps, double a, const BurnettSolution& sol);

void write_property_report(std::ostream& os, const PropertyReport& r);

}  // namespace hydrolimit
